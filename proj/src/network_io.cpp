#include "ldbounds/network_io.hpp"

#include <fstream>
#include <string>

#include "json.hpp"
#include "ldbounds/error.hpp"

namespace ldb {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("network file is missing \"") + key + "\"");
  return *it;
}

std::vector<double> number_array(const json& node, const std::string& what) {
  if (!node.is_array()) throw ParseError(what + " must be an array");
  std::vector<double> values;
  values.reserve(node.size());
  for (const json& v : node) {
    if (!v.is_number()) throw ParseError(what + " must contain only numbers");
    values.push_back(v.get<double>());
  }
  return values;
}

std::size_t count_field(const json& obj, const char* key) {
  const json& node = require(obj, key);
  if (!node.is_number_unsigned()) {
    throw ParseError(std::string("\"") + key + "\" must be a nonnegative integer");
  }
  return node.get<std::size_t>();
}

json parse_document(std::istream& in, const char* what) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

}  // namespace

void save_network(const TwoLayerNetwork& net, std::ostream& out) {
  json doc;
  doc["transfer"] = std::string(net.transfer().name());
  doc["n_inputs"] = net.n_inputs();
  doc["n_outputs"] = net.n_outputs();
  doc["tau"] = net.tau_rows();
  doc["bias"] = std::vector<double>(net.bias().begin(), net.bias().end());
  doc["offset"] = std::vector<double>(net.offset().begin(), net.offset().end());
  if (net.weight_scale() != net.n_inputs()) doc["weight_scale"] = net.weight_scale();
  out << doc.dump(2) << '\n';
}

TwoLayerNetwork load_network(std::istream& in) {
  const json doc = parse_document(in, "network file");
  if (!doc.is_object()) throw ParseError("network file must be a JSON object");

  const json& transfer_node = require(doc, "transfer");
  if (!transfer_node.is_string()) throw ParseError("\"transfer\" must be a string");
  const TransferFunction transfer = TransferFunction::from_name(transfer_node.get<std::string>());

  const std::size_t n = count_field(doc, "n_inputs");
  const std::size_t m = count_field(doc, "n_outputs");

  const json& tau_node = require(doc, "tau");
  if (!tau_node.is_array()) throw ParseError("\"tau\" must be an array of rows");
  std::vector<std::vector<double>> tau;
  for (std::size_t i = 0; i < tau_node.size(); ++i) {
    tau.push_back(number_array(tau_node[i], "tau row " + std::to_string(i)));
  }
  std::vector<double> bias = number_array(require(doc, "bias"), "\"bias\"");
  std::vector<double> offset;
  if (auto it = doc.find("offset"); it != doc.end()) offset = number_array(*it, "\"offset\"");

  if (tau.size() != m) {
    throw InvalidArgument("\"tau\" has " + std::to_string(tau.size()) + " rows but n_outputs is " +
                          std::to_string(m));
  }
  if (bias.size() != n) {
    throw InvalidArgument("\"bias\" has " + std::to_string(bias.size()) +
                          " entries but n_inputs is " + std::to_string(n));
  }
  std::size_t scale = n;
  if (doc.contains("weight_scale")) scale = count_field(doc, "weight_scale");
  return TwoLayerNetwork::build(tau, std::move(bias), std::move(offset), transfer, scale);
}

void save_network(const TwoLayerNetwork& net, const std::filesystem::path& path) {
  auto out = open_out(path);
  save_network(net, out);
}

TwoLayerNetwork load_network(const std::filesystem::path& path) {
  auto in = open_in(path);
  return load_network(in);
}

void save_evidence(const Evidence& evidence, std::ostream& out) {
  json doc = json::array();
  for (const Finding& f : evidence.findings()) {
    doc.push_back({{"output", f.output}, {"value", f.value ? 1 : 0}});
  }
  out << doc.dump() << '\n';
}

Evidence load_evidence(std::istream& in) {
  const json doc = parse_document(in, "evidence file");
  if (!doc.is_array()) throw ParseError("evidence file must be a JSON array");
  std::vector<Finding> findings;
  for (const json& item : doc) {
    if (!item.is_object()) throw ParseError("evidence entries must be objects");
    auto out_it = item.find("output");
    auto val_it = item.find("value");
    if (out_it == item.end() || val_it == item.end()) {
      throw ParseError("evidence entries need \"output\" and \"value\"");
    }
    if (!out_it->is_number_unsigned()) throw ParseError("\"output\" must be a nonnegative integer");
    if (!val_it->is_number_integer() || (val_it->get<int>() != 0 && val_it->get<int>() != 1)) {
      throw ParseError("\"value\" must be 0 or 1");
    }
    findings.push_back({out_it->get<std::size_t>(), val_it->get<int>() == 1});
  }
  return Evidence(std::move(findings));
}

void save_evidence(const Evidence& evidence, const std::filesystem::path& path) {
  auto out = open_out(path);
  save_evidence(evidence, out);
}

Evidence load_evidence(const std::filesystem::path& path) {
  auto in = open_in(path);
  return load_evidence(in);
}

}  // namespace ldb
