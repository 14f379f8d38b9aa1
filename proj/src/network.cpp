#include "ldbounds/network.hpp"

#include <cmath>
#include <set>
#include <string>

#include "ldbounds/error.hpp"
#include "ldbounds/large_deviation.hpp"

namespace ldb {

TwoLayerNetwork::TwoLayerNetwork(std::size_t n_inputs, std::size_t n_outputs,
                                 std::size_t weight_scale, std::vector<double> tau,
                                 std::vector<double> bias, std::vector<double> offset,
                                 TransferFunction transfer)
    : n_inputs_(n_inputs),
      n_outputs_(n_outputs),
      weight_scale_(weight_scale),
      tau_(std::move(tau)),
      bias_(std::move(bias)),
      offset_(std::move(offset)),
      transfer_(transfer) {}

TwoLayerNetwork TwoLayerNetwork::build(const std::vector<std::vector<double>>& tau,
                                       std::vector<double> bias, std::vector<double> offset,
                                       TransferFunction transfer) {
  const std::size_t scale = bias.size();
  return build(tau, std::move(bias), std::move(offset), transfer, scale);
}

TwoLayerNetwork TwoLayerNetwork::build(const std::vector<std::vector<double>>& tau,
                                       std::vector<double> bias, std::vector<double> offset,
                                       TransferFunction transfer, std::size_t weight_scale) {
  const std::size_t m = tau.size();
  const std::size_t n = bias.size();
  if (m == 0) throw InvalidArgument("network needs at least one output");
  if (n == 0) throw InvalidArgument("network needs at least one input");
  if (weight_scale < n) {
    throw InvalidArgument("weight scale " + std::to_string(weight_scale) +
                          " is smaller than the input count " + std::to_string(n));
  }
  std::vector<double> flat;
  flat.reserve(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    if (tau[i].size() != n) {
      throw InvalidArgument("tau row " + std::to_string(i) + " has " +
                            std::to_string(tau[i].size()) + " entries, expected " +
                            std::to_string(n));
    }
    flat.insert(flat.end(), tau[i].begin(), tau[i].end());
  }
  if (offset.empty()) offset.assign(m, 0.0);
  if (offset.size() != m) {
    throw InvalidArgument("offset has " + std::to_string(offset.size()) +
                          " entries, expected " + std::to_string(m));
  }
  TwoLayerNetwork net(n, m, weight_scale, std::move(flat), std::move(bias), std::move(offset),
                      transfer);
  net.validate();
  return net;
}

void TwoLayerNetwork::validate() const {
  const bool noisy_or = transfer_.kind() == TransferKind::noisy_or;
  for (std::size_t i = 0; i < n_outputs_; ++i) {
    for (std::size_t j = 0; j < n_inputs_; ++j) {
      const double t = tau(i, j);
      if (!std::isfinite(t)) {
        throw InvalidArgument("tau[" + std::to_string(i) + "][" + std::to_string(j) +
                              "] is not finite");
      }
      if (noisy_or && t < 0.0) {
        throw InvalidArgument("noisy_or network has negative weight tau[" + std::to_string(i) +
                              "][" + std::to_string(j) + "]");
      }
    }
    if (!std::isfinite(offset_[i])) {
      throw InvalidArgument("offset[" + std::to_string(i) + "] is not finite");
    }
    if (noisy_or && offset_[i] < 0.0) {
      throw InvalidArgument("noisy_or network has negative offset[" + std::to_string(i) + "]");
    }
  }
  for (std::size_t j = 0; j < n_inputs_; ++j) {
    if (!(bias_[j] >= 0.0 && bias_[j] <= 1.0)) {
      throw InvalidArgument("bias[" + std::to_string(j) + "] outside [0, 1]");
    }
  }
}

std::vector<std::vector<double>> TwoLayerNetwork::tau_rows() const {
  std::vector<std::vector<double>> rows(n_outputs_);
  for (std::size_t i = 0; i < n_outputs_; ++i) {
    auto row = tau_row(i);
    rows[i].assign(row.begin(), row.end());
  }
  return rows;
}

double TwoLayerNetwork::mean(std::size_t i) const {
  double sum = 0.0;
  auto row = tau_row(i);
  for (std::size_t j = 0; j < n_inputs_; ++j) sum += row[j] * bias_[j];
  return offset_[i] + sum / static_cast<double>(weight_scale_);
}

double TwoLayerNetwork::chi_squared(std::size_t i) const {
  return ldb::chi_squared(tau_row(i), bias_, weight_scale_);
}

double TwoLayerNetwork::weighted_sum(std::size_t i, std::span<const std::uint8_t> inputs) const {
  double sum = 0.0;
  auto row = tau_row(i);
  for (std::size_t j = 0; j < n_inputs_; ++j) {
    if (inputs[j]) sum += row[j];
  }
  return offset_[i] + sum / static_cast<double>(weight_scale_);
}

Evidence::Evidence(std::vector<Finding> findings) : findings_(std::move(findings)) {
  if (findings_.empty()) throw InvalidArgument("evidence must contain at least one finding");
  std::set<std::size_t> seen;
  for (const Finding& f : findings_) {
    if (!seen.insert(f.output).second) {
      throw InvalidArgument("output " + std::to_string(f.output) + " observed twice");
    }
  }
}

void Evidence::check_against(const TwoLayerNetwork& net) const {
  if (findings_.empty()) throw InvalidArgument("evidence must contain at least one finding");
  for (const Finding& f : findings_) {
    if (f.output >= net.n_outputs()) {
      throw InvalidArgument("evidence refers to output " + std::to_string(f.output) +
                            " but the network has " + std::to_string(net.n_outputs()) +
                            " outputs");
    }
  }
}

Evidence full_evidence(std::span<const std::uint8_t> bits) {
  std::vector<Finding> findings;
  findings.reserve(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) findings.push_back({i, bits[i] != 0});
  return Evidence(std::move(findings));
}

TwoLayerNetwork random_network(std::size_t n_inputs, std::size_t n_outputs, double bias_value,
                               TransferFunction transfer, std::uint64_t seed) {
  if (n_inputs == 0 || n_outputs == 0) {
    throw InvalidArgument("random_network: sizes must be positive");
  }
  if (!(bias_value >= 0.0 && bias_value <= 1.0)) {
    throw InvalidArgument("random_network: bias outside [0, 1]");
  }
  Rng rng(seed);
  const bool nonnegative = transfer.kind() == TransferKind::noisy_or;
  std::vector<std::vector<double>> tau(n_outputs, std::vector<double>(n_inputs));
  for (auto& row : tau) {
    for (double& t : row) {
      t = rng.normal();
      if (nonnegative) t = std::fabs(t);
    }
  }
  return TwoLayerNetwork::build(tau, std::vector<double>(n_inputs, bias_value), {}, transfer);
}

TwoLayerNetwork clamp_input(const TwoLayerNetwork& net, std::size_t j, bool value) {
  const std::size_t n = net.n_inputs();
  const std::size_t m = net.n_outputs();
  if (j >= n) {
    throw InvalidArgument("clamp_input: input " + std::to_string(j) + " out of range (N = " +
                          std::to_string(n) + ")");
  }
  std::vector<double> tau;
  tau.reserve(m * (n - 1));
  std::vector<double> offset(net.offset().begin(), net.offset().end());
  for (std::size_t i = 0; i < m; ++i) {
    auto row = net.tau_row(i);
    for (std::size_t k = 0; k < n; ++k) {
      if (k != j) tau.push_back(row[k]);
    }
    if (value) offset[i] += net.weight(i, j);
  }
  std::vector<double> bias;
  bias.reserve(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    if (k != j) bias.push_back(net.bias()[k]);
  }
  return TwoLayerNetwork(n - 1, m, net.weight_scale(), std::move(tau), std::move(bias),
                         std::move(offset), net.transfer());
}

JointSample sample_joint(const TwoLayerNetwork& net, Rng& rng) {
  JointSample s;
  s.inputs.resize(net.n_inputs());
  s.outputs.resize(net.n_outputs());
  for (std::size_t j = 0; j < net.n_inputs(); ++j) s.inputs[j] = rng.bernoulli(net.bias()[j]);
  for (std::size_t i = 0; i < net.n_outputs(); ++i) {
    const double p = net.transfer().eval(net.weighted_sum(i, s.inputs));
    s.outputs[i] = rng.bernoulli(p);
  }
  return s;
}

}  // namespace ldb
