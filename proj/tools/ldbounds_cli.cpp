// Command-line front end: network generation, exact inference, bounds,
// posterior intervals, bound optimization, the scaling experiment and the
// validation suites.
//
// Exit status: 0 success, 1 computation error, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "ldbounds/bounds.hpp"
#include "ldbounds/error.hpp"
#include "ldbounds/exact.hpp"
#include "ldbounds/experiment.hpp"
#include "ldbounds/network_io.hpp"
#include "ldbounds/optimizer.hpp"
#include "ldbounds/validation.hpp"

namespace {

using namespace ldb;

constexpr int kComputationError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void print_value(std::ostream& out, std::string_view key, double v) {
  out << fmt::format("{:<14} {:.17g}\n", key, v);
}

std::vector<std::size_t> parse_grid(const std::string& text) {
  std::vector<std::size_t> grid;
  try {
    if (text.find(':') != std::string::npos) {
      std::vector<std::size_t> parts;
      std::stringstream ss(text);
      for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(std::stoul(tok));
      if (parts.size() != 3 || parts[2] == 0) throw UsageError("--n expects start:stop:step");
      for (std::size_t n = parts[0]; n <= parts[1]; n += parts[2]) grid.push_back(n);
    } else {
      std::stringstream ss(text);
      for (std::string tok; std::getline(ss, tok, ',');) grid.push_back(std::stoul(tok));
    }
  } catch (const std::logic_error&) {
    throw UsageError("cannot parse N grid '" + text + "'");
  }
  return grid;
}

EpsilonVector parse_eps(const std::string& text) {
  EpsilonVector eps;
  std::stringstream ss(text);
  try {
    for (std::string tok; std::getline(ss, tok, ',');) eps.values.push_back(std::stod(tok));
  } catch (const std::logic_error&) {
    throw UsageError("cannot parse --eps '" + text + "'");
  }
  return eps;
}

void print_bounds(std::ostream& out, const BoundsResult& b) {
  print_value(out, "log_lower", b.log_lower);
  print_value(out, "log_upper", b.log_upper);
  print_value(out, "lower", b.lower());
  print_value(out, "upper", b.upper());
  print_value(out, "log_gap", b.log_upper - b.log_lower);
  print_value(out, "S", b.throwaway);
}

void print_eps(std::ostream& out, std::string_view key, const EpsilonVector& eps) {
  out << fmt::format("{:<14}", key);
  for (double e : eps.values) out << fmt::format(" {:.17g}", e);
  out << '\n';
}

// Writes to the file if a path is given, otherwise to stdout.
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  fn(out);
}

EvidenceMode parse_mode(const std::string& s) {
  return s == "forward_sampled" ? EvidenceMode::forward_sampled : EvidenceMode::uniform_random;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Large-deviation bounds for two-layer sigmoid and noisy-OR belief networks"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string network_path, evidence_path, out_path;
  double gamma = 2.0;
  std::size_t max_inputs = EnumerationLimit{}.max_inputs;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Seed for all randomness (default 0)");
  };
  auto add_inputs = [&](CLI::App* cmd) {
    cmd->add_option("--network", network_path, "Network JSON file")->required();
    cmd->add_option("--evidence", evidence_path, "Evidence JSON file")->required();
  };
  const std::vector<std::string> transfers{"sigmoid", "noisy_or"};
  const std::vector<std::string> modes{"uniform_random", "forward_sampled"};

  // generate
  auto* gen = app.add_subcommand("generate", "Write a random Gaussian network (and evidence)");
  std::size_t gen_inputs = 50, gen_outputs = 25;
  double gen_bias = 0.5;
  std::string gen_transfer = "sigmoid", gen_mode = "uniform_random", gen_evidence_out;
  gen->add_option("--inputs", gen_inputs, "Number of inputs N")->check(CLI::PositiveNumber);
  gen->add_option("--outputs", gen_outputs, "Number of outputs M")->check(CLI::PositiveNumber);
  gen->add_option("--bias", gen_bias, "Common input bias p_j")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--transfer", gen_transfer, "sigmoid | noisy_or")
      ->check(CLI::IsMember(transfers));
  gen->add_option("--out", out_path, "Network output file (default stdout)");
  gen->add_option("--evidence-out", gen_evidence_out, "Also write evidence on all outputs here");
  gen->add_option("--evidence-mode", gen_mode, "uniform_random | forward_sampled")
      ->check(CLI::IsMember(modes));
  add_seed(gen);

  // exact
  auto* exact = app.add_subcommand("exact", "Exact marginal by enumeration over all inputs");
  add_inputs(exact);
  exact->add_option("--max-inputs", max_inputs, "Enumeration limit on N");
  add_seed(exact);

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Upper and lower bounds at fixed or given eps");
  std::string eps_text;
  add_inputs(bounds);
  bounds->add_option("--gamma", gamma, "gamma of the fixed-eps choice (> 1)");
  bounds->add_option("--eps", eps_text, "Comma-separated eps, one per finding (overrides --gamma)");
  add_seed(bounds);

  // posterior
  auto* post = app.add_subcommand("posterior", "Interval for Pr[X_j = 1 | evidence]");
  std::size_t post_input = 0;
  bool post_optimize = false, post_exact = false;
  add_inputs(post);
  post->add_option("--input", post_input, "Input index j")->required();
  post->add_option("--gamma", gamma, "gamma of the fixed-eps choice (> 1)");
  post->add_flag("--optimize", post_optimize, "Optimize eps on each clamped network");
  post->add_flag("--exact", post_exact, "Also print the exact posterior");
  post->add_option("--max-inputs", max_inputs, "Enumeration limit on N for --exact");
  add_seed(post);

  // optimize
  auto* opt = app.add_subcommand("optimize", "Optimize eps for the tightest bounds");
  std::string target = "both";
  OptimizerConfig opt_config;
  add_inputs(opt);
  opt->add_option("--target", target, "upper | lower | both")
      ->check(CLI::IsMember({"upper", "lower", "both"}));
  opt->add_option("--gamma", gamma, "gamma of the initial fixed-eps point (> 1)");
  opt->add_option("--max-iters", opt_config.max_iters, "Iteration cap");
  opt->add_option("--tol", opt_config.rel_tol, "Relative objective change for convergence");
  opt->add_option("--restarts", opt_config.restarts, "Extra randomly rescaled starts");
  add_seed(opt);

  // experiment
  auto* expt = app.add_subcommand("experiment", "Gap-versus-N scaling experiment (CSV)");
  ExperimentConfig expt_config;
  std::string grid_text = "50:1000:50", expt_transfer = "sigmoid", expt_mode = "uniform_random",
              summary_path;
  unsigned threads = 1;
  expt->add_option("--n", grid_text, "N grid as start:stop:step or a comma list");
  expt->add_option("--m", expt_config.m_outputs, "Number of outputs M (all observed)");
  expt->add_option("--trials", expt_config.trials, "Random networks per N");
  expt->add_option("--gamma", gamma, "gamma of the fixed-eps curve and optimizer start (> 1)");
  expt->add_option("--bias", expt_config.bias_value, "Common input bias")
      ->check(CLI::Range(0.0, 1.0));
  expt->add_option("--transfer", expt_transfer, "sigmoid | noisy_or")
      ->check(CLI::IsMember(transfers));
  expt->add_option("--evidence-mode", expt_mode, "uniform_random | forward_sampled")
      ->check(CLI::IsMember(modes));
  expt->add_option("--max-iters", expt_config.optimizer.max_iters, "Optimizer iteration cap");
  expt->add_option("--restarts", expt_config.optimizer.restarts, "Optimizer restarts");
  expt->add_option("--out", out_path, "Row CSV output (default stdout)");
  expt->add_option("--summary", summary_path, "Per-N mean CSV output");
  expt->add_option("--threads", threads, "Worker threads (output is identical for any count)");
  add_seed(expt);

  // validate
  auto* val = app.add_subcommand("validate", "Run the property suites against the exact oracle");
  ValidationConfig val_config;
  val->add_option("--instances", val_config.instances, "Random instances per suite");
  val->add_option("--inputs", val_config.n_inputs, "Inputs per random network");
  val->add_option("--max-outputs", val_config.max_outputs, "Maximum outputs per random network");
  val->add_option("--max-inputs", max_inputs, "Enumeration limit; larger suites are skipped");
  add_seed(val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    const EnumerationLimit limit{max_inputs};
    if (!(gamma > 1.0)) throw UsageError("--gamma must exceed 1");
    if (*gen) {
      const TwoLayerNetwork net = random_network(
          gen_inputs, gen_outputs, gen_bias, TransferFunction::from_name(gen_transfer), seed);
      with_output(out_path, [&](std::ostream& out) { save_network(net, out); });
      if (!gen_evidence_out.empty()) {
        save_evidence(draw_evidence(net, parse_mode(gen_mode), derive_seed(seed, {1})),
                      gen_evidence_out);
      }
    } else if (*exact) {
      const TwoLayerNetwork net = load_network(network_path);
      const Evidence ev = load_evidence(evidence_path);
      const double p = exact_marginal(net, ev, limit);
      print_value(std::cout, "marginal", p);
      print_value(std::cout, "log_marginal", std::log(p));
    } else if (*bounds) {
      const TwoLayerNetwork net = load_network(network_path);
      const Evidence ev = load_evidence(evidence_path);
      const BoundProblem problem = BoundProblem::from(net, ev);
      const EpsilonVector eps =
          eps_text.empty() ? fixed_epsilon(problem, gamma) : parse_eps(eps_text);
      print_bounds(std::cout, bounds_at(problem, eps));
      print_value(std::cout, "gap_bound", gap_bound(problem, eps));
      if (eps_text.empty()) print_value(std::cout, "rate_bound", rate_bound(problem, gamma));
      print_eps(std::cout, "eps", eps);
    } else if (*post) {
      const TwoLayerNetwork net = load_network(network_path);
      const Evidence ev = load_evidence(evidence_path);
      const BoundProblem on = BoundProblem::from(clamp_input(net, post_input, true), ev);
      const BoundProblem off = BoundProblem::from(clamp_input(net, post_input, false), ev);
      EpsilonVector eps1_lower = fixed_epsilon(on, gamma), eps1_upper = eps1_lower;
      EpsilonVector eps0_lower = fixed_epsilon(off, gamma), eps0_upper = eps0_lower;
      if (post_optimize) {
        OptimizerConfig c;
        c.init_gamma = gamma;
        c.seed = seed;
        eps1_lower = optimize_lower(on, c).eps;
        eps1_upper = optimize_upper(on, c).eps;
        eps0_lower = optimize_lower(off, c).eps;
        eps0_upper = optimize_upper(off, c).eps;
      }
      // Upper and lower bounds may use different eps; combine the best of each.
      BoundsResult one = bounds_at(on, eps1_lower);
      one.log_upper = bounds_at(on, eps1_upper).log_upper;
      BoundsResult zero = bounds_at(off, eps0_lower);
      zero.log_upper = bounds_at(off, eps0_upper).log_upper;
      const IntervalProbability interval = posterior_interval(net.bias()[post_input], one, zero);
      print_value(std::cout, "posterior_lo", interval.lo);
      print_value(std::cout, "posterior_hi", interval.hi);
      print_value(std::cout, "log_lo", std::log(interval.lo));
      print_value(std::cout, "log_hi", std::log(interval.hi));
      if (post_exact) print_value(std::cout, "exact", exact_posterior(net, post_input, ev, limit));
    } else if (*opt) {
      const TwoLayerNetwork net = load_network(network_path);
      const Evidence ev = load_evidence(evidence_path);
      const BoundProblem problem = BoundProblem::from(net, ev);
      opt_config.init_gamma = gamma;
      opt_config.seed = seed;
      double log_upper = 0.0, log_lower = 0.0;
      if (target != "lower") {
        const OptimizationResult r = optimize_upper(problem, opt_config);
        log_upper = bounds_at(problem, r.eps).log_upper;
        print_value(std::cout, "log_upper", log_upper);
        print_value(std::cout, "upper", std::exp(log_upper));
        std::cout << fmt::format("{:<14} {} {}\n", "upper_iters", r.iters,
                                 r.converged ? "converged" : "max_iters");
        print_eps(std::cout, "upper_eps", r.eps);
      }
      if (target != "upper") {
        const OptimizationResult r = optimize_lower(problem, opt_config);
        log_lower = bounds_at(problem, r.eps).log_lower;
        print_value(std::cout, "log_lower", log_lower);
        print_value(std::cout, "lower", std::exp(log_lower));
        std::cout << fmt::format("{:<14} {} {}\n", "lower_iters", r.iters,
                                 r.converged ? "converged" : "max_iters");
        print_eps(std::cout, "lower_eps", r.eps);
      }
      if (target == "both") print_value(std::cout, "log_gap", log_upper - log_lower);
    } else if (*expt) {
      expt_config.n_grid = parse_grid(grid_text);
      expt_config.gamma = gamma;
      expt_config.seed = seed;
      expt_config.transfer = TransferFunction::from_name(expt_transfer);
      expt_config.evidence_mode = parse_mode(expt_mode);
      try {
        expt_config.validate();
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
      const ExperimentResult result = run_scaling_experiment(expt_config, threads);
      with_output(out_path, [&](std::ostream& out) { write_rows_csv(result.rows, out); });
      if (!summary_path.empty()) {
        with_output(summary_path,
                    [&](std::ostream& out) { write_aggregates_csv(result.aggregates, out); });
      }
    } else if (*val) {
      val_config.seed = seed;
      val_config.limit = limit;
      const ValidationReport report = run_validation(val_config);
      print_report(report, std::cout);
      return report.ok() ? 0 : kComputationError;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DomainError& e) {
    if (e.output()) {
      std::cerr << "error (output " << *e.output() << "): " << e.what() << '\n';
    } else {
      std::cerr << "error: " << e.what() << '\n';
    }
    return kComputationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kComputationError;
  }
  return 0;
}
