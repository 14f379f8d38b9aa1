#include "ldbounds/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "ldbounds/bounds.hpp"
#include "ldbounds/error.hpp"

namespace ldb {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream tags for the sub-seeds of one trial.
constexpr std::uint64_t kEvidenceStream = 1;
constexpr std::uint64_t kOptimizerStream = 2;

}  // namespace

std::vector<std::size_t> ExperimentConfig::default_n_grid() {
  std::vector<std::size_t> grid;
  for (std::size_t n = 50; n <= 1000; n += 50) grid.push_back(n);
  return grid;
}

void ExperimentConfig::validate() const {
  if (m_outputs < 1) throw InvalidArgument("experiment needs at least one output");
  if (n_grid.empty()) throw InvalidArgument("experiment N grid is empty");
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    if (n_grid[k] < 2) throw InvalidArgument("experiment N values must be at least 2");
    if (k > 0 && n_grid[k] <= n_grid[k - 1]) {
      throw InvalidArgument("experiment N grid must be increasing");
    }
  }
  if (trials < 1) throw InvalidArgument("experiment needs at least one trial");
  if (!(gamma > 1.0)) throw InvalidArgument("gamma must exceed 1");
  if (!(bias_value >= 0.0 && bias_value <= 1.0)) throw InvalidArgument("bias outside [0, 1]");
  optimizer.validate();
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t n, int trial) {
  return derive_seed(seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial)});
}

Evidence draw_evidence(const TwoLayerNetwork& net, EvidenceMode mode, std::uint64_t seed) {
  Rng rng(seed);
  if (mode == EvidenceMode::forward_sampled) return full_evidence(sample_joint(net, rng).outputs);
  std::vector<std::uint8_t> bits(net.n_outputs());
  for (auto& b : bits) b = rng.bernoulli(0.5);
  return full_evidence(bits);
}

ExperimentRow run_trial(const ExperimentConfig& config, std::size_t n, int trial) {
  ExperimentRow row{n, trial, trial_seed(config.seed, n, trial), kNaN, kNaN, kNaN, kNaN, true};
  const TwoLayerNetwork net =
      random_network(n, config.m_outputs, config.bias_value, config.transfer, row.seed_used);
  const Evidence evidence =
      draw_evidence(net, config.evidence_mode, derive_seed(row.seed_used, {kEvidenceStream}));
  const BoundProblem problem = BoundProblem::from(net, evidence);

  OptimizerConfig opt = config.optimizer;
  opt.init_gamma = config.gamma;
  opt.seed = derive_seed(row.seed_used, {kOptimizerStream});

  try {
    const BoundsResult fixed = bounds_at(problem, fixed_epsilon(problem, config.gamma));
    row.log_gap_fixed = fixed.log_upper - fixed.log_lower;

    const OptimizationResult upper = optimize_upper(problem, opt);
    row.log_upper_opt = bounds_at(problem, upper.eps).log_upper;
    const OptimizationResult lower = optimize_lower(problem, opt);
    row.log_lower_opt = bounds_at(problem, lower.eps).log_lower;
    row.log_gap_opt = row.log_upper_opt - row.log_lower_opt;
  } catch (const InfeasibleStart&) {
    row.feasible = false;
  } catch (const DomainError&) {
    row.feasible = false;
  }
  return row;
}

ExperimentResult run_scaling_experiment(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  struct Cell {
    std::size_t n;
    int trial;
  };
  std::vector<Cell> cells;
  for (std::size_t n : config.n_grid) {
    for (int t = 0; t < config.trials; ++t) cells.push_back({n, t});
  }

  std::vector<ExperimentRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      rows[k] = run_trial(config, cells[k].n, cells[k].trial);
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::sort(rows.begin(), rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
    return a.n != b.n ? a.n < b.n : a.trial < b.trial;
  });
  ExperimentResult result;
  result.aggregates = aggregate_rows(rows);
  result.rows = std::move(rows);
  return result;
}

std::vector<ExperimentAggregate> aggregate_rows(const std::vector<ExperimentRow>& rows) {
  std::vector<ExperimentAggregate> out;
  for (const ExperimentRow& row : rows) {
    if (out.empty() || out.back().n != row.n) out.push_back({row.n, 0, 0.0, 0.0});
    if (!row.feasible) continue;
    ExperimentAggregate& agg = out.back();
    ++agg.rows_used;
    agg.mean_log_gap_fixed += row.log_gap_fixed;
    agg.mean_log_gap_opt += row.log_gap_opt;
  }
  for (ExperimentAggregate& agg : out) {
    if (agg.rows_used == 0) {
      agg.mean_log_gap_fixed = kNaN;
      agg.mean_log_gap_opt = kNaN;
      continue;
    }
    agg.mean_log_gap_fixed /= static_cast<double>(agg.rows_used);
    agg.mean_log_gap_opt /= static_cast<double>(agg.rows_used);
  }
  return out;
}

void write_rows_csv(const std::vector<ExperimentRow>& rows, std::ostream& out) {
  out << "n,trial,seed_used,log_gap_fixed,log_gap_opt,log_upper_opt,log_lower_opt,feasible\n";
  for (const ExperimentRow& r : rows) {
    out << fmt::format("{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.n, r.trial, r.seed_used,
                       r.log_gap_fixed, r.log_gap_opt, r.log_upper_opt, r.log_lower_opt,
                       r.feasible ? 1 : 0);
  }
}

void write_aggregates_csv(const std::vector<ExperimentAggregate>& aggregates, std::ostream& out) {
  out << "n,rows_used,mean_log_gap_fixed,mean_log_gap_opt\n";
  for (const ExperimentAggregate& a : aggregates) {
    out << fmt::format("{},{},{:.17g},{:.17g}\n", a.n, a.rows_used, a.mean_log_gap_fixed,
                       a.mean_log_gap_opt);
  }
}

}  // namespace ldb
