#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ldbounds/network.hpp"
#include "ldbounds/optimizer.hpp"

namespace ldb {

enum class EvidenceMode { uniform_random, forward_sampled };

struct ExperimentConfig {
  std::size_t m_outputs = 25;
  std::vector<std::size_t> n_grid = default_n_grid();
  int trials = 25;
  double gamma = 2.0;
  std::uint64_t seed = 0;
  EvidenceMode evidence_mode = EvidenceMode::uniform_random;
  TransferFunction transfer = TransferFunction::sigmoid();
  double bias_value = 0.5;
  OptimizerConfig optimizer{};

  /// 50, 100, ..., 1000.
  static std::vector<std::size_t> default_n_grid();
  /// Throws InvalidArgument unless the grid is increasing with entries >= 2,
  /// trials >= 1, m_outputs >= 1, gamma > 1 and bias_value in [0, 1].
  void validate() const;
};

/// One (N, trial) cell.  Gaps are natural-log differences upper minus lower.
struct ExperimentRow {
  std::size_t n;
  int trial;
  std::uint64_t seed_used;
  double log_gap_fixed;
  double log_gap_opt;
  double log_upper_opt;
  double log_lower_opt;
  bool feasible;  // false when the lower-bound optimizer found no valid start
};

struct ExperimentAggregate {
  std::size_t n;
  std::size_t rows_used;
  double mean_log_gap_fixed;
  double mean_log_gap_opt;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;  // sorted by (n, trial)
  std::vector<ExperimentAggregate> aggregates;
};

/// Seed of one (N, trial) cell; each cell is reproducible on its own.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t n, int trial);

/// Evidence on every output, drawn according to `mode` from a stream seeded by `seed`.
Evidence draw_evidence(const TwoLayerNetwork& net, EvidenceMode mode, std::uint64_t seed);

ExperimentRow run_trial(const ExperimentConfig& config, std::size_t n, int trial);

/// Runs every (N, trial) cell on `workers` threads; output does not depend on
/// the worker count.
ExperimentResult run_scaling_experiment(const ExperimentConfig& config, unsigned workers = 1);

/// Per-N means over feasible rows.
std::vector<ExperimentAggregate> aggregate_rows(const std::vector<ExperimentRow>& rows);

/// Header `n,trial,seed_used,log_gap_fixed,log_gap_opt,log_upper_opt,log_lower_opt,feasible`,
/// reals with 17 significant digits.
void write_rows_csv(const std::vector<ExperimentRow>& rows, std::ostream& out);
void write_aggregates_csv(const std::vector<ExperimentAggregate>& aggregates, std::ostream& out);

}  // namespace ldb
