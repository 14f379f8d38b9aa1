#pragma once

#include <cstdint>
#include <vector>

#include "ldbounds/bounds.hpp"

namespace ldb {

struct OptimizerConfig {
  int max_iters = 500;
  double init_gamma = 2.0;
  double step_init = 1.0;
  double step_shrink = 0.5;
  double rel_tol = 1e-9;
  double eps_floor = 1e-12;
  /// Extra starts from random log-uniform rescalings of the initial eps.
  int restarts = 0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on nonpositive fields or step_shrink >= 1.
  void validate() const;
};

struct OptimizationResult {
  EpsilonVector eps;
  /// ln P_L for the lower bound; the unclamped P_U for the upper bound.
  double objective;
  int iters;
  bool converged;
};

/// Gradient of ln[(1-S) Pi_L] with respect to eps.  Components for findings
/// with chi^2 = 0 are zero.  Throws DomainError when S >= 1.
std::vector<double> grad_log_lower(const BoundProblem& problem, const EpsilonVector& eps);

/// Gradient of the unclamped upper bound (1-S) Pi_U + S with respect to eps.
std::vector<double> grad_upper(const BoundProblem& problem, const EpsilonVector& eps);

/// ln[(1-S) Pi_L]; -inf when S >= 1.
double log_lower_objective(const BoundProblem& problem, const EpsilonVector& eps);
/// ln[(1-S) Pi_U + S]
double log_upper_objective(const BoundProblem& problem, const EpsilonVector& eps);

/// Projected gradient ascent on ln P_L.  Throws InfeasibleStart if no
/// starting point with S < 1 exists within the projection box.
OptimizationResult optimize_lower(const BoundProblem& problem, const OptimizerConfig& config = {});
OptimizationResult optimize_lower(const TwoLayerNetwork& net, const Evidence& evidence,
                                  const OptimizerConfig& config = {});

/// Projected gradient descent on the unclamped upper bound.
OptimizationResult optimize_upper(const BoundProblem& problem, const OptimizerConfig& config = {});
OptimizationResult optimize_upper(const TwoLayerNetwork& net, const Evidence& evidence,
                                  const OptimizerConfig& config = {});

}  // namespace ldb
