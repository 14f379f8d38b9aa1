#include "ldbounds/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "ldbounds/error.hpp"
#include "ldbounds/large_deviation.hpp"
#include "ldbounds/rng.hpp"

namespace ldb {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr int kMaxDoublings = 60;
constexpr double kNoisyOrMargin = 1e-12;

// d/d eps_k of S = 2 sum exp(-N eps^2 / chi^2); zero where chi^2 = 0.
double throwaway_slope(const BoundProblem& problem, const FindingStats& s, double eps, double dev) {
  if (s.chi_sq <= 0.0) return 0.0;
  return -4.0 * problem.scale * eps * dev / s.chi_sq;
}

// Feasible region: frozen coordinates (chi^2 = 0) sit at 0; the rest live in
// [floor, cap], where cap keeps noisy-OR arguments mu - eps nonnegative.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<bool> active;

  Box(const BoundProblem& problem, double floor) {
    const bool noisy_or = problem.transfer.kind() == TransferKind::noisy_or;
    for (const FindingStats& s : problem.findings) {
      const bool is_active = s.chi_sq > 0.0;
      double cap = std::numeric_limits<double>::infinity();
      if (noisy_or) {
        cap = s.mean - kNoisyOrMargin;
        if (cap <= 0.0) cap = 0.5 * s.mean;
      }
      active.push_back(is_active);
      lo.push_back(is_active ? std::min(floor, cap) : 0.0);
      hi.push_back(is_active ? cap : 0.0);
    }
  }

  std::vector<double> project(std::vector<double> x) const {
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::clamp(x[k], lo[k], hi[k]);
    return x;
  }
};

struct Ascent {
  std::vector<double> x;
  double value;
  int iters;
  bool converged;
};

using Objective = std::function<double(const EpsilonVector&)>;
using Gradient = std::function<std::vector<double>(const EpsilonVector&)>;

// Projected gradient ascent with Armijo backtracking.  The step length is
// carried between iterations and grown by 1/shrink after each accepted step.
Ascent ascend(const Box& box, std::vector<double> x, const Objective& objective,
              const Gradient& gradient, const OptimizerConfig& config) {
  double fx = objective(EpsilonVector{x});
  double step = config.step_init;
  Ascent out{x, fx, 0, false};
  for (int it = 0; it < config.max_iters; ++it) {
    std::vector<double> g = gradient(EpsilonVector{x});
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!box.active[k] || !std::isfinite(g[k])) g[k] = 0.0;
    }
    bool accepted = false;
    std::vector<double> y;
    double fy = kNegInf;
    for (int ls = 0; ls < kMaxBacktracks; ++ls) {
      y = x;
      for (std::size_t k = 0; k < y.size(); ++k) y[k] += step * g[k];
      y = box.project(std::move(y));
      double predicted = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) predicted += g[k] * (y[k] - x[k]);
      if (predicted <= 0.0) break;  // projected gradient vanishes
      fy = objective(EpsilonVector{y});
      if (fy >= fx + kArmijo * predicted) {
        accepted = true;
        break;
      }
      step *= config.step_shrink;
    }
    out.iters = it + 1;
    if (!accepted) {
      out.converged = true;
      break;
    }
    const double change = std::fabs(fy - fx) / std::max(1.0, std::fabs(fx));
    x = std::move(y);
    fx = fy;
    out.x = x;
    out.value = fx;
    step /= config.step_shrink;
    if (change < config.rel_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

std::vector<double> initial_epsilon(const BoundProblem& problem, const OptimizerConfig& config) {
  std::vector<double> eps;
  if (problem.scale >= 2.0) {
    eps = fixed_epsilon(problem, config.init_gamma).values;
  } else {
    for (const FindingStats& s : problem.findings) eps.push_back(std::sqrt(s.chi_sq / problem.scale));
  }
  return eps;
}

double throwaway_at(const BoundProblem& problem, const std::vector<double>& eps) {
  double s = 0.0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    s += 2.0 * deviation_term(problem.scale, eps[k], problem.findings[k].chi_sq);
  }
  return s;
}

// Candidate starting points: the fixed-eps choice and, when its throw-away
// mass exceeds 1/2, the first doubling of it with S <= 1/2.
std::vector<std::vector<double>> starting_points(const BoundProblem& problem, const Box& box,
                                                 const OptimizerConfig& config) {
  std::vector<double> base = box.project(initial_epsilon(problem, config));
  std::vector<std::vector<double>> starts{base};
  if (throwaway_at(problem, base) > 0.5) {
    std::vector<double> x = base;
    for (int d = 0; d < kMaxDoublings; ++d) {
      for (double& v : x) v *= 2.0;
      x = box.project(std::move(x));
      if (throwaway_at(problem, x) <= 0.5) {
        starts.push_back(x);
        break;
      }
    }
  }
  return starts;
}

// Runs the ascent from the best candidate start and from the random restarts.
OptimizationResult run(const BoundProblem& problem, const OptimizerConfig& config,
                       const Objective& objective, const Gradient& gradient, bool require_finite) {
  config.validate();
  const Box box(problem, config.eps_floor);

  std::optional<std::vector<double>> best_start;
  double best_start_value = kNegInf;
  for (auto& start : starting_points(problem, box, config)) {
    const double v = objective(EpsilonVector{start});
    if (!best_start || v > best_start_value) {
      best_start = start;
      best_start_value = v;
    }
  }
  if (require_finite && best_start_value == kNegInf) {
    throw InfeasibleStart("no starting point gives a non-vacuous lower bound (S < 1)");
  }

  bool any_active = std::find(box.active.begin(), box.active.end(), true) != box.active.end();
  if (!any_active) return {EpsilonVector{*best_start}, best_start_value, 0, true};

  Ascent best = ascend(box, *best_start, objective, gradient, config);
  Rng rng(config.seed);
  for (int r = 0; r < config.restarts; ++r) {
    std::vector<double> x = *best_start;
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] *= std::exp(std::log(4.0) * (2.0 * rng.uniform() - 1.0));
    }
    x = box.project(std::move(x));
    if (objective(EpsilonVector{x}) == kNegInf) continue;
    Ascent candidate = ascend(box, std::move(x), objective, gradient, config);
    if (candidate.value > best.value) best = std::move(candidate);
  }
  return {EpsilonVector{best.x}, best.value, best.iters, best.converged};
}

}  // namespace

void OptimizerConfig::validate() const {
  if (max_iters <= 0) throw InvalidArgument("max_iters must be positive");
  if (!(init_gamma > 1.0)) throw InvalidArgument("init_gamma must exceed 1");
  if (!(step_init > 0.0)) throw InvalidArgument("step_init must be positive");
  if (!(step_shrink > 0.0 && step_shrink < 1.0)) {
    throw InvalidArgument("step_shrink must lie in (0, 1)");
  }
  if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
  if (!(eps_floor > 0.0)) throw InvalidArgument("eps_floor must be positive");
  if (restarts < 0) throw InvalidArgument("restarts must be nonnegative");
}

double log_lower_objective(const BoundProblem& problem, const EpsilonVector& eps) {
  return bounds_at(problem, eps).log_lower;
}

double log_upper_objective(const BoundProblem& problem, const EpsilonVector& eps) {
  const BoundsResult r = bounds_at(problem, eps);
  if (r.throwaway < 1.0) {
    const double a = std::log1p(-r.throwaway) + r.log_prod_upper;
    const double b = r.throwaway > 0.0 ? std::log(r.throwaway) : kNegInf;
    const double hi = std::max(a, b);
    if (hi == kNegInf) return kNegInf;
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
  }
  return std::log(r.upper_unclamped());
}

std::vector<double> grad_log_lower(const BoundProblem& problem, const EpsilonVector& eps) {
  const BoundsResult r = bounds_at(problem, eps);
  if (r.throwaway >= 1.0) {
    throw DomainError("lower bound is vacuous (S = " + std::to_string(r.throwaway) +
                      " >= 1); its log has no gradient");
  }
  const TransferFunction& f = problem.transfer;
  std::vector<double> g(problem.size(), 0.0);
  for (std::size_t k = 0; k < problem.size(); ++k) {
    const FindingStats& s = problem.findings[k];
    if (s.chi_sq <= 0.0) continue;
    const double keep = -throwaway_slope(problem, s, eps[k], r.dev_terms[k]) / (1.0 - r.throwaway);
    const double factor = s.value ? f.log_eval_slope(s.mean - eps[k])
                                  : f.log_complement_slope(s.mean + eps[k]);
    g[k] = keep - factor;
  }
  return g;
}

std::vector<double> grad_upper(const BoundProblem& problem, const EpsilonVector& eps) {
  const BoundsResult r = bounds_at(problem, eps);
  const TransferFunction& f = problem.transfer;
  const double prod = std::exp(r.log_prod_upper);
  std::vector<double> g(problem.size(), 0.0);
  for (std::size_t k = 0; k < problem.size(); ++k) {
    const FindingStats& s = problem.findings[k];
    const double ds = throwaway_slope(problem, s, eps[k], r.dev_terms[k]);
    double dprod = 0.0;
    if (prod > 0.0) {
      dprod = prod * (s.value ? f.log_eval_slope(s.mean + eps[k])
                              : f.log_complement_slope(s.mean - eps[k]));
    }
    g[k] = ds * (1.0 - prod) + (1.0 - r.throwaway) * dprod;
  }
  return g;
}

OptimizationResult optimize_lower(const BoundProblem& problem, const OptimizerConfig& config) {
  Objective objective = [&](const EpsilonVector& e) { return log_lower_objective(problem, e); };
  Gradient gradient = [&](const EpsilonVector& e) { return grad_log_lower(problem, e); };
  return run(problem, config, objective, gradient, true);
}

OptimizationResult optimize_lower(const TwoLayerNetwork& net, const Evidence& evidence,
                                  const OptimizerConfig& config) {
  return optimize_lower(BoundProblem::from(net, evidence), config);
}

OptimizationResult optimize_upper(const BoundProblem& problem, const OptimizerConfig& config) {
  // Descent on the upper bound runs as ascent on -ln U, which has the same
  // minimizers and a gradient that does not shrink with the bound's scale.
  Objective objective = [&](const EpsilonVector& e) { return -log_upper_objective(problem, e); };
  Gradient gradient = [&](const EpsilonVector& e) {
    const double u = std::exp(log_upper_objective(problem, e));
    std::vector<double> g = grad_upper(problem, e);
    for (double& v : g) v = -v / u;
    return g;
  };
  OptimizationResult r = run(problem, config, objective, gradient, false);
  r.objective = bounds_at(problem, r.eps).upper_unclamped();
  return r;
}

OptimizationResult optimize_upper(const TwoLayerNetwork& net, const Evidence& evidence,
                                  const OptimizerConfig& config) {
  return optimize_upper(BoundProblem::from(net, evidence), config);
}

}  // namespace ldb
