#include "ldbounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ldbounds/error.hpp"
#include "ldbounds/large_deviation.hpp"

namespace ldb {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (hi == kNegInf) return kNegInf;
  return hi + std::log1p(std::exp(lo - hi));
}

void check_arguments(const BoundProblem& problem, const EpsilonVector& eps) {
  for (std::size_t k = 0; k < problem.size(); ++k) {
    const FindingStats& s = problem.findings[k];
    for (double x : {s.mean - eps[k], s.mean + eps[k]}) {
      if (!problem.transfer.admissible(x)) {
        throw DomainError("output " + std::to_string(s.output) + ": transfer argument " +
                              std::to_string(x) + " (mean " + std::to_string(s.mean) +
                              ", eps " + std::to_string(eps[k]) + ") is outside the " +
                              std::string(problem.transfer.name()) + " domain",
                          s.output);
      }
    }
  }
}

void check_scale(const BoundProblem& problem) {
  if (problem.scale < 2.0) {
    throw InvalidArgument("fixed_epsilon requires N >= 2 (got " + std::to_string(problem.scale) +
                          ")");
  }
}

void check_gamma(double gamma) {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("gamma must be a finite value > 1");
  }
}

}  // namespace

BoundProblem BoundProblem::from(const TwoLayerNetwork& net, const Evidence& evidence) {
  evidence.check_against(net);
  BoundProblem problem;
  problem.transfer = net.transfer();
  problem.scale = static_cast<double>(net.weight_scale());
  problem.findings.reserve(evidence.size());
  for (const Finding& f : evidence.findings()) {
    problem.findings.push_back({f.output, f.value, net.mean(f.output), net.chi_squared(f.output)});
  }
  return problem;
}

double BoundsResult::lower() const { return std::exp(log_lower); }
double BoundsResult::upper() const { return std::exp(log_upper); }

double BoundsResult::upper_unclamped() const {
  return (1.0 - throwaway) * std::exp(log_prod_upper) + throwaway;
}

double BoundsResult::lower_unclamped() const {
  return (1.0 - throwaway) * std::exp(log_prod_lower);
}

void check_epsilon(const BoundProblem& problem, const EpsilonVector& eps) {
  if (eps.size() != problem.size()) {
    throw InvalidArgument("epsilon vector has " + std::to_string(eps.size()) +
                          " entries for " + std::to_string(problem.size()) + " findings");
  }
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double e = eps[k];
    if (!std::isfinite(e) || e < 0.0) {
      throw InvalidArgument("epsilon for output " + std::to_string(problem.findings[k].output) +
                            " must be finite and nonnegative");
    }
    if (e == 0.0 && problem.findings[k].chi_sq > 0.0) {
      throw InvalidArgument("epsilon for output " + std::to_string(problem.findings[k].output) +
                            " is zero but its weighted sum is random");
    }
  }
}

namespace detail {

double log_upper_factor(const TransferFunction& f, const FindingStats& s, double eps) {
  return s.value ? f.log_eval(s.mean + eps) : f.log_complement(s.mean - eps);
}

double log_lower_factor(const TransferFunction& f, const FindingStats& s, double eps) {
  return s.value ? f.log_eval(s.mean - eps) : f.log_complement(s.mean + eps);
}

double leave_one_out_sum(std::span<const double> weights, std::span<const double> log_factors) {
  const std::size_t k = log_factors.size();
  // prefix[i] = prod_{j < i}, suffix[i] = prod_{j >= i}
  std::vector<double> prefix(k + 1, 1.0), suffix(k + 1, 1.0);
  for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] * std::exp(log_factors[i]);
  for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] * std::exp(log_factors[i]);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) total += weights[i] * prefix[i] * suffix[i + 1];
  return total;
}

}  // namespace detail

BoundsResult bounds_at(const BoundProblem& problem, const EpsilonVector& eps) {
  check_epsilon(problem, eps);
  check_arguments(problem, eps);

  BoundsResult r{};
  r.dev_terms.reserve(problem.size());
  double s = 0.0;
  double log_pu = 0.0;
  double log_pl = 0.0;
  for (std::size_t k = 0; k < problem.size(); ++k) {
    const FindingStats& stats = problem.findings[k];
    const double d = deviation_term(problem.scale, eps[k], stats.chi_sq);
    r.dev_terms.push_back(d);
    s += 2.0 * d;
    log_pu += detail::log_upper_factor(problem.transfer, stats, eps[k]);
    log_pl += detail::log_lower_factor(problem.transfer, stats, eps[k]);
  }
  r.throwaway = s;
  r.log_prod_upper = log_pu;
  r.log_prod_lower = log_pl;

  if (s >= 1.0) {
    // (1-S) Pi_U + S >= 1 because Pi_U <= 1.
    r.log_upper = 0.0;
    r.log_lower = kNegInf;
  } else {
    const double log_keep = std::log1p(-s);
    const double log_s = s > 0.0 ? std::log(s) : kNegInf;
    r.log_upper = std::min(0.0, log_add_exp(log_keep + log_pu, log_s));
    r.log_lower = log_keep + log_pl;
  }
  return r;
}

BoundsResult bounds_at(const TwoLayerNetwork& net, const Evidence& evidence,
                       const EpsilonVector& eps) {
  return bounds_at(BoundProblem::from(net, evidence), eps);
}

double gap_bound(const BoundProblem& problem, const EpsilonVector& eps) {
  const BoundsResult r = bounds_at(problem, eps);
  std::vector<double> log_factors;
  log_factors.reserve(problem.size());
  for (std::size_t k = 0; k < problem.size(); ++k) {
    log_factors.push_back(detail::log_upper_factor(problem.transfer, problem.findings[k], eps[k]));
  }
  const double alpha = problem.transfer.slope();
  return 2.0 * alpha * detail::leave_one_out_sum(eps.values, log_factors) + r.throwaway;
}

double gap_bound(const TwoLayerNetwork& net, const Evidence& evidence, const EpsilonVector& eps) {
  return gap_bound(BoundProblem::from(net, evidence), eps);
}

EpsilonVector fixed_epsilon(const BoundProblem& problem, double gamma) {
  check_scale(problem);
  check_gamma(gamma);
  const double n = problem.scale;
  EpsilonVector eps;
  eps.values.reserve(problem.size());
  for (const FindingStats& s : problem.findings) {
    eps.values.push_back(std::sqrt(2.0 * gamma * s.chi_sq * std::log(n) / n));
  }
  return eps;
}

EpsilonVector fixed_epsilon(const TwoLayerNetwork& net, const Evidence& evidence, double gamma) {
  return fixed_epsilon(BoundProblem::from(net, evidence), gamma);
}

double rate_bound(const BoundProblem& problem, double gamma) {
  const EpsilonVector eps = fixed_epsilon(problem, gamma);
  check_arguments(problem, eps);
  const double n = problem.scale;
  const double k = static_cast<double>(problem.size());
  std::vector<double> chis, log_factors;
  chis.reserve(problem.size());
  log_factors.reserve(problem.size());
  for (std::size_t i = 0; i < problem.size(); ++i) {
    chis.push_back(std::sqrt(problem.findings[i].chi_sq));
    log_factors.push_back(detail::log_upper_factor(problem.transfer, problem.findings[i], eps[i]));
  }
  const double alpha = problem.transfer.slope();
  return 2.0 * k * std::pow(n, -2.0 * gamma) +
         2.0 * alpha * std::sqrt(2.0 * gamma * std::log(n) / n) *
             detail::leave_one_out_sum(chis, log_factors);
}

double rate_bound(const TwoLayerNetwork& net, const Evidence& evidence, double gamma) {
  return rate_bound(BoundProblem::from(net, evidence), gamma);
}

IntervalProbability posterior_interval(double prior, const BoundsResult& given_one,
                                       const BoundsResult& given_zero) {
  if (!(prior >= 0.0 && prior <= 1.0)) throw InvalidArgument("prior outside [0, 1]");
  // Joint bounds a = Pr[X=1, Y], b = Pr[X=0, Y] in log domain.
  const double log_a_lo = std::log(prior) + given_one.log_lower;
  const double log_a_hi = std::log(prior) + given_one.log_upper;
  const double log_b_lo = std::log1p(-prior) + given_zero.log_lower;
  const double log_b_hi = std::log1p(-prior) + given_zero.log_upper;
  if (log_a_hi == kNegInf && log_b_hi == kNegInf) {
    throw ImpossibleEvidence("both clamped upper bounds are zero; evidence is impossible");
  }
  // a / (a + b) is increasing in a and decreasing in b.
  IntervalProbability out{};
  if (log_b_hi == kNegInf) {
    out.lo = 1.0;
  } else if (log_a_lo == kNegInf) {
    out.lo = 0.0;
  } else {
    out.lo = 1.0 / (1.0 + std::exp(log_b_hi - log_a_lo));
  }
  if (log_a_hi == kNegInf) {
    out.hi = 0.0;
  } else if (log_b_lo == kNegInf) {
    out.hi = 1.0;
  } else {
    out.hi = 1.0 / (1.0 + std::exp(log_b_lo - log_a_hi));
  }
  return out;
}

IntervalProbability posterior_bounds(const TwoLayerNetwork& net, std::size_t j,
                                     const Evidence& evidence, const EpsilonVector& eps1,
                                     const EpsilonVector& eps0) {
  const TwoLayerNetwork on = clamp_input(net, j, true);
  const TwoLayerNetwork off = clamp_input(net, j, false);
  return posterior_interval(net.bias()[j], bounds_at(on, evidence, eps1),
                            bounds_at(off, evidence, eps0));
}

}  // namespace ldb
