#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ldbounds/network.hpp"

namespace ldb {

/// Per-finding summary of a (network, evidence) pair: everything the bound
/// family needs, so that each bound evaluation costs O(K) instead of O(NK).
struct FindingStats {
  std::size_t output;
  bool value;
  double mean;    // mu_i
  double chi_sq;  // chi_i^2
};

struct BoundProblem {
  TransferFunction transfer = TransferFunction::sigmoid();
  double scale = 1.0;  // N in the exponent -N eps^2 / chi^2
  std::vector<FindingStats> findings;

  static BoundProblem from(const TwoLayerNetwork& net, const Evidence& evidence);
  std::size_t size() const noexcept { return findings.size(); }
};

/// Interval half-widths eps_i, one per finding, in evidence order.
/// Entries are finite and nonnegative; zero is only meaningful where chi_i^2 = 0.
struct EpsilonVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
  friend bool operator==(const EpsilonVector&, const EpsilonVector&) = default;
};

/// Bounds on Pr[evidence] at one choice of eps, in log domain.
///
/// With S = 2 sum_i exp(-N eps_i^2 / chi_i^2) and the products
///   Pi_U = prod_{v=1} f(mu+eps) prod_{v=0} (1 - f(mu-eps))
///   Pi_L = prod_{v=1} f(mu-eps) prod_{v=0} (1 - f(mu+eps))
/// the reported bounds are min(1, (1-S) Pi_U + S) and max(0, (1-S) Pi_L).
struct BoundsResult {
  double log_lower;       // may be -inf (vacuous lower bound)
  double log_upper;       // <= 0
  double throwaway;       // S
  std::vector<double> dev_terms;
  double log_prod_upper;  // ln Pi_U
  double log_prod_lower;  // ln Pi_L

  double lower() const;
  double upper() const;
  /// (1-S) Pi_U + S and (1-S) Pi_L without the [0, 1] clamps.
  double upper_unclamped() const;
  double lower_unclamped() const;
};

struct IntervalProbability {
  double lo;
  double hi;

  bool contains(double p) const noexcept { return lo <= p && p <= hi; }
  double width() const noexcept { return hi - lo; }
};

/// Throws InvalidArgument if eps has the wrong length or a negative or
/// non-finite entry, or is zero where chi^2 > 0.
void check_epsilon(const BoundProblem& problem, const EpsilonVector& eps);

/// Throws DomainError naming the output if a transfer argument mu_i +- eps_i
/// is inadmissible (noisy-OR with mu_i - eps_i < 0).
BoundsResult bounds_at(const BoundProblem& problem, const EpsilonVector& eps);
BoundsResult bounds_at(const TwoLayerNetwork& net, const Evidence& evidence,
                       const EpsilonVector& eps);

/// Bound on (1-S)(Pi_U - Pi_L) + S, the unclamped upper-minus-lower gap:
///   2 alpha sum_i eps_i prod_{j != i} upper factor_j + S.
double gap_bound(const BoundProblem& problem, const EpsilonVector& eps);
double gap_bound(const TwoLayerNetwork& net, const Evidence& evidence, const EpsilonVector& eps);

/// eps_i = sqrt(2 gamma chi_i^2 ln(N) / N), which makes every deviation term
/// equal to N^(-2 gamma).  Requires N >= 2 and gamma > 1.
EpsilonVector fixed_epsilon(const BoundProblem& problem, double gamma);
EpsilonVector fixed_epsilon(const TwoLayerNetwork& net, const Evidence& evidence, double gamma);

/// Closed-form bound on the gap at fixed_epsilon(gamma):
///   2K / N^(2 gamma) + 2 alpha sqrt(2 gamma ln N / N) sum_i chi_i prod_{j != i} upper factor_j.
double rate_bound(const BoundProblem& problem, double gamma);
double rate_bound(const TwoLayerNetwork& net, const Evidence& evidence, double gamma);

/// Interval for Pr[X_j = 1 | evidence] from bounds on the two clamped
/// marginals. eps1 applies to the network with X_j = 1, eps0 to X_j = 0.
/// Throws ImpossibleEvidence if both clamped upper bounds are zero.
IntervalProbability posterior_bounds(const TwoLayerNetwork& net, std::size_t j,
                                     const Evidence& evidence, const EpsilonVector& eps1,
                                     const EpsilonVector& eps0);

/// Combines already-computed clamped bounds; exposed for callers that pick
/// eps per clamped network themselves (e.g. by optimization).
IntervalProbability posterior_interval(double prior, const BoundsResult& given_one,
                                       const BoundsResult& given_zero);

namespace detail {

/// ln of the finding's factor in Pi_U / Pi_L.
double log_upper_factor(const TransferFunction& f, const FindingStats& s, double eps);
double log_lower_factor(const TransferFunction& f, const FindingStats& s, double eps);

/// sum_i w_i prod_{j != i} exp(log_factor_j), with zero factors handled exactly.
double leave_one_out_sum(std::span<const double> weights, std::span<const double> log_factors);

}  // namespace detail

}  // namespace ldb
