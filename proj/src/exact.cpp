#include "ldbounds/exact.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ldbounds/error.hpp"

namespace ldb {
namespace {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void check_limit(std::size_t n, EnumerationLimit limit) {
  if (limit.max_inputs < 1) throw InvalidArgument("enumeration limit must be at least 1");
  if (n > limit.max_inputs || n >= 63) {
    throw EnumerationLimitError("exact enumeration over " + std::to_string(n) +
                                " inputs exceeds the limit of " +
                                std::to_string(limit.max_inputs));
  }
}

// Calls visit(x, prior) for every input assignment x with nonzero prior mass.
template <typename Visit>
void for_each_assignment(std::span<const double> bias, Visit&& visit) {
  const std::size_t n = bias.size();
  std::vector<std::uint8_t> x(n);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t code = 0; code < count; ++code) {
    double prior = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = static_cast<std::uint8_t>((code >> j) & 1U);
      prior *= x[j] ? bias[j] : 1.0 - bias[j];
    }
    if (prior != 0.0) visit(std::span<const std::uint8_t>(x), prior);
  }
}

}  // namespace

double exact_marginal(const TwoLayerNetwork& net, const Evidence& evidence,
                      EnumerationLimit limit) {
  check_limit(net.n_inputs(), limit);
  evidence.check_against(net);
  const TransferFunction& f = net.transfer();
  CompensatedSum total;
  for_each_assignment(net.bias(), [&](std::span<const std::uint8_t> x, double prior) {
    double term = prior;
    for (const Finding& finding : evidence.findings()) {
      const double s = net.weighted_sum(finding.output, x);
      term *= finding.value ? f.eval(s) : f.complement(s);
    }
    total.add(term);
  });
  return total.value();
}

double exact_posterior(const TwoLayerNetwork& net, std::size_t j, const Evidence& evidence,
                       EnumerationLimit limit) {
  check_limit(net.n_inputs(), limit);
  const TwoLayerNetwork on = clamp_input(net, j, true);
  const TwoLayerNetwork off = clamp_input(net, j, false);
  const double p = net.bias()[j];
  const double m1 = exact_marginal(on, evidence, limit);
  const double m0 = exact_marginal(off, evidence, limit);
  const double numerator = p * m1;
  const double denominator = numerator + (1.0 - p) * m0;
  if (denominator <= 0.0) throw ImpossibleEvidence("evidence has probability zero");
  return numerator / denominator;
}

double exact_deviation_prob(std::span<const double> weights, std::span<const double> bias,
                            double epsilon, EnumerationLimit limit) {
  if (weights.size() != bias.size()) {
    throw InvalidArgument("exact_deviation_prob: weight and bias lengths differ");
  }
  if (weights.empty()) throw InvalidArgument("exact_deviation_prob: no variables");
  if (!(epsilon > 0.0)) throw InvalidArgument("exact_deviation_prob: epsilon must be positive");
  check_limit(weights.size(), limit);
  for (double p : bias) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("exact_deviation_prob: bias outside [0, 1]");
  }
  const double n = static_cast<double>(weights.size());
  CompensatedSum total;
  for_each_assignment(bias, [&](std::span<const std::uint8_t> x, double prior) {
    double sum = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) sum += weights[j] * (x[j] - bias[j]);
    if (std::fabs(sum / n) > epsilon) total.add(prior);
  });
  return total.value();
}

}  // namespace ldb
