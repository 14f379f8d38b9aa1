#pragma once

// Reference computations used only by the tests.  Nothing here calls the
// library's transfer, enumeration or bound code, so agreement with the
// library is evidence rather than tautology.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "ldbounds/network.hpp"

namespace oracle {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double noisy_or(double x) { return 1.0 - std::exp(-x); }

inline double transfer(const ldb::TwoLayerNetwork& net, double x) {
  return net.transfer().kind() == ldb::TransferKind::sigmoid ? sigmoid(x) : noisy_or(x);
}

struct JointSums {
  double evidence = 0.0;                // Pr[Y = y]
  std::vector<double> with_input_on;    // Pr[X_j = 1, Y = y] per input
};

/// Brute-force sum over the full joint of inputs, written directly from the
/// model definition: prior of x times the likelihood of every finding.
inline JointSums enumerate_joint(const ldb::TwoLayerNetwork& net, const ldb::Evidence& ev) {
  const std::size_t n = net.n_inputs();
  const double scale = static_cast<double>(net.weight_scale());
  JointSums sums;
  sums.with_input_on.assign(n, 0.0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double prior = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = net.bias()[j];
      prior *= (mask >> j & 1) ? p : 1.0 - p;
    }
    if (prior == 0.0) continue;
    double like = 1.0;
    for (const ldb::Finding& f : ev.findings()) {
      double x = net.offset()[f.output];
      for (std::size_t j = 0; j < n; ++j) {
        if (mask >> j & 1) x += net.tau(f.output, j) / scale;
      }
      const double on = transfer(net, x);
      like *= f.value ? on : 1.0 - on;
    }
    const double w = prior * like;
    sums.evidence += w;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask >> j & 1) sums.with_input_on[j] += w;
    }
  }
  return sums;
}

inline double binomial_pmf(int n, int k, double p) {
  const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return std::exp(log_choose + k * std::log(p) + (n - k) * std::log1p(-p));
}

/// Central difference of fn along coordinate k.
inline double central_difference(const std::function<double(const std::vector<double>&)>& fn,
                                 std::vector<double> x, std::size_t k, double h) {
  const double x0 = x[k];
  x[k] = x0 + h;
  const double up = fn(x);
  x[k] = x0 - h;
  const double down = fn(x);
  return (up - down) / (2.0 * h);
}

struct ScanResult {
  double arg;
  double value;
};

/// Maximum of a function on [a, b]: a coarse grid locates the best bracket,
/// then golden-section search refines it.
inline ScanResult golden_section_max(const std::function<double(double)>& fn, double a, double b,
                                     int grid = 2000, double tol = 1e-12) {
  double best_x = a;
  double best = -INFINITY;
  const double dx = (b - a) / grid;
  for (int i = 0; i <= grid; ++i) {
    const double x = a + i * dx;
    const double v = fn(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  double lo = std::max(a, best_x - dx);
  double hi = std::min(b, best_x + dx);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo);
  double x2 = lo + r * (hi - lo);
  double f1 = fn(x1);
  double f2 = fn(x2);
  while (hi - lo > tol * std::max(1.0, std::fabs(lo))) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = fn(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = fn(x1);
    }
  }
  const double x = 0.5 * (lo + hi);
  const double v = fn(x);
  return v >= best ? ScanResult{x, v} : ScanResult{best_x, best};
}

}  // namespace oracle
