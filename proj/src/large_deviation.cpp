#include "ldbounds/large_deviation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ldbounds/error.hpp"

namespace ldb {

double phi(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("phi: p = " + std::to_string(p) + " outside [0, 1]");
  }
  const double lo = std::min(p, 1.0 - p);
  if (lo < 1e-300) return 0.0;

  const double d = 0.5 - lo;  // >= 0
  if (d < 1e-4) {
    // Even series about the removable singularity at 1/2.
    const double d2 = d * d;
    return 0.5 - (2.0 / 3.0) * d2 - (32.0 / 45.0) * d2 * d2;
  }
  if (lo >= 0.25) {
    // 1 - 2 lo is exact here and ln((1-lo)/lo) = 2 atanh(1 - 2 lo).
    const double x = 1.0 - 2.0 * lo;
    return x / (2.0 * std::atanh(x));
  }
  return (1.0 - 2.0 * lo) / (std::log1p(-lo) - std::log(lo));
}

double moment_g(double p, double t) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidArgument("moment_g: p = " + std::to_string(p) + " outside (0, 1)");
  }
  if (t == 0.0 || std::isnan(t)) throw InvalidArgument("moment_g: t must be nonzero");

  // Near t = 0 the closed form cancels to ~t^2/8 out of terms of size t, so
  // use the cumulant series of a centered Bernoulli instead (truncation error
  // below 1e-15 relative for |t| < 0.01).
  if (std::fabs(t) < 0.01) {
    const double q = 1.0 - p;
    const double v = p * q;
    const double d = q - p;
    const double k3 = v * d;
    const double k4 = v * (1.0 - 6.0 * v);
    const double k5 = v * d * (1.0 - 12.0 * v);
    const double k6 = v * (1.0 - 30.0 * v + 120.0 * v * v);
    const double k7 = v * d * (1.0 - 60.0 * v + 360.0 * v * v);
    return v / 2.0 +
           t * (k3 / 6.0 + t * (k4 / 24.0 + t * (k5 / 120.0 + t * (k6 / 720.0 + t * k7 / 5040.0))));
  }

  // Factor out the larger exponent: for t > 0 that is t(1-p), for t < 0 it is -tp.
  double log_mgf;
  if (t > 0.0) {
    log_mgf = t * (1.0 - p) + std::log1p((1.0 - p) * std::expm1(-t));
  } else {
    log_mgf = -t * p + std::log1p(p * std::expm1(t));
  }
  return log_mgf / (t * t);
}

double moment_g_limit(double p) { return 0.5 * p * (1.0 - p); }

double moment_g_argmax(double p) { return 2.0 * (std::log1p(-p) - std::log(p)); }

double chi_squared(std::span<const double> tau_row, std::span<const double> bias) {
  return chi_squared(tau_row, bias, tau_row.size());
}

double chi_squared(std::span<const double> tau_row, std::span<const double> bias,
                   std::size_t scale) {
  if (tau_row.size() != bias.size()) {
    throw InvalidArgument("chi_squared: weight and bias lengths differ");
  }
  if (scale == 0) throw InvalidArgument("chi_squared: zero scale");
  double sum = 0.0;
  for (std::size_t j = 0; j < tau_row.size(); ++j) sum += tau_row[j] * tau_row[j] * phi(bias[j]);
  return sum / static_cast<double>(scale);
}

double deviation_term(double n, double epsilon, double chi_sq) {
  if (chi_sq <= 0.0) return 0.0;
  return std::exp(-n * epsilon * epsilon / chi_sq);
}

double tail_bound(const TailBoundInputs& in) {
  if (in.n == 0) throw InvalidArgument("tail_bound: N must be positive");
  if (!(in.epsilon > 0.0)) throw InvalidArgument("tail_bound: epsilon must be positive");
  if (!(in.chi_sq >= 0.0)) throw InvalidArgument("tail_bound: chi^2 must be nonnegative");
  return 2.0 * deviation_term(static_cast<double>(in.n), in.epsilon, in.chi_sq);
}

}  // namespace ldb
