#pragma once

#include <cstddef>
#include <span>

namespace ldb {

/// Phi(p) = (1 - 2p) / ln((1 - p) / p), extended continuously to [0, 1]:
/// Phi(0) = Phi(1) = 0 and Phi(1/2) = 1/2.  Symmetric about 1/2.
/// Throws InvalidArgument for p outside [0, 1].
double phi(double p);

/// Scaled log-moment function of a centered Bernoulli(p) variable,
///   g(t) = t^-2 ln[(1 - p) e^{-tp} + p e^{t(1-p)}],
/// which never exceeds Phi(p) / 4.  Requires p in (0, 1) and t != 0.
double moment_g(double p, double t);

/// lim_{t -> 0} moment_g(p, t) = p (1 - p) / 2.
double moment_g_limit(double p);

/// The maximizer t* = 2 ln((1 - p) / p) of moment_g for p != 1/2.
double moment_g_argmax(double p);

/// (1/scale) sum_j tau_j^2 Phi(p_j).  The single-argument-list form uses the
/// row length as the scale.
double chi_squared(std::span<const double> tau_row, std::span<const double> bias);
double chi_squared(std::span<const double> tau_row, std::span<const double> bias,
                   std::size_t scale);

struct TailBoundInputs {
  std::size_t n;
  double epsilon;
  double chi_sq;
};

/// 2 exp(-N eps^2 / chi^2): bound on Pr[|(1/N) sum_j theta_j (X_j - p_j)| > eps].
/// Zero when chi^2 = 0.  Throws InvalidArgument on eps <= 0, chi^2 < 0 or N = 0.
double tail_bound(const TailBoundInputs& inputs);

/// exp(-N eps^2 / chi^2) with the chi^2 = 0 convention of tail_bound; the
/// per-output union-bound term.  Accepts eps = 0.
double deviation_term(double n, double epsilon, double chi_sq);

}  // namespace ldb
