#pragma once

#include <string_view>

namespace ldb {

enum class TransferKind { sigmoid, noisy_or };

/// Nondecreasing map from the reals to [0, 1] used as Pr[Y_i = 1 | weighted
/// input sum].  Two parameterizations are supported:
///
///   sigmoid   f(x) = 1 / (1 + e^-x),  slope 1/4, defined on all of R
///   noisy_or  f(x) = 1 - e^-x,        slope 1,   defined on x >= 0
///
/// Besides f and f' the class exposes the log-domain quantities the bound
/// computations need, each evaluated without forming 1 - f(x) by
/// subtraction.  Every member throws DomainError for inadmissible x.
class TransferFunction {
 public:
  static TransferFunction sigmoid() { return TransferFunction(TransferKind::sigmoid); }
  static TransferFunction noisy_or() { return TransferFunction(TransferKind::noisy_or); }
  static TransferFunction from_name(std::string_view name);

  TransferKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept;

  /// Global bound on f'(x) over the admissible domain.
  double slope() const noexcept;
  bool admissible(double x) const noexcept;

  double eval(double x) const;
  double deriv(double x) const;
  /// 1 - f(x)
  double complement(double x) const;
  /// ln f(x); -inf where f vanishes.
  double log_eval(double x) const;
  /// ln(1 - f(x))
  double log_complement(double x) const;
  /// f'(x) / f(x), the derivative of ln f.
  double log_eval_slope(double x) const;
  /// f'(x) / (1 - f(x)), minus the derivative of ln(1 - f).
  double log_complement_slope(double x) const;

  friend bool operator==(const TransferFunction&, const TransferFunction&) = default;

 private:
  explicit TransferFunction(TransferKind kind) : kind_(kind) {}
  void check(double x) const;

  TransferKind kind_;
};

}  // namespace ldb
