#include "ldbounds/transfer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ldbounds/error.hpp"

namespace ldb {
namespace {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ln(1 / (1 + e^-x)) without overflow for either sign of x.
double log_logistic(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

}  // namespace

TransferFunction TransferFunction::from_name(std::string_view name) {
  if (name == "sigmoid") return sigmoid();
  if (name == "noisy_or") return noisy_or();
  throw InvalidArgument("unknown transfer function '" + std::string(name) + "'");
}

std::string_view TransferFunction::name() const noexcept {
  return kind_ == TransferKind::sigmoid ? "sigmoid" : "noisy_or";
}

double TransferFunction::slope() const noexcept {
  return kind_ == TransferKind::sigmoid ? 0.25 : 1.0;
}

bool TransferFunction::admissible(double x) const noexcept {
  if (std::isnan(x)) return false;
  return kind_ == TransferKind::sigmoid || x >= 0.0;
}

void TransferFunction::check(double x) const {
  if (!admissible(x)) {
    throw DomainError(std::string(name()) + " transfer evaluated at inadmissible argument " +
                      std::to_string(x));
  }
}

double TransferFunction::eval(double x) const {
  check(x);
  if (kind_ == TransferKind::sigmoid) return logistic(x);
  return -std::expm1(-x);
}

double TransferFunction::deriv(double x) const {
  check(x);
  if (kind_ == TransferKind::sigmoid) return logistic(x) * logistic(-x);
  return std::exp(-x);
}

double TransferFunction::complement(double x) const {
  check(x);
  if (kind_ == TransferKind::sigmoid) return logistic(-x);
  return std::exp(-x);
}

double TransferFunction::log_eval(double x) const {
  check(x);
  if (kind_ == TransferKind::sigmoid) return log_logistic(x);
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(-std::expm1(-x));
}

double TransferFunction::log_complement(double x) const {
  check(x);
  if (kind_ == TransferKind::sigmoid) return log_logistic(-x);
  return -x;
}

double TransferFunction::log_eval_slope(double x) const {
  check(x);
  if (kind_ == TransferKind::sigmoid) return logistic(-x);
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / std::expm1(x);
}

double TransferFunction::log_complement_slope(double x) const {
  check(x);
  if (kind_ == TransferKind::sigmoid) return logistic(x);
  return 1.0;
}

}  // namespace ldb
