#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ldbounds/bounds.hpp"
#include "ldbounds/exact.hpp"

namespace ldb {

enum class SuiteStatus { pass, fail, skipped };

struct SuiteReport {
  std::string name;
  SuiteStatus status;
  std::size_t checks;
  std::size_t failures;
  std::string detail;  // first failure, or the reason for skipping
};

struct ValidationReport {
  std::vector<SuiteReport> suites;

  /// True when no suite failed (skipped suites do not count as failures).
  bool ok() const;
};

struct ValidationConfig {
  std::uint64_t seed = 0;
  int instances = 20;
  std::size_t n_inputs = 10;  // size of the random networks in oracle suites
  std::size_t max_outputs = 4;
  EnumerationLimit limit{};
};

using GradientFn = std::function<std::vector<double>(const BoundProblem&, const EpsilonVector&)>;

/// The gradients under test; replaceable so a deliberately broken gradient
/// can be shown to fail the suite.
struct GradientHooks {
  GradientFn log_lower;
  GradientFn upper;

  static GradientHooks defaults();
};

/// Runs the property suites on freshly seeded random instances:
///   moment-bound, tail-bound, sandwich, gap-domination, rate-domination,
///   gradients, posterior.
/// Suites that need exhaustive enumeration are reported as skipped when
/// n_inputs exceeds the enumeration limit.
ValidationReport run_validation(const ValidationConfig& config,
                                const GradientHooks& hooks = GradientHooks::defaults());

void print_report(const ValidationReport& report, std::ostream& out);

}  // namespace ldb
