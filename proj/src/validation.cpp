#include "ldbounds/validation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "ldbounds/error.hpp"
#include "ldbounds/large_deviation.hpp"
#include "ldbounds/optimizer.hpp"
#include "ldbounds/rng.hpp"

namespace ldb {
namespace {

constexpr double kSandwichTol = 1e-10;
constexpr double kGapTol = 1e-12;
constexpr double kGradTol = 1e-5;
constexpr double kGradStep = 1e-6;

class Suite {
 public:
  explicit Suite(std::string name) { report_.name = std::move(name); }

  void check(bool ok, const std::string& what) {
    ++report_.checks;
    if (!ok) {
      if (report_.failures == 0) report_.detail = what;
      ++report_.failures;
    }
  }

  SuiteReport finish() {
    report_.status = report_.failures == 0 ? SuiteStatus::pass : SuiteStatus::fail;
    return report_;
  }

  static SuiteReport skipped(std::string name, std::string why) {
    return {std::move(name), SuiteStatus::skipped, 0, 0, std::move(why)};
  }

 private:
  SuiteReport report_{};
};

TwoLayerNetwork random_instance(Rng& rng, std::size_t n, std::size_t m, TransferFunction f) {
  std::vector<std::vector<double>> tau(m, std::vector<double>(n));
  for (auto& row : tau) {
    for (double& t : row) {
      t = rng.normal();
      if (f.kind() == TransferKind::noisy_or) t = std::fabs(t);
    }
  }
  std::vector<double> bias(n);
  for (double& p : bias) p = rng.uniform();
  return TwoLayerNetwork::build(tau, std::move(bias), {}, f);
}

Evidence evidence_pattern(std::size_t m, unsigned pattern) {
  std::vector<Finding> findings;
  for (std::size_t i = 0; i < m; ++i) findings.push_back({i, ((pattern >> i) & 1U) != 0});
  return Evidence(std::move(findings));
}

// Random positive eps on the natural scale chi / sqrt(N), kept admissible
// for noisy-OR.
EpsilonVector random_epsilon(Rng& rng, const BoundProblem& problem) {
  EpsilonVector eps;
  for (const FindingStats& s : problem.findings) {
    double e = std::sqrt(s.chi_sq / problem.scale) * std::exp(4.0 * rng.uniform() - 1.5);
    if (problem.transfer.kind() == TransferKind::noisy_or) e = std::min(e, 0.999 * s.mean);
    if (s.chi_sq == 0.0) e = 0.0;
    eps.values.push_back(e);
  }
  return eps;
}

// Numerical gradient.  Central differences at step kGradStep, shrunk near the
// edges of the domain: below eps / 4 as eps approaches zero, and, for
// noisy-OR, well inside the headroom mu - eps where the objective is singular
// there (ln f(mu - eps) of a positive finding in the lower bound).  Where it
// is smooth but the headroom is smaller than the step, a one-sided
// second-order stencil moving eps away from the edge is used instead.
std::vector<double> numeric_gradient(const std::function<double(const EpsilonVector&)>& fn,
                                     const EpsilonVector& eps, const BoundProblem& problem,
                                     bool singular_at_edge) {
  std::vector<double> g(eps.size());
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const FindingStats& s = problem.findings[k];
    double h = std::min(kGradStep, 0.25 * eps[k]);
    bool one_sided = false;
    if (problem.transfer.kind() == TransferKind::noisy_or) {
      const double headroom = s.mean - eps[k];
      if (singular_at_edge && s.value) {
        h = std::min(h, 1e-3 * headroom);
      } else if (headroom < h) {
        one_sided = true;
      }
    }
    auto stencil = [&](double step) {
      EpsilonVector a = eps, b = eps;
      if (one_sided) {
        a.values[k] -= step;
        b.values[k] = a.values[k] - (eps[k] - a.values[k]);
        return (3.0 * fn(eps) - 4.0 * fn(a) + fn(b)) / (2.0 * (eps[k] - a.values[k]));
      }
      // the realized steps, which differ from h once h nears the ulp of eps
      a.values[k] += step;
      b.values[k] -= step;
      return (fn(a) - fn(b)) / (a.values[k] - b.values[k]);
    };
    // one Richardson step removes the O(h^2) error term
    g[k] = (4.0 * stencil(0.5 * h) - stencil(h)) / 3.0;
  }
  return g;
}

// `floor` keeps components near zero from being judged purely relatively;
// it should be small next to the objective's own magnitude.
bool gradients_agree(const std::vector<double>& analytic, const std::vector<double>& numeric,
                     double floor) {
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const double scale = std::max({std::fabs(analytic[k]), std::fabs(numeric[k]), floor});
    if (!(std::fabs(analytic[k] - numeric[k]) <= kGradTol * scale)) return false;
  }
  return true;
}

SuiteReport moment_bound_suite() {
  Suite suite("moment-bound");
  for (int a = 1; a < 60; ++a) {
    const double p = a / 60.0;
    const double bound = phi(p) / 4.0;
    for (int b = -100; b <= 100; ++b) {
      if (b == 0) continue;
      const double t = 0.5 * b;
      suite.check(moment_g(p, t) <= bound + 1e-12, fmt::format("g({}, {}) > Phi/4", p, t));
    }
    if (a != 30) {
      const double peak = moment_g(p, moment_g_argmax(p));
      suite.check(std::fabs(peak - bound) <= 1e-9, fmt::format("g(t*) != Phi/4 at p = {}", p));
    }
  }
  return suite.finish();
}

SuiteReport tail_bound_suite(const ValidationConfig& config, Rng& rng) {
  if (config.n_inputs > config.limit.max_inputs) {
    return Suite::skipped("tail-bound", "n_inputs exceeds the enumeration limit");
  }
  Suite suite("tail-bound");
  const std::size_t n = config.n_inputs;
  for (int inst = 0; inst < config.instances; ++inst) {
    std::vector<double> theta(n), bias(n);
    for (double& t : theta) t = rng.normal();
    for (double& p : bias) p = rng.uniform();
    const double chi = chi_squared(theta, bias);
    for (int e = 1; e <= 10; ++e) {
      const double eps = 0.1 * e;
      const double exact = exact_deviation_prob(theta, bias, eps, config.limit);
      const double bound = std::min(1.0, tail_bound({n, eps, chi}));
      suite.check(exact <= bound, fmt::format("instance {}: exact {} > bound {} at eps {}", inst,
                                              exact, bound, eps));
    }
  }
  return suite.finish();
}

SuiteReport sandwich_suite(const ValidationConfig& config, Rng& rng) {
  if (config.n_inputs > config.limit.max_inputs) {
    return Suite::skipped("sandwich", "n_inputs exceeds the enumeration limit");
  }
  Suite suite("sandwich");
  for (TransferFunction f : {TransferFunction::sigmoid(), TransferFunction::noisy_or()}) {
    for (int inst = 0; inst < config.instances; ++inst) {
      const std::size_t m = 1 + rng.next_u64() % config.max_outputs;
      const TwoLayerNetwork net = random_instance(rng, config.n_inputs, m, f);
      for (unsigned pattern = 0; pattern < (1U << m); ++pattern) {
        const Evidence ev = evidence_pattern(m, pattern);
        const BoundProblem problem = BoundProblem::from(net, ev);
        const double exact = exact_marginal(net, ev, config.limit);
        std::vector<EpsilonVector> choices;
        for (int r = 0; r < 5; ++r) choices.push_back(random_epsilon(rng, problem));
        try {
          choices.push_back(optimize_lower(problem).eps);
        } catch (const InfeasibleStart&) {
        }
        choices.push_back(optimize_upper(problem).eps);
        for (const EpsilonVector& eps : choices) {
          const BoundsResult b = bounds_at(problem, eps);
          suite.check(b.lower() - kSandwichTol <= exact && exact <= b.upper() + kSandwichTol,
                      fmt::format("{} instance {} pattern {}: [{}, {}] misses {}", f.name(), inst,
                                  pattern, b.lower(), b.upper(), exact));
        }
      }
    }
  }
  return suite.finish();
}

SuiteReport gap_suite(const ValidationConfig& config, Rng& rng) {
  Suite suite("gap-domination");
  for (int inst = 0; inst < config.instances; ++inst) {
    const std::size_t m = 1 + rng.next_u64() % config.max_outputs;
    const TwoLayerNetwork net = random_instance(rng, config.n_inputs, m, TransferFunction::sigmoid());
    const Evidence ev = evidence_pattern(m, static_cast<unsigned>(rng.next_u64() % (1U << m)));
    const BoundProblem problem = BoundProblem::from(net, ev);
    for (int r = 0; r < 10; ++r) {
      const EpsilonVector eps = random_epsilon(rng, problem);
      const BoundsResult b = bounds_at(problem, eps);
      const double gap = b.upper_unclamped() - b.lower_unclamped();
      const double bound = gap_bound(problem, eps);
      suite.check(gap <= bound + kGapTol,
                  fmt::format("instance {}: gap {} > gap_bound {}", inst, gap, bound));
    }
  }
  return suite.finish();
}

SuiteReport rate_suite(const ValidationConfig& config, Rng& rng) {
  Suite suite("rate-domination");
  for (int inst = 0; inst < config.instances; ++inst) {
    const std::size_t m = 1 + rng.next_u64() % config.max_outputs;
    const TwoLayerNetwork net = random_instance(rng, config.n_inputs, m, TransferFunction::sigmoid());
    const Evidence ev = evidence_pattern(m, static_cast<unsigned>(rng.next_u64() % (1U << m)));
    const BoundProblem problem = BoundProblem::from(net, ev);
    for (double gamma : {1.5, 2.0, 3.0}) {
      const BoundsResult b = bounds_at(problem, fixed_epsilon(problem, gamma));
      const double gap = b.upper_unclamped() - b.lower_unclamped();
      const double bound = rate_bound(problem, gamma);
      suite.check(gap <= bound + kGapTol, fmt::format("instance {} gamma {}: gap {} > rate {}",
                                                      inst, gamma, gap, bound));
    }
  }
  return suite.finish();
}

SuiteReport gradient_suite(const ValidationConfig& config, Rng& rng, const GradientHooks& hooks) {
  Suite suite("gradients");
  for (int inst = 0; inst < config.instances; ++inst) {
    const std::size_t m = 1 + rng.next_u64() % config.max_outputs;
    const TwoLayerNetwork net = random_instance(rng, config.n_inputs, m, TransferFunction::sigmoid());
    const Evidence ev = evidence_pattern(m, static_cast<unsigned>(rng.next_u64() % (1U << m)));
    const BoundProblem problem = BoundProblem::from(net, ev);
    EpsilonVector eps = random_epsilon(rng, problem);

    const auto upper_fn = [&](const EpsilonVector& e) {
      return bounds_at(problem, e).upper_unclamped();
    };
    const double floor = 1e-3 * upper_fn(eps);
    suite.check(gradients_agree(hooks.upper(problem, eps), numeric_gradient(upper_fn, eps, problem, false),
                                floor),
                fmt::format("instance {}: upper gradient disagrees with finite differences", inst));

    // The log lower bound needs S < 1; widen eps until it is.
    while (bounds_at(problem, eps).throwaway >= 0.9) {
      for (double& e : eps.values) e *= 1.5;
    }
    const auto lower_fn = [&](const EpsilonVector& e) { return log_lower_objective(problem, e); };
    suite.check(
        gradients_agree(hooks.log_lower(problem, eps), numeric_gradient(lower_fn, eps, problem, true),
                        1e-3),
        fmt::format("instance {}: log-lower gradient disagrees with finite differences", inst));
  }
  return suite.finish();
}

SuiteReport posterior_suite(const ValidationConfig& config, Rng& rng) {
  if (config.n_inputs > config.limit.max_inputs) {
    return Suite::skipped("posterior", "n_inputs exceeds the enumeration limit");
  }
  Suite suite("posterior");
  for (int inst = 0; inst < config.instances; ++inst) {
    const std::size_t m = 1 + rng.next_u64() % config.max_outputs;
    const TwoLayerNetwork net = random_instance(rng, config.n_inputs, m, TransferFunction::sigmoid());
    const Evidence ev = evidence_pattern(m, static_cast<unsigned>(rng.next_u64() % (1U << m)));
    const std::size_t j = rng.next_u64() % config.n_inputs;
    const TwoLayerNetwork on = clamp_input(net, j, true);
    const TwoLayerNetwork off = clamp_input(net, j, false);
    const IntervalProbability interval = posterior_bounds(
        net, j, ev, random_epsilon(rng, BoundProblem::from(on, ev)),
        random_epsilon(rng, BoundProblem::from(off, ev)));
    const double exact = exact_posterior(net, j, ev, config.limit);
    suite.check(interval.lo - kSandwichTol <= exact && exact <= interval.hi + kSandwichTol,
                fmt::format("instance {}: [{}, {}] misses posterior {}", inst, interval.lo,
                            interval.hi, exact));
  }
  return suite.finish();
}

std::string_view status_name(SuiteStatus s) {
  switch (s) {
    case SuiteStatus::pass:
      return "pass";
    case SuiteStatus::fail:
      return "FAIL";
    case SuiteStatus::skipped:
      return "skipped";
  }
  return "?";
}

}  // namespace

bool ValidationReport::ok() const {
  return std::none_of(suites.begin(), suites.end(),
                      [](const SuiteReport& s) { return s.status == SuiteStatus::fail; });
}

GradientHooks GradientHooks::defaults() {
  return {[](const BoundProblem& p, const EpsilonVector& e) { return grad_log_lower(p, e); },
          [](const BoundProblem& p, const EpsilonVector& e) { return grad_upper(p, e); }};
}

ValidationReport run_validation(const ValidationConfig& config, const GradientHooks& hooks) {
  if (config.instances < 1) throw InvalidArgument("validation needs at least one instance");
  if (config.n_inputs < 2) throw InvalidArgument("validation networks need at least 2 inputs");
  if (config.max_outputs < 1 || config.max_outputs > 16) {
    throw InvalidArgument("validation max_outputs must lie in [1, 16]");
  }
  // Each suite draws from its own stream so adding checks to one suite does
  // not perturb the instances of another.
  auto stream = [&](std::uint64_t tag) { return Rng(derive_seed(config.seed, {tag})); };
  ValidationReport report;
  report.suites.push_back(moment_bound_suite());
  Rng r1 = stream(1), r2 = stream(2), r3 = stream(3), r4 = stream(4), r5 = stream(5),
      r6 = stream(6);
  report.suites.push_back(tail_bound_suite(config, r1));
  report.suites.push_back(sandwich_suite(config, r2));
  report.suites.push_back(gap_suite(config, r3));
  report.suites.push_back(rate_suite(config, r4));
  report.suites.push_back(gradient_suite(config, r5, hooks));
  report.suites.push_back(posterior_suite(config, r6));
  return report;
}

void print_report(const ValidationReport& report, std::ostream& out) {
  for (const SuiteReport& s : report.suites) {
    out << fmt::format("{:<16} {:<8} checks={} failures={}", s.name, status_name(s.status),
                       s.checks, s.failures);
    if (!s.detail.empty()) out << "  (" << s.detail << ")";
    out << '\n';
  }
  out << (report.ok() ? "validation passed\n" : "validation FAILED\n");
}

}  // namespace ldb
