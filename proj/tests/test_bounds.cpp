#include <doctest.h>

#include <cmath>
#include <vector>

#include "ldbounds/bounds.hpp"
#include "ldbounds/error.hpp"
#include "ldbounds/exact.hpp"
#include "ldbounds/large_deviation.hpp"
#include "oracles.hpp"

using namespace ldb;

namespace {

BoundProblem single(double mu, double chi_sq, bool value, double scale,
                    TransferFunction f = TransferFunction::sigmoid()) {
  return BoundProblem{f, scale, {{0, value, mu, chi_sq}}};
}

// All inputs deterministic, so every chi^2 is zero.
TwoLayerNetwork deterministic_net() {
  return TwoLayerNetwork::build({{1.0, -2.0, 0.5}, {3.0, 1.0, 1.0}, {-1.0, 0.0, 2.0}},
                                {1.0, 0.0, 1.0}, {0.2, -0.1, 0.0}, TransferFunction::sigmoid());
}

}  // namespace

TEST_CASE("bounds collapse when every chi^2 vanishes") {
  const auto net = deterministic_net();
  const Evidence ev({{0, true}, {1, false}, {2, true}});
  const BoundsResult r = bounds_at(net, ev, EpsilonVector{{0.0, 0.0, 0.0}});
  const double exact = std::log(oracle::sigmoid(net.mean(0))) +
                       std::log(1 - oracle::sigmoid(net.mean(1))) +
                       std::log(oracle::sigmoid(net.mean(2)));
  CHECK(r.throwaway == 0.0);
  CHECK(r.log_lower == doctest::Approx(exact).epsilon(1e-14));
  CHECK(r.log_upper == doctest::Approx(exact).epsilon(1e-14));
  CHECK(std::exp(r.log_lower) == doctest::Approx(exact_marginal(net, ev)).epsilon(1e-12));
  CHECK(gap_bound(net, ev, EpsilonVector{{0.0, 0.0, 0.0}}) == 0.0);
  CHECK(gap_bound(net, ev, EpsilonVector{{1e-9, 1e-9, 1e-9}}) < 1e-8);
}

TEST_CASE("huge eps makes the bounds vacuous") {
  const auto net = random_network(10, 3, 0.5, TransferFunction::sigmoid(), 2);
  const Evidence ev({{0, true}, {1, false}, {2, true}});
  const BoundsResult r = bounds_at(net, ev, EpsilonVector{{500.0, 500.0, 500.0}});
  CHECK(r.throwaway < 1e-300);
  CHECK(r.upper() == doctest::Approx(1.0));
  CHECK(r.lower() < 1e-100);
}

TEST_CASE("bounds sandwich the exact marginal on a small net") {
  const auto net = random_network(10, 3, 0.3, TransferFunction::sigmoid(), 5);
  const Evidence ev({{0, true}, {1, false}, {2, false}});
  const double exact = exact_marginal(net, ev);
  for (double scale : {0.5, 1.0, 2.0, 4.0}) {
    const BoundProblem prob = BoundProblem::from(net, ev);
    EpsilonVector eps = fixed_epsilon(prob, 2.0);
    for (double& e : eps.values) e *= scale;
    const BoundsResult r = bounds_at(prob, eps);
    CHECK(r.lower() <= exact + 1e-12);
    CHECK(exact <= r.upper() + 1e-12);
    CHECK(r.upper_unclamped() - r.lower_unclamped() <= gap_bound(prob, eps) + 1e-12);
  }
}

TEST_CASE("epsilon validation and domain errors") {
  const auto net = random_network(6, 2, 0.5, TransferFunction::sigmoid(), 3);
  const Evidence ev({{0, true}, {1, false}});
  CHECK_THROWS_AS(bounds_at(net, ev, EpsilonVector{{0.1}}), InvalidArgument);
  CHECK_THROWS_AS(bounds_at(net, ev, EpsilonVector{{0.1, -0.1}}), InvalidArgument);
  CHECK_THROWS_AS(bounds_at(net, ev, EpsilonVector{{0.1, 0.0}}), InvalidArgument);
  CHECK_THROWS_AS(bounds_at(net, ev, EpsilonVector{{0.1, INFINITY}}), InvalidArgument);

  const BoundProblem nor = single(0.2, 0.1, true, 10, TransferFunction::noisy_or());
  try {
    bounds_at(nor, EpsilonVector{{0.3}});
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(e.output() == std::optional<std::size_t>{0});
  }
}

TEST_CASE("gap_bound single positive finding") {
  const BoundProblem prob = single(0.3, 0.4, true, 50);
  const double eps = 0.2;
  const double expected = 2 * 0.25 * eps + 2 * std::exp(-50 * eps * eps / 0.4);
  CHECK(gap_bound(prob, EpsilonVector{{eps}}) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("fixed_epsilon") {
  const BoundProblem prob{TransferFunction::sigmoid(), 100, {{0, true, 0.0, 0.5}, {1, false, 0.0, 0.0}}};
  const EpsilonVector eps = fixed_epsilon(prob, 2.0);
  CHECK(eps[0] == doctest::Approx(0.30348542587702927).epsilon(1e-14));
  CHECK(eps[1] == 0.0);
  CHECK(deviation_term(100, eps[0], 0.5) == doctest::Approx(std::pow(100.0, -4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(fixed_epsilon(prob, 1.0), InvalidArgument);
  CHECK_THROWS_AS(fixed_epsilon(single(0.0, 0.5, true, 1), 2.0), InvalidArgument);
}

TEST_CASE("rate_bound") {
  const BoundProblem zero = single(0.4, 0.0, true, 100);
  CHECK(rate_bound(zero, 2.0) == doctest::Approx(2.0 / std::pow(100.0, 4.0)).epsilon(1e-14));

  // fixed family: the same tau pattern tiled to a larger N keeps chi^2 and mu fixed
  auto family = [](std::size_t n) {
    std::vector<std::vector<double>> tau(3, std::vector<double>(n));
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < n; ++j) tau[i][j] = ((i + j) % 3) - 0.7;
    }
    return TwoLayerNetwork::build(tau, std::vector<double>(n, 0.5), {}, TransferFunction::sigmoid());
  };
  const Evidence ev({{0, true}, {1, false}, {2, true}});
  const double r50 = rate_bound(family(50), ev, 2.0);
  const double r100 = rate_bound(family(100), ev, 2.0);
  const double r1000 = rate_bound(family(1000), ev, 2.0);
  CHECK(r1000 < r100);
  CHECK(r100 < r50);

  for (double gamma : {1.5, 2.0, 3.0}) {
    const auto net = random_network(12, 4, 0.5, TransferFunction::sigmoid(), 17);
    const Evidence all({{0, true}, {1, false}, {2, true}, {3, true}});
    const BoundsResult r = bounds_at(net, all, fixed_epsilon(net, all, gamma));
    CHECK(r.upper_unclamped() - r.lower_unclamped() <= rate_bound(net, all, gamma) + 1e-12);
  }
}

TEST_CASE("posterior_bounds") {
  const auto net = random_network(8, 3, 0.4, TransferFunction::sigmoid(), 12);
  const Evidence ev({{0, true}, {1, false}, {2, true}});
  for (std::size_t j = 0; j < 8; ++j) {
    const auto on = clamp_input(net, j, true);
    const auto off = clamp_input(net, j, false);
    const auto iv = posterior_bounds(net, j, ev, fixed_epsilon(on, ev, 2.0),
                                     fixed_epsilon(off, ev, 2.0));
    CHECK(iv.lo >= 0.0);
    CHECK(iv.hi <= 1.0);
    CHECK(iv.contains(exact_posterior(net, j, ev)));
  }

  // p_j = 1
  std::vector<double> bias(net.bias().begin(), net.bias().end());
  bias[2] = 1.0;
  const auto sure = TwoLayerNetwork::build(net.tau_rows(), bias, {}, TransferFunction::sigmoid());
  const auto on = clamp_input(sure, 2, true);
  const auto iv = posterior_bounds(sure, 2, ev, fixed_epsilon(on, ev, 2.0),
                                   fixed_epsilon(on, ev, 2.0));
  CHECK(iv.lo == 1.0);
  CHECK(iv.hi == 1.0);

  // independent input: both clamped problems coincide
  auto tau = net.tau_rows();
  for (auto& row : tau) row[5] = 0.0;
  bias[2] = 0.4;
  const auto indep = TwoLayerNetwork::build(tau, bias, {}, TransferFunction::sigmoid());
  const auto c1 = BoundProblem::from(clamp_input(indep, 5, true), ev);
  const auto c0 = BoundProblem::from(clamp_input(indep, 5, false), ev);
  for (std::size_t k = 0; k < c1.size(); ++k) {
    CHECK(c1.findings[k].mean == c0.findings[k].mean);
    CHECK(c1.findings[k].chi_sq == c0.findings[k].chi_sq);
  }
  const auto e = fixed_epsilon(c1, 2.0);
  CHECK(posterior_bounds(indep, 5, ev, e, e).contains(0.4));

  // deterministic network: width zero
  const auto det = TwoLayerNetwork::build({{1.0, 2.0, -1.0, 0.5}, {0.3, -0.2, 0.7, 1.0}},
                                          {1.0, 0.0, 0.5, 1.0}, {}, TransferFunction::sigmoid());
  const Evidence ev2({{0, true}, {1, false}});
  const EpsilonVector z{{0.0, 0.0}};
  const auto w = posterior_bounds(det, 2, ev2, z, z);
  CHECK(w.width() <= 1e-12);
  CHECK(w.lo == doctest::Approx(exact_posterior(det, 2, ev2)).epsilon(1e-12));
}

TEST_CASE("posterior_interval with vanishing bounds") {
  auto result = [](double log_lower, double log_upper) {
    return BoundsResult{log_lower, log_upper, 0.0, {}, log_upper, log_lower};
  };
  const auto zero = result(-INFINITY, -INFINITY);
  const auto some = result(std::log(0.1), std::log(0.2));
  const auto iv = posterior_interval(0.3, some, zero);
  CHECK(iv.lo == 1.0);
  CHECK(iv.hi == 1.0);
  const auto iv0 = posterior_interval(0.3, zero, some);
  CHECK(iv0.lo == 0.0);
  CHECK(iv0.hi == 0.0);
  CHECK_THROWS_AS(posterior_interval(0.3, zero, zero), ImpossibleEvidence);
  const auto vac = posterior_interval(0.3, result(-INFINITY, std::log(0.2)), some);
  CHECK(vac.lo == 0.0);
  CHECK(vac.hi > 0.0);
}

TEST_CASE("leave_one_out_sum with zero factors") {
  const std::vector<double> w{1.0, 2.0, 3.0};
  const std::vector<double> logs{std::log(0.5), -INFINITY, std::log(0.25)};
  // only the term that leaves out the zero factor survives
  CHECK(detail::leave_one_out_sum(w, logs) == doctest::Approx(2.0 * 0.5 * 0.25));
  const std::vector<double> all{std::log(0.5), std::log(0.2), std::log(0.25)};
  CHECK(detail::leave_one_out_sum(w, all) ==
        doctest::Approx(1 * 0.2 * 0.25 + 2 * 0.5 * 0.25 + 3 * 0.5 * 0.2));
}
