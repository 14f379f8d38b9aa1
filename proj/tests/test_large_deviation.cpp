#include <doctest.h>

#include <cmath>
#include <vector>

#include "ldbounds/error.hpp"
#include "ldbounds/exact.hpp"
#include "ldbounds/large_deviation.hpp"
#include "ldbounds/rng.hpp"
#include "oracles.hpp"

using namespace ldb;

TEST_CASE("phi closed form and limits") {
  CHECK(phi(0.5) == 0.5);
  CHECK(phi(0.0) == 0.0);
  CHECK(phi(1.0) == 0.0);
  CHECK(phi(0.25) == doctest::Approx(0.5 / std::log(3.0)).epsilon(1e-14));
  CHECK(phi(0.25) == doctest::Approx(0.455120).epsilon(1e-6));
  CHECK(phi(0.3) == doctest::Approx(phi(0.7)).epsilon(1e-15));
  // continuity through the series branch around 1/2
  for (double d : {1e-3, 1e-4, 9e-5, 1e-6, 1e-9}) {
    const double p = 0.5 - d;
    const double direct = (1 - 2 * p) / std::log((1 - p) / p);
    CHECK(phi(p) == doctest::Approx(direct).epsilon(1e-7));
  }
  CHECK(phi(1e-300) >= 0.0);
  CHECK_THROWS_AS(phi(-0.1), InvalidArgument);
  CHECK_THROWS_AS(phi(1.1), InvalidArgument);
}

TEST_CASE("moment_g examples") {
  CHECK(moment_g(0.5, 1e-4) == doctest::Approx(0.125).epsilon(1e-8));
  CHECK(moment_g_limit(0.5) == 0.125);
  const double g = moment_g(0.25, 10.0);
  CHECK(g == doctest::Approx(0.0611384182939504763).epsilon(1e-12));
  CHECK(g <= phi(0.25) / 4);
  for (double p : {0.01, 0.2, 0.25, 0.4, 0.6, 0.9, 0.999}) {
    CHECK(moment_g(p, moment_g_argmax(p)) == doctest::Approx(phi(p) / 4).epsilon(1e-12));
  }
  CHECK_THROWS_AS(moment_g(0.5, 0.0), InvalidArgument);
  CHECK_THROWS_AS(moment_g(0.0, 1.0), InvalidArgument);
}

TEST_CASE("chi_squared examples") {
  const std::vector<double> ones(8, 1.0);
  const std::vector<double> half(8, 0.5);
  CHECK(chi_squared(ones, half) == doctest::Approx(0.5).epsilon(1e-15));
  const std::vector<double> ends{0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0};
  CHECK(chi_squared(ones, ends) == 0.0);
  const std::vector<double> tau{2.0, 0.0, 1.0};
  const std::vector<double> p{0.25, 0.9, 0.5};
  CHECK(chi_squared(tau, p) == doctest::Approx(0.7734928177512249).epsilon(1e-13));
  CHECK(chi_squared(tau, p, 6) == doctest::Approx(0.7734928177512249 / 2).epsilon(1e-13));
}

TEST_CASE("tail_bound examples") {
  CHECK(tail_bound({10, 0.3, 0.0}) == 0.0);
  CHECK(tail_bound({100, 0.1, 0.5}) == doctest::Approx(2 * std::exp(-2.0)).epsilon(1e-15));
  CHECK(tail_bound({100, 0.1, 0.5}) == doctest::Approx(0.270671).epsilon(1e-6));
  CHECK_THROWS_AS(tail_bound({10, 0.0, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(tail_bound({10, 0.1, -1.0}), InvalidArgument);
  CHECK_THROWS_AS(tail_bound({0, 0.1, 0.5}), InvalidArgument);
  // uniform weights recover the Chernoff bound
  for (std::size_t n : {5, 10, 15}) {
    const std::vector<double> w(n, 1.0);
    const std::vector<double> p(n, 0.5);
    for (double eps : {0.05, 0.15, 0.3}) {
      const double chernoff = 2 * std::exp(-2.0 * n * eps * eps);
      CHECK(tail_bound({n, eps, chi_squared(w, p)}) == doctest::Approx(chernoff).epsilon(1e-14));
      CHECK(exact_deviation_prob(w, p, eps) <= chernoff);
    }
  }
}

TEST_CASE("exact_deviation_prob hand cases") {
  const std::vector<double> one{1.0};
  const std::vector<double> half{0.5};
  CHECK(exact_deviation_prob(one, half, 0.4) == 1.0);
  CHECK(exact_deviation_prob(one, half, 0.6) == 0.0);

  const std::vector<double> w(10, 1.0);
  const std::vector<double> p(10, 0.5);
  CHECK(exact_deviation_prob(w, p, 0.3) == doctest::Approx(22.0 / 1024.0).epsilon(1e-14));

  // binomial oracle for a biased coin: |B/N - p| > eps, eps off the lattice
  const std::vector<double> q(12, 0.3);
  const std::vector<double> w12(12, 1.0);
  double tail = 0.0;
  for (int k = 0; k <= 12; ++k) {
    if (std::fabs(k / 12.0 - 0.3) > 0.21) tail += oracle::binomial_pmf(12, k, 0.3);
  }
  CHECK(exact_deviation_prob(w12, q, 0.21) == doctest::Approx(tail).epsilon(1e-12));

  // epsilon beyond the support
  Rng rng(3);
  std::vector<double> theta(7);
  std::vector<double> bias(7);
  double reach = 0.0;
  for (std::size_t j = 0; j < 7; ++j) {
    theta[j] = rng.normal();
    bias[j] = rng.uniform();
    reach += std::fabs(theta[j]) * std::max(bias[j], 1 - bias[j]);
  }
  CHECK(exact_deviation_prob(theta, bias, reach / 7 + 1e-9) == 0.0);

  const std::vector<double> big(21, 1.0);
  const std::vector<double> bighalf(21, 0.5);
  CHECK_THROWS_AS(exact_deviation_prob(big, bighalf, 0.1), EnumerationLimitError);
}
