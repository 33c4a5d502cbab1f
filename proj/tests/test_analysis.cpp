#include "doctest.h"

#include <stdexcept>

#include <cmath>

#include "tdscw/analysis.hpp"

using namespace tdscw::analysis;

TEST_CASE("lambert w fixed points") {
  CHECK(lambert_w(0.0) == doctest::Approx(0.0));
  CHECK(lambert_w(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  double w = lambert_w(176.4);
  CHECK(std::abs(w * std::exp(w) - 176.4) < 1e-10);
}

TEST_CASE("lambert w residual over a log grid") {
  for (double x = 1e-6; x <= 1e3 + 1e-9; x *= std::pow(10.0, 0.25)) {
    double w = lambert_w(x);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-10);
  }
  // larger arguments are exact to machine precision in relative terms
  for (double x = 1e4; x < 1e12; x *= 100.0) {
    double w = lambert_w(x);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-12 * x);
  }
  CHECK_THROWS_AS(lambert_w(-0.1), std::domain_error);
}

TEST_CASE("expected max of poissons, closed form") {
  // lambda = 0.24 reference points: ~5 at 10^4, ~20 at 10^30, ~30 at 10^50.
  CHECK(expected_max_poisson(0.24, 4, PoissonMode::formula) == doctest::Approx(5.0).epsilon(0.1));
  CHECK(expected_max_poisson(0.24, 30, PoissonMode::formula) ==
        doctest::Approx(20.0).epsilon(0.025));
  CHECK(expected_max_poisson(0.24, 50, PoissonMode::formula) ==
        doctest::Approx(30.0).epsilon(0.017));
}

namespace {

// Exact E[max of k Poisson(lambda)] = sum_m (1 - F(m)^k).
double exact_expected_max(double lambda, double log10k) {
  double k = std::pow(10.0, log10k);
  double pmf = std::exp(-lambda);
  double cdf = pmf;
  double total = 0.0;
  for (int m = 0; m < 10000; ++m) {
    double p_le = std::exp(k * std::log(std::min(1.0, cdf)));
    total += 1.0 - p_le;
    if (1.0 - p_le < 1e-14 && m > lambda) break;
    pmf *= lambda / (m + 1);
    cdf += pmf;
  }
  return total;
}

}  // namespace

TEST_CASE("monte carlo matches the exact series") {
  for (double lambda : {0.24, 1.0, 5.0}) {
    for (double log10k : {2.0, 3.0, 4.0}) {
      double exact = exact_expected_max(lambda, log10k);
      double mc = expected_max_poisson(lambda, log10k, PoissonMode::monte_carlo, 100000, 7);
      CHECK(std::abs(mc - exact) / exact <= 0.02);
    }
  }
}

TEST_CASE("closed form sits above the finite-sample mean at desk scale") {
  // The W-based expression is an asymptotic upper envelope; at k <= 1e4 it
  // overshoots the exact expectation by far more than 10 percent.
  for (double lambda : {0.24, 1.0, 5.0}) {
    for (double log10k : {2.0, 3.0, 4.0}) {
      double f = expected_max_poisson(lambda, log10k, PoissonMode::formula);
      double exact = exact_expected_max(lambda, log10k);
      CHECK(f > exact);
    }
  }
  CHECK(std::abs(expected_max_poisson(0.24, 4, PoissonMode::formula) -
                 exact_expected_max(0.24, 4)) /
            exact_expected_max(0.24, 4) >
        0.10);
}

TEST_CASE("monte carlo capacity limit") {
  CHECK_THROWS_AS(expected_max_poisson(1.0, 7.0, PoissonMode::monte_carlo), std::domain_error);
}

TEST_CASE("optimization loss") {
  CHECK(optimization_loss(0.24, 12, 12) == doctest::Approx(1.0));
  double r = optimization_loss(0.24, 4, 50);
  CHECK(r == doctest::Approx(5.0 / 30.0).epsilon(0.08));
  // monotone nondecreasing in the budget
  double prev = 0.0;
  for (double b = 1; b <= 50; b += 7) {
    double v = optimization_loss(0.24, b, 50);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}
