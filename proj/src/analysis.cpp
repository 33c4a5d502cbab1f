#include "tdscw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace tdscw::analysis {

double lambert_w(double x) {
  if (x < 0.0) throw std::domain_error("lambert_w: principal branch needs x >= 0");
  if (x == 0.0) return 0.0;
  // Initial guess: series for small x, log asymptote for large, constant in between.
  double w;
  if (x < 1.0) {
    w = x * (1.0 - x + 1.5 * x * x);
  } else if (x < std::exp(1.0) * 3.0) {
    w = 0.5 + 0.3 * std::log(x);
  } else {
    double lx = std::log(x);
    w = lx - std::log(lx);
  }
  for (int it = 0; it < 200; ++it) {
    double ew = std::exp(w);
    double f = w * ew - x;
    // Halley step
    double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    double step = f / denom;
    w -= step;
    if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(w))) break;
  }
  return w;
}

double expected_max_poisson(double lambda, double log10_k, PoissonMode mode, int trials,
                            std::uint64_t seed) {
  if (lambda <= 0.0) throw std::domain_error("expected_max_poisson: lambda must be positive");
  if (log10_k < std::log10(2.0)) {
    throw std::domain_error("expected_max_poisson: needs k >= 2");
  }
  const double ln_k = log10_k * std::log(10.0);
  if (mode == PoissonMode::formula) {
    return ln_k / lambert_w(ln_k / (std::exp(1.0) * lambda));
  }
  if (log10_k > 6.0) {
    throw std::domain_error("expected_max_poisson: monte_carlo supports k <= 1e6");
  }
  // Sample the maximum directly: P(max <= m) = F(m)^k, so draw U and invert
  // the Poisson CDF at U^(1/k). O(1) per trial instead of O(k).
  const double k = std::pow(10.0, log10_k);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    double u = uniform(rng);
    while (u <= 0.0) u = uniform(rng);
    const double q = std::exp(std::log(u) / k);
    double pmf = std::exp(-lambda);
    double cdf = pmf;
    int m = 0;
    while (cdf < q && m < 100000) {
      ++m;
      pmf *= lambda / m;
      cdf += pmf;
      if (pmf < 1e-320) break;  // CDF saturated in double precision
    }
    total += m;
  }
  return total / trials;
}

double optimization_loss(double lambda, double log10_B, double log10_N) {
  if (log10_B > log10_N) throw std::domain_error("optimization_loss: B must not exceed N");
  return expected_max_poisson(lambda, log10_B, PoissonMode::formula) /
         expected_max_poisson(lambda, log10_N, PoissonMode::formula);
}

std::string poisson_curve_csv(double lambda, int max_log10) {
  std::ostringstream os;
  os << "log10_budget,expected_improvement\n";
  for (int e = 1; e <= max_log10; ++e) {
    os << e << "," << expected_max_poisson(lambda, e, PoissonMode::formula) << "\n";
  }
  return os.str();
}

}  // namespace tdscw::analysis
