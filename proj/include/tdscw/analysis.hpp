#pragma once

#include <cstdint>
#include <string>

namespace tdscw::analysis {

// Principal-branch Lambert W for x >= 0, via Halley iteration.
// Residual |W(x) e^{W(x)} - x| stays below 1e-10 on the nonnegative axis.
double lambert_w(double x);

enum class PoissonMode { formula, monte_carlo };

// Expected maximum of k i.i.d. Poisson(lambda) variables.
// Formula mode evaluates log(k) / W(log(k) / (e * lambda)); k is passed as
// log10 so budgets like 10^50 stay representable. Monte Carlo mode draws and
// maximizes, and only supports k <= 1e6.
double expected_max_poisson(double lambda, double log10_k, PoissonMode mode,
                            int trials = 100000, std::uint64_t seed = 1);

// Ratio  E[max of B] / E[max of N]  (both via the closed form).
double optimization_loss(double lambda, double log10_B, double log10_N);

// CSV rows "log10_budget,expected_improvement" for budgets 10^1..10^{max}.
std::string poisson_curve_csv(double lambda, int max_log10);

}  // namespace tdscw::analysis
