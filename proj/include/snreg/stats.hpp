#pragma once

#include <cstddef>
#include <vector>

namespace snreg {

double normal_pdf(double x);
double normal_cdf(double x);

// Inverse standard normal CDF, accurate to ~1e-15 (rational approximation
// plus one Halley refinement).
double normal_quantile(double p);

// E[Z | Z >= Phi^{-1}(tau)] = phi(Phi^{-1}(tau)) / (1 - tau) for Z ~ N(0,1).
double normal_es_upper(double tau);

// P(X > x) for X ~ chi-square with df degrees of freedom.
double chi_square_sf(double x, double df);

// Order-statistic quantile of an ascending sample: entry ceil(p * size),
// 1-based. Requires 0 < p <= 1 and a non-empty sample.
double sorted_quantile(const std::vector<double>& sorted_ascending, double p);

}  // namespace snreg
