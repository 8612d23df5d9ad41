#pragma once

#include <functional>
#include <vector>

// Test-side numerical oracles, independent of the library implementations
// they are used to check.

namespace oracles {

// Adaptive Simpson quadrature on [a, b] to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

// Integral over [a, infinity) for integrands with exponential decay; the
// upper limit is truncated far past the decay scale.
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double tail_extent = 120.0, double tol = 1e-12);

// Chi-square goodness-of-fit p-value for samples against a CDF, using
// equal-probability bins. bins-1 must be even so the survival function
// reduces to an integer-order incomplete gamma.
double chi_square_gof_p(const std::vector<double>& samples,
                        const std::function<double(double)>& cdf, int bins = 21);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace oracles
