#pragma once

#include <functional>
#include <vector>

namespace cogfeed {

struct KsResult {
    double statistic = 0.0;  // sup |F_n - F|
    double p_value = 0.0;
    std::size_t n = 0;
};

// One-sample Kolmogorov-Smirnov test against a continuous CDF.
// Asymptotic p-value with the standard finite-n effective scaling.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

// Binomial standard error sqrt(p(1-p)/n).
double binomial_sigma(double p, long n);

}  // namespace cogfeed
