#include "cogfeed/mathkit.hpp"

#include <cmath>
#include <stdexcept>

namespace cogfeed {

Complex inner_product(const CVec& u, const CVec& v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("inner_product: dimension mismatch");
    }
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i];
    return acc;
}

double norm_squared(const CVec& v) {
    double acc = 0.0;
    for (const Complex& x : v) acc += std::norm(x);
    return acc;
}

double norm(const CVec& v) { return std::sqrt(norm_squared(v)); }

CVec project_orthogonal(const CVec& v, const CVec& u_unit) {
    const Complex c = inner_product(u_unit, v);
    CVec out(v);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * u_unit[i];
    return out;
}

double upper_incomplete_gamma(int n, double x) {
    if (n < 1) throw std::domain_error("upper_incomplete_gamma: order must be >= 1");
    if (x < 0.0) throw std::domain_error("upper_incomplete_gamma: x must be >= 0");
    // sum_{k=0}^{n-1} x^k / k!, accumulated incrementally
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < n; ++k) {
        term *= x / static_cast<double>(k);
        sum += term;
    }
    return gamma_integer_fn(n) * std::exp(-x) * sum;
}

double gamma_integer_fn(int n) {
    if (n < 1) throw std::domain_error("gamma_integer_fn: order must be >= 1");
    double acc = 1.0;
    for (int k = 2; k < n; ++k) acc *= static_cast<double>(k);
    return acc;
}

double beta_fn(double x, double y) {
    return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

CVec unit_uniform_sphere(int dim, SplitMix64& rng) {
    if (dim < 1) throw std::invalid_argument("unit_uniform_sphere: dim must be >= 1");
    CVec v(static_cast<std::size_t>(dim));
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (auto& x : v) {
            x = rng.complex_normal(1.0);
            n2 += std::norm(x);
        }
    } while (n2 <= 0.0);
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& x : v) x *= inv;
    return v;
}

CVec unit_uniform_sphere_perp(const CVec& u_unit, SplitMix64& rng) {
    if (u_unit.size() < 2) {
        throw std::invalid_argument("unit_uniform_sphere_perp: dim must be >= 2");
    }
    // Rejection on the measure-zero degenerate draw keeps the result exact.
    for (;;) {
        const CVec z = unit_uniform_sphere(static_cast<int>(u_unit.size()), rng);
        CVec w = project_orthogonal(z, u_unit);
        const double n = norm(w);
        if (n > 1e-12) {
            const double inv = 1.0 / n;
            for (auto& x : w) x *= inv;
            return w;
        }
    }
}

}  // namespace cogfeed
