#pragma once

#include <complex>
#include <vector>

#include "cogfeed/rng.hpp"

namespace cogfeed {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

// Hermitian inner product u^dag v, conjugate-linear in the first argument.
// Throws std::invalid_argument on length mismatch.
Complex inner_product(const CVec& u, const CVec& v);

double norm_squared(const CVec& v);
double norm(const CVec& v);

// Component of v orthogonal to the unit vector u: v - (u^dag v) u.
CVec project_orthogonal(const CVec& v, const CVec& u_unit);

// Upper incomplete gamma for integer order n >= 1:
//   G(n, x) = (n-1)! e^{-x} sum_{k=0}^{n-1} x^k / k!
// Exact closed form for integer orders; throws std::domain_error otherwise.
double upper_incomplete_gamma(int n, double x);

// Gamma(n) = (n-1)! for integer n >= 1.
double gamma_integer_fn(int n);

// Euler beta function B(x, y).
double beta_fn(double x, double y);

// Unit vector drawn uniformly from the complex sphere in C^dim.
CVec unit_uniform_sphere(int dim, SplitMix64& rng);

// Unit vector uniform on the sphere restricted to the orthogonal
// complement of the unit vector u (dim >= 2).
CVec unit_uniform_sphere_perp(const CVec& u_unit, SplitMix64& rng);

}  // namespace cogfeed
