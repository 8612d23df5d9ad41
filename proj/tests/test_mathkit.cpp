#include <doctest.h>

#include <cmath>

#include "cogfeed/mathkit.hpp"
#include "cogfeed/stats.hpp"
#include "support/oracles.hpp"

using namespace cogfeed;

TEST_SUITE_BEGIN("mathkit");

TEST_CASE("inner product on basis vectors") {
    const CVec e1 = {1.0, 0.0, 0.0};
    const CVec e2 = {0.0, 1.0, 0.0};
    CHECK(inner_product(e1, e1) == Complex{1.0, 0.0});
    CHECK(inner_product(e1, e2) == Complex{0.0, 0.0});
    CHECK_THROWS_AS((void)inner_product(e1, CVec{1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("inner product matches elementwise oracle") {
    SplitMix64 rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        CVec u(5), v(5);
        for (auto& x : u) x = rng.complex_normal(1.0);
        for (auto& x : v) x = rng.complex_normal(1.0);
        Complex expect{0.0, 0.0};
        for (std::size_t i = 0; i < u.size(); ++i) expect += std::conj(u[i]) * v[i];
        CHECK(std::abs(inner_product(u, v) - expect) < 1e-12);
        CHECK(std::abs(std::abs(inner_product(u, u)) - norm_squared(u)) < 1e-12);
    }
}

TEST_CASE("orthogonal projection") {
    SplitMix64 rng(12);
    const CVec u = unit_uniform_sphere(4, rng);

    SUBCASE("parallel input collapses to zero") {
        const CVec w = project_orthogonal(u, u);
        CHECK(norm(w) < 1e-12);
    }
    SUBCASE("orthogonal input passes through") {
        const CVec v = unit_uniform_sphere_perp(u, rng);
        const CVec w = project_orthogonal(v, u);
        double diff = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) diff += std::norm(w[i] - v[i]);
        CHECK(std::sqrt(diff) < 1e-12);
    }
    SUBCASE("components reconstruct the input") {
        for (int rep = 0; rep < 50; ++rep) {
            CVec v(4);
            for (auto& x : v) x = rng.complex_normal(1.0);
            const CVec w = project_orthogonal(v, u);
            const Complex c = inner_product(u, v);
            CHECK(std::abs(inner_product(u, w)) < 1e-12);
            double diff = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                diff += std::norm(c * u[i] + w[i] - v[i]);
            }
            CHECK(std::sqrt(diff) < 1e-12);
        }
    }
}

TEST_CASE("pythagoras across the projection split") {
    SplitMix64 rng(13);
    for (int rep = 0; rep < 100; ++rep) {
        const CVec u = unit_uniform_sphere(5, rng);
        CVec v(5);
        for (auto& x : v) x = rng.complex_normal(2.0);
        const CVec w = project_orthogonal(v, u);
        const double lhs = norm_squared(w) + std::norm(inner_product(u, v));
        CHECK(lhs == doctest::Approx(norm_squared(v)).epsilon(1e-10));
    }
}

TEST_CASE("upper incomplete gamma closed forms") {
    CHECK(upper_incomplete_gamma(3, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
    for (double x : {0.1, 1.0, 4.5}) {
        CHECK(upper_incomplete_gamma(1, x) == doctest::Approx(std::exp(-x)).epsilon(1e-14));
    }
    CHECK_THROWS_AS((void)upper_incomplete_gamma(0, 1.0), std::domain_error);
    CHECK_THROWS_AS((void)upper_incomplete_gamma(3, -0.5), std::domain_error);
}

TEST_CASE("upper incomplete gamma agrees with quadrature") {
    const double expected = oracles::integrate_to_inf(
        [](double t) { return t * t * t * std::exp(-t); }, 1.5);
    CHECK(upper_incomplete_gamma(4, 1.5) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("normalized upper gamma is a survival function") {
    for (int n : {2, 3, 5}) {
        const double g = gamma_integer_fn(n);
        CHECK(upper_incomplete_gamma(n, 0.0) / g == doctest::Approx(1.0));
        double prev = 1.0;
        for (double x = 0.25; x < 40.0; x += 0.25) {
            const double s = upper_incomplete_gamma(n, x) / g;
            CHECK(s <= prev + 1e-12);
            prev = s;
        }
        CHECK(prev < 1e-10);
    }
}

TEST_CASE("beta function identity") {
    CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(beta_fn(1.0, 5.0) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("unit sphere draws") {
    SplitMix64 rng(21);

    SUBCASE("dim 1 is a unit-modulus scalar") {
        for (int rep = 0; rep < 10; ++rep) {
            const CVec v = unit_uniform_sphere(1, rng);
            CHECK(std::abs(std::abs(v[0]) - 1.0) < 1e-12);
        }
    }
    SUBCASE("unit norm and coordinate symmetry") {
        const int n = 100000;
        const int dim = 4;
        double mean_first = 0.0;
        for (int i = 0; i < n; ++i) {
            const CVec v = unit_uniform_sphere(dim, rng);
            mean_first += std::norm(v[0]);
        }
        mean_first /= n;
        // |v_0|^2 is Beta(1, dim-1): mean 1/dim, variance known in closed form.
        const double var = (1.0 / dim) * (1.0 - 1.0 / dim) * 2.0 / (dim + 1.0);
        const double sigma = std::sqrt(var / n);
        CHECK(std::abs(mean_first - 1.0 / dim) < 3.0 * sigma);
    }
}

TEST_CASE("overlap of independent sphere draws follows the beta law") {
    SplitMix64 rng(22);
    const int dim = 4;
    const int n = 100000;
    std::vector<double> overlaps;
    overlaps.reserve(n);
    for (int i = 0; i < n; ++i) {
        const CVec u = unit_uniform_sphere(dim, rng);
        const CVec v = unit_uniform_sphere(dim, rng);
        overlaps.push_back(std::norm(inner_product(u, v)));
    }
    const auto cdf = [&](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return 1.0 - std::pow(1.0 - t, dim - 1);
    };
    const KsResult ks = ks_test(overlaps, cdf);
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("overlap against a fixed direction passes a chi-square uniformity test") {
    SplitMix64 rng(24);
    const int dim = 4;
    const int n = 100000;
    CVec w(dim, Complex{0.0, 0.0});
    w[0] = 1.0;
    std::vector<double> overlaps;
    overlaps.reserve(n);
    for (int i = 0; i < n; ++i) {
        overlaps.push_back(std::norm(inner_product(unit_uniform_sphere(dim, rng), w)));
    }
    const auto cdf = [&](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return 1.0 - std::pow(1.0 - t, dim - 1);
    };
    CHECK(oracles::chi_square_gof_p(overlaps, cdf) > 0.01);
}

TEST_CASE("sphere draws orthogonal to a direction stay orthogonal") {
    SplitMix64 rng(23);
    const CVec u = unit_uniform_sphere(4, rng);
    for (int rep = 0; rep < 100; ++rep) {
        const CVec w = unit_uniform_sphere_perp(u, rng);
        CHECK(std::abs(norm(w) - 1.0) < 1e-12);
        CHECK(std::abs(inner_product(u, w)) < 1e-10);
    }
}

TEST_SUITE_END();
