#include <doctest.h>

#include <cmath>

#include "cogfeed/channel.hpp"
#include "cogfeed/stats.hpp"
#include "support/oracles.hpp"

using namespace cogfeed;

TEST_SUITE_BEGIN("channel");

namespace {

SystemParams defaults() { return SystemParams{}; }

}  // namespace

TEST_CASE("parameter validation names the offending field") {
    SystemParams p = defaults();
    p.L = 2;
    CHECK_THROWS_WITH_AS(p.validate(), "SystemParams.L: must be >= 3", std::invalid_argument);
    p = defaults();
    p.lambda = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = defaults();
    p.sigma2 = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK(defaults().gamma_max() == doctest::Approx(10.0));
}

TEST_CASE("channel moments and decomposition") {
    const SystemParams p = defaults();
    SplitMix64 rng(101);
    const long n = 1000000;
    double sum_gp = 0.0, sum_gx = 0.0;
    long below = 0;
    const double threshold = p.theta_p / p.gamma_p;
    for (long i = 0; i < n; ++i) {
        const ChannelRealization r = sample_channels(p, rng);
        sum_gp += r.g_p;
        sum_gx += r.g_x;
        if (r.g_p < threshold) ++below;
        if (i < 200) {
            // decomposition identities
            CHECK(std::abs(norm(r.s_x) - 1.0) < 1e-12);
            CHECK(std::abs(norm(r.s_s) - 1.0) < 1e-12);
            double diff_x = 0.0, diff_s = 0.0;
            const double cx = std::sqrt(p.lambda * r.g_x);
            const double cs = std::sqrt(r.g_s);
            for (int k = 0; k < p.L; ++k) {
                diff_x += std::norm(cx * r.s_x[k] - r.h_x[k]);
                diff_s += std::norm(cs * r.s_s[k] - r.h_s[k]);
            }
            CHECK(std::sqrt(diff_x) < 1e-10);
            CHECK(std::sqrt(diff_s) < 1e-10);
            CHECK(r.g_p >= 0.0);
            CHECK(r.g_x >= 0.0);
            CHECK(r.g_s >= 0.0);
        }
    }
    // g_p ~ Exp(1): mean 1, variance 1.
    CHECK(std::abs(sum_gp / n - 1.0) < 3.0 / std::sqrt(static_cast<double>(n)));
    // g_x is chi-square with L complex dof: mean L, variance L.
    CHECK(std::abs(sum_gx / n - p.L) <
          3.0 * std::sqrt(static_cast<double>(p.L) / static_cast<double>(n)));
    // the primary outage event seen directly through g_p
    const double expect = 1.0 - std::exp(-threshold);
    const double phat = static_cast<double>(below) / n;
    CHECK(std::abs(phat - expect) < 3.0 * binomial_sigma(expect, n));
}

TEST_CASE("cross channel power matches the chi-square law") {
    const SystemParams p = defaults();
    SplitMix64 rng(102);
    const long n = 100000;
    std::vector<double> gx;
    gx.reserve(n);
    for (long i = 0; i < n; ++i) gx.push_back(sample_channels(p, rng).g_x);
    const auto cdf = [&](double t) {
        if (t <= 0.0) return 0.0;
        return 1.0 - upper_incomplete_gamma(p.L, t) / gamma_integer_fn(p.L);
    };
    CHECK(ks_test(std::move(gx), cdf).p_value > 0.01);
}

TEST_CASE("channel shapes are isotropic") {
    const SystemParams p = defaults();
    SplitMix64 rng(103);
    const long n = 100000;
    CVec w(static_cast<std::size_t>(p.L), Complex{0.0, 0.0});
    w[1] = 1.0;
    std::vector<double> sx_overlap, ss_overlap;
    sx_overlap.reserve(n);
    ss_overlap.reserve(n);
    for (long i = 0; i < n; ++i) {
        const ChannelRealization r = sample_channels(p, rng);
        sx_overlap.push_back(std::norm(inner_product(r.s_x, w)));
        ss_overlap.push_back(std::norm(inner_product(r.s_s, w)));
    }
    const auto beta_cdf = [&](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return 1.0 - std::pow(1.0 - t, p.L - 1);
    };
    CHECK(ks_test(std::move(sx_overlap), beta_cdf).p_value > 0.01);
    CHECK(ks_test(std::move(ss_overlap), beta_cdf).p_value > 0.01);
}

TEST_CASE("primary SINR") {
    const SystemParams p = defaults();
    SplitMix64 rng(104);
    const ChannelRealization r = sample_channels(p, rng);
    const CVec zero(static_cast<std::size_t>(p.L), Complex{0.0, 0.0});

    SUBCASE("no interference reduces to the SNR") {
        CHECK(pu_sinr(r, zero, p) == doctest::Approx(p.gamma_p * r.g_p).epsilon(1e-12));
    }
    SUBCASE("a beam orthogonal to the cross channel is invisible") {
        CVec f = unit_uniform_sphere_perp(r.s_x, rng);
        for (auto& x : f) x *= 2.5;
        CHECK(pu_sinr(r, f, p) == doctest::Approx(p.gamma_p * r.g_p).epsilon(1e-9));
    }
    SUBCASE("matches the gain/shape decomposition") {
        for (int rep = 0; rep < 50; ++rep) {
            CVec f(static_cast<std::size_t>(p.L));
            for (auto& x : f) x = rng.complex_normal(4.0);
            const double via_shape =
                p.gamma_p * r.g_p /
                (1.0 + p.lambda * r.g_x * std::norm(inner_product(f, r.s_x)) / p.sigma2);
            CHECK(pu_sinr(r, f, p) == doctest::Approx(via_shape).epsilon(1e-10));
        }
    }
    SUBCASE("non-increasing in the interference power") {
        double prev = pu_sinr(r, zero, p);
        for (double scale : {0.5, 1.0, 2.0, 4.0}) {
            CVec f = r.s_x;
            for (auto& x : f) x *= scale;
            const double v = pu_sinr(r, f, p);
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("secondary SNR") {
    const SystemParams p = defaults();
    SplitMix64 rng(105);
    const ChannelRealization r = sample_channels(p, rng);
    const CVec zero(static_cast<std::size_t>(p.L), Complex{0.0, 0.0});
    CHECK(su_snr(r, zero, p) == 0.0);

    SUBCASE("matched beamformer") {
        const double power = 7.0;
        CVec f = r.s_s;
        for (auto& x : f) x *= std::sqrt(power);
        CHECK(su_snr(r, f, p) ==
              doctest::Approx(power * r.g_s / p.sigma2).epsilon(1e-10));
    }
    SUBCASE("two expressions agree") {
        for (int rep = 0; rep < 50; ++rep) {
            CVec f(static_cast<std::size_t>(p.L));
            for (auto& x : f) x = rng.complex_normal(2.0);
            const double via_shape =
                r.g_s * std::norm(inner_product(f, r.s_s)) / p.sigma2;
            CHECK(su_snr(r, f, p) == doctest::Approx(via_shape).epsilon(1e-10));
        }
    }
}

TEST_SUITE_END();
