#include "cogfeed/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cogfeed {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw std::invalid_argument("SystemParams." + field + ": " + what);
}

void require_bits(const BitBudget& b, const std::string& field) {
    require(b.is_infinite() || b.bits() >= 0, field, "must be >= 0 or infinite");
}

}  // namespace

void SystemParams::validate() const {
    require(L >= 3, "L", "must be >= 3");
    require(lambda > 0.0 && lambda < 1.0, "lambda", "must be in (0, 1)");
    require(sigma2 > 0.0, "sigma2", "must be > 0");
    require(theta_p > 0.0, "theta_p", "must be > 0");
    require(theta_s > 0.0, "theta_s", "must be > 0");
    require(gamma_p > 0.0, "gamma_p", "must be > 0");
    require(p_max > 0.0, "p_max", "must be > 0");
    require_bits(b_cdi, "b_cdi");
    require_bits(a_ipc, "a_ipc");
    require_bits(b_local, "b_local");
}

ChannelRealization sample_channels(const SystemParams& params, SplitMix64& rng) {
    const std::size_t L = static_cast<std::size_t>(params.L);
    ChannelRealization r;
    r.h_x.resize(L);
    r.h_s.resize(L);
    for (auto& x : r.h_x) x = rng.complex_normal(params.lambda);
    for (auto& x : r.h_s) x = rng.complex_normal(1.0);
    r.g_p = rng.exponential();

    const double hx_norm2 = norm_squared(r.h_x);
    const double hs_norm2 = norm_squared(r.h_s);
    r.g_x = hx_norm2 / params.lambda;
    r.g_s = hs_norm2;

    r.s_x = r.h_x;
    const double inv_x = 1.0 / std::sqrt(hx_norm2);
    for (auto& x : r.s_x) x *= inv_x;
    r.s_s = r.h_s;
    const double inv_s = 1.0 / std::sqrt(hs_norm2);
    for (auto& x : r.s_s) x *= inv_s;
    return r;
}

double pu_sinr(const ChannelRealization& real, const CVec& f, const SystemParams& params) {
    const double interference = std::norm(inner_product(f, real.h_x));
    return params.gamma_p * real.g_p / (1.0 + interference / params.sigma2);
}

double su_snr(const ChannelRealization& real, const CVec& f, const SystemParams& params) {
    return std::norm(inner_product(f, real.h_s)) / params.sigma2;
}

}  // namespace cogfeed
