#include "cogfeed/beamform.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace cogfeed {

namespace {

Complex unit_phase(Complex z) {
    const double m = std::abs(z);
    return m > 0.0 ? z / m : Complex{0.0, 0.0};
}

}  // namespace

BeamformerOutput ocb_beamformer(const CdiQuantization& cdi, const IpcSignal& ipc) {
    if (ipc.mode != BeamMode::kOcb) {
        throw std::invalid_argument("ocb_beamformer: signal mode mismatch");
    }
    BeamformerOutput out;
    out.mode = BeamMode::kOcb;
    out.f.resize(cdi.s_hat_x.size());
    const double amp = std::sqrt(ipc.ocb_power);
    for (std::size_t i = 0; i < out.f.size(); ++i) out.f[i] = amp * cdi.s_hat_perp[i];
    out.power = norm_squared(out.f);
    return out;
}

BeamformerOutput nocb_beamformer(const CdiQuantization& cdi, const IpcSignal& ipc) {
    if (ipc.mode != BeamMode::kNocb) {
        throw std::invalid_argument("nocb_beamformer: signal mode mismatch");
    }
    const double mu1 = ipc.mu1;
    const double mu2 = ipc.mu2;
    const double a_sq = std::norm(cdi.a);
    Complex alpha, beta;
    if (mu1 >= a_sq * mu2) {
        // Cross-direction cap slack: maximum-ratio transmission at power mu2.
        const double amp = std::sqrt(mu2);
        alpha = cdi.a * amp;
        beta = cdi.b * amp;
    } else {
        assert(mu1 <= mu2);
        alpha = unit_phase(cdi.a) * std::sqrt(mu1);
        beta = unit_phase(cdi.b) * std::sqrt(std::max(mu2 - mu1, 0.0));
    }
    BeamformerOutput out;
    out.mode = BeamMode::kNocb;
    out.f.resize(cdi.s_hat_x.size());
    for (std::size_t i = 0; i < out.f.size(); ++i) {
        out.f[i] = alpha * cdi.s_hat_x[i] + beta * cdi.s_hat_perp[i];
    }
    out.power = norm_squared(out.f);
    return out;
}

double interference_power(const CVec& f, const ChannelRealization& real) {
    return std::norm(inner_product(f, real.h_x));
}

bool verify_interference_budget(const CVec& f, const ChannelRealization& real, double omega) {
    if (omega < 0.0) return true;
    return interference_power(f, real) <= omega + 1e-9;
}

}  // namespace cogfeed
