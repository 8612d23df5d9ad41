#pragma once

#include "cogfeed/channel.hpp"
#include "cogfeed/feedback.hpp"
#include "cogfeed/mathkit.hpp"

namespace cogfeed {

struct BeamformerOutput {
    CVec f;              // transmit beamformer (norm^2 = transmit power)
    double power = 0.0;  // |f|^2, always <= p_max
    BeamMode mode = BeamMode::kOcb;
};

// Orthogonal beamformer: full granted power along the in-null-space
// component of the secondary channel shape. Zero beamformer when that
// component vanishes.
BeamformerOutput ocb_beamformer(const CdiQuantization& cdi, const IpcSignal& ipc);

// Non-orthogonal beamformer f = alpha s_hat_x + beta s_hat_perp.
// Maximum-ratio transmission when the cross-direction cap mu1 is slack
// (mu1 >= |a|^2 mu2); otherwise the cap is saturated: |alpha|^2 = mu1,
// |beta|^2 = mu2 - mu1, with phases matched to the channel decomposition.
BeamformerOutput nocb_beamformer(const CdiQuantization& cdi, const IpcSignal& ipc);

// Interference power |f^dag h_x|^2 = lambda g_x |f^dag s_x|^2 at the
// primary receiver.
double interference_power(const CVec& f, const ChannelRealization& real);

// True unless omega >= 0 and the interference exceeds the margin
// (with a small absolute slack for floating point).
bool verify_interference_budget(const CVec& f, const ChannelRealization& real, double omega);

}  // namespace cogfeed
