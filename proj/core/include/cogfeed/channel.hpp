#pragma once

#include "cogfeed/mathkit.hpp"
#include "cogfeed/rng.hpp"

namespace cogfeed {

// Feedback bit budget: a finite number of bits or unquantized ("infinite").
class BitBudget {
  public:
    constexpr BitBudget() = default;
    constexpr explicit BitBudget(int bits) : bits_(bits), infinite_(false) {}
    static constexpr BitBudget infinite() {
        BitBudget b;
        b.infinite_ = true;
        return b;
    }
    constexpr bool is_infinite() const { return infinite_; }
    constexpr int bits() const { return bits_; }
    constexpr bool operator==(const BitBudget&) const = default;

  private:
    int bits_ = 0;
    bool infinite_ = false;
};

// Scalar constants of the two-link model. Thresholds and SNR budgets are
// stored in linear units; the CLI converts from dB at the boundary.
struct SystemParams {
    int L = 4;                // transmit antennas at the secondary transmitter
    double lambda = 0.1;      // cross-link path-loss factor, 0 < lambda < 1
    double sigma2 = 1.0;      // receiver noise variance
    double theta_p = 3.0;     // primary SINR decode threshold
    double theta_s = 3.0;     // secondary SNR decode threshold
    double gamma_p = 10.0;    // primary transmit SNR P_p / sigma2
    double p_max = 10.0;      // maximum secondary transmit power
    BitBudget b_cdi{16};      // cooperative channel-direction feedback bits
    BitBudget a_ipc{4};       // interference-power-control feedback bits
    BitBudget b_local = BitBudget::infinite();  // local feedback / feedforward bits

    double gamma_max() const { return p_max / sigma2; }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// One block-fading draw with its gain/shape decomposition.
struct ChannelRealization {
    CVec h_x;     // secondary transmitter -> primary receiver channel
    CVec h_s;     // secondary link channel
    double g_p;   // primary link channel power
    double g_x;   // cross channel power, |h_x|^2 / lambda
    double g_s;   // secondary channel power, |h_s|^2
    CVec s_x;     // cross channel shape, unit norm
    CVec s_s;     // secondary channel shape, unit norm
};

// h_x entries are iid CN(0, lambda), h_s entries iid CN(0, 1), g_p ~ Exp(1),
// all mutually independent.
ChannelRealization sample_channels(const SystemParams& params, SplitMix64& rng);

// Primary receive SINR gamma_p g_p / (1 + |f^dag h_x|^2 / sigma2).
double pu_sinr(const ChannelRealization& real, const CVec& f, const SystemParams& params);

// Secondary receive SNR |f^dag h_s|^2 / sigma2. Cross interference onto the
// secondary receiver is taken as zero in this model.
double su_snr(const ChannelRealization& real, const CVec& f, const SystemParams& params);

}  // namespace cogfeed
