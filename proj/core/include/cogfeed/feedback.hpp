#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cogfeed/channel.hpp"
#include "cogfeed/mathkit.hpp"

namespace cogfeed {

enum class BeamMode { kOcb, kNocb };

// Quantized cross-channel direction and the decomposition of the secondary
// channel shape it induces: s_s = a * s_hat_x + b * s_hat_perp.
//
// When s_s is (numerically) parallel to s_hat_x there is no perpendicular
// component; s_hat_perp is then the zero vector and b = delta = 0.
struct CdiQuantization {
    CVec s_hat_x;      // quantized cross-channel shape, unit norm
    double epsilon;    // quantization error 1 - |s_hat_x^dag s_x|^2
    Complex a;         // s_hat_x^dag s_s
    Complex b;         // s_hat_perp^dag s_s (real, >= 0 by construction)
    CVec s_hat_perp;   // unit vector in null(s_hat_x) closest to s_s
    double delta;      // |s_x^dag s_hat_perp|^2, residual leakage; delta <= epsilon
};

// Sphere-cap statistical model: epsilon is drawn by inverse transform from
// Pr(eps <= t) = 2^B t^{L-1} on [0, 2^{-B/(L-1)}] and the quantized shape is
// placed at chordal distance epsilon from s_x in an isotropic direction.
// An infinite budget yields epsilon = 0 and s_hat_x = s_x.
CdiQuantization quantize_cdi_statistical(const CVec& s_x, const CVec& s_s, BitBudget b,
                                         SplitMix64& rng);

// Nearest-codeword quantization against an explicit codebook (maximum
// squared correlation). Used by the random-codebook mode and by tests.
CdiQuantization quantize_cdi_with_codebook(const CVec& s_x, const CVec& s_s,
                                           std::span<const CVec> codebook);

// Random vector quantization: 2^B isotropic codewords materialized per call.
// Validation-scale budgets only; throws for B > 16.
CdiQuantization quantize_cdi_rvq(const CVec& s_x, const CVec& s_s, BitBudget b,
                                 SplitMix64& rng);

// Sphere-cap quantization of the secondary channel shape itself, used for
// finite-rate local feedback and feedforward.
CVec quantize_local_cdi(const CVec& s_s, BitBudget b_prime, SplitMix64& rng);

// Tolerable interference margin at the primary receiver:
//   omega = sigma2 (gamma_p g_p / theta_p - 1); negative when the primary
// link is in outage on its own.
double compute_omega(double g_p, const SystemParams& params);

// Unquantized power cap for the orthogonal beamformer. Returns
// omega / (lambda g_x eps) for omega >= 0 (delta replaces eps under
// feedforward), p_max for omega < 0, and +infinity when the denominator
// vanishes (the quantizer caps it at p_max).
double ipc_ocb_unquantized(double omega, double g_x, const CdiQuantization& cdi,
                           const SystemParams& params, bool feedforward);

// Which scalar signal a codebook quantizes.
enum class IpcQuantity { kEta, kEtaFf, kNuSq, kNuSqFf };

const char* ipc_quantity_name(IpcQuantity q);

// Equal-probability scalar quantizer: level 0 is pinned at zero and the
// remaining levels are conditional quantiles of the target signal given that
// the primary link is not in outage.
struct IpcCodebook {
    IpcQuantity quantity = IpcQuantity::kEta;
    int bits_a = 0;                 // A; the codebook holds 2^A levels
    BitBudget b_cdi;                // CDI budget the signal law depends on
    double p_max = 0.0;
    std::vector<double> levels;     // strictly increasing, levels[0] == 0
    long n_samples = 0;             // conditional draws used to fit quantiles
    std::uint64_t seed = 0;
    std::uint64_t params_hash = 0;
    int levels_above_p_max = 0;
    bool overflow_flagged = false;  // more than two levels exceed p_max

    int n_levels() const { return static_cast<int>(levels.size()); }
};

// Raised when codebook construction cannot collect enough conditional draws.
struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fits the 1/N .. (N-1)/N conditional quantiles of the requested signal from
// n_samples Monte Carlo draws (n_samples >= 1e5, A >= 1). The nu-type
// signals additionally condition on a nonnegative signal value; fewer than
// n_samples/10 accepted draws raises SamplingError.
IpcCodebook build_ipc_codebook(const SystemParams& params, IpcQuantity quantity,
                               long n_samples, std::uint64_t seed);

// Largest codebook level <= x. Ties resolve to the level itself.
double floor_quantize(double x, const IpcCodebook& codebook);

// Per-block feedback message. For orthogonal beamforming only ocb_power is
// meaningful (mu1/mu2 mirror it); for non-orthogonal beamforming the pair
// (mu1, mu2) caps the power in the quantized cross direction and the total
// power, and ocb_power mirrors mu2.
struct IpcSignal {
    enum class NocbBranch { kNone, kPowerControl, kOrthogonal, kOutage };

    bool outage_bit = false;  // primary link in outage; transmit at p_max
    double ocb_power = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    BeamMode mode = BeamMode::kOcb;
    NocbBranch branch = NocbBranch::kNone;
    bool feedforward = false;
};

// Floor-quantizes the orthogonal-beamforming power cap. A null codebook
// means unquantized feedback (the cap is used as-is below p_max).
IpcSignal quantize_ipc_ocb(double eta, const IpcCodebook* codebook, double omega,
                           const SystemParams& params, bool feedforward = false);

struct NocbCodebooks {
    const IpcCodebook* nu_sq = nullptr;  // quantizes the cross-direction power cap
    const IpcCodebook* eta = nullptr;    // quantizes the fallback total-power cap
};

// Two-component feedback for non-orthogonal beamforming. Null codebooks mean
// unquantized feedback. Exactly one branch fires per call:
//   power-control when the cross-direction budget is nonnegative,
//   orthogonal fallback when it is negative, outage when omega < 0.
IpcSignal ipc_nocb(double omega, double g_x, const CdiQuantization& cdi,
                   const NocbCodebooks& codebooks, const SystemParams& params,
                   bool feedforward);

// Worst-case transmit power lost to scalar quantization below p_max: the
// widest cell among those at or below the level straddling p_max.
double ipc_power_loss_bound(const IpcCodebook& codebook, const SystemParams& params);

// Stable fingerprint of all scalar parameters, used in codebook cache keys
// and serialized alongside codebooks.
std::uint64_t params_fingerprint(const SystemParams& params);

std::string ipc_codebook_to_json(const IpcCodebook& codebook);
IpcCodebook ipc_codebook_from_json(const std::string& text);

}  // namespace cogfeed
