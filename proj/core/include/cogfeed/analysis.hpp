#pragma once

#include <vector>

#include "cogfeed/channel.hpp"

namespace cogfeed {

// First-order closed-form outage value with its term breakdown. `value` is
// clamped to [0, 1]; `in_range` records whether clamping was needed.
// `validity_ratio` compares the neglected second-order scale 2^{-2B/(L-1)}
// against the first-order value; results with ratio > 0.1 are flagged as
// outside the trustworthy range of the first-order expansion.
struct AnalyticOutage {
    enum class Regime { kFinite, kAsymptotic };

    double value = 0.0;
    double unclamped = 0.0;
    struct Breakdown {
        double baseline = 0.0;
        double cdi_penalty = 0.0;
        double ipc_penalty = 0.0;
    } terms;
    Regime regime = Regime::kFinite;
    double validity_ratio = 0.0;
    bool in_range = true;
    bool approx_valid = true;  // in_range && validity_ratio <= 0.1
};

// Primary outage probability 1 - exp(-theta_p / gamma_p); unaffected by the
// secondary transmission by design.
double pu_outage_closed_form(const SystemParams& params);

// Decoupled-links outage floor 1 - G(L-1, theta_s/gamma_max) / G(L-1)
// (the unquantized-CDI limit).
double su_outage_baseline(const SystemParams& params);

// Coefficient of the 2^{-B/(L-1)} CDI penalty term (no feedforward).
double cdi_penalty_coefficient(const SystemParams& params);

// Coefficient of the 2^{-A} IPC penalty term. Named to avoid a collision
// with the beamformer coordinate alpha.
double ipc_penalty_coeff(const SystemParams& params);

// First-order secondary outage for orthogonal beamforming with unquantized
// power feedback. Feedforward divides the CDI penalty by (L - 1).
AnalyticOutage su_outage_first_order(const SystemParams& params, BitBudget b_cdi,
                                     bool feedforward = false);

// Large-p_max saturation level of the first-order outage (CDI penalty only).
AnalyticOutage su_outage_saturation(const SystemParams& params, BitBudget b_cdi);

// Strict lower-bound variant of the saturation level.
double su_outage_saturation_lower(const SystemParams& params, BitBudget b_cdi);

// First-order upper bound with both CDI and IPC feedback quantized.
// Feedforward divides both penalty terms by (L - 1).
AnalyticOutage su_outage_quantized_ipc_bound(const SystemParams& params, int a_ipc,
                                             BitBudget b_cdi, bool feedforward = false);

// Large-p_max limit of the quantized-feedback bound.
AnalyticOutage su_outage_saturation_bound(const SystemParams& params, int a_ipc,
                                          BitBudget b_cdi);

// Closed-form distribution laws used by validation and tests.
struct DistributionLaws {
    SystemParams params;
    int b_cdi = 0;

    // Probability the secondary transmitter is granted full power (first order).
    double pr_full_power(bool feedforward = false) const;
    // First-order CDF of the granted power on [0, p_max]; domain-checked.
    double power_cdf(double tau, bool feedforward = false) const;
    // First-order CDF upper bound with quantized power feedback (uses a_ipc).
    double quantized_power_cdf_bound(double tau) const;
    // Effective secondary channel gain density (chi-square, L-1 complex dof).
    double effective_gain_pdf(double tau) const;
    double effective_gain_cdf(double tau) const;
    // Residual leakage density/CDF on [0, 2^{-B/(L-1)}].
    double leakage_pdf(double tau) const;
    double leakage_cdf(double tau) const;
    // Survival function of the leakage fraction kappa = delta / epsilon.
    double leakage_fraction_survival(double tau) const;
    // CDF of the sphere-cap quantization error epsilon.
    double epsilon_cdf(double tau) const;
};

DistributionLaws distribution_laws(const SystemParams& params, BitBudget b_cdi);

// Worst-case first-order power loss from scalar quantization of the power
// feedback below p_max.
double ipc_power_loss_first_order(const SystemParams& params, int a_ipc, BitBudget b_cdi);

// Constant chi in the bit-allocation rule.
double chi_coefficient(const SystemParams& params);

// First-order outage-bound objective under the sum budget a + b = total.
double bit_allocation_objective(const SystemParams& params, double b_cdi, int total_bits);

struct BitAllocation {
    int b_star = 0;
    int a_star = 0;
    double b_star_unrounded = 0.0;
    double chi = 0.0;
    std::vector<double> objective;  // objective at b = 0..total
};

// Minimizes the first-order bound over the integer split; the unrounded
// stationary point is rounded by comparing the objective at both neighbors.
BitAllocation optimal_bit_allocation(int total_bits, const SystemParams& params);

}  // namespace cogfeed
