#include "cogfeed/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cogfeed/mathkit.hpp"

namespace cogfeed {

namespace {

double two_pow(double x) { return std::exp2(x); }

// 2^{-B/(L-1)}, the CDI resolution scale; 0 for an unquantized budget.
double cdi_scale(const SystemParams& p, BitBudget b) {
    if (b.is_infinite()) return 0.0;
    return two_pow(-static_cast<double>(b.bits()) / (p.L - 1));
}

AnalyticOutage assemble(double baseline, double cdi_pen, double ipc_pen, double scale,
                        AnalyticOutage::Regime regime) {
    AnalyticOutage out;
    out.terms = {baseline, cdi_pen, ipc_pen};
    out.unclamped = baseline + cdi_pen + ipc_pen;
    out.value = std::clamp(out.unclamped, 0.0, 1.0);
    out.regime = regime;
    out.in_range = out.unclamped >= 0.0 && out.unclamped <= 1.0;
    out.validity_ratio = out.unclamped > 0.0
                             ? scale * scale / out.unclamped
                             : (scale > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    out.approx_valid = out.in_range && out.validity_ratio <= 0.1;
    return out;
}

void check_finite_bits(BitBudget b, const char* what) {
    if (!b.is_infinite() && b.bits() < 1) {
        throw std::invalid_argument(std::string(what) + ": requires >= 1 bit");
    }
}

}  // namespace

double pu_outage_closed_form(const SystemParams& params) {
    return 1.0 - std::exp(-params.theta_p / params.gamma_p);
}

double su_outage_baseline(const SystemParams& params) {
    const int n = params.L - 1;
    const double x = params.theta_s / params.gamma_max();
    return 1.0 - upper_incomplete_gamma(n, x) / gamma_integer_fn(n);
}

double cdi_penalty_coefficient(const SystemParams& params) {
    const int L = params.L;
    const double x = params.theta_s / params.gamma_max();
    return std::exp(-params.theta_p / params.gamma_p) * (L - 1) * params.lambda *
           params.theta_p * params.theta_s * upper_incomplete_gamma(L - 2, x) /
           (params.gamma_p * gamma_integer_fn(L - 1));
}

double ipc_penalty_coeff(const SystemParams& params) {
    const int n = params.L - 1;
    const double x = params.theta_s / params.gamma_max();
    return std::exp(-params.theta_p / params.gamma_p) * upper_incomplete_gamma(n, x) /
           gamma_integer_fn(n);
}

AnalyticOutage su_outage_first_order(const SystemParams& params, BitBudget b_cdi,
                                     bool feedforward) {
    params.validate();
    check_finite_bits(b_cdi, "su_outage_first_order: b_cdi");
    const double scale = cdi_scale(params, b_cdi);
    const double ff_div = feedforward ? static_cast<double>(params.L - 1) : 1.0;
    const double cdi_pen = cdi_penalty_coefficient(params) * scale / ff_div;
    return assemble(su_outage_baseline(params), cdi_pen, 0.0, scale,
                    AnalyticOutage::Regime::kFinite);
}

AnalyticOutage su_outage_saturation(const SystemParams& params, BitBudget b_cdi) {
    params.validate();
    const int L = params.L;
    const double scale = cdi_scale(params, b_cdi);
    const double coeff = std::exp(-params.theta_p / params.gamma_p) * (L - 1) *
                         params.lambda * params.theta_p * params.theta_s /
                         ((L - 2) * params.gamma_p);
    return assemble(0.0, coeff * scale, 0.0, scale, AnalyticOutage::Regime::kAsymptotic);
}

double su_outage_saturation_lower(const SystemParams& params, BitBudget b_cdi) {
    return std::exp(-params.theta_p / params.gamma_p) * params.lambda * params.theta_p *
           params.theta_s / params.gamma_p * cdi_scale(params, b_cdi);
}

AnalyticOutage su_outage_quantized_ipc_bound(const SystemParams& params, int a_ipc,
                                             BitBudget b_cdi, bool feedforward) {
    params.validate();
    if (a_ipc < 1) throw std::invalid_argument("su_outage_quantized_ipc_bound: a_ipc >= 1");
    check_finite_bits(b_cdi, "su_outage_quantized_ipc_bound: b_cdi");
    const double scale = cdi_scale(params, b_cdi);
    const double ipc_term = ipc_penalty_coeff(params) * two_pow(-a_ipc);
    double cdi_pen, ipc_pen;
    if (feedforward) {
        // Feedforward scales both quantization penalties by 1/(L-1), with the
        // power-feedback penalty riding on the CDI resolution scale.
        cdi_pen = cdi_penalty_coefficient(params) * scale / (params.L - 1);
        ipc_pen = ipc_term * scale / (params.L - 1);
    } else {
        cdi_pen = cdi_penalty_coefficient(params) * scale;
        ipc_pen = ipc_term;
    }
    return assemble(su_outage_baseline(params), cdi_pen, ipc_pen, scale,
                    AnalyticOutage::Regime::kFinite);
}

AnalyticOutage su_outage_saturation_bound(const SystemParams& params, int a_ipc,
                                          BitBudget b_cdi) {
    params.validate();
    if (a_ipc < 1) throw std::invalid_argument("su_outage_saturation_bound: a_ipc >= 1");
    const int L = params.L;
    const double scale = cdi_scale(params, b_cdi);
    const double phi_inf = std::exp(-params.theta_p / params.gamma_p) * (L - 1) *
                           params.lambda * params.theta_p * params.theta_s /
                           ((L - 2) * params.gamma_p);
    const double alpha_inf = std::exp(-params.theta_p / params.gamma_p);
    return assemble(0.0, phi_inf * scale, alpha_inf * two_pow(-a_ipc), scale,
                    AnalyticOutage::Regime::kAsymptotic);
}

double DistributionLaws::pr_full_power(bool feedforward) const {
    const int L = params.L;
    const double scale = two_pow(-static_cast<double>(b_cdi) / (L - 1));
    const double factor = feedforward ? 1.0 : static_cast<double>(L - 1);
    const double v = 1.0 - std::exp(-params.theta_p / params.gamma_p) * factor *
                               params.theta_p * params.lambda * params.gamma_max() /
                               params.gamma_p * scale;
    return std::clamp(v, 0.0, 1.0);
}

double DistributionLaws::power_cdf(double tau, bool feedforward) const {
    if (tau < 0.0 || tau > params.p_max) {
        throw std::domain_error("power_cdf: tau outside [0, p_max]");
    }
    const int L = params.L;
    const double scale = two_pow(-static_cast<double>(b_cdi) / (L - 1));
    const double factor = feedforward ? 1.0 : static_cast<double>(L - 1);
    return std::exp(-params.theta_p / params.gamma_p) * factor * params.theta_p *
           params.lambda * tau / (params.gamma_p * params.sigma2) * scale;
}

double DistributionLaws::quantized_power_cdf_bound(double tau) const {
    if (tau < 0.0 || tau > params.p_max) {
        throw std::domain_error("quantized_power_cdf_bound: tau outside [0, p_max]");
    }
    const double dp = params.a_ipc.is_infinite()
                          ? 0.0
                          : ipc_power_loss_first_order(params, params.a_ipc.bits(),
                                                       BitBudget(b_cdi));
    const int L = params.L;
    const double scale = two_pow(-static_cast<double>(b_cdi) / (L - 1));
    return std::exp(-params.theta_p / params.gamma_p) * (L - 1) * params.theta_p *
           params.lambda * (tau + dp) / (params.gamma_p * params.sigma2) * scale;
}

double DistributionLaws::effective_gain_pdf(double tau) const {
    if (tau < 0.0) return 0.0;
    const int n = params.L - 1;
    return std::pow(tau, n - 1) * std::exp(-tau) / gamma_integer_fn(n);
}

double DistributionLaws::effective_gain_cdf(double tau) const {
    if (tau <= 0.0) return 0.0;
    const int n = params.L - 1;
    return 1.0 - upper_incomplete_gamma(n, tau) / gamma_integer_fn(n);
}

double DistributionLaws::leakage_pdf(double tau) const {
    const int L = params.L;
    const double inv_scale = two_pow(static_cast<double>(b_cdi) / (L - 1));
    if (tau < 0.0 || tau > 1.0 / inv_scale) return 0.0;
    return (L - 1) * inv_scale * std::pow(1.0 - inv_scale * tau, L - 2);
}

double DistributionLaws::leakage_cdf(double tau) const {
    const int L = params.L;
    const double scale = two_pow(-static_cast<double>(b_cdi) / (L - 1));
    if (tau <= 0.0) return 0.0;
    if (tau >= scale) return 1.0;
    return 1.0 - two_pow(static_cast<double>(b_cdi)) * std::pow(scale - tau, L - 1);
}

double DistributionLaws::leakage_fraction_survival(double tau) const {
    if (tau <= 0.0) return 1.0;
    if (tau >= 1.0) return 0.0;
    return std::pow(1.0 - tau, params.L - 2);
}

double DistributionLaws::epsilon_cdf(double tau) const {
    const int L = params.L;
    const double scale = two_pow(-static_cast<double>(b_cdi) / (L - 1));
    if (tau <= 0.0) return 0.0;
    if (tau >= scale) return 1.0;
    return two_pow(static_cast<double>(b_cdi)) * std::pow(tau, L - 1);
}

DistributionLaws distribution_laws(const SystemParams& params, BitBudget b_cdi) {
    params.validate();
    check_finite_bits(b_cdi, "distribution_laws: b_cdi");
    if (b_cdi.is_infinite()) {
        throw std::invalid_argument("distribution_laws: b_cdi must be finite");
    }
    return DistributionLaws{params, b_cdi.bits()};
}

double ipc_power_loss_first_order(const SystemParams& params, int a_ipc, BitBudget b_cdi) {
    params.validate();
    if (a_ipc < 1) throw std::invalid_argument("ipc_power_loss_first_order: a_ipc >= 1");
    check_finite_bits(b_cdi, "ipc_power_loss_first_order: b_cdi");
    const int L = params.L;
    const double e = static_cast<double>(b_cdi.bits()) / (L - 1) - a_ipc;
    return params.gamma_p * params.sigma2 / ((L - 1) * params.theta_p * params.lambda) *
           two_pow(e);
}

double chi_coefficient(const SystemParams& params) {
    const int L = params.L;
    const double x = params.theta_s / params.gamma_max();
    return params.gamma_p * upper_incomplete_gamma(L - 1, x) /
           (params.lambda * params.theta_p * params.theta_s *
            upper_incomplete_gamma(L - 2, x));
}

double bit_allocation_objective(const SystemParams& params, double b_cdi, int total_bits) {
    return cdi_penalty_coefficient(params) * two_pow(-b_cdi / (params.L - 1)) +
           ipc_penalty_coeff(params) * two_pow(-(total_bits - b_cdi));
}

BitAllocation optimal_bit_allocation(int total_bits, const SystemParams& params) {
    params.validate();
    if (total_bits < 1) throw std::invalid_argument("optimal_bit_allocation: total >= 1");
    BitAllocation out;
    out.chi = chi_coefficient(params);
    const int L = params.L;
    const double unconstrained =
        static_cast<double>(L - 1) / L * (total_bits - std::log2(out.chi));
    out.b_star_unrounded = std::min(std::max(unconstrained, 0.0),
                                    static_cast<double>(total_bits));
    const int lo = std::clamp(static_cast<int>(std::floor(out.b_star_unrounded)), 0,
                              total_bits);
    const int hi = std::clamp(static_cast<int>(std::ceil(out.b_star_unrounded)), 0,
                              total_bits);
    // The objective is asymmetric around the stationary point; compare both
    // integer neighbours instead of nearest-rounding.
    const double j_lo = bit_allocation_objective(params, lo, total_bits);
    const double j_hi = bit_allocation_objective(params, hi, total_bits);
    out.b_star = j_lo <= j_hi ? lo : hi;
    out.a_star = total_bits - out.b_star;
    out.objective.reserve(static_cast<std::size_t>(total_bits) + 1);
    for (int b = 0; b <= total_bits; ++b) {
        out.objective.push_back(bit_allocation_objective(params, b, total_bits));
    }
    return out;
}

}  // namespace cogfeed
