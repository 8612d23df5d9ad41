#include "cogfeed/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace cogfeed {

namespace {

constexpr double kDegenerateNorm = 1e-12;

// Residual decomposition of s_s against a fixed quantized direction.
void decompose(const CVec& s_x, const CVec& s_s, CdiQuantization& q) {
    q.a = inner_product(q.s_hat_x, s_s);
    CVec resid(s_s);
    for (std::size_t i = 0; i < resid.size(); ++i) resid[i] -= q.a * q.s_hat_x[i];
    const double b = norm(resid);
    if (b <= kDegenerateNorm) {
        q.b = 0.0;
        q.s_hat_perp.assign(s_s.size(), Complex{0.0, 0.0});
        q.delta = 0.0;
        return;
    }
    const double inv = 1.0 / b;
    for (auto& x : resid) x *= inv;
    q.b = b;
    q.s_hat_perp = std::move(resid);
    q.delta = std::norm(inner_product(s_x, q.s_hat_perp));
}

double draw_epsilon(int L, BitBudget b, SplitMix64& rng) {
    if (b.is_infinite()) return 0.0;
    const double cap = std::exp2(-static_cast<double>(b.bits()) / (L - 1));
    return cap * std::pow(rng.next_double(), 1.0 / (L - 1));
}

void check_shape_dims(const CVec& s_x, const CVec& s_s) {
    if (s_x.size() != s_s.size()) {
        throw std::invalid_argument("cdi quantization: dimension mismatch");
    }
    if (s_x.size() < 3) {
        throw std::invalid_argument("cdi quantization: requires dimension >= 3");
    }
}

}  // namespace

CdiQuantization quantize_cdi_statistical(const CVec& s_x, const CVec& s_s, BitBudget b,
                                         SplitMix64& rng) {
    check_shape_dims(s_x, s_s);
    CdiQuantization q;
    q.epsilon = draw_epsilon(static_cast<int>(s_x.size()), b, rng);
    if (q.epsilon == 0.0) {
        q.s_hat_x = s_x;
    } else {
        const CVec w = unit_uniform_sphere_perp(s_x, rng);
        const double c0 = std::sqrt(1.0 - q.epsilon);
        const double c1 = std::sqrt(q.epsilon);
        q.s_hat_x.resize(s_x.size());
        for (std::size_t i = 0; i < s_x.size(); ++i) q.s_hat_x[i] = c0 * s_x[i] + c1 * w[i];
    }
    decompose(s_x, s_s, q);
    return q;
}

CdiQuantization quantize_cdi_with_codebook(const CVec& s_x, const CVec& s_s,
                                           std::span<const CVec> codebook) {
    check_shape_dims(s_x, s_s);
    if (codebook.empty()) throw std::invalid_argument("cdi codebook: empty");
    double best = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < codebook.size(); ++i) {
        const double corr = std::norm(inner_product(codebook[i], s_x));
        if (corr > best) {
            best = corr;
            best_idx = i;
        }
    }
    CdiQuantization q;
    q.s_hat_x = codebook[best_idx];
    q.epsilon = std::max(0.0, 1.0 - best);
    decompose(s_x, s_s, q);
    return q;
}

CdiQuantization quantize_cdi_rvq(const CVec& s_x, const CVec& s_s, BitBudget b,
                                 SplitMix64& rng) {
    if (b.is_infinite() || b.bits() > 16) {
        throw std::invalid_argument("quantize_cdi_rvq: codebook budget limited to 16 bits");
    }
    const std::size_t n = std::size_t{1} << b.bits();
    std::vector<CVec> codebook;
    codebook.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        codebook.push_back(unit_uniform_sphere(static_cast<int>(s_x.size()), rng));
    }
    return quantize_cdi_with_codebook(s_x, s_s, codebook);
}

CVec quantize_local_cdi(const CVec& s_s, BitBudget b_prime, SplitMix64& rng) {
    if (b_prime.is_infinite()) return s_s;
    if (s_s.size() < 2) throw std::invalid_argument("quantize_local_cdi: dimension >= 2");
    const double eps = draw_epsilon(static_cast<int>(s_s.size()), b_prime, rng);
    if (eps == 0.0) return s_s;
    const CVec w = unit_uniform_sphere_perp(s_s, rng);
    CVec out(s_s.size());
    const double c0 = std::sqrt(1.0 - eps);
    const double c1 = std::sqrt(eps);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = c0 * s_s[i] + c1 * w[i];
    return out;
}

double compute_omega(double g_p, const SystemParams& params) {
    if (g_p < 0.0) throw std::invalid_argument("compute_omega: g_p must be >= 0");
    return params.sigma2 * (params.gamma_p * g_p / params.theta_p - 1.0);
}

double ipc_ocb_unquantized(double omega, double g_x, const CdiQuantization& cdi,
                           const SystemParams& params, bool feedforward) {
    if (g_x <= 0.0) throw std::invalid_argument("ipc_ocb_unquantized: g_x must be > 0");
    if (omega < 0.0) return params.p_max;
    const double denom = params.lambda * g_x * (feedforward ? cdi.delta : cdi.epsilon);
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return omega / denom;
}

const char* ipc_quantity_name(IpcQuantity q) {
    switch (q) {
        case IpcQuantity::kEta: return "eta";
        case IpcQuantity::kEtaFf: return "eta-ff";
        case IpcQuantity::kNuSq: return "nu2";
        case IpcQuantity::kNuSqFf: return "nu2-ff";
    }
    return "?";
}

namespace {

IpcQuantity ipc_quantity_from_name(const std::string& name) {
    if (name == "eta") return IpcQuantity::kEta;
    if (name == "eta-ff") return IpcQuantity::kEtaFf;
    if (name == "nu2") return IpcQuantity::kNuSq;
    if (name == "nu2-ff") return IpcQuantity::kNuSqFf;
    throw std::invalid_argument("unknown ipc codebook mode: " + name);
}

// Interpolated empirical quantile over a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

IpcCodebook build_ipc_codebook(const SystemParams& params, IpcQuantity quantity,
                               long n_samples, std::uint64_t seed) {
    params.validate();
    if (!params.a_ipc.is_infinite() && params.a_ipc.bits() < 1) {
        throw std::invalid_argument("build_ipc_codebook: requires a_ipc >= 1");
    }
    if (params.a_ipc.is_infinite()) {
        throw std::invalid_argument("build_ipc_codebook: a_ipc must be finite");
    }
    if (n_samples < 100000) {
        throw std::invalid_argument("build_ipc_codebook: requires n_samples >= 1e5");
    }
    const bool uses_delta = quantity == IpcQuantity::kEtaFf || quantity == IpcQuantity::kNuSqFf;
    const bool is_nu = quantity == IpcQuantity::kNuSq || quantity == IpcQuantity::kNuSqFf;
    if (!is_nu && params.b_cdi.is_infinite()) {
        throw std::invalid_argument("build_ipc_codebook: power-cap signal degenerates "
                                    "under unquantized CDI");
    }

    const int L = params.L;
    SplitMix64 rng(seed);
    std::vector<double> sample;
    sample.reserve(static_cast<std::size_t>(n_samples));
    for (long i = 0; i < n_samples; ++i) {
        // Conditioning on a non-outage primary link shifts the exponential
        // channel power past theta_p / gamma_p (memorylessness), so every
        // draw is a conditional draw.
        const double omega = params.sigma2 * params.gamma_p * rng.exponential() / params.theta_p;
        const double g_x = rng.gamma_integer(L);
        const double eps = draw_epsilon(L, params.b_cdi, rng);
        double q = eps;
        if (uses_delta) {
            const double kappa = 1.0 - std::pow(1.0 - rng.next_double(), 1.0 / (L - 2));
            q = kappa * eps;
        }
        if (is_nu) {
            const double nu =
                (std::sqrt(omega / (params.lambda * g_x)) - std::sqrt(q * params.p_max)) /
                std::sqrt(1.0 - eps);
            if (nu >= 0.0) sample.push_back(nu * nu);
        } else {
            const double denom = params.lambda * g_x * q;
            sample.push_back(denom > 0.0 ? omega / denom
                                         : std::numeric_limits<double>::infinity());
        }
    }
    if (is_nu && static_cast<long>(sample.size()) < n_samples / 10) {
        throw SamplingError("build_ipc_codebook: fewer than n_samples/10 draws satisfied "
                            "the nonnegativity condition");
    }
    std::sort(sample.begin(), sample.end());

    IpcCodebook cb;
    cb.quantity = quantity;
    cb.bits_a = params.a_ipc.bits();
    cb.b_cdi = params.b_cdi;
    cb.p_max = params.p_max;
    cb.n_samples = static_cast<long>(sample.size());
    cb.seed = seed;
    cb.params_hash = params_fingerprint(params);
    const int n_levels = 1 << cb.bits_a;
    cb.levels.resize(static_cast<std::size_t>(n_levels));
    cb.levels[0] = 0.0;
    for (int k = 1; k < n_levels; ++k) {
        cb.levels[static_cast<std::size_t>(k)] =
            quantile_sorted(sample, static_cast<double>(k) / n_levels);
    }
    for (int k = 1; k < n_levels; ++k) {
        if (!(cb.levels[k] > cb.levels[k - 1]) || !std::isfinite(cb.levels[k])) {
            throw SamplingError("build_ipc_codebook: degenerate quantile levels");
        }
    }
    cb.levels_above_p_max = static_cast<int>(
        std::count_if(cb.levels.begin(), cb.levels.end(),
                      [&](double p) { return p > params.p_max; }));
    cb.overflow_flagged = cb.levels_above_p_max > 2;
    return cb;
}

double floor_quantize(double x, const IpcCodebook& codebook) {
    if (x < 0.0) throw std::invalid_argument("floor_quantize: x must be >= 0");
    const auto it = std::upper_bound(codebook.levels.begin(), codebook.levels.end(), x);
    return *(it - 1);  // levels[0] == 0 <= x, so the range is never empty
}

IpcSignal quantize_ipc_ocb(double eta, const IpcCodebook* codebook, double omega,
                           const SystemParams& params, bool feedforward) {
    if (!(eta >= 0.0)) throw std::invalid_argument("quantize_ipc_ocb: eta must be >= 0");
    IpcSignal s;
    s.mode = BeamMode::kOcb;
    s.feedforward = feedforward;
    s.outage_bit = omega < 0.0;
    if (omega >= 0.0 && eta < params.p_max) {
        s.ocb_power = codebook ? floor_quantize(eta, *codebook) : eta;
    } else {
        s.ocb_power = params.p_max;
    }
    s.mu1 = s.mu2 = s.ocb_power;
    return s;
}

IpcSignal ipc_nocb(double omega, double g_x, const CdiQuantization& cdi,
                   const NocbCodebooks& codebooks, const SystemParams& params,
                   bool feedforward) {
    if (g_x <= 0.0) throw std::invalid_argument("ipc_nocb: g_x must be > 0");
    IpcSignal s;
    s.mode = BeamMode::kNocb;
    s.feedforward = feedforward;
    s.outage_bit = omega < 0.0;
    if (omega < 0.0) {
        s.mu1 = s.mu2 = params.p_max;
        s.branch = IpcSignal::NocbBranch::kOutage;
        s.ocb_power = s.mu2;
        return s;
    }
    const double q = feedforward ? cdi.delta : cdi.epsilon;
    const double one_minus_eps = 1.0 - cdi.epsilon;
    double nu = -1.0;
    if (one_minus_eps > 0.0) {
        nu = (std::sqrt(omega / (params.lambda * g_x)) - std::sqrt(q * params.p_max)) /
             std::sqrt(one_minus_eps);
    }
    if (nu >= 0.0) {
        const double nu_sq = nu * nu;
        const double quantized = codebooks.nu_sq ? floor_quantize(nu_sq, *codebooks.nu_sq)
                                                 : nu_sq;
        s.mu1 = std::min(quantized, params.p_max);
        s.mu2 = params.p_max;
        s.branch = IpcSignal::NocbBranch::kPowerControl;
    } else {
        const double eta = ipc_ocb_unquantized(omega, g_x, cdi, params, feedforward);
        s.mu1 = 0.0;
        s.mu2 = quantize_ipc_ocb(eta, codebooks.eta, omega, params, feedforward).ocb_power;
        s.branch = IpcSignal::NocbBranch::kOrthogonal;
    }
    s.ocb_power = s.mu2;
    return s;
}

double ipc_power_loss_bound(const IpcCodebook& codebook, const SystemParams& params) {
    const auto& p = codebook.levels;
    if (p.size() < 2) throw std::invalid_argument("ipc_power_loss_bound: degenerate codebook");
    std::size_t n0 = p.size() - 1;
    for (std::size_t n = 1; n < p.size(); ++n) {
        if (p[n] >= params.p_max) {
            n0 = n;
            break;
        }
    }
    double width = 0.0;
    for (std::size_t n = 1; n <= n0; ++n) width = std::max(width, p[n] - p[n - 1]);
    return width;
}

std::uint64_t params_fingerprint(const SystemParams& params) {
    char buf[256];
    const auto bits_repr = [](const BitBudget& b) {
        return b.is_infinite() ? -1 : b.bits();
    };
    std::snprintf(buf, sizeof(buf), "%d;%.17g;%.17g;%.17g;%.17g;%.17g;%.17g;%d;%d;%d",
                  params.L, params.lambda, params.sigma2, params.theta_p, params.theta_s,
                  params.gamma_p, params.p_max, bits_repr(params.b_cdi),
                  bits_repr(params.a_ipc), bits_repr(params.b_local));
    std::uint64_t h = 14695981039346656037ULL;
    for (const char* c = buf; *c; ++c) {
        h ^= static_cast<unsigned char>(*c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string ipc_codebook_to_json(const IpcCodebook& codebook) {
    nlohmann::json j;
    j["mode"] = ipc_quantity_name(codebook.quantity);
    j["A"] = codebook.bits_a;
    if (codebook.b_cdi.is_infinite()) {
        j["B"] = "inf";
    } else {
        j["B"] = codebook.b_cdi.bits();
    }
    j["p_max"] = codebook.p_max;
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(codebook.params_hash));
    j["params_hash"] = hash_hex;
    j["levels"] = codebook.levels;
    j["n_samples"] = codebook.n_samples;
    j["seed"] = codebook.seed;
    j["levels_above_p_max"] = codebook.levels_above_p_max;
    j["overflow_flagged"] = codebook.overflow_flagged;
    return j.dump(2);
}

IpcCodebook ipc_codebook_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    IpcCodebook cb;
    cb.quantity = ipc_quantity_from_name(j.at("mode").get<std::string>());
    cb.bits_a = j.at("A").get<int>();
    if (j.at("B").is_string()) {
        if (j.at("B").get<std::string>() != "inf") {
            throw std::invalid_argument("ipc codebook: bad B field");
        }
        cb.b_cdi = BitBudget::infinite();
    } else {
        cb.b_cdi = BitBudget(j.at("B").get<int>());
    }
    cb.p_max = j.at("p_max").get<double>();
    cb.params_hash = std::stoull(j.at("params_hash").get<std::string>(), nullptr, 16);
    cb.levels = j.at("levels").get<std::vector<double>>();
    cb.n_samples = j.at("n_samples").get<long>();
    cb.seed = j.at("seed").get<std::uint64_t>();
    cb.levels_above_p_max = j.value("levels_above_p_max", 0);
    cb.overflow_flagged = j.value("overflow_flagged", false);
    if (cb.levels.empty() || cb.levels.front() != 0.0) {
        throw std::invalid_argument("ipc codebook: levels must start at 0");
    }
    for (std::size_t i = 1; i < cb.levels.size(); ++i) {
        if (!(cb.levels[i] > cb.levels[i - 1])) {
            throw std::invalid_argument("ipc codebook: levels must strictly increase");
        }
    }
    return cb;
}

}  // namespace cogfeed
