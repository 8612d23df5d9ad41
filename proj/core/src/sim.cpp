#include "cogfeed/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "cogfeed/stats.hpp"

namespace cogfeed {

namespace {

constexpr long kBlockSize = 8192;
constexpr std::uint64_t kCodebookTag = 0xC0DEB00CULL;

std::string cache_key(const SystemParams& params, IpcQuantity quantity, long n_samples,
                      std::uint64_t seed) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s|%016llx|%ld|%016llx", ipc_quantity_name(quantity),
                  static_cast<unsigned long long>(params_fingerprint(params)), n_samples,
                  static_cast<unsigned long long>(seed));
    return buf;
}

}  // namespace

const char* beam_mode_name(BeamMode m) { return m == BeamMode::kOcb ? "ocb" : "nocb"; }
const char* ipc_mode_name(IpcMode m) {
    return m == IpcMode::kPerfect ? "perfect" : "quantized";
}
const char* cdi_mode_name(CdiMode m) {
    switch (m) {
        case CdiMode::kStatistical: return "statistical";
        case CdiMode::kRvq: return "rvq";
        case CdiMode::kPerfect: return "perfect";
    }
    return "?";
}
const char* local_mode_name(LocalMode m) {
    return m == LocalMode::kPerfect ? "perfect" : "quantized";
}

void TrialConfig::validate() const {
    params.validate();
    if (n_trials < 1) throw std::invalid_argument("TrialConfig.n_trials: must be >= 1");
    if (ipc_mode == IpcMode::kQuantized &&
        (params.a_ipc.is_infinite() || params.a_ipc.bits() < 1)) {
        throw std::invalid_argument("TrialConfig: quantized IPC requires finite a_ipc >= 1");
    }
    if (cdi_mode == CdiMode::kRvq &&
        (params.b_cdi.is_infinite() || params.b_cdi.bits() > 16)) {
        throw std::invalid_argument("TrialConfig: rvq CDI requires finite b_cdi <= 16");
    }
}

std::shared_ptr<const IpcCodebook> CodebookCache::get_or_build(const SystemParams& params,
                                                               IpcQuantity quantity,
                                                               long n_samples,
                                                               std::uint64_t seed) {
    const std::string key = cache_key(params, quantity, n_samples, seed);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (auto it = store_.find(key); it != store_.end()) return it->second;
    }
    auto built = std::make_shared<const IpcCodebook>(
        build_ipc_codebook(params, quantity, n_samples, seed));
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = store_.emplace(key, std::move(built));
    return it->second;
}

CodebookSet prepare_codebooks(const TrialConfig& cfg, CodebookCache& cache) {
    CodebookSet set;
    if (cfg.ipc_mode != IpcMode::kQuantized) return set;
    const bool ff = cfg.feedforward;
    // The power-cap codebook degenerates under unquantized CDI (the cap is
    // almost surely infinite); the floor quantizer then never consults it.
    const bool eta_needed = !cfg.params.b_cdi.is_infinite();
    if (eta_needed) {
        const IpcQuantity q = ff ? IpcQuantity::kEtaFf : IpcQuantity::kEta;
        const std::uint64_t seed = derive_stream_seed(
            cfg.master_seed, kCodebookTag, static_cast<std::uint64_t>(q));
        set.eta = cache.get_or_build(cfg.params, q, kCodebookSamples, seed);
    }
    if (cfg.mode == BeamMode::kNocb) {
        const IpcQuantity q = ff ? IpcQuantity::kNuSqFf : IpcQuantity::kNuSq;
        const std::uint64_t seed = derive_stream_seed(
            cfg.master_seed, kCodebookTag, static_cast<std::uint64_t>(q));
        set.nu_sq = cache.get_or_build(cfg.params, q, kCodebookSamples, seed);
    }
    return set;
}

TrialRecord run_trial(const TrialConfig& cfg, const CodebookSet& codebooks,
                      long trial_index) {
    const SystemParams& p = cfg.params;
    SplitMix64 rng(derive_stream_seed(cfg.master_seed, static_cast<std::uint64_t>(trial_index)));

    const ChannelRealization real = sample_channels(p, rng);
    const CVec* tx_shape = &real.s_s;
    CVec local_shape;
    if (cfg.local_mode == LocalMode::kQuantized) {
        local_shape = quantize_local_cdi(real.s_s, p.b_local, rng);
        tx_shape = &local_shape;
    }

    CdiQuantization cdi;
    switch (cfg.cdi_mode) {
        case CdiMode::kStatistical:
            cdi = quantize_cdi_statistical(real.s_x, *tx_shape, p.b_cdi, rng);
            break;
        case CdiMode::kRvq:
            cdi = quantize_cdi_rvq(real.s_x, *tx_shape, p.b_cdi, rng);
            break;
        case CdiMode::kPerfect:
            cdi = quantize_cdi_statistical(real.s_x, *tx_shape, BitBudget::infinite(), rng);
            break;
    }

    const double omega = compute_omega(real.g_p, p);
    BeamformerOutput beam;
    IpcSignal signal;
    if (cfg.mode == BeamMode::kOcb) {
        const double eta = ipc_ocb_unquantized(omega, real.g_x, cdi, p, cfg.feedforward);
        signal = quantize_ipc_ocb(eta, codebooks.eta.get(), omega, p, cfg.feedforward);
        beam = ocb_beamformer(cdi, signal);
    } else {
        const NocbCodebooks nocb{codebooks.nu_sq.get(), codebooks.eta.get()};
        signal = ipc_nocb(omega, real.g_x, cdi, nocb, p, cfg.feedforward);
        beam = nocb_beamformer(cdi, signal);
    }

    TrialRecord rec;
    rec.su_snr = su_snr(real, beam.f, p);
    rec.pu_sinr = pu_sinr(real, beam.f, p);
    rec.tx_power = beam.power;
    rec.interference = interference_power(beam.f, real);
    rec.branch = signal.branch;
    rec.su_outage = rec.su_snr <= p.theta_s;
    rec.pu_outage = rec.pu_sinr < p.theta_p;
    return rec;
}

TrialRecord run_trial(const TrialConfig& cfg, CodebookCache& cache, long trial_index) {
    return run_trial(cfg, prepare_codebooks(cfg, cache), trial_index);
}

int resolve_worker_count(int requested) {
    if (requested <= 0) {
        if (const char* env = std::getenv("COGFEED_WORKERS")) {
            const int parsed = std::atoi(env);
            if (parsed > 0) return parsed;
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? static_cast<int>(hw) : 1;
    }
    return requested;
}

OutageEstimate estimate_outage(const TrialConfig& cfg, CodebookCache& cache, int workers) {
    cfg.validate();
    const CodebookSet codebooks = prepare_codebooks(cfg, cache);
    const long n = cfg.n_trials;
    const long n_blocks = (n + kBlockSize - 1) / kBlockSize;

    struct BlockResult {
        long su = 0;
        long pu = 0;
        double power = 0.0;
    };
    std::vector<BlockResult> blocks(static_cast<std::size_t>(n_blocks));

    const int n_workers = std::min<long>(resolve_worker_count(workers), n_blocks);
    std::atomic<long> next_block{0};
    auto worker = [&] {
        for (;;) {
            const long blk = next_block.fetch_add(1, std::memory_order_relaxed);
            if (blk >= n_blocks) return;
            const long begin = blk * kBlockSize;
            const long end = std::min(begin + kBlockSize, n);
            BlockResult acc;
            for (long i = begin; i < end; ++i) {
                const TrialRecord rec = run_trial(cfg, codebooks, i);
                acc.su += rec.su_outage ? 1 : 0;
                acc.pu += rec.pu_outage ? 1 : 0;
                acc.power += rec.tx_power;
            }
            blocks[static_cast<std::size_t>(blk)] = acc;
        }
    };
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Reduce in block order so the floating-point sum does not depend on the
    // worker count.
    long su = 0, pu = 0;
    double power = 0.0;
    for (const BlockResult& b : blocks) {
        su += b.su;
        pu += b.pu;
        power += b.power;
    }

    OutageEstimate est;
    est.trials = n;
    est.su_outage = static_cast<double>(su) / static_cast<double>(n);
    est.pu_outage = static_cast<double>(pu) / static_cast<double>(n);
    est.pu_outage_reference = 1.0 - std::exp(-cfg.params.theta_p / cfg.params.gamma_p);
    est.su_ci_halfwidth = 3.0 * binomial_sigma(est.su_outage, n);
    est.mean_tx_power = power / static_cast<double>(n);
    return est;
}

std::vector<SweepRow> sweep(const std::vector<TrialConfig>& grid, CodebookCache& cache,
                            int workers) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (const TrialConfig& cfg : grid) {
        SweepRow row;
        row.config = cfg;
        try {
            row.estimate = estimate_outage(cfg, cache, workers);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace cogfeed
