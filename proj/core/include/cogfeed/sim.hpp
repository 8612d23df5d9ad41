#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cogfeed/beamform.hpp"
#include "cogfeed/channel.hpp"
#include "cogfeed/feedback.hpp"

namespace cogfeed {

enum class IpcMode { kPerfect, kQuantized };
enum class CdiMode { kStatistical, kRvq, kPerfect };
enum class LocalMode { kPerfect, kQuantized };

const char* beam_mode_name(BeamMode m);
const char* ipc_mode_name(IpcMode m);
const char* cdi_mode_name(CdiMode m);
const char* local_mode_name(LocalMode m);

// One Monte Carlo configuration. Bit budgets live in params (b_cdi, a_ipc,
// b_local); the mode fields select whether each budget is applied.
struct TrialConfig {
    SystemParams params;
    BeamMode mode = BeamMode::kOcb;
    bool feedforward = false;
    IpcMode ipc_mode = IpcMode::kPerfect;
    CdiMode cdi_mode = CdiMode::kStatistical;
    LocalMode local_mode = LocalMode::kPerfect;
    long n_trials = 1;
    std::uint64_t master_seed = 0;

    void validate() const;
};

struct TrialRecord {
    double su_snr = 0.0;
    double pu_sinr = 0.0;
    double tx_power = 0.0;
    double interference = 0.0;
    IpcSignal::NocbBranch branch = IpcSignal::NocbBranch::kNone;
    bool su_outage = false;  // su_snr <= theta_s
    bool pu_outage = false;  // pu_sinr <  theta_p
};

struct OutageEstimate {
    double su_outage = 0.0;
    double pu_outage = 0.0;
    double pu_outage_reference = 0.0;  // 1 - exp(-theta_p / gamma_p)
    long trials = 0;
    double su_ci_halfwidth = 0.0;  // three binomial standard errors
    double mean_tx_power = 0.0;
};

// Process-wide codebook store. Codebooks are immutable once built; the key
// includes the parameter fingerprint, signal kind, and construction seed.
class CodebookCache {
  public:
    std::shared_ptr<const IpcCodebook> get_or_build(const SystemParams& params,
                                                    IpcQuantity quantity, long n_samples,
                                                    std::uint64_t seed);

  private:
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const IpcCodebook>> store_;
};

// Codebooks resolved for one configuration (null when unquantized or unused).
struct CodebookSet {
    std::shared_ptr<const IpcCodebook> eta;
    std::shared_ptr<const IpcCodebook> nu_sq;
};

inline constexpr long kCodebookSamples = 1'000'000;

// Resolves the codebooks a configuration needs, building and caching them on
// demand. Construction seeds derive from the configuration master seed.
CodebookSet prepare_codebooks(const TrialConfig& cfg, CodebookCache& cache);

// Evaluates one block-fading trial. Fully deterministic in
// (cfg.master_seed, trial_index): the per-trial generator is derived by a
// counter-based hash, and the draw order does not depend on the beamforming
// mode, so equal seeds give draw-for-draw paired runs across modes.
TrialRecord run_trial(const TrialConfig& cfg, const CodebookSet& codebooks,
                      long trial_index);

// Convenience overload resolving codebooks through a cache.
TrialRecord run_trial(const TrialConfig& cfg, CodebookCache& cache, long trial_index);

// Aggregates cfg.n_trials independent trials. Trials are evaluated in
// fixed-size blocks; block results are reduced in block order, so the result
// is bitwise identical for any worker count. workers <= 0 selects the
// hardware concurrency (or the COGFEED_WORKERS environment override).
OutageEstimate estimate_outage(const TrialConfig& cfg, CodebookCache& cache,
                               int workers = 0);

struct SweepRow {
    TrialConfig config;
    std::optional<OutageEstimate> estimate;
    std::string error;  // non-empty when the row failed
};

// Runs every configuration in order, continuing past per-row failures.
std::vector<SweepRow> sweep(const std::vector<TrialConfig>& grid, CodebookCache& cache,
                            int workers = 0);

// Effective worker count after applying the COGFEED_WORKERS override.
int resolve_worker_count(int requested);

}  // namespace cogfeed
