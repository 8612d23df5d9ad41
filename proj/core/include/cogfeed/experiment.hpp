#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cogfeed/analysis.hpp"
#include "cogfeed/sim.hpp"
#include "cogfeed/stats.hpp"

namespace cogfeed {

enum class ExperimentKind {
    kFigure2,       // orthogonal beamforming vs max transmit SNR, B grid
    kFigure3,       // orthogonal vs non-orthogonal comparison
    kFigure4,       // feedforward effect, antenna-count grid
    kFigure5,       // quantized local feedback / feedforward effect
    kFigure6,       // bit-allocation sweep under a sum feedback budget
    kValidateDistributions,
    kAllocateBits,
    kCustomSweep,
};

const char* experiment_kind_name(ExperimentKind k);

// Configuration error carrying the offending field path.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& field_path, const std::string& what)
        : std::runtime_error(field_path + ": " + what), path(field_path) {}
    std::string path;
};

struct ExperimentSpec {
    std::string name;
    ExperimentKind kind = ExperimentKind::kCustomSweep;
    SystemParams params;  // defaults with overrides applied
    long n_trials = 1'000'000;
    std::uint64_t master_seed = 0x5EEDC0DEULL;
    std::string output_stem;  // defaults to name

    std::vector<double> gamma_max_db_grid;  // figure sweeps
    std::vector<int> b_grid;                // figure2 / figure3 budgets
    std::vector<int> l_grid;                // figure4 antenna counts
    int b_fixed = 12;                       // figure4 / figure5 CDI budget
    int b_local_bits = 8;                   // figure5 local budget
    int total_bits = 12;                    // figure6 / allocate-bits
    double alloc_gamma_max_db = 10.0;       // figure6 / allocate-bits operating point
    bool empirical = false;                 // allocate-bits: also simulate

    std::vector<TrialConfig> custom_grid;   // custom-sweep rows
};

// Parses a JSON experiment document. Unknown fields and invalid values raise
// ConfigError with the field path. Power and SNR quantities are given in dB.
ExperimentSpec parse_experiment_spec(const std::string& json_text);
ExperimentSpec load_experiment_spec(const std::string& path);

// Applies dB-domain overrides onto defaults; shared with the CLI.
SystemParams params_from_json_overrides(const std::string& json_text);

struct ExperimentOutput {
    std::string results_csv;   // empty when the kind produces none
    std::string overlay_csv;   // empty when the kind produces none
    std::string manifest_json;
    std::uint64_t manifest_hash = 0;
    long rows = 0;
    double wall_time_ms = 0.0;
    int empirical_argmin_a = -1;  // bit-allocation kinds with simulation only
};

// Runs the experiment and writes results CSV, analytic overlay CSV, and a
// run manifest under out_dir. Outputs embed the manifest hash; reruns with
// an identical manifest are byte-identical for any worker count.
ExperimentOutput run_experiment(const ExperimentSpec& spec, const std::string& out_dir,
                                CodebookCache& cache, int workers = 0);

// The Monte Carlo grid a figure-style spec expands to (empty for
// validate-distributions and allocate-bits without --empirical).
std::vector<TrialConfig> experiment_grid(const ExperimentSpec& spec);

struct ValidationRow {
    std::string law;
    KsResult ks;
    bool pass = false;  // p > 0.01
};

// Distribution validation: effective-gain, leakage, and leakage-fraction
// laws tested against their closed forms.
std::vector<ValidationRow> validate_distributions(const SystemParams& params,
                                                  BitBudget b_cdi, long n_samples,
                                                  std::uint64_t seed);

struct EmpiricalAllocation {
    std::vector<int> a_values;
    std::vector<double> su_outage;
    int argmin_a = 0;
};

// Simulated outage across the integer splits a + b = total (quantized IPC,
// orthogonal beamforming, no feedforward).
EmpiricalAllocation empirical_bit_allocation(const SystemParams& base, int total_bits,
                                             double gamma_max_db, long n_trials,
                                             std::uint64_t master_seed,
                                             CodebookCache& cache, int workers = 0);

// Canonical short format used everywhere a float is serialized (9
// significant digits).
std::string format_g9(double v);

double db_to_linear(double db);
double linear_to_db(double v);

}  // namespace cogfeed
