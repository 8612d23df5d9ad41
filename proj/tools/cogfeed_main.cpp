// cogfeed: experiment runner for the cognitive beamforming simulator.
//
//   cogfeed run <spec.json>        run a config-driven experiment
//   cogfeed allocate-bits ...      feedback bit-allocation report
//   cogfeed validate               distribution validation suite
//
// Global flags: --seed, --workers, --out-dir. COGFEED_WORKERS in the
// environment overrides the worker count when --workers is not given.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cogfeed/experiment.hpp"

namespace {

using namespace cogfeed;

void print_output_summary(const ExperimentOutput& out) {
    if (!out.results_csv.empty()) std::printf("results:  %s\n", out.results_csv.c_str());
    if (!out.overlay_csv.empty()) std::printf("overlay:  %s\n", out.overlay_csv.c_str());
    std::printf("manifest: %s\n", out.manifest_json.c_str());
    std::printf("rows: %ld  wall: %.1f ms  manifest-hash: %016llx\n", out.rows,
                out.wall_time_ms, static_cast<unsigned long long>(out.manifest_hash));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cognitive beamforming with finite-rate cooperative feedback"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::optional<std::uint64_t> seed;
    int workers = 0;
    std::string out_dir = ".";
    app.add_option("--seed", seed, "master seed override")->group("Global");
    app.add_option("--workers", workers, "worker thread count (0 = auto)")->group("Global");
    app.add_option("--out-dir", out_dir, "output directory")->group("Global");

    auto* run = app.add_subcommand("run", "run an experiment from a JSON spec");
    std::string spec_path;
    run->add_option("spec", spec_path, "path to the experiment JSON document")->required();

    auto* alloc = app.add_subcommand("allocate-bits", "optimal CDI/IPC feedback split");
    int total_bits = 12;
    bool empirical = false;
    double alloc_gamma_p_db = 10.0;
    double alloc_gamma_max_db = 10.0;
    long alloc_trials = 200000;
    alloc->add_option("--total", total_bits, "sum feedback budget A + B")->required();
    alloc->add_flag("--empirical", empirical, "also locate the simulated optimum");
    alloc->add_option("--gamma-p-db", alloc_gamma_p_db, "primary transmit SNR in dB");
    alloc->add_option("--gamma-max-db", alloc_gamma_max_db, "max secondary transmit SNR in dB");
    alloc->add_option("--trials", alloc_trials, "trials per split for --empirical");

    auto* validate = app.add_subcommand("validate", "distribution validation suite");
    long validate_trials = 100000;
    int validate_b = 12;
    validate->add_option("--trials", validate_trials, "samples per law");
    validate->add_option("--b-cdi", validate_b, "CDI budget for the leakage laws");

    CLI11_PARSE(app, argc, argv);

    try {
        CodebookCache cache;
        if (run->parsed()) {
            ExperimentSpec spec = load_experiment_spec(spec_path);
            if (seed) spec.master_seed = *seed;
            const ExperimentOutput out = run_experiment(spec, out_dir, cache, workers);
            print_output_summary(out);
            return 0;
        }
        if (alloc->parsed()) {
            ExperimentSpec spec;
            spec.name = "allocate-bits";
            spec.kind = ExperimentKind::kAllocateBits;
            spec.total_bits = total_bits;
            spec.alloc_gamma_max_db = alloc_gamma_max_db;
            spec.params.gamma_p = db_to_linear(alloc_gamma_p_db);
            spec.params.p_max = spec.params.sigma2 * db_to_linear(alloc_gamma_max_db);
            spec.empirical = empirical;
            spec.n_trials = alloc_trials;
            if (seed) spec.master_seed = *seed;

            SystemParams at_op = spec.params;
            const BitAllocation result = optimal_bit_allocation(total_bits, at_op);
            std::printf("total feedback bits F = %d (plus one outage indicator bit)\n",
                        total_bits);
            std::printf("analytic split: B* = %d, A* = %d (unrounded B* = %.3f, chi = %.4f)\n",
                        result.b_star, result.a_star, result.b_star_unrounded, result.chi);
            std::printf("%4s %4s %14s\n", "B", "A", "J(B)");
            for (int b = 0; b <= total_bits; ++b) {
                std::printf("%4d %4d %14.6g%s\n", b, total_bits - b,
                            result.objective[static_cast<std::size_t>(b)],
                            b == result.b_star ? "  <- B*" : "");
            }
            const ExperimentOutput out = run_experiment(spec, out_dir, cache, workers);
            if (empirical && out.empirical_argmin_a >= 0) {
                std::printf("empirical argmin: A = %d (trials per split: %ld)\n",
                            out.empirical_argmin_a, alloc_trials);
                std::printf("|analytic A* - empirical A| = %d\n",
                            std::abs(out.empirical_argmin_a - result.a_star));
            }
            print_output_summary(out);
            return 0;
        }
        if (validate->parsed()) {
            SystemParams params;
            params.b_cdi = BitBudget(validate_b);
            const std::uint64_t master = seed.value_or(0x5EEDC0DEULL);
            const auto rows = validate_distributions(params, params.b_cdi, validate_trials,
                                                     master);
            std::printf("%-28s %10s %12s %12s %6s\n", "law", "n", "KS stat", "p-value",
                        "pass");
            bool all_pass = true;
            for (const auto& row : rows) {
                std::printf("%-28s %10zu %12.5g %12.5g %6s\n", row.law.c_str(), row.ks.n,
                            row.ks.statistic, row.ks.p_value, row.pass ? "yes" : "NO");
                all_pass = all_pass && row.pass;
            }
            return all_pass ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error at %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
