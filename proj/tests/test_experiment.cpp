#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cogfeed/experiment.hpp"

using namespace cogfeed;

TEST_SUITE_BEGIN("experiment");

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path scratch_dir(const char* leaf) {
    const auto dir = std::filesystem::temp_directory_path() / "cogfeed_tests" / leaf;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("spec parsing reports field paths") {
    CHECK_THROWS_WITH_AS((void)parse_experiment_spec("{\"kind\":\"figure2\"}"),
                         "name: required non-empty string", ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)parse_experiment_spec("{\"name\":\"x\",\"kind\":\"figure9\"}"),
        "kind: unknown experiment kind 'figure9'", ConfigError);
    try {
        (void)parse_experiment_spec(
            "{\"name\":\"x\",\"kind\":\"figure2\",\"overrides\":{\"L\":2}}");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.path == "overrides.L");
    }
    CHECK_THROWS_AS((void)parse_experiment_spec(
                        "{\"name\":\"x\",\"kind\":\"figure2\",\"bogus\":1}"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_experiment_spec("{not json"), ConfigError);
    CHECK_THROWS_AS((void)parse_experiment_spec(
                        "{\"name\":\"x\",\"kind\":\"custom-sweep\"}"),
                    ConfigError);
}

TEST_CASE("spec parsing applies dB overrides") {
    const ExperimentSpec spec = parse_experiment_spec(R"({
        "name": "demo",
        "kind": "figure2",
        "n_trials": 5000,
        "master_seed": 42,
        "overrides": {
            "gamma_p_db": 13.0,
            "gamma_max_db": 20.0,
            "theta_p_db": 4.7712125471966244,
            "b_cdi": "inf"
        }
    })");
    CHECK(spec.params.gamma_p == doctest::Approx(19.9526231).epsilon(1e-8));
    CHECK(spec.params.p_max == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(spec.params.theta_p == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(spec.params.b_cdi.is_infinite());
    CHECK(spec.n_trials == 5000);
    CHECK(spec.master_seed == 42);
}

TEST_CASE("figure grids have the documented shape") {
    ExperimentSpec spec;
    spec.name = "g";
    spec.n_trials = 10;

    spec.kind = ExperimentKind::kFigure2;
    CHECK(experiment_grid(spec).size() == 4 * 9);

    spec.kind = ExperimentKind::kFigure3;
    CHECK(experiment_grid(spec).size() == 2 * 2 * 9);

    spec.kind = ExperimentKind::kFigure4;
    CHECK(experiment_grid(spec).size() == 2 * 2 * 2 * 9);

    spec.kind = ExperimentKind::kFigure5;
    auto grid5 = experiment_grid(spec);
    CHECK(grid5.size() == 2 * 2 * 9);
    int quantized_local = 0;
    for (const auto& cfg : grid5) {
        if (cfg.local_mode == LocalMode::kQuantized) {
            ++quantized_local;
            CHECK(cfg.params.b_local == BitBudget(8));
        }
    }
    CHECK(quantized_local == 2 * 9);

    spec.kind = ExperimentKind::kFigure6;
    auto grid6 = experiment_grid(spec);
    CHECK(grid6.size() == 11);
    for (const auto& cfg : grid6) {
        CHECK(cfg.ipc_mode == IpcMode::kQuantized);
        CHECK(cfg.params.a_ipc.bits() + cfg.params.b_cdi.bits() == 12);
    }
}

TEST_CASE("experiment outputs embed the manifest hash and reproduce byte for byte") {
    const auto dir1 = scratch_dir("run1");
    const auto dir2 = scratch_dir("run2");
    const std::string doc = R"({
        "name": "mini",
        "kind": "custom-sweep",
        "n_trials": 4000,
        "master_seed": 77,
        "grid": [
            {"mode": "ocb", "b_cdi": 8, "gamma_max_db": 10.0},
            {"mode": "nocb", "b_cdi": 8, "gamma_max_db": 10.0},
            {"mode": "ocb", "b_cdi": 10, "a_ipc": 3, "ipc_mode": "quantized",
             "gamma_max_db": 20.0}
        ]
    })";
    const ExperimentSpec spec = parse_experiment_spec(doc);

    CodebookCache cache1, cache2;
    const ExperimentOutput out1 = run_experiment(spec, dir1.string(), cache1, 1);
    const ExperimentOutput out2 = run_experiment(spec, dir2.string(), cache2, 3);

    const std::string results1 = slurp(out1.results_csv);
    const std::string results2 = slurp(out2.results_csv);
    CHECK(results1 == results2);
    CHECK(slurp(out1.overlay_csv) == slurp(out2.overlay_csv));

    char expected[64];
    std::snprintf(expected, sizeof(expected), "# manifest=%016llx",
                  static_cast<unsigned long long>(out1.manifest_hash));
    CHECK(results1.rfind(expected, 0) == 0);
    CHECK(results1.find("su_outage") != std::string::npos);

    // one header comment, one header, three data rows
    long lines = 0;
    for (char c : results1) lines += c == '\n';
    CHECK(lines == 5);
}

TEST_CASE("overlay columns are pure functions of the config row") {
    const auto dira = scratch_dir("ovla");
    const auto dirb = scratch_dir("ovlb");
    ExperimentSpec spec;
    spec.name = "overlay";
    spec.kind = ExperimentKind::kFigure2;
    spec.n_trials = 500;
    spec.b_grid = {12};
    spec.gamma_max_db_grid = {0, 20, 40};
    ExperimentSpec other = spec;
    other.master_seed += 1;  // different Monte Carlo draws, same overlay

    CodebookCache cache;
    const ExperimentOutput outa = run_experiment(spec, dira.string(), cache, 1);
    const ExperimentOutput outb = run_experiment(other, dirb.string(), cache, 1);
    std::string a = slurp(outa.overlay_csv);
    std::string b = slurp(outb.overlay_csv);
    // strip the manifest comment (it hashes the full spec, including seed)
    a.erase(0, a.find('\n') + 1);
    b.erase(0, b.find('\n') + 1);
    CHECK(a == b);
}

TEST_CASE("validation rows pass their closed-form laws") {
    SystemParams p;
    const auto rows = validate_distributions(p, BitBudget(12), 40000, 5);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        CAPTURE(row.law);
        CHECK(row.pass);
    }
}

TEST_CASE("allocation report is consistent across modules") {
    SystemParams p;
    p.p_max = p.sigma2 * db_to_linear(10.0);
    const BitAllocation alloc = optimal_bit_allocation(12, p);
    // the same constant through the analysis-module entry point
    CHECK(alloc.chi == doctest::Approx(chi_coefficient(p)).epsilon(1e-12));
    CHECK(alloc.a_star + alloc.b_star == 12);

    const auto dir = scratch_dir("alloc");
    ExperimentSpec spec;
    spec.name = "alloc";
    spec.kind = ExperimentKind::kAllocateBits;
    spec.total_bits = 12;
    spec.alloc_gamma_max_db = 10.0;
    CodebookCache cache;
    const ExperimentOutput out = run_experiment(spec, dir.string(), cache, 1);
    CHECK(out.results_csv.empty());
    const std::string overlay = slurp(out.overlay_csv);
    // 13 rows for B = 0..12 plus comment and header
    long lines = 0;
    for (char c : overlay) lines += c == '\n';
    CHECK(lines == 15);
    CHECK(overlay.find(",1\n") != std::string::npos);  // the B* marker
    const std::string manifest = slurp(out.manifest_json);
    CHECK(manifest.find("analytic_b_star") != std::string::npos);
}

TEST_CASE("empirical allocation runs the split sweep") {
    SystemParams p;
    CodebookCache cache;
    const EmpiricalAllocation emp =
        empirical_bit_allocation(p, 6, 10.0, 3000, 11, cache, 2);
    CHECK(emp.a_values.size() == 5);
    CHECK(emp.argmin_a >= 1);
    CHECK(emp.argmin_a <= 5);
}

TEST_CASE("float formatting uses nine significant digits") {
    CHECK(format_g9(0.2591817793182821) == "0.259181779");
    CHECK(format_g9(1234567891.0) == "1.23456789e+09");
    CHECK(format_g9(2.0) == "2");
}

TEST_SUITE_END();
