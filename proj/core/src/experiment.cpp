#include "cogfeed/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cogfeed {

namespace {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json bits_to_json(const BitBudget& b) {
    if (b.is_infinite()) return json("inf");
    return json(b.bits());
}

BitBudget bits_from_json(const json& j, const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return BitBudget::infinite();
        throw ConfigError(path, "expected an integer or \"inf\"");
    }
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer or \"inf\"");
    const int v = j.get<int>();
    if (v < 0) throw ConfigError(path, "must be >= 0");
    return BitBudget(v);
}

const std::set<std::string> kSpecKeys = {
    "name",      "kind",        "n_trials",    "master_seed",       "output_stem",
    "overrides", "gamma_max_db_grid", "b_grid", "l_grid",           "b_fixed",
    "b_local_bits", "total_bits", "alloc_gamma_max_db", "empirical", "grid"};

const std::set<std::string> kOverrideKeys = {
    "L",       "lambda",    "sigma2",      "theta_p_db", "theta_s_db",
    "gamma_p_db", "gamma_max_db", "b_cdi", "a_ipc",      "b_local"};

const std::set<std::string> kRowKeys = {
    "mode",   "feedforward", "cdi_mode", "ipc_mode", "local_mode",
    "b_cdi",  "a_ipc",       "b_local",  "gamma_max_db", "n_trials"};

void apply_overrides(SystemParams& p, const json& j, const std::string& prefix) {
    for (const auto& [key, value] : j.items()) {
        if (!kOverrideKeys.count(key)) throw ConfigError(prefix + "." + key, "unknown field");
    }
    const auto num = [&](const char* key, double fallback) {
        if (!j.contains(key)) return fallback;
        if (!j.at(key).is_number()) throw ConfigError(prefix + "." + key, "expected a number");
        return j.at(key).get<double>();
    };
    if (j.contains("L")) {
        if (!j.at("L").is_number_integer()) throw ConfigError(prefix + ".L", "expected an integer");
        p.L = j.at("L").get<int>();
        if (p.L < 3) throw ConfigError(prefix + ".L", "must be >= 3");
    }
    p.lambda = num("lambda", p.lambda);
    p.sigma2 = num("sigma2", p.sigma2);
    p.theta_p = j.contains("theta_p_db") ? db_to_linear(num("theta_p_db", 0.0)) : p.theta_p;
    p.theta_s = j.contains("theta_s_db") ? db_to_linear(num("theta_s_db", 0.0)) : p.theta_s;
    p.gamma_p = j.contains("gamma_p_db") ? db_to_linear(num("gamma_p_db", 0.0)) : p.gamma_p;
    if (j.contains("gamma_max_db")) {
        p.p_max = p.sigma2 * db_to_linear(j.at("gamma_max_db").get<double>());
    }
    if (j.contains("b_cdi")) p.b_cdi = bits_from_json(j.at("b_cdi"), prefix + ".b_cdi");
    if (j.contains("a_ipc")) p.a_ipc = bits_from_json(j.at("a_ipc"), prefix + ".a_ipc");
    if (j.contains("b_local")) p.b_local = bits_from_json(j.at("b_local"), prefix + ".b_local");
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(prefix, e.what());
    }
}

ExperimentKind kind_from_name(const std::string& name, const std::string& path) {
    if (name == "figure2") return ExperimentKind::kFigure2;
    if (name == "figure3") return ExperimentKind::kFigure3;
    if (name == "figure4") return ExperimentKind::kFigure4;
    if (name == "figure5") return ExperimentKind::kFigure5;
    if (name == "figure6") return ExperimentKind::kFigure6;
    if (name == "validate-distributions") return ExperimentKind::kValidateDistributions;
    if (name == "allocate-bits") return ExperimentKind::kAllocateBits;
    if (name == "custom-sweep") return ExperimentKind::kCustomSweep;
    throw ConfigError(path, "unknown experiment kind '" + name + "'");
}

TrialConfig row_from_json(const json& j, const ExperimentSpec& spec, std::size_t index) {
    const std::string prefix = "grid[" + std::to_string(index) + "]";
    if (!j.is_object()) throw ConfigError(prefix, "expected an object");
    for (const auto& [key, value] : j.items()) {
        if (!kRowKeys.count(key)) throw ConfigError(prefix + "." + key, "unknown field");
    }
    TrialConfig cfg;
    cfg.params = spec.params;
    cfg.n_trials = spec.n_trials;
    cfg.master_seed = spec.master_seed;
    if (j.contains("mode")) {
        const std::string m = j.at("mode").get<std::string>();
        if (m == "ocb") cfg.mode = BeamMode::kOcb;
        else if (m == "nocb") cfg.mode = BeamMode::kNocb;
        else throw ConfigError(prefix + ".mode", "expected \"ocb\" or \"nocb\"");
    }
    if (j.contains("feedforward")) cfg.feedforward = j.at("feedforward").get<bool>();
    if (j.contains("cdi_mode")) {
        const std::string m = j.at("cdi_mode").get<std::string>();
        if (m == "statistical") cfg.cdi_mode = CdiMode::kStatistical;
        else if (m == "rvq") cfg.cdi_mode = CdiMode::kRvq;
        else if (m == "perfect") cfg.cdi_mode = CdiMode::kPerfect;
        else throw ConfigError(prefix + ".cdi_mode", "expected statistical|rvq|perfect");
    }
    if (j.contains("ipc_mode")) {
        const std::string m = j.at("ipc_mode").get<std::string>();
        if (m == "perfect") cfg.ipc_mode = IpcMode::kPerfect;
        else if (m == "quantized") cfg.ipc_mode = IpcMode::kQuantized;
        else throw ConfigError(prefix + ".ipc_mode", "expected perfect|quantized");
    }
    if (j.contains("local_mode")) {
        const std::string m = j.at("local_mode").get<std::string>();
        if (m == "perfect") cfg.local_mode = LocalMode::kPerfect;
        else if (m == "quantized") cfg.local_mode = LocalMode::kQuantized;
        else throw ConfigError(prefix + ".local_mode", "expected perfect|quantized");
    }
    if (j.contains("b_cdi")) cfg.params.b_cdi = bits_from_json(j.at("b_cdi"), prefix + ".b_cdi");
    if (j.contains("a_ipc")) cfg.params.a_ipc = bits_from_json(j.at("a_ipc"), prefix + ".a_ipc");
    if (j.contains("b_local"))
        cfg.params.b_local = bits_from_json(j.at("b_local"), prefix + ".b_local");
    if (j.contains("gamma_max_db")) {
        cfg.params.p_max = cfg.params.sigma2 * db_to_linear(j.at("gamma_max_db").get<double>());
    }
    if (j.contains("n_trials")) {
        cfg.n_trials = j.at("n_trials").get<long>();
        if (cfg.n_trials < 1) throw ConfigError(prefix + ".n_trials", "must be >= 1");
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(prefix, e.what());
    }
    return cfg;
}

std::string bits_csv(const BitBudget& b) { return b.is_infinite() ? "inf" : std::to_string(b.bits()); }

json canonical_spec_json(const ExperimentSpec& spec) {
    json p;
    p["L"] = spec.params.L;
    p["lambda"] = spec.params.lambda;
    p["sigma2"] = spec.params.sigma2;
    p["theta_p"] = spec.params.theta_p;
    p["theta_s"] = spec.params.theta_s;
    p["gamma_p"] = spec.params.gamma_p;
    p["p_max"] = spec.params.p_max;
    p["b_cdi"] = bits_to_json(spec.params.b_cdi);
    p["a_ipc"] = bits_to_json(spec.params.a_ipc);
    p["b_local"] = bits_to_json(spec.params.b_local);

    json j;
    j["name"] = spec.name;
    j["kind"] = experiment_kind_name(spec.kind);
    j["params"] = p;
    j["n_trials"] = spec.n_trials;
    j["master_seed"] = spec.master_seed;
    j["output_stem"] = spec.output_stem;
    j["gamma_max_db_grid"] = spec.gamma_max_db_grid;
    j["b_grid"] = spec.b_grid;
    j["l_grid"] = spec.l_grid;
    j["b_fixed"] = spec.b_fixed;
    j["b_local_bits"] = spec.b_local_bits;
    j["total_bits"] = spec.total_bits;
    j["alloc_gamma_max_db"] = spec.alloc_gamma_max_db;
    j["empirical"] = spec.empirical;
    json rows = json::array();
    for (const TrialConfig& cfg : spec.custom_grid) {
        json r;
        r["mode"] = beam_mode_name(cfg.mode);
        r["feedforward"] = cfg.feedforward;
        r["cdi_mode"] = cdi_mode_name(cfg.cdi_mode);
        r["ipc_mode"] = ipc_mode_name(cfg.ipc_mode);
        r["local_mode"] = local_mode_name(cfg.local_mode);
        r["b_cdi"] = bits_to_json(cfg.params.b_cdi);
        r["a_ipc"] = bits_to_json(cfg.params.a_ipc);
        r["b_local"] = bits_to_json(cfg.params.b_local);
        r["gamma_max_db"] = linear_to_db(cfg.params.gamma_max());
        r["n_trials"] = cfg.n_trials;
        rows.push_back(std::move(r));
    }
    j["grid"] = std::move(rows);
    return j;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    return out;
}

void write_results_csv(std::ofstream& out, const std::string& manifest_hash,
                       const ExperimentSpec& spec, const std::vector<SweepRow>& rows) {
    out << "# manifest=" << manifest_hash << "\n";
    out << "name,kind,mode,feedforward,cdi_mode,b_cdi,ipc_mode,a_ipc,local_mode,b_local,"
           "L,lambda,sigma2,theta_p,theta_s,gamma_p_db,gamma_max_db,"
           "su_outage,pu_outage,pu_outage_reference,ci,mean_tx_power,trials,seed\n";
    for (const SweepRow& row : rows) {
        if (!row.estimate) continue;
        const TrialConfig& c = row.config;
        const OutageEstimate& e = *row.estimate;
        out << spec.name << ',' << experiment_kind_name(spec.kind) << ','
            << beam_mode_name(c.mode) << ',' << (c.feedforward ? 1 : 0) << ','
            << cdi_mode_name(c.cdi_mode) << ',' << bits_csv(c.params.b_cdi) << ','
            << ipc_mode_name(c.ipc_mode) << ',' << bits_csv(c.params.a_ipc) << ','
            << local_mode_name(c.local_mode) << ',' << bits_csv(c.params.b_local) << ','
            << c.params.L << ',' << format_g9(c.params.lambda) << ','
            << format_g9(c.params.sigma2) << ',' << format_g9(c.params.theta_p) << ','
            << format_g9(c.params.theta_s) << ',' << format_g9(linear_to_db(c.params.gamma_p))
            << ',' << format_g9(linear_to_db(c.params.gamma_max())) << ','
            << format_g9(e.su_outage) << ',' << format_g9(e.pu_outage) << ','
            << format_g9(e.pu_outage_reference) << ',' << format_g9(e.su_ci_halfwidth) << ','
            << format_g9(e.mean_tx_power) << ',' << e.trials << ',' << c.master_seed << "\n";
    }
}

void write_overlay_csv(std::ofstream& out, const std::string& manifest_hash,
                       const ExperimentSpec& spec, const std::vector<SweepRow>& rows) {
    out << "# manifest=" << manifest_hash << "\n";
    out << "name,kind,mode,feedforward,L,b_cdi,a_ipc,gamma_max_db,su_baseline,"
           "su_first_order,su_first_order_ff,su_saturation,su_saturation_lower,"
           "su_quantized_ipc_bound,j_objective,validity_ratio,approx_valid\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const SweepRow& row : rows) {
        const TrialConfig& c = row.config;
        const SystemParams& p = c.params;
        const bool b_ok = !p.b_cdi.is_infinite() && p.b_cdi.bits() >= 1;
        const bool a_ok = !p.a_ipc.is_infinite() && p.a_ipc.bits() >= 1;
        const double baseline = su_outage_baseline(p);
        double first = nan, first_ff = nan, sat = nan, sat_lower = nan, bound = nan;
        double validity = nan;
        bool valid_flag = true;
        if (p.b_cdi.is_infinite()) {
            first = first_ff = baseline;
            sat = 0.0;
            sat_lower = 0.0;
            validity = 0.0;
        } else if (b_ok) {
            const AnalyticOutage row_fo = su_outage_first_order(p, p.b_cdi, c.feedforward);
            first = su_outage_first_order(p, p.b_cdi, false).value;
            first_ff = su_outage_first_order(p, p.b_cdi, true).value;
            sat = su_outage_saturation(p, p.b_cdi).value;
            sat_lower = su_outage_saturation_lower(p, p.b_cdi);
            validity = row_fo.validity_ratio;
            valid_flag = row_fo.approx_valid;
            if (a_ok && c.ipc_mode == IpcMode::kQuantized) {
                bound = su_outage_quantized_ipc_bound(p, p.a_ipc.bits(), p.b_cdi,
                                                      c.feedforward).value;
            }
        }
        double j_obj = nan;
        if ((spec.kind == ExperimentKind::kFigure6 || spec.kind == ExperimentKind::kAllocateBits) &&
            b_ok && a_ok) {
            j_obj = bit_allocation_objective(p, p.b_cdi.bits(), spec.total_bits);
        }
        out << spec.name << ',' << experiment_kind_name(spec.kind) << ','
            << beam_mode_name(c.mode) << ',' << (c.feedforward ? 1 : 0) << ',' << p.L << ','
            << bits_csv(p.b_cdi) << ',' << bits_csv(p.a_ipc) << ','
            << format_g9(linear_to_db(p.gamma_max())) << ',' << format_g9(baseline) << ','
            << format_g9(first) << ',' << format_g9(first_ff) << ',' << format_g9(sat) << ','
            << format_g9(sat_lower) << ',' << format_g9(bound) << ',' << format_g9(j_obj)
            << ',' << format_g9(validity) << ',' << (valid_flag ? 1 : 0) << "\n";
    }
}

}  // namespace

const char* experiment_kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::kFigure2: return "figure2";
        case ExperimentKind::kFigure3: return "figure3";
        case ExperimentKind::kFigure4: return "figure4";
        case ExperimentKind::kFigure5: return "figure5";
        case ExperimentKind::kFigure6: return "figure6";
        case ExperimentKind::kValidateDistributions: return "validate-distributions";
        case ExperimentKind::kAllocateBits: return "allocate-bits";
        case ExperimentKind::kCustomSweep: return "custom-sweep";
    }
    return "?";
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double v) { return 10.0 * std::log10(v); }

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

SystemParams params_from_json_overrides(const std::string& json_text) {
    SystemParams p;
    if (json_text.empty()) return p;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("overrides", std::string("invalid JSON: ") + e.what());
    }
    apply_overrides(p, j, "overrides");
    return p;
}

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("<document>", "expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!kSpecKeys.count(key)) throw ConfigError(key, "unknown field");
    }
    ExperimentSpec spec;
    if (!j.contains("name") || !j.at("name").is_string() || j.at("name").get<std::string>().empty()) {
        throw ConfigError("name", "required non-empty string");
    }
    spec.name = j.at("name").get<std::string>();
    if (!j.contains("kind") || !j.at("kind").is_string()) {
        throw ConfigError("kind", "required string");
    }
    spec.kind = kind_from_name(j.at("kind").get<std::string>(), "kind");
    if (j.contains("n_trials")) {
        spec.n_trials = j.at("n_trials").get<long>();
        if (spec.n_trials < 1) throw ConfigError("n_trials", "must be >= 1");
    }
    if (j.contains("master_seed")) spec.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("output_stem")) spec.output_stem = j.at("output_stem").get<std::string>();
    if (j.contains("overrides")) apply_overrides(spec.params, j.at("overrides"), "overrides");
    if (j.contains("gamma_max_db_grid")) {
        spec.gamma_max_db_grid = j.at("gamma_max_db_grid").get<std::vector<double>>();
        if (spec.gamma_max_db_grid.empty()) throw ConfigError("gamma_max_db_grid", "must be non-empty");
    }
    if (j.contains("b_grid")) {
        spec.b_grid = j.at("b_grid").get<std::vector<int>>();
        for (int b : spec.b_grid) {
            if (b < 1) throw ConfigError("b_grid", "budgets must be >= 1");
        }
    }
    if (j.contains("l_grid")) {
        spec.l_grid = j.at("l_grid").get<std::vector<int>>();
        for (int l : spec.l_grid) {
            if (l < 3) throw ConfigError("l_grid", "antenna counts must be >= 3");
        }
    }
    if (j.contains("b_fixed")) {
        spec.b_fixed = j.at("b_fixed").get<int>();
        if (spec.b_fixed < 1) throw ConfigError("b_fixed", "must be >= 1");
    }
    if (j.contains("b_local_bits")) {
        spec.b_local_bits = j.at("b_local_bits").get<int>();
        if (spec.b_local_bits < 0) throw ConfigError("b_local_bits", "must be >= 0");
    }
    if (j.contains("total_bits")) {
        spec.total_bits = j.at("total_bits").get<int>();
        if (spec.total_bits < 1) throw ConfigError("total_bits", "must be >= 1");
    }
    if (j.contains("alloc_gamma_max_db")) {
        spec.alloc_gamma_max_db = j.at("alloc_gamma_max_db").get<double>();
    }
    if (j.contains("empirical")) spec.empirical = j.at("empirical").get<bool>();
    if (j.contains("grid")) {
        if (spec.kind != ExperimentKind::kCustomSweep) {
            throw ConfigError("grid", "only valid for kind custom-sweep");
        }
        const json& rows = j.at("grid");
        if (!rows.is_array() || rows.empty()) throw ConfigError("grid", "expected a non-empty array");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            spec.custom_grid.push_back(row_from_json(rows[i], spec, i));
        }
    } else if (spec.kind == ExperimentKind::kCustomSweep) {
        throw ConfigError("grid", "required for kind custom-sweep");
    }
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read experiment spec: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_spec(buf.str());
}

std::vector<TrialConfig> experiment_grid(const ExperimentSpec& spec) {
    std::vector<double> gammas = spec.gamma_max_db_grid;
    if (gammas.empty()) gammas = {0, 5, 10, 15, 20, 25, 30, 35, 40};
    const auto base_cfg = [&](double gamma_max_db) {
        TrialConfig cfg;
        cfg.params = spec.params;
        cfg.params.p_max = spec.params.sigma2 * db_to_linear(gamma_max_db);
        cfg.n_trials = spec.n_trials;
        cfg.master_seed = spec.master_seed;
        return cfg;
    };
    std::vector<TrialConfig> grid;
    switch (spec.kind) {
        case ExperimentKind::kFigure2: {
            std::vector<int> bs = spec.b_grid.empty() ? std::vector<int>{8, 12, 16, 20}
                                                      : spec.b_grid;
            for (int b : bs) {
                for (double g : gammas) {
                    TrialConfig cfg = base_cfg(g);
                    cfg.params.b_cdi = BitBudget(b);
                    cfg.params.a_ipc = BitBudget::infinite();
                    grid.push_back(cfg);
                }
            }
            break;
        }
        case ExperimentKind::kFigure3: {
            std::vector<int> bs = spec.b_grid.empty() ? std::vector<int>{8, 16} : spec.b_grid;
            for (int b : bs) {
                for (BeamMode mode : {BeamMode::kOcb, BeamMode::kNocb}) {
                    for (double g : gammas) {
                        TrialConfig cfg = base_cfg(g);
                        cfg.mode = mode;
                        cfg.params.b_cdi = BitBudget(b);
                        cfg.params.a_ipc = BitBudget::infinite();
                        grid.push_back(cfg);
                    }
                }
            }
            break;
        }
        case ExperimentKind::kFigure4: {
            std::vector<int> ls = spec.l_grid.empty() ? std::vector<int>{4, 6} : spec.l_grid;
            for (int l : ls) {
                for (BeamMode mode : {BeamMode::kOcb, BeamMode::kNocb}) {
                    for (bool ff : {false, true}) {
                        for (double g : gammas) {
                            TrialConfig cfg = base_cfg(g);
                            cfg.mode = mode;
                            cfg.feedforward = ff;
                            cfg.params.L = l;
                            cfg.params.b_cdi = BitBudget(spec.b_fixed);
                            cfg.params.a_ipc = BitBudget::infinite();
                            grid.push_back(cfg);
                        }
                    }
                }
            }
            break;
        }
        case ExperimentKind::kFigure5: {
            for (BeamMode mode : {BeamMode::kOcb, BeamMode::kNocb}) {
                for (LocalMode local : {LocalMode::kPerfect, LocalMode::kQuantized}) {
                    for (double g : gammas) {
                        TrialConfig cfg = base_cfg(g);
                        cfg.mode = mode;
                        cfg.local_mode = local;
                        cfg.params.b_cdi = BitBudget(spec.b_fixed);
                        cfg.params.a_ipc = BitBudget::infinite();
                        cfg.params.b_local = local == LocalMode::kQuantized
                                                 ? BitBudget(spec.b_local_bits)
                                                 : BitBudget::infinite();
                        grid.push_back(cfg);
                    }
                }
            }
            break;
        }
        case ExperimentKind::kFigure6: {
            for (int a = 1; a <= spec.total_bits - 1; ++a) {
                TrialConfig cfg = base_cfg(spec.alloc_gamma_max_db);
                cfg.mode = BeamMode::kOcb;
                cfg.ipc_mode = IpcMode::kQuantized;
                cfg.params.a_ipc = BitBudget(a);
                cfg.params.b_cdi = BitBudget(spec.total_bits - a);
                grid.push_back(cfg);
            }
            break;
        }
        case ExperimentKind::kAllocateBits: {
            if (spec.empirical) {
                ExperimentSpec fig6 = spec;
                fig6.kind = ExperimentKind::kFigure6;
                return experiment_grid(fig6);
            }
            break;
        }
        case ExperimentKind::kValidateDistributions:
            break;
        case ExperimentKind::kCustomSweep:
            grid = spec.custom_grid;
            break;
    }
    return grid;
}

std::vector<ValidationRow> validate_distributions(const SystemParams& params,
                                                  BitBudget b_cdi, long n_samples,
                                                  std::uint64_t seed) {
    params.validate();
    if (b_cdi.is_infinite()) b_cdi = BitBudget(12);
    if (n_samples < 1000) throw std::invalid_argument("validate_distributions: n >= 1000");
    const DistributionLaws laws = distribution_laws(params, b_cdi);

    std::vector<double> gain, leakage, fraction;
    gain.reserve(n_samples);
    leakage.reserve(n_samples);
    fraction.reserve(n_samples);
    SplitMix64 rng(derive_stream_seed(seed, 0xD15Bu));
    for (long i = 0; i < n_samples; ++i) {
        const ChannelRealization real = sample_channels(params, rng);
        const CdiQuantization cdi = quantize_cdi_statistical(real.s_x, real.s_s, b_cdi, rng);
        gain.push_back(real.g_s * std::norm(cdi.b));
        leakage.push_back(cdi.delta);
        fraction.push_back(cdi.epsilon > 0.0 ? cdi.delta / cdi.epsilon : 0.0);
    }

    std::vector<ValidationRow> rows;
    rows.push_back({"effective-gain-chi-square",
                    ks_test(std::move(gain), [&](double t) { return laws.effective_gain_cdf(t); }),
                    false});
    rows.push_back({"residual-leakage",
                    ks_test(std::move(leakage), [&](double t) { return laws.leakage_cdf(t); }),
                    false});
    rows.push_back({"leakage-fraction",
                    ks_test(std::move(fraction),
                            [&](double t) { return 1.0 - laws.leakage_fraction_survival(t); }),
                    false});
    for (ValidationRow& row : rows) row.pass = row.ks.p_value > 0.01;
    return rows;
}

EmpiricalAllocation empirical_bit_allocation(const SystemParams& base, int total_bits,
                                             double gamma_max_db, long n_trials,
                                             std::uint64_t master_seed, CodebookCache& cache,
                                             int workers) {
    if (total_bits < 2) throw std::invalid_argument("empirical_bit_allocation: total >= 2");
    EmpiricalAllocation out;
    double best = std::numeric_limits<double>::infinity();
    for (int a = 1; a <= total_bits - 1; ++a) {
        TrialConfig cfg;
        cfg.params = base;
        cfg.params.p_max = base.sigma2 * db_to_linear(gamma_max_db);
        cfg.params.a_ipc = BitBudget(a);
        cfg.params.b_cdi = BitBudget(total_bits - a);
        cfg.mode = BeamMode::kOcb;
        cfg.ipc_mode = IpcMode::kQuantized;
        cfg.n_trials = n_trials;
        cfg.master_seed = master_seed;
        const OutageEstimate est = estimate_outage(cfg, cache, workers);
        out.a_values.push_back(a);
        out.su_outage.push_back(est.su_outage);
        if (est.su_outage < best) {
            best = est.su_outage;
            out.argmin_a = a;
        }
    }
    return out;
}

ExperimentOutput run_experiment(const ExperimentSpec& spec, const std::string& out_dir,
                                CodebookCache& cache, int workers) {
    const auto t0 = std::chrono::steady_clock::now();
    if (spec.name.empty()) throw ConfigError("name", "required non-empty string");
    spec.params.validate();

    namespace fs = std::filesystem;
    const fs::path dir(out_dir.empty() ? "." : out_dir);
    fs::create_directories(dir);
    const std::string stem = spec.output_stem.empty() ? spec.name : spec.output_stem;

    const json canonical = canonical_spec_json(spec);
    const std::uint64_t hash = fnv1a64(canonical.dump());
    const std::string hash_hex = hex16(hash);

    ExperimentOutput output;
    output.manifest_hash = hash;

    json manifest;
    manifest["manifest_hash"] = hash_hex;
    manifest["spec"] = canonical;

    std::vector<SweepRow> rows;
    const std::vector<TrialConfig> grid = experiment_grid(spec);
    if (!grid.empty()) {
        rows = sweep(grid, cache, workers);
        const fs::path results_path = dir / (stem + "_results.csv");
        auto results = open_output(results_path);
        write_results_csv(results, hash_hex, spec, rows);
        output.results_csv = results_path.string();
        const fs::path overlay_path = dir / (stem + "_overlay.csv");
        auto overlay = open_output(overlay_path);
        write_overlay_csv(overlay, hash_hex, spec, rows);
        output.overlay_csv = overlay_path.string();
        output.rows = static_cast<long>(rows.size());

        json errors = json::array();
        for (const SweepRow& row : rows) {
            if (!row.error.empty()) errors.push_back(row.error);
        }
        manifest["row_errors"] = errors;

        // Record every codebook the grid resolved (cached, so this is cheap).
        json cb_list = json::array();
        std::set<std::string> seen;
        for (const TrialConfig& cfg : grid) {
            const CodebookSet set = prepare_codebooks(cfg, cache);
            for (const auto& cb : {set.eta, set.nu_sq}) {
                if (!cb) continue;
                std::string levels_repr;
                for (double level : cb->levels) levels_repr += format_g9(level) + ";";
                const std::string key = ipc_quantity_name(cb->quantity) + levels_repr;
                if (!seen.insert(key).second) continue;
                json e;
                e["mode"] = ipc_quantity_name(cb->quantity);
                e["A"] = cb->bits_a;
                e["B"] = bits_to_json(cb->b_cdi);
                e["seed"] = cb->seed;
                e["n_samples"] = cb->n_samples;
                e["params_hash"] = hex16(cb->params_hash);
                e["levels_hash"] = hex16(fnv1a64(levels_repr));
                e["levels_above_p_max"] = cb->levels_above_p_max;
                e["overflow_flagged"] = cb->overflow_flagged;
                cb_list.push_back(std::move(e));
            }
        }
        manifest["codebooks"] = std::move(cb_list);
    }

    if (spec.kind == ExperimentKind::kValidateDistributions) {
        const std::vector<ValidationRow> vrows = validate_distributions(
            spec.params, spec.params.b_cdi, spec.n_trials, spec.master_seed);
        const fs::path path = dir / (stem + "_results.csv");
        auto out = open_output(path);
        out << "# manifest=" << hash_hex << "\n";
        out << "name,kind,law,n_samples,statistic,p_value,pass\n";
        json summary = json::array();
        for (const ValidationRow& row : vrows) {
            out << spec.name << ",validate-distributions," << row.law << ',' << row.ks.n
                << ',' << format_g9(row.ks.statistic) << ',' << format_g9(row.ks.p_value)
                << ',' << (row.pass ? 1 : 0) << "\n";
            json r;
            r["law"] = row.law;
            r["statistic"] = row.ks.statistic;
            r["p_value"] = row.ks.p_value;
            r["pass"] = row.pass;
            summary.push_back(std::move(r));
        }
        output.results_csv = path.string();
        output.rows = static_cast<long>(vrows.size());
        manifest["validation"] = std::move(summary);
    }

    if (spec.kind == ExperimentKind::kFigure6 || spec.kind == ExperimentKind::kAllocateBits) {
        SystemParams at_op = spec.params;
        at_op.p_max = spec.params.sigma2 * db_to_linear(spec.alloc_gamma_max_db);
        const BitAllocation alloc = optimal_bit_allocation(spec.total_bits, at_op);
        json a;
        a["analytic_b_star"] = alloc.b_star;
        a["analytic_a_star"] = alloc.a_star;
        a["b_star_unrounded"] = alloc.b_star_unrounded;
        a["chi"] = alloc.chi;
        if (!rows.empty()) {
            int argmin_a = 0;
            double best = std::numeric_limits<double>::infinity();
            for (const SweepRow& row : rows) {
                if (!row.estimate) continue;
                if (row.estimate->su_outage < best) {
                    best = row.estimate->su_outage;
                    argmin_a = row.config.params.a_ipc.bits();
                }
            }
            a["empirical_argmin_a"] = argmin_a;
            output.empirical_argmin_a = argmin_a;
        }
        manifest["bit_allocation"] = std::move(a);

        if (spec.kind == ExperimentKind::kAllocateBits) {
            const fs::path path = dir / (stem + "_overlay.csv");
            auto out = open_output(path);
            out << "# manifest=" << hash_hex << "\n";
            out << "name,kind,B,A,j_objective,is_b_star\n";
            for (int b = 0; b <= spec.total_bits; ++b) {
                out << spec.name << ",allocate-bits," << b << ',' << (spec.total_bits - b)
                    << ',' << format_g9(alloc.objective[static_cast<std::size_t>(b)]) << ','
                    << (b == alloc.b_star ? 1 : 0) << "\n";
            }
            output.overlay_csv = path.string();
        }
    }

    json outputs;
    outputs["results_csv"] = output.results_csv;
    outputs["overlay_csv"] = output.overlay_csv;
    manifest["outputs"] = std::move(outputs);

    const auto t1 = std::chrono::steady_clock::now();
    output.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    manifest["wall_time_ms"] = output.wall_time_ms;

    const fs::path manifest_path = dir / (stem + "_manifest.json");
    auto mout = open_output(manifest_path);
    mout << manifest.dump(2) << "\n";
    output.manifest_json = manifest_path.string();
    return output;
}

}  // namespace cogfeed
