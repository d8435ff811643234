// cfx command-line interface.
//
// Exit codes: 0 success, 2 validation or usage failure, 3 runtime error.
// CFX_LOG sets the log level (trace, debug, info, warn, error, off).

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cfx/service.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct Common {
    std::string out;
    std::string format = "json";
    unsigned workers = 0;
    bool timestamp = false;
    bool allow_defaults = false;
};

struct RunFlags {
    std::optional<std::uint64_t> cases;
    std::optional<std::uint64_t> seed;
};

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("cfx");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* lvl = std::getenv("CFX_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

// UTC time in ISO 8601; SOURCE_DATE_EPOCH wins so reproducible builds can pin it.
std::string now_iso8601() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

cfx::LoadOptions load_options(const Common& c) { return {.strict = true, .allow_defaults = c.allow_defaults}; }

void emit(cfx::ResultDocument doc, const Common& c) {
    const auto format = cfx::parse_output_format(c.format);
    if (!format) throw cfx::Error(cfx::ErrorCode::ValidationError, "--format must be json or csv", "format");
    if (c.timestamp) doc.timestamp = now_iso8601();
    if (c.out.empty()) cfx::write_results(doc, *format, std::cout);
    else cfx::write_results(doc, *format, c.out);
    if (!c.out.empty()) spdlog::info("wrote {}", c.out);
}

void emit_json(const cfx::ordered_json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << cfx::dump(j);
        return;
    }
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    f << cfx::dump(j);
    if (!f) throw cfx::Error(cfx::ErrorCode::IoError, "failed to write " + out);
}

std::uint64_t cases_of(const RunFlags& f, const cfx::ScenarioDocument& d) {
    const std::uint64_t n = f.cases ? *f.cases : d.run ? d.run->n_cases : cfx::RunSpec{}.n_cases;
    if (n == 0) throw cfx::Error(cfx::ErrorCode::ValidationError, "--cases must be at least 1", "run.n_cases");
    return n;
}

std::uint64_t seed_of(const RunFlags& f, const cfx::ScenarioDocument& d) {
    return f.seed ? *f.seed : d.run ? d.run->seed : 0;
}

cfx::ResultDocument header(const cfx::ScenarioDocument& d, std::uint64_t seed, std::uint64_t n) {
    cfx::ResultDocument r;
    r.name = d.name;
    r.seed = seed;
    r.n_cases = n;
    return r;
}

cfx::ResultDocument run_eu(const cfx::ScenarioDocument& d, const std::string& mode_name) {
    const auto mode = cfx::parse_cu_mode(mode_name);
    if (!mode) throw cfx::Error(cfx::ErrorCode::ValidationError, "--mode must be automated or reviewed", "mode");
    if (!d.matrix)
        throw cfx::Error(cfx::ErrorCode::ValidationError, "matrix: required for closed-form evaluation", "matrix");
    const auto& u = d.scenario.utilities;
    auto r = header(d, 0, 0);
    r.payload = cfx::ClosedFormResult{*mode, *d.matrix, cfx::build_report(*d.matrix, u, *mode),
                                      cfx::discovery_analysis(*d.matrix, u, *mode)};
    return r;
}

cfx::ResultDocument run_simulate(const cfx::ScenarioDocument& d, const RunFlags& f, const cfx::RunOptions& opts) {
    const auto n = cases_of(f, d);
    const auto seed = seed_of(f, d);
    spdlog::info("simulating {} with {} cases, seed {}", d.name, n, seed);
    auto r = header(d, seed, n);
    r.payload = cfx::run_scenario(d.scenario, n, seed, opts);
    return r;
}

cfx::ResultDocument run_sweep(const cfx::ScenarioDocument& d, const cfx::SweepSpec& spec, const RunFlags& f,
                              const cfx::RunOptions& opts) {
    const auto n = cases_of(f, d);
    const auto seed = seed_of(f, d);
    spdlog::info("sweeping {} over {} values of {}", d.name, spec.values.size(), spec.param_path);
    auto r = header(d, seed, n);
    r.payload = cfx::sweep(d.scenario, spec.param_path, spec.values, n, seed, spec.seed_policy, opts);
    return r;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw cfx::Error(cfx::ErrorCode::ValidationError, "--values: not a number: '" + item + "'", "sweep.values");
        }
    }
    return out;
}

void add_output_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--out,-o", c.out, "Write results to this file instead of stdout");
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--timestamp", c.timestamp, "Record the current UTC time in the result document");
}

void add_run_flags(CLI::App* cmd, RunFlags& f, Common& c) {
    cmd->add_option("--cases,-n", f.cases, "Cases per run (default: the document's run block, else 100000)");
    cmd->add_option("--seed", f.seed, "Master seed (default: the document's run block, else 0)");
    cmd->add_option("--workers,-j", c.workers, "Simulator threads (0: hardware concurrency)");
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Counterfactual expected-utility calculator and Monte Carlo simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cfx::kToolVersion));

    Common common;
    RunFlags run_flags;
    std::string config;
    std::vector<std::string> configs;
    app.add_flag("--allow-defaults", common.allow_defaults,
                 "Accept documents that omit schema_version and name");

    auto* eu = app.add_subcommand("eu", "Closed-form report from a declared matrix");
    std::string mode = "reviewed";
    eu->add_option("--config,-c", config, "Scenario document")->required()->check(CLI::ExistingFile);
    eu->add_option("--mode", mode, "Counterfactual utility matrix")->check(CLI::IsMember({"automated", "reviewed"}));
    add_output_flags(eu, common);

    auto* simulate = app.add_subcommand("simulate", "Run one scenario");
    std::size_t episodes = 0;
    bool sample_discovery = false;
    simulate->add_option("--config,-c", config, "Scenario document")->required()->check(CLI::ExistingFile);
    simulate->add_option("--episodes", episodes, "Include the first N episodes in the output");
    simulate->add_flag("--sample-discovery", sample_discovery, "Draw and count per-episode discovery");
    add_run_flags(simulate, run_flags, common);
    add_output_flags(simulate, common);

    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter");
    std::string param;
    std::string values;
    std::string seed_policy;
    sweep_cmd->add_option("--config,-c", config, "Scenario document")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--param", param, "Parameter path, e.g. scenario.algorithm_complementarity");
    sweep_cmd->add_option("--values", values, "Comma-separated values");
    sweep_cmd->add_option("--seed-policy", seed_policy, "common or per_point")
        ->check(CLI::IsMember({"common", "per_point"}));
    add_run_flags(sweep_cmd, run_flags, common);
    add_output_flags(sweep_cmd, common);

    auto* compare = app.add_subcommand("compare", "Run up to five scenarios with a common seed");
    compare->add_option("--config,-c", configs, "Scenario documents (repeat up to five times)")
        ->required()
        ->check(CLI::ExistingFile);
    add_run_flags(compare, run_flags, common);
    add_output_flags(compare, common);

    auto* presets_cmd = app.add_subcommand("presets", "Built-in scenarios sim1..sim6");
    presets_cmd->require_subcommand(1);
    auto* presets_list = presets_cmd->add_subcommand("list", "List presets");
    auto* presets_show = presets_cmd->add_subcommand("show", "Print a preset document");
    auto* presets_run = presets_cmd->add_subcommand("run", "Run a preset's sweep");
    auto* presets_export = presets_cmd->add_subcommand("export", "Write every preset to a directory");
    std::string preset_name;
    std::string export_dir;
    presets_show->add_option("name", preset_name, "Preset name")->required();
    presets_show->add_option("--out,-o", common.out, "Write to this file instead of stdout");
    presets_run->add_option("name", preset_name, "Preset name")->required();
    add_run_flags(presets_run, run_flags, common);
    add_output_flags(presets_run, common);
    presets_export->add_option("dir", export_dir, "Target directory")->required();

    auto* calibrate = app.add_subcommand("calibrate-thresholds", "Symmetric confidence thresholds for a target rate");
    double target_rate = 0.65;
    std::string judge = "ai";
    std::uint64_t calib_cases = 1'000'000;
    std::uint64_t calib_seed = 0;
    calibrate->add_option("--config,-c", config, "Scenario document")->required()->check(CLI::ExistingFile);
    calibrate->add_option("--target-rate", target_rate, "Fraction of judgments that should be confident")
        ->required();
    calibrate->add_option("--judge", judge, "Whose thresholds to calibrate")->check(CLI::IsMember({"ai", "dm"}));
    calibrate->add_option("--cases,-n", calib_cases, "Calibration sample size");
    calibrate->add_option("--seed", calib_seed, "Master seed");
    calibrate->add_option("--workers,-j", common.workers, "Simulator threads (0: hardware concurrency)");
    calibrate->add_option("--out,-o", common.out, "Write to this file instead of stdout");

    auto* validate = app.add_subcommand("validate", "Check scenario documents");
    validate->add_option("--config,-c", configs, "Scenario documents")->required()->check(CLI::ExistingFile);

    auto* schema = app.add_subcommand("schema", "Print a published JSON schema");
    std::string schema_kind = "scenario";
    schema->add_option("kind", schema_kind, "scenario or result")->check(CLI::IsMember({"scenario", "result"}));
    schema->add_option("--out,-o", common.out, "Write to this file instead of stdout");

    auto* serve = app.add_subcommand("serve", "Start the HTTP service");
    std::string bind = "127.0.0.1";
    int port = 8080;
    cfx::ServiceConfig service_cfg;
    serve->add_option("--bind", bind, "Bind address");
    serve->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));
    serve->add_option("--max-cases", service_cfg.max_cases, "Per-request n_cases cap");
    serve->add_option("--slots", service_cfg.run_slots, "Concurrent runs before requests get 429")
        ->check(CLI::Range(1, 1024));
    serve->add_option("--workers,-j", service_cfg.workers, "Simulator threads per run (0: hardware concurrency)");
    serve->add_option("--cors-origin", service_cfg.cors_origin, "Access-Control-Allow-Origin value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        const auto opts = load_options(common);
        cfx::RunOptions run_opts;
        run_opts.workers = common.workers;

        if (*eu) {
            emit(run_eu(cfx::load_scenario(config, opts), mode), common);
        } else if (*simulate) {
            run_opts.keep_episodes = episodes;
            run_opts.sample_discovery = sample_discovery;
            emit(run_simulate(cfx::load_scenario(config, opts), run_flags, run_opts), common);
        } else if (*sweep_cmd) {
            const auto doc = cfx::load_scenario(config, opts);
            cfx::SweepSpec spec = doc.sweep.value_or(cfx::SweepSpec{});
            if (!param.empty()) spec.param_path = param;
            if (!values.empty()) spec.values = parse_values(values);
            if (!seed_policy.empty()) spec.seed_policy = *cfx::parse_seed_policy(seed_policy);
            if (spec.param_path.empty())
                throw cfx::Error(cfx::ErrorCode::ValidationError, "--param is required when the document has no sweep",
                                 "sweep.param_path");
            emit(run_sweep(doc, spec, run_flags, run_opts), common);
        } else if (*compare) {
            if (configs.size() > cfx::kMaxCompareScenarios)
                throw cfx::Error(cfx::ErrorCode::TooManyScenarios, "at most five --config files can be compared");
            std::vector<cfx::ScenarioDocument> docs;
            std::vector<cfx::Scenario> scenarios;
            for (const auto& path : configs) {
                docs.push_back(cfx::load_scenario(path, opts));
                scenarios.push_back(docs.back().scenario);
            }
            const auto n = cases_of(run_flags, docs.front());
            const auto seed = seed_of(run_flags, docs.front());
            const auto results = cfx::compare_scenarios(scenarios, n, seed, run_opts);
            cfx::ComparisonResult out;
            for (std::size_t i = 0; i < docs.size(); ++i) out.push_back({docs[i].name, results[i]});
            cfx::ResultDocument r;
            r.name = "compare";
            r.seed = seed;
            r.n_cases = n;
            r.payload = std::move(out);
            emit(std::move(r), common);
        } else if (*presets_cmd) {
            if (*presets_list) {
                for (const auto& p : cfx::presets()) std::cout << p.name << "\t" << p.description << "\n";
            } else if (*presets_export) {
                std::filesystem::create_directories(export_dir);
                for (const auto& p : cfx::presets())
                    emit_json(cfx::to_json(p), (std::filesystem::path(export_dir) / (p.name + ".json")).string());
            } else {
                const auto* p = cfx::find_preset(preset_name);
                if (!p) throw cfx::Error(cfx::ErrorCode::ValidationError, "unknown preset '" + preset_name + "'", "name");
                if (*presets_show) emit_json(cfx::to_json(*p), common.out);
                else if (p->sweep) emit(run_sweep(*p, *p->sweep, run_flags, run_opts), common);
                else emit(run_simulate(*p, run_flags, run_opts), common);
            }
        } else if (*calibrate) {
            const auto doc = cfx::load_scenario(config, opts);
            const auto which = judge == "ai" ? cfx::Judge::Ai : cfx::Judge::Dm;
            const auto c = cfx::calibrate_thresholds(doc.scenario, target_rate, which, calib_cases, calib_seed,
                                                     common.workers);
            const std::string prefix = judge == "ai" ? "scenario.ai_" : "scenario.dm_";
            cfx::ordered_json j = {{"judge", judge},
                                   {"target_rate", target_rate},
                                   {"n_cases", calib_cases},
                                   {"seed", calib_seed},
                                   {"half_width", c.half_width},
                                   {prefix + "pos_threshold", c.pos_threshold},
                                   {prefix + "neg_threshold", c.neg_threshold},
                                   {"achieved_rate", c.achieved_rate}};
            emit_json(j, common.out);
        } else if (*validate) {
            for (const auto& path : configs) {
                cfx::load_scenario(path, opts);
                std::cout << path << ": ok\n";
            }
        } else if (*schema) {
            emit_json(schema_kind == "scenario" ? cfx::scenario_document_schema() : cfx::result_document_schema(),
                      common.out);
        } else if (*serve) {
            cfx::Service service(service_cfg);
            httplib::Server server;
            spdlog::warn("listening on {}:{}", bind, port);
            if (!cfx::serve(service, server, bind, port))
                throw cfx::Error(cfx::ErrorCode::IoError, "cannot listen on " + bind + ":" + std::to_string(port));
        }
    } catch (const cfx::Error& e) {
        spdlog::debug("error code {}, field path '{}'", cfx::to_string(e.code()), e.field_path());
        std::cerr << "error: " << e.what() << "\n";
        return e.is_validation() ? kExitValidation : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
