#pragma once
// JSON mapping for scenario documents and result documents.
//
// Scenario fields are read and written through the parameter registry, so
// every path in the registry is a JSON leaf under "scenario" and nothing
// else is accepted there in strict mode.

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "document.hpp"

namespace cfx {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct LoadOptions {
    bool strict = true;           // reject unknown fields
    bool allow_defaults = false;  // document header fields may be omitted
};

namespace detail {

inline std::string join_path(const std::string& prefix, std::string_view key) {
    return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

[[noreturn]] inline void invalid(const std::string& path, const std::string& reason) {
    throw Error(ErrorCode::ValidationError, path + ": " + reason, path);
}

inline double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) invalid(path, "expected a number");
    return v.get<double>();
}

inline std::uint64_t as_count(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    invalid(path, "expected a nonnegative integer");
}

inline std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) invalid(path, "expected a string");
    return v.get<std::string>();
}

inline const json& as_object(const json& v, const std::string& path) {
    if (!v.is_object()) invalid(path, "expected an object");
    return v;
}

inline void reject_unknown(const json& obj, const std::set<std::string, std::less<>>& known,
                           const std::string& prefix, const LoadOptions& opts) {
    if (!opts.strict) return;
    for (const auto& [key, _] : obj.items())
        if (!known.contains(key)) {
            const std::string path = join_path(prefix, key);
            throw Error(ErrorCode::UnknownField, path + ": unknown field", path);
        }
}

inline void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, const json*>>& out) {
    if (v.is_object()) {
        for (const auto& [key, child] : v.items()) flatten(child, join_path(prefix, key), out);
    } else {
        out.emplace_back(prefix, &v);
    }
}

inline std::string format_path_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Scenario

inline ordered_json scenario_to_json(const Scenario& s) {
    ordered_json j = ordered_json::object();
    for (const auto& p : parameter_registry()) {
        const std::string pointer = "/" + [&] {
            std::string x = p.path;
            for (char& ch : x)
                if (ch == '.') ch = '/';
            return x;
        }();
        if (p.kind == ParamKind::UsePatternChoice)
            j[ordered_json::json_pointer(pointer)] = std::string(name(s.use_pattern));
        else
            j[ordered_json::json_pointer(pointer)] = p.get(s);
    }
    return j;
}

/// Reads a scenario object. Omitted fields keep their defaults; `prefix` is
/// used for diagnostics.
inline Scenario scenario_from_json(const json& j, const LoadOptions& opts = {},
                                   const std::string& prefix = "scenario", Scenario base = {}) {
    detail::as_object(j, prefix);
    std::vector<std::pair<std::string, const json*>> leaves;
    detail::flatten(j, "", leaves);
    for (const auto& [path, value] : leaves) {
        const std::string full = detail::join_path(prefix, path);
        const ParamInfo* p = find_parameter(path);
        if (!p) {
            if (opts.strict) throw Error(ErrorCode::UnknownField, full + ": unknown field", full);
            continue;
        }
        if (p->kind == ParamKind::UsePatternChoice) {
            const auto up = parse_use_pattern(detail::as_string(*value, full));
            if (!up) detail::invalid(full, "expected one of UP1..UP5");
            base.use_pattern = *up;
        } else {
            p->set(base, detail::as_number(*value, full));
        }
    }
    validate_scenario(base, ErrorCode::ValidationError, prefix + ".");
    return base;
}

// ---------------------------------------------------------------------------
// Matrices and small value types

inline ordered_json to_json(const CounterfactualMatrix& m) {
    ordered_json j = ordered_json::object();
    for (CellKind c : kAllCells) j[std::string(name(c))] = m[c];
    return j;
}

/// Accepts either the eight named cells or {"table": [[4 x GT=T], [4 x GT=F]]}.
inline CounterfactualMatrix matrix_from_json(const json& j, const std::string& prefix = "matrix",
                                             const LoadOptions& opts = {}) {
    detail::as_object(j, prefix);
    CounterfactualMatrix m;
    if (j.contains("table")) {
        detail::reject_unknown(j, {"table"}, prefix, opts);
        const auto& t = j.at("table");
        const std::string tp = prefix + ".table";
        if (!t.is_array() || t.size() != 2) detail::invalid(tp, "expected two rows (GT=T, GT=F)");
        for (std::size_t r = 0; r < 2; ++r) {
            const std::string rp = tp + "[" + std::to_string(r) + "]";
            if (!t[r].is_array() || t[r].size() != 4) detail::invalid(rp, "expected four columns");
            for (std::size_t c = 0; c < 4; ++c)
                m[kAllCells[r * 4 + c]] = detail::as_number(t[r][c], rp + "[" + std::to_string(c) + "]");
        }
    } else {
        std::set<std::string, std::less<>> known;
        for (CellKind c : kAllCells) {
            const std::string key(name(c));
            known.insert(key);
            if (!j.contains(key)) detail::invalid(detail::join_path(prefix, key), "missing cell probability");
            m[c] = detail::as_number(j.at(key), detail::join_path(prefix, key));
        }
        detail::reject_unknown(j, known, prefix, opts);
    }
    const auto check = validate_matrix(m);
    if (!check.ok()) {
        const auto& issue = check.issues.front();
        const std::string path = issue.cell ? detail::join_path(prefix, name(*issue.cell)) : prefix;
        throw Error(ErrorCode::ValidationError, path + ": " + check.message(), path);
    }
    return m;
}

inline ordered_json to_json(const ConfusionMatrix& cm) {
    ordered_json j = ordered_json::object();
    for (GroundTruth g : {GroundTruth::T, GroundTruth::F})
        for (Decision d : {Decision::T, Decision::F}) j[std::string(name(g))][std::string(name(d))] = cm.at(g, d);
    return j;
}

inline ConfusionMatrix confusion_from_json(const json& j) {
    ConfusionMatrix cm;
    for (GroundTruth g : {GroundTruth::T, GroundTruth::F})
        for (Decision d : {Decision::T, Decision::F})
            cm.at(g, d) = j.at(std::string(name(g))).at(std::string(name(d))).get<double>();
    return cm;
}

namespace detail {

inline ordered_json optional_number(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

inline std::optional<double> read_optional(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

template <std::size_t N, typename Names>
ordered_json counts_to_json(const std::array<std::uint64_t, N>& counts, Names&& names) {
    ordered_json j = ordered_json::object();
    for (std::size_t i = 0; i < N; ++i) j[std::string(names(i))] = counts[i];
    return j;
}

template <std::size_t N, typename Names>
std::array<std::uint64_t, N> counts_from_json(const json& j, Names&& names) {
    std::array<std::uint64_t, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = j.at(std::string(names(i))).template get<std::uint64_t>();
    return out;
}

inline std::string_view cell_name_at(std::size_t i) { return name(kAllCells[i]); }
inline std::string_view branch_name_at(std::size_t i) { return name(kAllBranches[i]); }

} // namespace detail

inline ordered_json to_json(const EUReport& r) {
    ordered_json j = ordered_json::object();
    j["outcome_eu"] = r.outcome_eu;
    j["counter_eu"] = r.counter_eu;
    j["usage_eu"] = r.usage_eu;
    j["unaided_eu"] = r.unaided_eu;
    j["relative_outcome_eu"] = r.relative_outcome_eu;
    j["relative_counter_eu"] = r.relative_counter_eu;
    j["relative_usage_eu"] = r.relative_usage_eu;
    j["aided_sensitivity"] = detail::optional_number(r.aided_sensitivity);
    j["aided_specificity"] = detail::optional_number(r.aided_specificity);
    j["unaided_sensitivity"] = detail::optional_number(r.unaided_sensitivity);
    j["unaided_specificity"] = detail::optional_number(r.unaided_specificity);
    j["aided_cm"] = to_json(r.aided_cm);
    j["unaided_cm"] = to_json(r.unaided_cm);
    return j;
}

inline EUReport report_from_json(const json& j) {
    EUReport r;
    r.outcome_eu = j.at("outcome_eu").get<double>();
    r.counter_eu = j.at("counter_eu").get<double>();
    r.usage_eu = j.at("usage_eu").get<double>();
    r.unaided_eu = j.at("unaided_eu").get<double>();
    r.relative_outcome_eu = j.at("relative_outcome_eu").get<double>();
    r.relative_counter_eu = j.at("relative_counter_eu").get<double>();
    r.relative_usage_eu = j.at("relative_usage_eu").get<double>();
    r.aided_sensitivity = detail::read_optional(j, "aided_sensitivity");
    r.aided_specificity = detail::read_optional(j, "aided_specificity");
    r.unaided_sensitivity = detail::read_optional(j, "unaided_sensitivity");
    r.unaided_specificity = detail::read_optional(j, "unaided_specificity");
    r.aided_cm = confusion_from_json(j.at("aided_cm"));
    r.unaided_cm = confusion_from_json(j.at("unaided_cm"));
    return r;
}

inline ordered_json to_json(const DiscoveryAnalysis& a) {
    ordered_json cells = ordered_json::array();
    for (const auto& c : a.cells)
        cells.push_back({{"cell", std::string(name(c.cell))},
                         {"probability", c.probability},
                         {"discovery", c.discovery},
                         {"utility", c.utility},
                         {"contribution", c.contribution}});
    ordered_json j = ordered_json::object();
    j["cells"] = std::move(cells);
    j["counter_eu"] = a.counter_eu;
    j["one_sided_negative"] = a.one_sided_negative;
    j["dominant_cell"] = std::string(name(a.dominant_cell));
    return j;
}

inline DiscoveryAnalysis discovery_from_json(const json& j) {
    DiscoveryAnalysis a;
    const auto& cells = j.at("cells");
    for (std::size_t i = 0; i < kCfCellCount; ++i) {
        const auto& c = cells.at(i);
        auto& e = a.cells[i];
        e.cell = parse_cf_cell(c.at("cell").get<std::string>()).value();
        e.probability = c.at("probability").get<double>();
        e.discovery = c.at("discovery").get<double>();
        e.utility = c.at("utility").get<double>();
        e.contribution = c.at("contribution").get<double>();
    }
    a.counter_eu = j.at("counter_eu").get<double>();
    a.one_sided_negative = j.at("one_sided_negative").get<bool>();
    a.dominant_cell = parse_cf_cell(j.at("dominant_cell").get<std::string>()).value();
    return a;
}

inline ordered_json to_json(const Episode& e) {
    ordered_json j = ordered_json::object();
    j["gt"] = std::string(name(e.gt));
    j["bss"] = e.bss;
    j["ai_fs"] = e.ai_fs;
    j["dm_fs"] = e.dm_fs;
    j["ai_decision"] = std::string(name(e.ai_decision));
    j["unaided_decision"] = std::string(name(e.unaided_decision));
    j["aided_decision"] = std::string(name(e.aided_decision));
    j["branch"] = std::string(name(e.branch));
    j["cell"] = std::string(name(e.cell));
    j["workload"] = e.workload;
    j["discovered"] = e.discovered ? ordered_json(*e.discovered) : ordered_json(nullptr);
    return j;
}

inline Episode episode_from_json(const json& j) {
    auto decision = [&](const char* k) { return j.at(k).get<std::string>() == "T" ? Decision::T : Decision::F; };
    Episode e;
    e.gt = j.at("gt").get<std::string>() == "T" ? GroundTruth::T : GroundTruth::F;
    e.bss = j.at("bss").get<double>();
    e.ai_fs = j.at("ai_fs").get<double>();
    e.dm_fs = j.at("dm_fs").get<double>();
    e.ai_decision = decision("ai_decision");
    e.unaided_decision = decision("unaided_decision");
    e.aided_decision = decision("aided_decision");
    e.branch = parse_branch(j.at("branch").get<std::string>()).value();
    e.cell = parse_cell(j.at("cell").get<std::string>()).value();
    e.workload = j.at("workload").get<double>();
    if (!j.at("discovered").is_null()) e.discovered = j.at("discovered").get<bool>();
    return e;
}

inline ordered_json to_json(const StandardErrors& s) {
    return ordered_json{{"outcome_eu", s.outcome_eu},     {"counter_eu", s.counter_eu},
                        {"usage_eu", s.usage_eu},         {"unaided_eu", s.unaided_eu},
                        {"relative_outcome_eu", s.relative_outcome_eu},
                        {"relative_usage_eu", s.relative_usage_eu}};
}

inline StandardErrors standard_errors_from_json(const json& j) {
    StandardErrors s;
    s.outcome_eu = j.at("outcome_eu").get<double>();
    s.counter_eu = j.at("counter_eu").get<double>();
    s.usage_eu = j.at("usage_eu").get<double>();
    s.unaided_eu = j.at("unaided_eu").get<double>();
    s.relative_outcome_eu = j.at("relative_outcome_eu").get<double>();
    s.relative_usage_eu = j.at("relative_usage_eu").get<double>();
    return s;
}

inline ordered_json to_json(const ScenarioResult& r) {
    ordered_json j = ordered_json::object();
    j["n_cases"] = r.n_cases;
    j["seed"] = r.seed;
    j["report"] = to_json(r.report);
    j["standard_errors"] = to_json(r.standard_errors);
    j["estimated_matrix"] = to_json(r.estimated_matrix);
    j["mean_workload"] = r.mean_workload;
    j["branch_counts"] = detail::counts_to_json(r.branch_counts, detail::branch_name_at);
    j["cell_counts"] = detail::counts_to_json(r.cell_counts, detail::cell_name_at);
    if (r.discovered_counts) j["discovered_counts"] = detail::counts_to_json(*r.discovered_counts, detail::cell_name_at);
    if (!r.episodes.empty()) {
        ordered_json eps = ordered_json::array();
        for (const auto& e : r.episodes) eps.push_back(to_json(e));
        j["episodes"] = std::move(eps);
    }
    return j;
}

inline ScenarioResult scenario_result_from_json(const json& j) {
    ScenarioResult r;
    r.n_cases = j.at("n_cases").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.report = report_from_json(j.at("report"));
    r.standard_errors = standard_errors_from_json(j.at("standard_errors"));
    r.estimated_matrix = matrix_from_json(j.at("estimated_matrix"), "estimated_matrix");
    r.mean_workload = j.at("mean_workload").get<double>();
    r.branch_counts = detail::counts_from_json<kBranchCount>(j.at("branch_counts"), detail::branch_name_at);
    r.cell_counts = detail::counts_from_json<kCellCount>(j.at("cell_counts"), detail::cell_name_at);
    if (j.contains("discovered_counts"))
        r.discovered_counts = detail::counts_from_json<kCellCount>(j.at("discovered_counts"), detail::cell_name_at);
    if (j.contains("episodes"))
        for (const auto& e : j.at("episodes")) r.episodes.push_back(episode_from_json(e));
    return r;
}

inline ordered_json to_json(const SweepResult& s) {
    ordered_json j = ordered_json::object();
    j["param_path"] = s.param_path;
    j["values"] = s.values;
    j["seed_policy"] = std::string(name(s.seed_policy));
    ordered_json pts = ordered_json::array();
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        ordered_json p = to_json(s.points[i]);
        pts.push_back(std::move(p));
    }
    j["points"] = std::move(pts);
    return j;
}

inline SweepResult sweep_result_from_json(const json& j) {
    SweepResult s;
    s.param_path = j.at("param_path").get<std::string>();
    s.values = j.at("values").get<std::vector<double>>();
    s.seed_policy = parse_seed_policy(j.at("seed_policy").get<std::string>()).value();
    for (const auto& p : j.at("points")) s.points.push_back(scenario_result_from_json(p));
    return s;
}

inline ordered_json to_json(const ClosedFormResult& c) {
    ordered_json j = ordered_json::object();
    j["mode"] = std::string(name(c.mode));
    j["matrix"] = to_json(c.matrix);
    j["report"] = to_json(c.report);
    j["discovery"] = to_json(c.discovery);
    return j;
}

inline std::optional<CuMode> parse_cu_mode(std::string_view s) {
    if (s == "automated") return CuMode::Automated;
    if (s == "reviewed") return CuMode::Reviewed;
    return std::nullopt;
}

inline ClosedFormResult closed_form_from_json(const json& j) {
    ClosedFormResult c;
    c.mode = parse_cu_mode(j.at("mode").get<std::string>()).value();
    c.matrix = matrix_from_json(j.at("matrix"));
    c.report = report_from_json(j.at("report"));
    c.discovery = discovery_from_json(j.at("discovery"));
    return c;
}

// ---------------------------------------------------------------------------
// Documents

inline ordered_json to_json(const ScenarioDocument& d) {
    ordered_json j = ordered_json::object();
    j["schema_version"] = d.schema_version;
    j["name"] = d.name;
    j["description"] = d.description;
    j["scenario"] = scenario_to_json(d.scenario);
    if (d.matrix) j["matrix"] = to_json(*d.matrix);
    if (d.sweep) {
        j["sweep"] = {{"param_path", d.sweep->param_path},
                      {"values", d.sweep->values},
                      {"seed_policy", std::string(name(d.sweep->seed_policy))}};
    }
    if (d.run) j["run"] = {{"n_cases", d.run->n_cases}, {"seed", d.run->seed}};
    return j;
}

inline std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

inline ScenarioDocument document_from_json(const json& j, const LoadOptions& opts = {}) {
    detail::as_object(j, "document");
    detail::reject_unknown(j, {"schema_version", "name", "description", "scenario", "matrix", "sweep", "run"}, "",
                           opts);
    ScenarioDocument d;
    if (j.contains("schema_version")) {
        const auto v = detail::as_count(j.at("schema_version"), "schema_version");
        if (v != static_cast<std::uint64_t>(kSchemaVersion))
            detail::invalid("schema_version", "unsupported schema version " + std::to_string(v));
    } else if (!opts.allow_defaults) {
        detail::invalid("schema_version", "required");
    }
    if (j.contains("name")) d.name = detail::as_string(j.at("name"), "name");
    else if (!opts.allow_defaults) detail::invalid("name", "required");
    if (j.contains("description")) d.description = detail::as_string(j.at("description"), "description");
    if (j.contains("scenario")) d.scenario = scenario_from_json(j.at("scenario"), opts, "scenario");
    if (j.contains("matrix")) d.matrix = matrix_from_json(j.at("matrix"), "matrix", opts);
    if (j.contains("sweep")) {
        const auto& s = detail::as_object(j.at("sweep"), "sweep");
        detail::reject_unknown(s, {"param_path", "values", "seed_policy"}, "sweep", opts);
        SweepSpec spec;
        if (!s.contains("param_path")) detail::invalid("sweep.param_path", "required");
        spec.param_path = detail::as_string(s.at("param_path"), "sweep.param_path");
        const ParamInfo* p = find_parameter(spec.param_path);
        if (!p || p->kind != ParamKind::Number)
            throw Error(ErrorCode::UnknownParameter, "sweep.param_path: not a numeric scenario parameter: " +
                        spec.param_path, "sweep.param_path");
        if (!s.contains("values") || !s.at("values").is_array()) detail::invalid("sweep.values", "expected an array");
        for (std::size_t i = 0; i < s.at("values").size(); ++i)
            spec.values.push_back(detail::as_number(s.at("values")[i], "sweep.values[" + std::to_string(i) + "]"));
        if (spec.values.empty() || spec.values.size() > kMaxSweepValues)
            detail::invalid("sweep.values", "expected 1 to " + std::to_string(kMaxSweepValues) + " values");
        for (std::size_t i = 0; i < spec.values.size(); ++i) {
            Scenario probe = d.scenario;
            p->set(probe, spec.values[i]);
            const auto issues = scenario_issues(probe);
            if (!issues.empty())
                detail::invalid("sweep.values[" + std::to_string(i) + "]", issues.front().reason);
        }
        if (s.contains("seed_policy")) {
            const auto pol = parse_seed_policy(detail::as_string(s.at("seed_policy"), "sweep.seed_policy"));
            if (!pol) detail::invalid("sweep.seed_policy", "expected common or per_point");
            spec.seed_policy = *pol;
        }
        d.sweep = std::move(spec);
    }
    if (j.contains("run")) {
        const auto& r = detail::as_object(j.at("run"), "run");
        detail::reject_unknown(r, {"n_cases", "seed"}, "run", opts);
        RunSpec spec;
        if (r.contains("n_cases")) spec.n_cases = detail::as_count(r.at("n_cases"), "run.n_cases");
        if (spec.n_cases == 0) detail::invalid("run.n_cases", "must be at least 1");
        if (r.contains("seed")) spec.seed = detail::as_count(r.at("seed"), "run.seed");
        d.run = spec;
    }
    return d;
}

inline json parse_json_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed JSON at byte ") + std::to_string(e.byte) + ": " +
                                               e.what(),
                    "");
    }
}

inline ScenarioDocument load_scenario_text(std::string_view text, const LoadOptions& opts = {}) {
    return document_from_json(parse_json_text(text), opts);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ScenarioDocument load_scenario(const std::string& path, const LoadOptions& opts = {}) {
    return load_scenario_text(read_file(path), opts);
}

inline ordered_json to_json(const ResultDocument& d) {
    ordered_json j = ordered_json::object();
    j["tool"] = d.tool;
    j["version"] = d.version;
    j["timestamp"] = d.timestamp ? ordered_json(*d.timestamp) : ordered_json(nullptr);
    j["name"] = d.name;
    j["seed"] = d.seed;
    j["n_cases"] = d.n_cases;
    j["kind"] = std::string(payload_kind(d.payload));
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ComparisonResult>) {
                ordered_json arr = ordered_json::array();
                for (const auto& nr : p) {
                    ordered_json e = ordered_json::object();
                    e["name"] = nr.name;
                    e["result"] = to_json(nr.result);
                    arr.push_back(std::move(e));
                }
                j["result"] = std::move(arr);
            } else {
                j["result"] = to_json(p);
            }
        },
        d.payload);
    return j;
}

inline ResultDocument result_from_json(const json& j) {
    ResultDocument d;
    d.tool = j.at("tool").get<std::string>();
    d.version = j.at("version").get<std::string>();
    if (!j.at("timestamp").is_null()) d.timestamp = j.at("timestamp").get<std::string>();
    d.name = j.at("name").get<std::string>();
    d.seed = j.at("seed").get<std::uint64_t>();
    d.n_cases = j.at("n_cases").get<std::uint64_t>();
    const auto kind = j.at("kind").get<std::string>();
    const auto& r = j.at("result");
    if (kind == "eu") d.payload = closed_form_from_json(r);
    else if (kind == "run") d.payload = scenario_result_from_json(r);
    else if (kind == "sweep") d.payload = sweep_result_from_json(r);
    else if (kind == "compare") {
        ComparisonResult c;
        for (const auto& e : r) c.push_back({e.at("name").get<std::string>(), scenario_result_from_json(e.at("result"))});
        d.payload = std::move(c);
    } else {
        throw Error(ErrorCode::ValidationError, "unknown result kind " + kind, "kind");
    }
    return d;
}

} // namespace cfx
