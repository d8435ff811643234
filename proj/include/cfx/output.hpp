#pragma once
// Result writers (JSON and long-format CSV) and the published JSON schemas.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "json_io.hpp"

namespace cfx {

enum class OutputFormat { Json, Csv };

inline std::optional<OutputFormat> parse_output_format(std::string_view s) {
    if (s == "json") return OutputFormat::Json;
    if (s == "csv") return OutputFormat::Csv;
    return std::nullopt;
}

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_value(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

// Metrics in the fixed CSV order. `workload` is empty for closed-form reports.
inline std::vector<std::pair<std::string, std::optional<double>>> metric_rows(const EUReport& r,
                                                                              const CounterfactualMatrix& m,
                                                                              std::optional<double> workload) {
    std::vector<std::pair<std::string, std::optional<double>>> rows = {
        {"outcome_eu", r.outcome_eu},
        {"counter_eu", r.counter_eu},
        {"usage_eu", r.usage_eu},
        {"unaided_eu", r.unaided_eu},
        {"rel_outcome_eu", r.relative_outcome_eu},
        {"rel_counter_eu", r.relative_counter_eu},
        {"rel_usage_eu", r.relative_usage_eu},
        {"sensitivity_aided", r.aided_sensitivity},
        {"specificity_aided", r.aided_specificity},
        {"sensitivity_unaided", r.unaided_sensitivity},
        {"specificity_unaided", r.unaided_specificity},
        {"mean_workload", workload},
    };
    for (CellKind c : kAllCells) rows.emplace_back("p_" + std::string(name(c)), m[c]);
    return rows;
}

inline void write_metric_block(std::ostream& out, std::string_view scenario, const std::string& param_value,
                               const EUReport& r, const CounterfactualMatrix& m, std::optional<double> workload) {
    const std::string prefix = csv_field(scenario) + "," + param_value + ",";
    for (const auto& [metric, value] : metric_rows(r, m, workload))
        out << prefix << metric << ',' << csv_value(value) << '\n';
}

} // namespace detail

inline constexpr const char* kCsvHeader = "scenario,param_value,metric,value";

inline std::vector<std::string> csv_metric_names() {
    std::vector<std::string> out;
    for (const auto& [metric, _] : detail::metric_rows(EUReport{}, CounterfactualMatrix{}, std::nullopt))
        out.push_back(metric);
    return out;
}

inline void write_csv(const ResultDocument& d, std::ostream& out) {
    out << kCsvHeader << '\n';
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ClosedFormResult>) {
                detail::write_metric_block(out, d.name, "", p.report, p.matrix, std::nullopt);
            } else if constexpr (std::is_same_v<T, ScenarioResult>) {
                detail::write_metric_block(out, d.name, "", p.report, p.estimated_matrix, p.mean_workload);
            } else if constexpr (std::is_same_v<T, SweepResult>) {
                for (std::size_t i = 0; i < p.points.size(); ++i) {
                    const auto& pt = p.points[i];
                    detail::write_metric_block(out, d.name, format_number(p.values[i]), pt.report,
                                               pt.estimated_matrix, pt.mean_workload);
                }
            } else {
                for (const auto& nr : p)
                    detail::write_metric_block(out, nr.name, "", nr.result.report, nr.result.estimated_matrix,
                                               nr.result.mean_workload);
            }
        },
        d.payload);
}

inline void write_results(const ResultDocument& d, OutputFormat format, std::ostream& out) {
    if (format == OutputFormat::Json) out << dump(to_json(d));
    else write_csv(d, out);
    if (!out) throw Error(ErrorCode::IoError, "failed to write results");
}

inline void write_results(const ResultDocument& d, OutputFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    write_results(d, format, out);
    out.close();
    if (!out) throw Error(ErrorCode::IoError, "failed to write " + path);
}

inline std::string render_results(const ResultDocument& d, OutputFormat format) {
    std::ostringstream ss;
    write_results(d, format, ss);
    return ss.str();
}

// ---------------------------------------------------------------------------
// JSON schemas (draft 2020-12)

namespace detail {

inline ordered_json number_schema(const ParamInfo& p) {
    ordered_json j = {{"type", "number"}};
    if (std::isfinite(p.min)) j["minimum"] = p.min;
    if (std::isfinite(p.max)) j["maximum"] = p.max;
    j["default"] = p.default_value();
    j["description"] = p.doc;
    return j;
}

inline ordered_json closed_object() {
    return ordered_json{{"type", "object"}, {"properties", ordered_json::object()}, {"additionalProperties", false}};
}

inline ordered_json scenario_schema() {
    ordered_json root = closed_object();
    for (const auto& p : parameter_registry()) {
        ordered_json* node = &root;
        std::string_view rest = p.path;
        while (true) {
            const auto dot = rest.find('.');
            const std::string key(rest.substr(0, dot));
            auto& props = (*node)["properties"];
            if (dot == std::string_view::npos) {
                if (p.kind == ParamKind::UsePatternChoice) {
                    props[key] = {{"type", "string"},
                                  {"enum", {"UP1", "UP2", "UP3", "UP4", "UP5"}},
                                  {"default", "UP1"},
                                  {"description", p.doc}};
                } else {
                    props[key] = number_schema(p);
                }
                break;
            }
            if (!props.contains(key)) props[key] = closed_object();
            node = &props[key];
            rest = rest.substr(dot + 1);
        }
    }
    return root;
}

inline ordered_json probability_matrix_schema() {
    ordered_json named = closed_object();
    ordered_json required = ordered_json::array();
    for (CellKind c : kAllCells) {
        named["properties"][std::string(name(c))] = {{"type", "number"}, {"minimum", 0}, {"maximum", 1}};
        required.push_back(std::string(name(c)));
    }
    named["required"] = required;
    const ordered_json row = {{"type", "array"},
                              {"items", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}},
                              {"minItems", 4},
                              {"maxItems", 4}};
    const ordered_json table = {{"type", "object"},
                                {"properties", {{"table", {{"type", "array"}, {"items", row}, {"minItems", 2}, {"maxItems", 2}}}}},
                                {"required", {"table"}},
                                {"additionalProperties", false}};
    return {{"oneOf", {named, table}}};
}

} // namespace detail

inline ordered_json scenario_document_schema() {
    ordered_json s = ordered_json::object();
    s["$schema"] = "https://json-schema.org/draft/2020-12/schema";
    s["$id"] = "https://cfx.invalid/schema/scenario-document.json";
    s["title"] = "ScenarioDocument";
    s["type"] = "object";
    s["required"] = {"schema_version", "name"};
    s["additionalProperties"] = false;
    ordered_json props = ordered_json::object();
    props["schema_version"] = {{"const", kSchemaVersion}};
    props["name"] = {{"type", "string"}};
    props["description"] = {{"type", "string"}};
    props["scenario"] = detail::scenario_schema();
    props["matrix"] = detail::probability_matrix_schema();
    ordered_json param_paths = ordered_json::array();
    for (const auto& p : parameter_registry())
        if (p.kind == ParamKind::Number) {
            param_paths.push_back("scenario." + p.path);
            param_paths.push_back(p.path);
        }
    props["sweep"] = {{"type", "object"},
                      {"properties",
                       {{"param_path", {{"enum", param_paths}}},
                        {"values",
                         {{"type", "array"},
                          {"items", {{"type", "number"}}},
                          {"minItems", 1},
                          {"maxItems", kMaxSweepValues}}},
                        {"seed_policy", {{"enum", {"common", "per_point"}}}}}},
                      {"required", {"param_path", "values"}},
                      {"additionalProperties", false}};
    props["run"] = {{"type", "object"},
                    {"properties",
                     {{"n_cases", {{"type", "integer"}, {"minimum", 1}}},
                      {"seed", {{"type", "integer"}, {"minimum", 0}}}}},
                    {"additionalProperties", false}};
    s["properties"] = std::move(props);
    return s;
}

inline ordered_json result_document_schema() {
    const ordered_json num = {{"type", "number"}};
    const ordered_json opt_num = {{"type", {"number", "null"}}};
    const ordered_json count = {{"type", "integer"}, {"minimum", 0}};
    auto cells_object = [](const ordered_json& value) {
        ordered_json o = detail::closed_object();
        ordered_json req = ordered_json::array();
        for (CellKind c : kAllCells) {
            o["properties"][std::string(name(c))] = value;
            req.push_back(std::string(name(c)));
        }
        o["required"] = req;
        return o;
    };
    auto object_of = [](std::initializer_list<std::pair<std::string, ordered_json>> fields,
                        std::vector<std::string> optional = {}) {
        ordered_json o = detail::closed_object();
        ordered_json req = ordered_json::array();
        for (const auto& [k, v] : fields) {
            o["properties"][k] = v;
            if (std::find(optional.begin(), optional.end(), k) == optional.end()) req.push_back(k);
        }
        o["required"] = req;
        return o;
    };
    const ordered_json decision = {{"enum", {"T", "F"}}};
    const ordered_json cm = object_of({{"T", object_of({{"T", num}, {"F", num}})},
                                       {"F", object_of({{"T", num}, {"F", num}})}});
    const ordered_json prob = {{"type", "number"}, {"minimum", 0}, {"maximum", 1}};

    ordered_json defs = ordered_json::object();
    defs["matrix"] = cells_object(prob);
    defs["report"] = object_of({{"outcome_eu", num},
                                {"counter_eu", num},
                                {"usage_eu", num},
                                {"unaided_eu", num},
                                {"relative_outcome_eu", num},
                                {"relative_counter_eu", num},
                                {"relative_usage_eu", num},
                                {"aided_sensitivity", opt_num},
                                {"aided_specificity", opt_num},
                                {"unaided_sensitivity", opt_num},
                                {"unaided_specificity", opt_num},
                                {"aided_cm", cm},
                                {"unaided_cm", cm}});
    ordered_json branch_names = ordered_json::array();
    ordered_json branch_counts = detail::closed_object();
    for (Branch b : kAllBranches) {
        branch_names.push_back(std::string(name(b)));
        branch_counts["properties"][std::string(name(b))] = count;
    }
    branch_counts["required"] = branch_names;
    ordered_json cell_names = ordered_json::array();
    for (CellKind c : kAllCells) cell_names.push_back(std::string(name(c)));
    defs["episode"] = object_of({{"gt", decision},
                                 {"bss", prob},
                                 {"ai_fs", prob},
                                 {"dm_fs", prob},
                                 {"ai_decision", decision},
                                 {"unaided_decision", decision},
                                 {"aided_decision", decision},
                                 {"branch", {{"enum", branch_names}}},
                                 {"cell", {{"enum", cell_names}}},
                                 {"workload", num},
                                 {"discovered", {{"type", {"boolean", "null"}}}}});
    defs["run"] = object_of({{"n_cases", count},
                             {"seed", count},
                             {"report", {{"$ref", "#/$defs/report"}}},
                             {"standard_errors",
                              object_of({{"outcome_eu", num},
                                         {"counter_eu", num},
                                         {"usage_eu", num},
                                         {"unaided_eu", num},
                                         {"relative_outcome_eu", num},
                                         {"relative_usage_eu", num}})},
                             {"estimated_matrix", {{"$ref", "#/$defs/matrix"}}},
                             {"mean_workload", num},
                             {"branch_counts", branch_counts},
                             {"cell_counts", cells_object(count)},
                             {"discovered_counts", cells_object(count)},
                             {"episodes", {{"type", "array"}, {"items", {{"$ref", "#/$defs/episode"}}}}}},
                            {"discovered_counts", "episodes"});
    ordered_json cf_names = ordered_json::array();
    for (CfCell c : kAllCfCells) cf_names.push_back(std::string(name(c)));
    defs["eu"] = object_of(
        {{"mode", {{"enum", {"automated", "reviewed"}}}},
         {"matrix", {{"$ref", "#/$defs/matrix"}}},
         {"report", {{"$ref", "#/$defs/report"}}},
         {"discovery",
          object_of({{"cells",
                      {{"type", "array"},
                       {"minItems", kCfCellCount},
                       {"maxItems", kCfCellCount},
                       {"items", object_of({{"cell", {{"enum", cf_names}}},
                                            {"probability", prob},
                                            {"discovery", prob},
                                            {"utility", num},
                                            {"contribution", num}})}}},
                     {"counter_eu", num},
                     {"one_sided_negative", {{"type", "boolean"}}},
                     {"dominant_cell", {{"enum", cf_names}}}})}});
    defs["sweep"] = object_of({{"param_path", {{"type", "string"}, {"pattern", "^scenario\\."}}},
                               {"values", {{"type", "array"}, {"items", num}}},
                               {"seed_policy", {{"enum", {"common", "per_point"}}}},
                               {"points", {{"type", "array"}, {"items", {{"$ref", "#/$defs/run"}}}}}});
    defs["compare"] = {{"type", "array"},
                       {"maxItems", kMaxCompareScenarios},
                       {"items", object_of({{"name", {{"type", "string"}}}, {"result", {{"$ref", "#/$defs/run"}}}})}};

    ordered_json s = ordered_json::object();
    s["$schema"] = "https://json-schema.org/draft/2020-12/schema";
    s["$id"] = "https://cfx.invalid/schema/result-document.json";
    s["title"] = "ResultDocument";
    ordered_json base = object_of({{"tool", {{"const", kToolName}}},
                                   {"version", {{"type", "string"}}},
                                   {"timestamp", {{"type", {"string", "null"}}}},
                                   {"name", {{"type", "string"}}},
                                   {"seed", count},
                                   {"n_cases", count},
                                   {"kind", {{"enum", {"eu", "run", "sweep", "compare"}}}},
                                   {"result", ordered_json::object()}});
    for (const char* k : {"eu", "run", "sweep", "compare"}) {
        ordered_json branch = base;
        branch["properties"]["kind"] = {{"const", k}};
        branch["properties"]["result"] = {{"$ref", std::string("#/$defs/") + k}};
        s["oneOf"].push_back(std::move(branch));
    }
    s["$defs"] = std::move(defs);
    return s;
}

/// Parameter metadata for form generation, one entry per scenario field.
inline ordered_json parameter_metadata() {
    ordered_json arr = ordered_json::array();
    for (const auto& p : parameter_registry()) {
        ordered_json e = ordered_json::object();
        e["name"] = "scenario." + p.path;
        e["group"] = p.group;
        if (p.kind == ParamKind::UsePatternChoice) {
            e["type"] = "enum";
            e["choices"] = {"UP1", "UP2", "UP3", "UP4", "UP5"};
            e["default"] = "UP1";
        } else {
            e["type"] = "number";
            // null bounds mean unbounded
            e["min"] = std::isfinite(p.min) ? ordered_json(p.min) : ordered_json(nullptr);
            e["max"] = std::isfinite(p.max) ? ordered_json(p.max) : ordered_json(nullptr);
            e["default"] = p.default_value();
        }
        e["doc"] = p.doc;
        arr.push_back(std::move(e));
    }
    return arr;
}

} // namespace cfx
