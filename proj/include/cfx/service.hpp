#pragma once
// HTTP facade over the calculus and the simulator.
//
// `Service::handle` is transport-independent and holds all routing, parsing
// and status mapping; `Service::mount` wires it into a cpp-httplib server.
// Request bodies are scenario-document fragments (header fields optional)
// plus run controls at the top level:
//   mode      "automated" | "reviewed"  (/api/eu, default "reviewed")
//   n_cases   cases per run             (default: run.n_cases, else 100000)
//   seed      master seed               (default: run.seed, else 0)
//   episodes  episode samples to return (/api/simulate, default and max 1000)
// /api/compare takes {"scenarios": [fragment, ...]} plus the same controls.

#include <semaphore>
#include <string>
#include <string_view>

#include <httplib.h>

#include "output.hpp"
#include "presets.hpp"

namespace cfx {

struct ServiceConfig {
    std::uint64_t max_cases = 2'000'000;
    std::size_t max_body_bytes = 4u << 20;
    std::size_t max_episodes = 1000;
    std::ptrdiff_t run_slots = 4;  // concurrent runs before 429
    unsigned workers = 0;          // simulator threads per run
    std::string cors_origin = "*";
};

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// 400 for malformed or invalid input, 422 for well-formed requests that
/// cannot be carried out.
inline int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownParameter:
        case ErrorCode::TooManyScenarios:
        case ErrorCode::DegenerateMarginal:
        case ErrorCode::EmptyEpisodeSet: return 422;
        case ErrorCode::IoError: return 500;
        default: return 400;
    }
}

inline ApiResponse error_response(int status, std::string_view code, std::string_view message,
                                  std::string_view field_path) {
    ordered_json j = {{"code", code}, {"message", message}, {"field_path", field_path}};
    return {status, dump(j)};
}

inline ApiResponse error_response(const Error& e) {
    return error_response(http_status(e.code()), to_string(e.code()), e.what(), e.field_path());
}

class Service {
public:
    inline static constexpr std::ptrdiff_t kMaxSlots = 1024;

    explicit Service(ServiceConfig cfg = {})
        : cfg_(std::move(cfg)), slots_(std::clamp<std::ptrdiff_t>(cfg_.run_slots, 1, kMaxSlots)) {}

    const ServiceConfig& config() const { return cfg_; }

    ApiResponse handle(std::string_view method, std::string_view path, std::string_view body,
                       std::string_view content_type = "application/json") {
        try {
            if (method == "GET") {
                if (path == "/healthz") return {200, "ok", "text/plain"};
                if (path == "/api/schema") return {200, dump(schema_payload())};
                if (path == "/api/presets") return {200, dump(presets_payload())};
                if (path == "/api/schema/scenario-document") return {200, dump(scenario_document_schema())};
                if (path == "/api/schema/result-document") return {200, dump(result_document_schema())};
                return error_response(404, "NotFound", "no such endpoint", "");
            }
            if (method != "POST") return error_response(405, "MethodNotAllowed", "method not allowed", "");
            if (path != "/api/eu" && path != "/api/simulate" && path != "/api/sweep" && path != "/api/compare")
                return error_response(404, "NotFound", "no such endpoint", "");
            if (content_type.substr(0, 16) != "application/json")
                return error_response(415, "UnsupportedMediaType", "request body must be application/json", "");
            if (body.size() > cfg_.max_body_bytes)
                return error_response(413, "PayloadTooLarge", "request body exceeds the size limit", "");

            const json request = parse_json_text(body);
            if (!request.is_object()) throw Error(ErrorCode::ValidationError, "request body must be an object", "");
            if (path == "/api/eu") return ok(eu(request));

            SlotGuard guard(slots_);
            if (!guard.acquired) return error_response(429, "Busy", "all run slots are in use, retry later", "");
            if (path == "/api/simulate") return ok(simulate(request));
            if (path == "/api/sweep") return ok(run_sweep(request));
            return ok(compare(request));
        } catch (const Error& e) {
            return error_response(e);
        } catch (const std::exception& e) {
            return error_response(500, "InternalError", e.what(), "");
        }
    }

    void mount(httplib::Server& server) {
        server.set_payload_max_length(cfg_.max_body_bytes);
        server.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", cfg_.cors_origin);
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
        });
        server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        auto route = [this](const httplib::Request& req, httplib::Response& res) {
            const auto r = handle(req.method, req.path, req.body, req.get_header_value("Content-Type"));
            res.status = r.status;
            res.set_content(r.body, r.content_type);
        };
        for (const char* p : {"/healthz", "/api/schema", "/api/presets", "/api/schema/scenario-document",
                              "/api/schema/result-document"})
            server.Get(p, route);
        for (const char* p : {"/api/eu", "/api/simulate", "/api/sweep", "/api/compare"}) server.Post(p, route);
    }

private:
    struct SlotGuard {
        std::counting_semaphore<kMaxSlots>& sem;
        bool acquired;
        explicit SlotGuard(std::counting_semaphore<kMaxSlots>& s) : sem(s), acquired(s.try_acquire()) {}
        ~SlotGuard() {
            if (acquired) sem.release();
        }
    };

    struct Controls {
        std::optional<std::string> mode;
        std::optional<std::uint64_t> n_cases;
        std::optional<std::uint64_t> seed;
        std::optional<std::uint64_t> episodes;
    };

    static ApiResponse ok(const ResultDocument& d) { return {200, dump(to_json(d))}; }

    // Splits run controls off the request and returns the remaining fragment.
    static json take_controls(const json& request, Controls& c) {
        json rest = request;
        auto take_count = [&](const char* key, std::optional<std::uint64_t>& out) {
            if (!rest.contains(key)) return;
            out = detail::as_count(rest.at(key), key);
            rest.erase(key);
        };
        if (rest.contains("mode")) {
            c.mode = detail::as_string(rest.at("mode"), "mode");
            rest.erase("mode");
        }
        take_count("n_cases", c.n_cases);
        take_count("seed", c.seed);
        take_count("episodes", c.episodes);
        return rest;
    }

    static ScenarioDocument fragment(const json& j) {
        return document_from_json(j, LoadOptions{.strict = true, .allow_defaults = true});
    }

    std::uint64_t cases_for(const Controls& c, const ScenarioDocument& d) const {
        const std::uint64_t n = c.n_cases ? *c.n_cases : d.run ? d.run->n_cases : RunSpec{}.n_cases;
        if (n == 0) throw Error(ErrorCode::ValidationError, "n_cases: must be at least 1", "n_cases");
        if (n > cfg_.max_cases)
            throw Error(ErrorCode::ValidationError,
                        "n_cases: exceeds the service cap of " + std::to_string(cfg_.max_cases), "n_cases");
        return n;
    }

    static std::uint64_t seed_for(const Controls& c, const ScenarioDocument& d) {
        return c.seed ? *c.seed : d.run ? d.run->seed : 0;
    }

    static ResultDocument header(const ScenarioDocument& d, std::uint64_t seed, std::uint64_t n) {
        ResultDocument r;
        r.name = d.name;
        r.seed = seed;
        r.n_cases = n;
        return r;
    }

    ResultDocument eu(const json& request) const {
        Controls c;
        const auto doc = fragment(take_controls(request, c));
        if (!doc.matrix) throw Error(ErrorCode::ValidationError, "matrix: required for closed-form evaluation", "matrix");
        CuMode mode = CuMode::Reviewed;
        if (c.mode) {
            const auto m = parse_cu_mode(*c.mode);
            if (!m) throw Error(ErrorCode::ValidationError, "mode: expected automated or reviewed", "mode");
            mode = *m;
        }
        const auto& u = doc.scenario.utilities;
        ResultDocument r = header(doc, 0, 0);
        r.payload = ClosedFormResult{mode, *doc.matrix, build_report(*doc.matrix, u, mode),
                                     discovery_analysis(*doc.matrix, u, mode)};
        return r;
    }

    ResultDocument simulate(const json& request) const {
        Controls c;
        const auto doc = fragment(take_controls(request, c));
        const auto n = cases_for(c, doc);
        const auto seed = seed_for(c, doc);
        RunOptions opts;
        opts.workers = cfg_.workers;
        opts.keep_episodes = std::min<std::uint64_t>(c.episodes.value_or(cfg_.max_episodes), cfg_.max_episodes);
        ResultDocument r = header(doc, seed, n);
        r.payload = run_scenario(doc.scenario, n, seed, opts);
        return r;
    }

    ResultDocument run_sweep(const json& request) const {
        Controls c;
        const auto doc = fragment(take_controls(request, c));
        if (!doc.sweep) throw Error(ErrorCode::ValidationError, "sweep: required", "sweep");
        const auto n = cases_for(c, doc);
        const auto seed = seed_for(c, doc);
        RunOptions opts;
        opts.workers = cfg_.workers;
        ResultDocument r = header(doc, seed, n);
        r.payload = sweep(doc.scenario, doc.sweep->param_path, doc.sweep->values, n, seed, doc.sweep->seed_policy, opts);
        return r;
    }

    ResultDocument compare(const json& request) const {
        Controls c;
        const json rest = take_controls(request, c);
        detail::reject_unknown(rest, {"scenarios", "name"}, "", LoadOptions{});
        if (!rest.contains("scenarios") || !rest.at("scenarios").is_array())
            throw Error(ErrorCode::ValidationError, "scenarios: expected an array", "scenarios");
        const auto& arr = rest.at("scenarios");
        if (arr.size() > kMaxCompareScenarios)
            throw Error(ErrorCode::TooManyScenarios,
                        "scenarios: at most " + std::to_string(kMaxCompareScenarios) + " can be compared", "scenarios");
        std::vector<ScenarioDocument> docs;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            try {
                docs.push_back(fragment(arr[i]));
            } catch (const Error& e) {
                const std::string p = "scenarios[" + std::to_string(i) + "]" +
                                      (e.field_path().empty() ? "" : "." + e.field_path());
                throw Error(e.code(), p + ": " + e.what(), p);
            }
        }
        ScenarioDocument merged;
        if (rest.contains("name")) merged.name = detail::as_string(rest.at("name"), "name");
        const auto n = cases_for(c, merged);
        const auto seed = seed_for(c, merged);
        std::vector<Scenario> scenarios;
        for (const auto& d : docs) scenarios.push_back(d.scenario);
        RunOptions opts;
        opts.workers = cfg_.workers;
        const auto results = compare_scenarios(scenarios, n, seed, opts);
        ComparisonResult out;
        for (std::size_t i = 0; i < docs.size(); ++i)
            out.push_back({docs[i].name.empty() ? "scenario" + std::to_string(i + 1) : docs[i].name, results[i]});
        ResultDocument r = header(merged, seed, n);
        r.payload = std::move(out);
        return r;
    }

    static ordered_json schema_payload() {
        ordered_json names = ordered_json::array();
        for (std::string_view g : {groups::kDomain, groups::kJudgments, groups::kInteraction, groups::kCombination,
                                   groups::kUtilities, groups::kWorkload})
            names.push_back(std::string(g));
        return {{"schema_version", kSchemaVersion}, {"groups", names}, {"parameters", parameter_metadata()}};
    }

    static ordered_json presets_payload() {
        ordered_json arr = ordered_json::array();
        for (const auto& p : presets()) arr.push_back(to_json(p));
        return arr;
    }

    ServiceConfig cfg_;
    std::counting_semaphore<kMaxSlots> slots_;
};

/// Binds and serves until `server.stop()` is called. Returns false if the
/// address cannot be bound.
inline bool serve(Service& service, httplib::Server& server, const std::string& host, int port) {
    service.mount(server);
    return server.listen(host, port);
}

} // namespace cfx
