#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "cfx/output.hpp"
#include "cfx/presets.hpp"

using namespace cfx;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = CFX_SOURCE_DIR;

struct Run {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr discarded; stdout is captured.
Run cli(const std::string& args) {
    const std::string cmd = std::string("\"") + CFX_CLI + "\" " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string config(const std::string& rel) { return "\"" + (kRoot / rel).string() + "\""; }

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("cfx_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(file(name)) << text;
        return file(name);
    }

private:
    static inline int counter_ = 0;
    fs::path path_;
};

} // namespace

TEST(Cli, EuWorkedExample) {
    const auto r = cli("eu --config " + config("configs/worked-example.json"));
    ASSERT_EQ(r.code, 0);
    const auto doc = result_from_json(json::parse(r.out));
    const auto& cf = std::get<ClosedFormResult>(doc.payload);
    EXPECT_NEAR(cf.report.outcome_eu, 0.400, 1e-12);
    EXPECT_NEAR(cf.report.counter_eu, -0.24825, 1e-12);
    EXPECT_NEAR(cf.report.usage_eu, 0.15175, 1e-12);
    EXPECT_NEAR(cf.report.unaided_eu, 0.18, 1e-12);
    EXPECT_FALSE(doc.timestamp);
}

TEST(Cli, EuCsvHasTwentyMetricRows) {
    const auto r = cli("eu --format csv --config " + config("configs/worked-example.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind(std::string(kCsvHeader) + "\n", 0), 0u);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 21);
    EXPECT_NE(r.out.find(",usage_eu,0.15175"), std::string::npos);
}

TEST(Cli, TimestampUsesSourceDateEpoch) {
    const auto r = cli("eu --timestamp --config " + config("configs/worked-example.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(json::parse(r.out)["timestamp"].is_string());
#ifndef _WIN32
    const std::string cmd = std::string("SOURCE_DATE_EPOCH=0 \"") + CFX_CLI + "\" eu --timestamp --config " +
                            config("configs/worked-example.json");
    FILE* p = popen(cmd.c_str(), "r");
    ASSERT_NE(p, nullptr);
    std::string out;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
    pclose(p);
    EXPECT_EQ(json::parse(out)["timestamp"], "1970-01-01T00:00:00Z");
#endif
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli("--version").code, 0);
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("frobnicate").code, 2);
    EXPECT_EQ(cli("eu --config /nonexistent.json").code, 2);

    TempDir dir;
    const auto bad = dir.write("bad.json", R"({"schema_version": 1, "name": "b", "scenario": {"prior": 1.5}})");
    EXPECT_EQ(cli("simulate -n 10 --config " + bad).code, 2);
    const auto unknown = dir.write("unknown.json", R"({"schema_version": 1, "name": "u", "scenario": {"zzz": 1}})");
    EXPECT_EQ(cli("validate --config " + unknown).code, 2);
    const auto garbage = dir.write("garbage.json", "{");
    EXPECT_EQ(cli("validate --config " + garbage).code, 2);
    const auto bare = dir.write("bare.json", "{}");
    EXPECT_EQ(cli("validate --config " + bare).code, 2);
    EXPECT_EQ(cli("--allow-defaults validate --config " + bare).code, 0);

    // writing into a directory that does not exist is a runtime failure
    EXPECT_EQ(cli("eu --config " + config("configs/worked-example.json") + " --out /nonexistent/dir/x.json").code, 3);
}

TEST(Cli, ValidateBundledConfigs) {
    std::string args;
    for (const auto& dir : {kRoot / "configs", kRoot / "configs/presets"})
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".json") args += " --config \"" + e.path().string() + "\"";
    const auto r = cli("validate" + args);
    EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, PresetsShowMatchesConfigFiles) {
    const auto list = cli("presets list");
    ASSERT_EQ(list.code, 0);
    for (const auto& p : presets()) {
        EXPECT_NE(list.out.find(p.name + "\t"), std::string::npos);
        const auto r = cli("presets show " + p.name);
        ASSERT_EQ(r.code, 0);
        EXPECT_EQ(r.out, read_file((kRoot / "configs/presets" / (p.name + ".json")).string()));
    }
    EXPECT_EQ(cli("presets show sim9").code, 2);
}

TEST(Cli, PresetsExportWritesEveryPreset) {
    TempDir dir;
    ASSERT_EQ(cli("presets export \"" + dir.file("out") + "\"").code, 0);
    for (const auto& p : presets())
        EXPECT_EQ(load_scenario(dir.file("out/" + p.name + ".json")), p);
}

TEST(Cli, PresetRunIsReproducible) {
    TempDir dir;
    const auto a = dir.file("a.json");
    const auto b = dir.file("b.json");
    ASSERT_EQ(cli("presets run sim3 --cases 200000 --seed 7 -o " + a).code, 0);
    ASSERT_EQ(cli("presets run sim3 --cases 200000 --seed 7 -j 3 -o " + b).code, 0);
    const auto text = read_file(a);
    EXPECT_EQ(text, read_file(b));
    const auto doc = result_from_json(json::parse(text));
    EXPECT_EQ(doc.seed, 7u);
    EXPECT_EQ(doc.n_cases, 200000u);
    EXPECT_EQ(std::get<SweepResult>(doc.payload).points.size(), 5u);
}

TEST(Cli, SimulateMatchesLibrary) {
    const auto r = cli("simulate --config " + config("configs/presets/sim4.json") + " -n 30000 --seed 3 --episodes 5");
    ASSERT_EQ(r.code, 0);
    const auto doc = result_from_json(json::parse(r.out));
    auto expected = run_scenario(find_preset("sim4")->scenario, 30000, 3, {.keep_episodes = 5});
    EXPECT_EQ(std::get<ScenarioResult>(doc.payload), expected);
}

TEST(Cli, SweepFlagsOverrideDocumentBlock) {
    const auto r = cli("sweep --config " + config("configs/presets/sim2.json") +
                       " --param scenario.prior --values 0.1,0.3 -n 5000 --format csv");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 2 * 20);
    EXPECT_NE(r.out.find("sim2,0.10000000000000001,usage_eu,"), std::string::npos);
    EXPECT_NE(r.out.find("sim2,0.29999999999999999,usage_eu,"), std::string::npos);

    EXPECT_EQ(cli("sweep --config " + config("configs/presets/sim2.json") + " --param scenario.bogus --values 1 -n 10").code, 2);
    EXPECT_EQ(cli("sweep --config " + config("configs/presets/sim2.json") + " --values 1,x -n 10").code, 2);
    EXPECT_EQ(cli("sweep --config " + config("configs/worked-example.json") + " -n 10").code, 2);
}

TEST(Cli, CompareLimit) {
    const auto c = config("configs/presets/sim1.json");
    const auto ok = cli("compare -n 2000 --config " + c + " --config " + config("configs/presets/sim2.json"));
    ASSERT_EQ(ok.code, 0);
    const auto doc = result_from_json(json::parse(ok.out));
    EXPECT_EQ(std::get<ComparisonResult>(doc.payload).size(), 2u);
    std::string six;
    for (int i = 0; i < 6; ++i) six += " --config " + c;
    EXPECT_EQ(cli("compare -n 10" + six).code, 2);
}

TEST(Cli, CalibrateThresholds) {
    const auto r = cli("calibrate-thresholds --config " + config("configs/presets/sim2.json") +
                       " --target-rate 0.65 --cases 200000");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["achieved_rate"].get<double>(), 0.65, 0.01);
    EXPECT_NEAR(j["scenario.ai_pos_threshold"].get<double>() + j["scenario.ai_neg_threshold"].get<double>(), 1.0, 1e-12);
    EXPECT_EQ(cli("calibrate-thresholds --config " + config("configs/presets/sim2.json") + " --target-rate 1.5").code, 2);
}

TEST(Cli, SchemaCommandMatchesLibrary) {
    EXPECT_EQ(cli("schema scenario").out, dump(scenario_document_schema()));
    EXPECT_EQ(cli("schema result").out, dump(result_document_schema()));
}
