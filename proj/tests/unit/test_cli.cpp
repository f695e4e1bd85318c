#include <gtest/gtest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "commands.hpp"
#include "hawkes/config.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/model_io.hpp"
#include "hawkes/scenarios.hpp"

namespace fs = std::filesystem;
using namespace hawkes;
using namespace hawkes::cli;

namespace {

const char* kSmallConfig = R"(seed = 17

[scenario]
id = 1
horizons = [2, 3]
replicates = 2

[sampler]
n_iter = 600
burn_in = 200
audit_every = 100
checkpoint_every = 200
)";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("hawkes_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    return out;
}

void pipeline(const fs::path& dir, const fs::path& config) {
    std::ostringstream out, log;
    SimulateOptions s;
    s.out = dir;
    s.config = config;
    s.jobs = 2;
    ASSERT_EQ(cmd_simulate(s, out, log), kExitOk);
    InferOptions i;
    i.dir = dir;
    i.jobs = 3;
    ASSERT_EQ(cmd_infer(i, out, log), kExitOk);
    ReportOptions r;
    r.dir = dir;
    r.jobs = 2;
    ASSERT_EQ(cmd_report(r, out, log), kExitOk);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HAWKES_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, HorizonLabel) {
    EXPECT_EQ(horizon_label(5.0), "T5");
    EXPECT_EQ(horizon_label(2.5), "T2.5");
    EXPECT_EQ(horizon_label(20.0), "T20");
}

TEST(Cli, PipelineLayoutAndDeterminism) {
    TempDir root("pipeline");
    put(root.path / "exp.toml", kSmallConfig);
    pipeline(root.path / "a", root.path / "exp.toml");
    pipeline(root.path / "b", root.path / "exp.toml");
    const auto a = tree(root.path / "a");
    const auto b = tree(root.path / "b");
    EXPECT_EQ(a, b);
    for (const char* f : {"config.toml", "truth.json", "manifest.json", "data/rep_000.csv", "data/rep_001.csv",
                          "traces/T2/rep_000.ndjson", "traces/T3/rep_001.csv", "traces/T3/rep_001.summary.json",
                          "infer_manifest.json", "acceptance.json", "report/d_metrics.csv", "report/delta_table.csv"})
        EXPECT_TRUE(a.count(f)) << f;

    const auto& delta = a.at("report/delta_table.csv");
    EXPECT_EQ(delta.substr(0, delta.find('\n')), "T,knot_scheme,replicates,1 over 1,1 over 2,2 over 1,2 over 2");
    const auto& d = a.at("report/d_metrics.csv");
    EXPECT_EQ(d.substr(0, d.find('\n')), "T,knot_scheme,replicates,D1_h_l1,D2_lambda_d1T");
    EXPECT_EQ(std::count(d.begin(), d.end(), '\n'), 3);

    // every kept draw is one NDJSON line
    const auto& nd = a.at("traces/T2/rep_000.ndjson");
    EXPECT_EQ(std::count(nd.begin(), nd.end(), '\n'), 400);
    const auto manifest = nlohmann::json::parse(a.at("manifest.json"));
    EXPECT_EQ(manifest["replicates"].size(), 2u);
    EXPECT_EQ(manifest["seed"], 17);
}

TEST(Cli, ResumeContinuesTheSameChain) {
    TempDir root("resume");
    put(root.path / "exp.toml", kSmallConfig);
    pipeline(root.path / "full", root.path / "exp.toml");

    // an interrupted run: stop every chain at iteration 400, then resume to 600
    std::string partial = kSmallConfig;
    partial.replace(partial.find("n_iter = 600"), 12, "n_iter = 400");
    put(root.path / "partial.toml", partial);
    const auto dir = root.path / "resumed";
    std::ostringstream out, log;
    SimulateOptions s;
    s.out = dir;
    s.config = root.path / "exp.toml";
    ASSERT_EQ(cmd_simulate(s, out, log), kExitOk);
    InferOptions i;
    i.dir = dir;
    i.config = root.path / "partial.toml";
    ASSERT_EQ(cmd_infer(i, out, log), kExitOk);
    for (const auto& e : fs::recursive_directory_iterator(dir / "traces"))
        if (e.path().string().ends_with(".summary.json")) fs::remove(e.path());
    // T3 rep 1 is left finished: resume must skip it untouched
    fs::copy_file(root.path / "full/traces/T3/rep_001.summary.json", dir / "traces/T3/rep_001.summary.json");
    for (const char* ext : {".ndjson", ".csv", ".ckpt.json"})
        fs::copy_file(root.path / ("full/traces/T3/rep_001" + std::string(ext)), dir / ("traces/T3/rep_001" + std::string(ext)),
                      fs::copy_options::overwrite_existing);

    i.config.reset();
    i.resume = true;
    ASSERT_EQ(cmd_infer(i, out, log), kExitOk);
    EXPECT_NE(log.str().find("skip T3 rep_001"), std::string::npos);
    const auto full = tree(root.path / "full/traces");
    const auto resumed = tree(dir / "traces");
    EXPECT_EQ(full, resumed);
    EXPECT_EQ(slurp(root.path / "full/infer_manifest.json"), slurp(dir / "infer_manifest.json"));
    EXPECT_EQ(slurp(root.path / "full/acceptance.json"), slurp(dir / "acceptance.json"));
}

TEST(Cli, DryRunEchoesConfigWithoutSampling) {
    TempDir root("dry");
    put(root.path / "exp.toml", kSmallConfig);
    std::ostringstream out, log;
    SimulateOptions s;
    s.out = root.path / "x";
    s.config = root.path / "exp.toml";
    ASSERT_EQ(cmd_simulate(s, out, log), kExitOk);
    InferOptions i;
    i.dir = root.path / "x";
    i.dry_run = true;
    std::ostringstream echo;
    ASSERT_EQ(cmd_infer(i, echo, log), kExitOk);
    EXPECT_FALSE(fs::exists(root.path / "x/traces"));
    EXPECT_FALSE(fs::exists(root.path / "x/infer_manifest.json"));
    const auto cfg = parse_experiment(echo.str());
    EXPECT_EQ(cfg.seed, 17u);
    EXPECT_EQ(cfg.sampler.n_iter, 600u);
    EXPECT_NE(echo.str().find("# plan: 4 chains"), std::string::npos);
    EXPECT_EQ(experiment_to_toml(cfg), experiment_to_toml(load_experiment(root.path / "x/config.toml")));
}

TEST(Cli, ReportWithoutTruthGivesSummariesOnly) {
    TempDir root("notruth");
    put(root.path / "exp.toml", kSmallConfig);
    pipeline(root.path / "x", root.path / "exp.toml");
    fs::remove_all(root.path / "x/report");
    fs::remove(root.path / "x/truth.json");
    std::ostringstream out, log;
    ReportOptions r;
    r.dir = root.path / "x";
    ASSERT_EQ(cmd_report(r, out, log), kExitOk);
    EXPECT_NE(log.str().find("D metrics omitted"), std::string::npos);
    EXPECT_FALSE(fs::exists(root.path / "x/report/d_metrics.csv"));
    EXPECT_TRUE(fs::exists(root.path / "x/report/delta_table.csv"));
    EXPECT_TRUE(fs::exists(root.path / "x/report/T2/rep_000/summary.json"));
    EXPECT_TRUE(fs::exists(root.path / "x/report/T2/rep_000/graph.dot"));
}

TEST(Cli, EmptyTraceDirectoryIsAnError) {
    TempDir root("empty");
    std::ostringstream out, log;
    ReportOptions r;
    r.dir = root.path;
    EXPECT_THROW(cmd_report(r, out, log), ConfigError);
    EXPECT_EQ(run_cli("report --dir " + root.path.string()), kExitConfig);
}

TEST(Cli, ExitCodes) {
    TempDir root("codes");
    EXPECT_EQ(run_cli("check-model --scenario 1 --strict"), kExitOk);
    EXPECT_EQ(run_cli("check-model --scenario 3"), kExitOk);
    EXPECT_EQ(run_cli("check-model --scenario 3 --strict"), kExitNumeric);
    EXPECT_EQ(run_cli("simulate --scenario 3 --out " + (root.path / "s3").string()), kExitNumeric);
    EXPECT_FALSE(fs::exists(root.path / "s3/data"));
    EXPECT_EQ(run_cli("simulate --scenario 7 --out " + (root.path / "s7").string()), kExitConfig);
    EXPECT_EQ(run_cli("simulate --bogus"), kExitConfig);
    EXPECT_EQ(run_cli(""), kExitConfig);
    put(root.path / "bad.toml", "[sampler]\nn_iter = \"many\"\n");
    EXPECT_EQ(run_cli("simulate --config " + (root.path / "bad.toml").string() + " --out " + (root.path / "b").string()),
              kExitConfig);
    EXPECT_EQ(run_cli("infer --dir " + (root.path / "missing").string()), kExitConfig);
    EXPECT_EQ(run_cli("--help"), kExitOk);
}

TEST(Cli, EnvironmentOverrides) {
    TempDir root("env");
    put(root.path / "exp.toml", kSmallConfig);
    const std::string cmd = "HAWKES_OUT_DIR=" + (root.path / "e").string() + " HAWKES_JOBS=2 " + HAWKES_CLI_PATH +
                            " simulate --config " + (root.path / "exp.toml").string() + " >/dev/null 2>&1";
    EXPECT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(root.path / "e/manifest.json"));
    const std::string bad = "HAWKES_JOBS=zero " + std::string(HAWKES_CLI_PATH) + " check-model --scenario 1 >/dev/null 2>&1";
    const int status = std::system(bad.c_str());
    EXPECT_EQ(WEXITSTATUS(status), kExitConfig);
}

TEST(Cli, DistanceAndCheckModel) {
    TempDir root("dist");
    put(root.path / "s1.json", model_to_json(scenario1()));
    put(root.path / "null.json", model_to_json(HawkesModel::poisson(0.04, {20.0, 20.0})));
    DistanceOptions d;
    d.model_a = root.path / "s1.json";
    d.model_b = root.path / "null.json";
    std::ostringstream out;
    ASSERT_EQ(cmd_distance(d, out), kExitOk);
    const auto j = nlohmann::json::parse(out.str());
    EXPECT_NEAR(j["l1"].get<double>(), 1.2, 1e-12);

    CheckModelOptions c;
    c.scenario = "1";
    std::ostringstream chk;
    ASSERT_EQ(cmd_check_model(c, chk), kExitOk);
    const auto r = nlohmann::json::parse(chk.str());
    EXPECT_TRUE(r["stationary"].get<bool>());
    EXPECT_NEAR(r["mean_intensity"][0].get<double>(), 83.871, 1e-3);
    c.scenario.reset();
    EXPECT_THROW(cmd_check_model(c, chk), ConfigError);
}
