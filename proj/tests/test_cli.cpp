#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "cra_safety/cli.hpp"
#include "fixtures.hpp"

using namespace cra;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(CRA_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cra_safety_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cra-safety");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

RunConfig round_trip(const RunConfig& c) { return config_from_json(json::parse(config_to_json(c).dump())); }

}  // namespace

TEST(Config, RoundTripPresets) {
    for (const auto& name : preset_names()) {
        const auto c = preset(name);
        EXPECT_EQ(round_trip(c), c) << name;
    }
}

TEST(Config, RoundTripSampleConfigs) {
    for (const auto& entry : fs::directory_iterator(kConfigs)) {
        if (entry.path().extension() != ".json") continue;
        const auto c = load_config(entry.path().string());
        EXPECT_EQ(round_trip(c), c) << entry.path();
    }
}

TEST(Config, RoundTripPolynomialSystem) {
    const auto c = load_config((kConfigs / "cubic_oscillator.json").string());
    EXPECT_FALSE(c.a_matrix.has_value());
    EXPECT_EQ(c.system.f[1].eval(Vec{1.0, 0.0}), -0.9);
    const auto again = round_trip(c);
    EXPECT_EQ(again, c);
}

TEST(Preset, MatchesPublishedBoeingData) {
    const auto c = preset("boeing-I");
    const Matrix a{{-0.0558, -0.9968, 0.0802, 0.0415},
                   {0.598, -0.115, -0.0318, 0.0},
                   {-3.05, 0.388, -0.465, 0.0},
                   {0.0, 0.0805, 1.0, 0.0}};
    EXPECT_EQ(*c.a_matrix, a);
    EXPECT_EQ(*c.b_matrix, (Matrix{{0.00729}, {-0.475}, {0.153}, {0.0}}));
    EXPECT_EQ(std::get<LinearPolicy>(c.policy).gain, (Matrix{{-9.231e-3, 0.503, -1.805e-3, 2.373e-5}}));
    EXPECT_EQ(std::get<LinearPolicy>(preset("boeing-II").policy).gain,
              (Matrix{{0.03017, 0.05395, -4.753e-3, 7.513e-5}}));
    EXPECT_EQ(c.x0, (Vec{0.01, 0.025, 0.0, 0.0}));
    EXPECT_EQ(c.spec.budget, 0.02);
    EXPECT_EQ(c.system.delta, 0.05);
    EXPECT_DOUBLE_EQ(c.spec.h.eval(Vec{0.0, 0.0, 0.0, 0.0}), 0.025 * 0.025);
    EXPECT_EQ(c.timing.n1, 2);
    EXPECT_EQ(c.timing.n2, 2);
    EXPECT_EQ(c.timing.buffer_length, 3);
    EXPECT_EQ(c.attack->cycle_length_epochs, 8);
    const auto c2 = preset("boeing-II");
    EXPECT_EQ(c2.timing.n3, 2);
    EXPECT_EQ(c2.timing.n4, 4);
    EXPECT_EQ(c2.attack->cycle_length_epochs, 10);
    EXPECT_EQ(preset("boeing-III").timing.arch, ArchKind::Simplex);
    EXPECT_THROW(preset("boeing-IV"), ConfigError);
}

TEST(Config, SyntaxErrorsCarryLineAndColumn) {
    try {
        config_from_text("{\n  \"schema_version\": 1,\n  \"name\": oops\n}", "bad.json");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("bad.json:3:"), std::string::npos) << e.what();
    }
}

TEST(Config, SemanticErrorsCarryJsonPointer) {
    auto j = config_to_json(load_config((kConfigs / "one_d_certified.json").string()));
    j["spec"].erase("budget");
    try {
        config_from_json(j);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/spec/budget"), std::string::npos) << e.what();
    }
    j = config_to_json(load_config((kConfigs / "one_d_certified.json").string()));
    j["policy"]["gain"] = {{1.0, 2.0}};
    try {
        config_from_json(j);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/policy/gain"), std::string::npos) << e.what();
    }
    j = config_to_json(load_config((kConfigs / "one_d_certified.json").string()));
    j["schema_version"] = 2;
    EXPECT_THROW(config_from_json(j), ConfigError);
}

TEST(Format, NineSignificantDigits) {
    EXPECT_EQ(fmt9(0.1), "0.1");
    EXPECT_EQ(fmt9(1.0 / 3.0), "0.333333333");
    EXPECT_EQ(fmt9(-2.5e-7), "-2.5e-07");
    EXPECT_EQ(fmt9(0.0), "0");
}

TEST(Cli, ConfigErrorsExitOne) {
    EXPECT_EQ(cli({"simulate"}).code, kExitConfigError);
    EXPECT_EQ(cli({"simulate", "--preset", "boeing-I", "--config", "x.json"}).code, kExitConfigError);
    EXPECT_EQ(cli({"simulate", "--config", "/nonexistent/x.json"}).code, kExitConfigError);
    EXPECT_EQ(cli({"simulate", "--preset", "nope"}).code, kExitConfigError);
    EXPECT_EQ(cli({"bogus"}).code, kExitConfigError);
    EXPECT_EQ(cli({"simulate", "--preset", "boeing-I", "--substeps", "0"}).code, kExitConfigError);
}

TEST(Cli, SimulateWritesOutputs) {
    const auto dir = scratch("sim");
    const auto r = cli({"simulate", "--preset", "boeing-I", "--out", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.out << r.err;
    for (const char* f : {"config.json", "trajectory.csv", "report.json", "transitions.jsonl"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    const auto rep = json::parse(read_file(dir / "report.json"));
    EXPECT_LE(rep["J"].get<double>(), 0.02);
    EXPECT_GT(rep["J"].get<double>(), 0.0);
    EXPECT_FALSE(rep["violated"].get<bool>());
    EXPECT_EQ(rep["modeling"]["input_box"]["hi"][0].get<double>(), kBoeingInputBound);
    EXPECT_EQ(rep["modeling"]["tau_epochs"].get<long>(), 4);
    EXPECT_FALSE(rep["modeling"]["tau_epochs_integral"].get<bool>());
    const std::string csv = read_file(dir / "trajectory.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,epoch,location,x1,x2,x3,x4,u1,h,J");
    // every logged transition obeys j' = j + e2
    std::istringstream log(read_file(dir / "transitions.jsonl"));
    std::string line;
    int lines = 0;
    while (std::getline(log, line)) {
        const auto j = json::parse(line);
        EXPECT_EQ(j["to"][1].get<long>(), j["from"][1].get<long>() + j["e2"].get<long>());
        ++lines;
    }
    EXPECT_GT(lines, 0);
}

TEST(Cli, SimulateIsDeterministic) {
    const auto a = scratch("det_a"), b = scratch("det_b");
    for (const auto& p : {a, b}) ASSERT_EQ(cli({"simulate", "--preset", "boeing-III", "--seed", "4", "--out", p.string()}).code, 0);
    EXPECT_EQ(read_file(a / "trajectory.csv"), read_file(b / "trajectory.csv"));
    const auto c = scratch("det_c");
    ASSERT_EQ(cli({"simulate", "--preset", "boeing-III", "--seed", "5", "--out", c.string()}).code, 0);
    EXPECT_NE(read_file(a / "trajectory.csv"), read_file(c / "trajectory.csv"));
}

TEST(Cli, SimulateSafetyViolationExitsTwo) {
    auto cfg = load_config((kConfigs / "one_d_certified.json").string());
    cfg.spec.budget = 1e-6;
    cfg.x0 = {0.99};
    cfg.attack->first_attack_epoch = 0;
    const auto dir = scratch("violation");
    write_atomic(dir / "in.json", config_to_json(cfg).dump(2));
    EXPECT_EQ(cli({"simulate", "--config", (dir / "in.json").string(), "--out", dir.string()}).code,
              kExitSafetyViolation);
}

TEST(Cli, VerifyCertifiedFixtureExitsZero) {
    const auto dir = scratch("verify_ok");
    const auto r = cli({"verify", "--config", (kConfigs / "one_d_certified.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
    const auto v = json::parse(read_file(dir / "verdicts.json"));
    EXPECT_TRUE(v["all_ok"].get<bool>());
    EXPECT_EQ(v["5a"]["status"], "certified");
}

TEST(Cli, VerifyBudgetFailureExitsFour) {
    const auto dir = scratch("verify_eq7");
    const auto r = cli({"verify", "--config", (kConfigs / "one_d_budget_failing.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, kExitVerificationFailed);
    const auto v = json::parse(read_file(dir / "verdicts.json"));
    EXPECT_FALSE(v["budget_inequality"]["ok"].get<bool>());
    EXPECT_NEAR(v["budget_inequality"]["slack"].get<double>(), -0.0208, 1e-12);
    EXPECT_NE(r.out.find("slack -0.0208"), std::string::npos) << r.out;
}

TEST(Cli, VerifyBoeingScenarioReportsBudgetSlack) {
    const auto dir = scratch("verify_boeing");
    const auto r = cli({"verify", "--preset", "boeing-I", "--out", dir.string()});
    EXPECT_EQ(r.code, kExitVerificationFailed);
    const auto v = json::parse(read_file(dir / "verdicts.json"));
    EXPECT_NEAR(v["budget_inequality"]["slack"].get<double>(), -0.0208, 1e-12);
}

TEST(Cli, ShortAttackCycleIsFlagged) {
    const auto dir = scratch("verify_sched");
    const auto r = cli({"verify", "--config", (kConfigs / "one_d_short_cycle.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, kExitVerificationFailed);
    const auto v = json::parse(read_file(dir / "verdicts.json"));
    EXPECT_FALSE(v["schedule_ok"].get<bool>());
    // the other conditions are the certified fixture's
    EXPECT_EQ(v["5a"]["status"], "certified");
    EXPECT_TRUE(v["budget_inequality"]["ok"].get<bool>());
    EXPECT_NE(r.out.find("VIOLATED"), std::string::npos);
}

TEST(Cli, VerifySimplexSafetyController) {
    const auto dir = scratch("verify_simplex");
    const auto r = cli({"verify", "--preset", "boeing-III", "--out", dir.string()});
    EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
    EXPECT_TRUE(fs::exists(dir / "verdicts.json"));
}

TEST(Cli, SynthesizeSuccessAndExhaustion) {
    const auto dir = scratch("synth");
    const auto ok = cli({"synthesize", "--config", (kConfigs / "one_d_certified.json").string(), "--out", dir.string()});
    EXPECT_EQ(ok.code, kExitOk) << ok.out << ok.err;
    const auto s = json::parse(read_file(dir / "synthesis.json"));
    EXPECT_EQ(s["status"], "success");
    EXPECT_LE(s["iterations"].get<long>(), s["iteration_bound"].get<long>());
    EXPECT_TRUE(fs::exists(dir / "synthesis_trace.csv"));

    auto cfg = load_config((kConfigs / "one_d_certified.json").string());
    cfg.synthesis.tau_max = 1e-3;
    cfg.synthesis.d_max = 0.5;
    cfg.synthesis.c_max = 0.1;
    write_atomic(dir / "tight.json", config_to_json(cfg).dump(2));
    const auto bad = cli({"synthesize", "--config", (dir / "tight.json").string(), "--out", dir.string()});
    EXPECT_EQ(bad.code, kExitSynthesisExhausted);
    EXPECT_NE(bad.out.find("near miss"), std::string::npos);
}

TEST(Cli, SynthesizedPolicySimulatesWithinBudget) {
    const auto dir = scratch("pipeline");
    ASSERT_EQ(cli({"synthesize", "--config", (kConfigs / "one_d_certified.json").string(), "--out", dir.string()}).code, 0);
    const auto s = json::parse(read_file(dir / "synthesis.json"));
    auto cfg = load_config((kConfigs / "one_d_certified.json").string());
    cfg.policy = LinearPolicy{Matrix::from_rows(s["result"]["gain"].get<std::vector<Vec>>())};
    cfg.certificate = Certificate{s["result"]["c"], s["result"]["d"], s["result"]["tau"]};
    write_atomic(dir / "synth_policy.json", config_to_json(cfg).dump(2));
    ASSERT_EQ(cli({"simulate", "--config", (dir / "synth_policy.json").string(), "--out", dir.string()}).code, 0);
    const auto rep = json::parse(read_file(dir / "report.json"));
    EXPECT_LE(rep["J"].get<double>(), rep["bound_J1_plus_J2"].get<double>() + 1e-6);
    EXPECT_LE(rep["J"].get<double>(), cfg.spec.budget);
}

TEST(Cli, ReportBoundaryColumnsAndDeterminism) {
    const auto dir = scratch("report");
    ASSERT_EQ(cli({"simulate", "--preset", "boeing-I", "--out", dir.string()}).code, 0);
    ASSERT_EQ(cli({"report", "--out", dir.string()}).code, 0);
    const std::string first = read_file(dir / "plot_data.csv");
    const std::string md = read_file(dir / "report.md");
    ASSERT_EQ(cli({"report", "--out", dir.string()}).code, 0);
    EXPECT_EQ(read_file(dir / "plot_data.csv"), first);
    EXPECT_EQ(read_file(dir / "report.md"), md);

    std::istringstream in(first);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "epoch,t,x1,x2,x3,x4,h,c_lower,c_upper");
    int rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(line.substr(line.size() - 13), ",-0.025,0.025") << line;
        ++rows;
    }
    EXPECT_EQ(rows, 151);
    EXPECT_NE(md.find("Per-cycle cost"), std::string::npos);
    EXPECT_NE(md.find("budget B | 0.02"), std::string::npos);
    EXPECT_NE(md.find("bound J1+J2"), std::string::npos);
}

TEST(Cli, ReportMissingInputsExitOne) {
    const auto dir = scratch("report_missing");
    EXPECT_EQ(cli({"report", "--out", dir.string()}).code, kExitConfigError);
}

TEST(Cli, ExecutableExitCodes) {
    const auto dir = scratch("exe");
    const std::string exe = CRA_CLI_PATH;
    auto status = [&](const std::string& args) {
        const int raw = std::system((exe + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    EXPECT_EQ(status("verify --config " + (kConfigs / "one_d_certified.json").string() + " --out " + dir.string()), 0);
    EXPECT_EQ(status("verify --config " + (kConfigs / "one_d_budget_failing.json").string() + " --out " + dir.string()), 4);
    EXPECT_EQ(status("simulate"), 1);
    EXPECT_EQ(status("--help"), 0);
}
