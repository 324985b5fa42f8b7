#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "lanslab/field_io.hpp"
#include "manifest.hpp"
#include "settings.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace lanslab;
using namespace lanslab::cli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "lanslab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("lanslab_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

std::string first_line(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  return line;
}

fs::path find_with_prefix(const fs::path& dir, const std::string& prefix) {
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename().string().rfind(prefix, 0) == 0) return e.path();
  return {};
}

}  // namespace

TEST(Manifest, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Manifest, HashTracksEveryField) {
  RunManifest a;
  a.command = "verify";
  a.seed = 1;
  a.params = {{"n", 32}};
  const auto h = a.hash();
  EXPECT_EQ(h.size(), 64u);
  EXPECT_EQ(a.hash(), h);
  auto b = a;
  b.seed = 2;
  EXPECT_NE(b.hash(), h);
  b = a;
  b.params["n"] = 64;
  EXPECT_NE(b.hash(), h);
}

TEST(Settings, SplitList) {
  EXPECT_EQ(split_list(" bernstein, heat ,,product"), (std::vector<std::string>{"bernstein", "heat", "product"}));
  EXPECT_TRUE(split_list("").empty());
  EXPECT_TRUE(split_list(" , ").empty());
}

TEST(Settings, ListsOnlyForSweep) {
  Settings s;
  s.alpha = {0.1, 0.2};
  EXPECT_THROW(s.alpha_value(0.3), UsageError);
  s.alpha = {};
  EXPECT_EQ(s.alpha_value(0.3), 0.3);
}

TEST(Usage, BadInvocationsExitTwo) {
  const auto dir = scratch("usage");
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"verify", "--suite", "", "--out", dir.string()}).code, 2);
  EXPECT_EQ(run({"verify", "--out", dir.string()}).code, 2);
  EXPECT_EQ(run({"verify", "--suite", "bernstein,nope", "--out", dir.string()}).code, 2);
  EXPECT_EQ(run({"solve", "--equation", "euler", "--out", dir.string()}).code, 2);
  EXPECT_EQ(run({"solve", "--alpha", "0.1,0.2", "--out", dir.string()}).code, 2);
  EXPECT_EQ(run({"solve", "--equation", "ns", "--alpha", "0.2", "--out", dir.string()}).code, 2);
  EXPECT_EQ(run({"solve", "--nu", "-1", "--n", "16", "--out", dir.string()}).code, 2);
  EXPECT_EQ(run({"pipeline", "--p", "2", "--out", dir.string()}).code, 2);
  EXPECT_EQ(run({"solve", "--no-such-flag"}).code, 2);
}

TEST(Usage, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verify"), std::string::npos);
  EXPECT_NE(r.out.find("--t-end"), std::string::npos);
}

TEST(Verify, UnderResolvedIsInconclusive) {
  const auto dir = scratch("verify16");
  const auto r = run({"verify", "--suite", "all", "--n", "16", "--out", dir.string()});
  EXPECT_EQ(r.code, 3);
  const auto summary = read_json(dir / "verify" / "summary.json");
  int inconclusive = 0, passed = 0;
  for (const auto& c : summary["checks"]) {
    if (c["verdict"] == "inconclusive") ++inconclusive;
    if (c["verdict"] == "pass") ++passed;
  }
  EXPECT_EQ(inconclusive, 15);
  EXPECT_EQ(passed, 4);  // hypothesis rejections need no grid
  EXPECT_EQ(summary["exit_code"], 3);
}

TEST(Verify, BernsteinDefaultsPassAndCiteManifest) {
  const auto dir = scratch("bernstein");
  const auto r = run({"verify", "--suite", "bernstein", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const auto manifest = read_json(dir / "verify" / "manifest.json");
  const std::string hash = manifest["manifest_hash"];
  EXPECT_EQ(manifest["command"], "verify");
  EXPECT_EQ(manifest["seed"], 1);
  for (const char* name : {"bernstein_beta0_p2_qinf", "bernstein_beta1_p2_q2", "bernstein_beta1_p2_q4"}) {
    const auto j = read_json(dir / "verify" / (std::string(name) + ".json"));
    EXPECT_EQ(j["manifest_hash"], hash);
    EXPECT_EQ(j["verdict"], "pass");
    EXPECT_EQ(first_line(dir / "verify" / (std::string(name) + ".csv")), "# manifest_hash=" + hash);
  }
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
}

TEST(Verify, IdenticalManifestGivesIdenticalReports) {
  const auto dir = scratch("determinism");
  std::vector<std::string> args = {"verify", "--suite", "bernstein,cancellation", "--out", dir.string(), "--seed", "7"};
  ASSERT_EQ(run(args).code, 0);
  const auto a = slurp(dir / "verify" / "bernstein_beta1_p2_q4.json");
  const auto b = slurp(dir / "verify" / "cancellation.json");
  const auto c = slurp(dir / "verify" / "cancellation.csv");
  ASSERT_EQ(run(args).code, 0);
  EXPECT_EQ(slurp(dir / "verify" / "bernstein_beta1_p2_q4.json"), a);
  EXPECT_EQ(slurp(dir / "verify" / "cancellation.json"), b);
  EXPECT_EQ(slurp(dir / "verify" / "cancellation.csv"), c);
}

TEST(Config, FileValuesAndCommandLineOverride) {
  const auto dir = scratch("config");
  const auto cfg = dir / "run.cfg";
  std::ofstream(cfg) << "# comment\nequation = heat\nn = 16\nt_end = 0.01\ndt = 0.005\nseed = 5\n";
  auto r = run({"solve", "--config", cfg.string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto m = read_json(dir / "solve" / "manifest.json");
  EXPECT_EQ(m["seed"], 5);
  EXPECT_EQ(m["config"], cfg.string());
  EXPECT_EQ(m["params"]["equation"], "heat");
  EXPECT_EQ(read_json(dir / "solve" / "summary.json")["n"], 16);

  r = run({"solve", "--config", cfg.string(), "--seed", "9", "--out", dir.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(read_json(dir / "solve" / "manifest.json")["seed"], 9);

  std::ofstream(cfg) << "n = 16\nbogus_key = 1\n";
  EXPECT_EQ(run({"solve", "--config", cfg.string(), "--out", dir.string()}).code, 2);
}

TEST(Solve, ZeroAlphaLansIsNavierStokes) {
  const auto dir = scratch("nslimit");
  ASSERT_EQ(run({"solve", "--equation", "lans", "--alpha", "0", "--n", "16", "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(run({"solve", "--equation", "ns", "--n", "16", "--out", (dir / "b").string()}).code, 0);
  const auto fa = find_with_prefix(dir / "a" / "solve", "final.");
  const auto fb = find_with_prefix(dir / "b" / "solve", "final.");
  ASSERT_FALSE(fa.empty());
  ASSERT_FALSE(fb.empty());
  const auto ua = load_field<Rank::vector>(fa);
  const auto ub = load_field<Rank::vector>(fb);
  EXPECT_EQ(lanslab::testing::max_abs_diff(ua, ub), 0.0);
  EXPECT_TRUE(read_json(dir / "a" / "solve" / "summary.json")["navier_stokes_limit"].get<bool>());
}

TEST(Solve, ArtifactsCiteManifest) {
  const auto dir = scratch("solve");
  ASSERT_EQ(run({"solve", "--equation", "mlans", "--v-norm", "0.05", "--n", "16", "--t-end", "0.01", "--out",
                 dir.string()})
                .code,
            0);
  const auto hash = read_json(dir / "solve" / "manifest.json")["manifest_hash"].get<std::string>();
  const auto summary = read_json(dir / "solve" / "summary.json");
  EXPECT_EQ(summary["manifest_hash"], hash);
  EXPECT_EQ(first_line(dir / "solve" / "trajectory.csv"), "# manifest_hash=" + hash);
  for (const auto& name : summary["checkpoints"]) {
    EXPECT_NE(name.get<std::string>().find(hash.substr(0, 12)), std::string::npos);
    FieldHeader h;
    load_field<Rank::vector>(dir / "solve" / name.get<std::string>(), &h);
    EXPECT_EQ(h.points_per_axis, 16);
  }
  EXPECT_LT(summary["diagnostics"]["max_relative_divergence"].get<double>(), 1e-12);
}

TEST(Pipeline, UnderResolvedIsInconclusive) {
  const auto dir = scratch("pipe16");
  EXPECT_EQ(run({"pipeline", "--n", "16", "--out", dir.string()}).code, 3);
  EXPECT_EQ(read_json(dir / "pipeline" / "report.json")["status"], "inconclusive");
}

TEST(Pipeline, DefaultRunPasses) {
  const auto dir = scratch("pipe");
  const auto r = run({"pipeline", "--monitors", "false", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const auto j = read_json(dir / "pipeline" / "report.json");
  EXPECT_EQ(j["status"], "pass");
  EXPECT_LE(j["max_discrepancy"].get<double>(), 10 * j["max_self_error"].get<double>());
  EXPECT_EQ(first_line(dir / "pipeline" / "discrepancy.csv"), "# manifest_hash=" + j["manifest_hash"].get<std::string>());
}

TEST(Pipeline, SplitUnreachableReportsMinimum) {
  const auto dir = scratch("pipesplit");
  const auto r = run({"pipeline", "--init-norm", "1", "--j-cut-max", "1", "--monitors", "false", "--out",
                      dir.string()});
  EXPECT_EQ(r.code, 1);
  const auto j = read_json(dir / "pipeline" / "report.json");
  EXPECT_EQ(j["status"], "split_unreachable");
  EXPECT_GT(j["achievable_minimum"].get<double>(), 1e-3);
}

TEST(Pipeline, LargeDataReportsPicardFailure) {
  const auto dir = scratch("pipebig");
  const auto r = run({"pipeline", "--box-length", "6.283185307179586e-4", "--alpha", "3e-5", "--nu", "1e-8",
                      "--init-norm", "10", "--monitors", "false", "--out", dir.string()});
  EXPECT_EQ(r.code, 1);
  const auto j = read_json(dir / "pipeline" / "report.json");
  EXPECT_EQ(j["status"], "picard_nonconvergence");
  EXPECT_GT(j["last_contraction_ratio"].get<double>(), 1.0);
}

TEST(Sweep, InvalidCellIsIsolated) {
  const auto dir = scratch("sweepbad");
  const auto r = run({"sweep", "--n", "16", "--dt", "0.005,-1,0.0025", "--t-end", "0.02", "--jobs", "2", "--out",
                      dir.string()});
  EXPECT_EQ(r.code, 1);
  const auto j = read_json(dir / "sweep" / "summary.json");
  ASSERT_EQ(j["cells"].size(), 3u);
  EXPECT_EQ(j["cells"][0]["status"], "ok");
  EXPECT_EQ(j["cells"][1]["status"], "failed");
  EXPECT_EQ(j["cells"][2]["status"], "ok");
  for (int i : {0, 2}) {
    const auto cell = dir / "sweep" / ("cell_00" + std::to_string(i));
    const auto m = read_json(cell / "manifest.json");
    EXPECT_EQ(m["command"], "sweep-cell");
    EXPECT_EQ(read_json(cell / "summary.json")["manifest_hash"], m["manifest_hash"]);
  }
}

TEST(Sweep, TimeStepRefinementTable) {
  const auto dir = scratch("sweepdt");
  const auto r = run({"sweep", "--n", "16", "--dt", "1e-3,5e-4,2.5e-4", "--init-norm", "1", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto table = read_json(dir / "sweep" / "summary.json")["convergence"];
  ASSERT_EQ(table.size(), 2u);
  EXPECT_TRUE(table[0]["observed_order"].is_null());
  EXPECT_NEAR(table[1]["observed_order"].get<double>(), 2.0, 0.2);
  EXPECT_LT(table[1]["relative_l2_difference"].get<double>(), table[0]["relative_l2_difference"].get<double>());
}
