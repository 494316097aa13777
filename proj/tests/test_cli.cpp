#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gbm/run.hpp"

using namespace gbm;
namespace fs = std::filesystem;

namespace {

const char* kAsymSimulate = R"(mode = simulate
topology = two_half

[walk]
a_plus = 0.25
a_minus = 0.25
b_plus = 2
b_minus = 2
c_plus = 6
c_minus = 4

[sim]
n = 50
t = 0.5
u = 0.3
m = 1
seed = 9
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gbm_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig load(const std::string& text, const fs::path& out) {
  RunConfig c = parse_config(text);
  c.output.dir = out.string();
  return c;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return s.replace(pos, from.size(), to);
}

std::string config_error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

int run_quiet(const RunConfig& c) {
  std::ostringstream log;
  return run(c, RunOptions{1}, log);
}

}  // namespace

TEST(ParseConfig, AsymValues) {
  const auto c = parse_config(kAsymSimulate);
  EXPECT_EQ(c.mode, Mode::simulate);
  ASSERT_TRUE(c.walk);
  const auto& p = std::get<WalkParamsTwoHalf>(*c.walk);
  EXPECT_EQ(p.A_plus, 0.25);
  EXPECT_EQ(p.C_plus, 6.0);
  EXPECT_EQ(p.C_minus, 4.0);
  EXPECT_EQ(c.sim.seed, 9u);
  EXPECT_EQ(c.sim.record_mode, RecordMode::boundary_events_only);
  EXPECT_EQ(c.functions.size(), 5u);
  EXPECT_NE(serialize(c).find("a_plus = 0.25"), std::string::npos);
  EXPECT_NE(serialize(c).find("c_plus = 6"), std::string::npos);
}

TEST(ParseConfig, ErrorsNameTheKey) {
  EXPECT_EQ(config_error_key(replace(kAsymSimulate, "b_minus = 2", "b_minus = -1")), "walk.b_minus");
  EXPECT_EQ(config_error_key(replace(kAsymSimulate, "n = 50", "n = fifty")), "sim.n");
  EXPECT_EQ(config_error_key(replace(kAsymSimulate, "t = 0.5", "t = 0.5x")), "sim.t");
  EXPECT_EQ(config_error_key(replace(kAsymSimulate, "seed = 9\n", "")), "sim.seed");
  EXPECT_EQ(config_error_key(replace(kAsymSimulate, "c_minus = 4\n", "")), "walk.c_minus");
  EXPECT_EQ(config_error_key(replace(kAsymSimulate, "c_minus = 4\n", "c_minus = 4\nd_plus = 1\n")), "walk.d_plus");
  EXPECT_EQ(config_error_key(replace(kAsymSimulate, "mode = simulate\n", "")), "mode");
  EXPECT_EQ(config_error_key(replace(kAsymSimulate, "mode = simulate", "mode = plot")), "mode");
  EXPECT_EQ(config_error_key(std::string(kAsymSimulate) + "[extra]\nk = 1\n"), "extra");
  EXPECT_EQ(config_error_key(replace(kAsymSimulate, "topology = two_half", "topology = line")), "walk.a_plus");
  EXPECT_EQ(config_error_key(std::string(kAsymSimulate) + "[observable]\nfunctions = gauss,cubic\n"), "observable.functions");
  EXPECT_EQ(config_error_key(std::string(kAsymSimulate) + "[numerics]\nh = 0.03\n"), "numerics.radius");
  EXPECT_EQ(config_error_key(replace(kAsymSimulate, "mode = simulate", "mode = exit-stats")), "exit");
  EXPECT_THROW(parse_config("mode = simulate\n[walk\n"), ConfigError);
}

TEST(ParseConfig, RoundTrip) {
  const auto a = parse_config(kAsymSimulate);
  const auto b = parse_config(serialize(a));
  EXPECT_EQ(a, b);
  EXPECT_EQ(serialize(a), serialize(b));
  std::string text = std::string(kAsymSimulate) + "observe = 0.1,0.5\nsweep_n = 10,20\n" +
                     "[coefficients]\nc1_plus = 1\nc1_minus = 0.1\na_plus = 0.3\na_minus = 0.01\n"
                     "c2_plus = 0.7\nc2_minus = 1e-3\nc3_plus = 0.1\nc3_minus = 1\n[output]\npaths_csv = true\n";
  const auto c = parse_config(text);
  EXPECT_EQ(c.sim.observe, (std::vector<double>{0.1, 0.5}));
  EXPECT_EQ(parse_config(serialize(c)), c);
  const auto line = parse_config(
      "mode = resolvent\ntopology = line\n[coefficients]\nc1 = 0.3\nc2_minus = 0.1\nc2_plus = 0.2\nc3 = 0.4\n");
  EXPECT_EQ(parse_config(serialize(line)), line);
  EXPECT_EQ(line.functions.size(), 4u);
}

TEST(ParseConfig, Overrides) {
  const auto c = parse_config(kAsymSimulate, Overrides{std::string("validate"), 123u});
  EXPECT_EQ(c.mode, Mode::validate);
  EXPECT_EQ(c.sim.seed, 123u);
  EXPECT_NE(config_hash(c), config_hash(parse_config(kAsymSimulate)));
  RunConfig d = parse_config(kAsymSimulate);
  d.output.dir = "elsewhere";
  EXPECT_EQ(config_hash(d), config_hash(parse_config(kAsymSimulate)));
}

TEST(Run, SimulateOnePathAndDeterminism) {
  const auto out = scratch("simulate");
  auto c = load(replace(kAsymSimulate, "seed = 9\n", "seed = 9\nrecord_mode = full_path\n[output]\npaths_csv = true\n"), out);
  ASSERT_EQ(run_quiet(c), kExitOk);
  const std::string jsonl = slurp(out / "paths.jsonl");
  EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 1);
  const std::string csv = slurp(out / "paths.csv");
  const std::string hash = config_hash(c);
  EXPECT_EQ(csv.rfind("# config_hash=" + hash + " seed=9\npath,t,state\n", 0), 0u);
  const auto j = nlohmann::json::parse(jsonl);
  EXPECT_EQ(j["config_hash"], hash);
  EXPECT_EQ(j["master_seed"], 9);
  const auto rep = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(rep["config_hash"], hash);
  EXPECT_EQ(rep["master_seed"], 9);
  EXPECT_EQ(parse_config(rep["config"].get<std::string>()), c);
  const std::string report = slurp(out / "report.json");
  ASSERT_EQ(run_quiet(c), kExitOk);
  EXPECT_EQ(slurp(out / "paths.jsonl"), jsonl);
  EXPECT_EQ(slurp(out / "paths.csv"), csv);
  EXPECT_EQ(slurp(out / "report.json"), report);
}

TEST(Run, CompareIsDeterministicAndDetectsMismatch) {
  const auto out = scratch("compare");
  std::string base = replace(kAsymSimulate, "mode = simulate", "mode = compare");
  base = replace(base, "m = 1\n", "m = 3000\nobserve = 0.25,0.5\n");
  auto c = load(base, out);
  ASSERT_EQ(run_quiet(c), kExitOk);
  const std::string sweep = slurp(out / "sweep.csv");
  EXPECT_EQ(sweep.rfind("# config_hash=" + config_hash(c) + " seed=9\nn,function,t,mc,se,pde,diff", 0), 0u);
  EXPECT_EQ(std::count(sweep.begin(), sweep.end(), '\n'), 2 + 5 * 2);
  ASSERT_EQ(run_quiet(c), kExitOk);
  EXPECT_EQ(slurp(out / "sweep.csv"), sweep);

  const std::string mismatch = base + "[coefficients]\nc1_plus = 0.25\nc1_minus = 0.25\na_plus = 60\na_minus = 4\n"
                                      "c2_plus = 2\nc2_minus = 2\nc3_plus = 1\nc3_minus = 1\n";
  EXPECT_EQ(run_quiet(load(mismatch, scratch("mismatch"))), kExitStatistical);
}

TEST(Run, SweepWritesBiasFits) {
  const auto out = scratch("sweep");
  std::string text = replace(kAsymSimulate, "mode = simulate", "mode = compare");
  text = replace(text, "m = 1\n", "m = 2000\nsweep_n = 20,40\n");
  ASSERT_EQ(run_quiet(load(text, out)), kExitOk);
  const auto rep = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(rep["bias_fits"].size(), 5u);
  const std::string sweep = slurp(out / "sweep.csv");
  EXPECT_EQ(std::count(sweep.begin(), sweep.end(), '\n'), 2 + 2 * 5);
}

TEST(Run, ValidateDefaultConfigPasses) {
  const auto out = scratch("validate");
  const auto c = load(slurp(fs::path(GBM_SOURCE_DIR) / "configs" / "default.ini"), out);
  ASSERT_EQ(run_quiet(c), kExitOk);
  const auto rep = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_TRUE(rep["pass"].get<bool>());
  EXPECT_GT(rep["tests"].size(), 10u);
  for (const auto& t : rep["tests"]) EXPECT_TRUE(t["pass"].get<bool>()) << t["test_name"];
}

TEST(Run, PdeResolventAndExitModes) {
  const auto out = scratch("modes");
  const std::string pde = "mode = pde\ntopology = line\n[coefficients]\nc1 = 0\nc2_minus = 0\nc2_plus = 0\nc3 = 1\n"
                          "[sim]\nt = 0.5\n[numerics]\nh = 0.05\ndt = 0.05\nradius = 5\nstore_every = 5\n";
  ASSERT_EQ(run_quiet(load(pde, out)), kExitOk);
  const std::string field = slurp(out / "field.csv");
  EXPECT_NE(field.find("\nt,x,u\n"), std::string::npos);
  // 3 stored slices of 201 nodes
  EXPECT_EQ(std::count(field.begin(), field.end(), '\n'), 2 + 3 * 201);

  const std::string res = replace(pde, "mode = pde", "mode = resolvent");
  ASSERT_EQ(run_quiet(load(res, out)), kExitOk);
  EXPECT_TRUE(fs::exists(out / "resolvent.csv"));

  const std::string ex = "mode = exit-stats\ntopology = line\n[sim]\nn = 100\nm = 5000\nseed = 1\n[exit]\nx = -1\nh1 = 0.2\nh2 = 0.2\n";
  ASSERT_EQ(run_quiet(load(ex, out)), kExitOk);
  const std::string bad = replace(ex, "x = -1", "x = -0.1");
  EXPECT_EQ(run_quiet(load(bad, out)), kExitConfig);
}

TEST(Cli, BinaryExitCodes) {
  const auto out = scratch("binary");
  const std::string cli = GBM_CLI_PATH;
  const std::string cfg = (fs::path(GBM_SOURCE_DIR) / "configs" / "default.ini").string();
  auto sh = [](const std::string& cmd) {
    const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
  };
  EXPECT_EQ(sh(cli + " --config " + cfg + " --out " + out.string() + " --mode exit-stats --seed 5 --workers 2"), 0);
  const auto rep = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(rep["mode"], "exit-stats");
  EXPECT_EQ(rep["master_seed"], 5);
  EXPECT_EQ(sh(cli + " --config " + cfg + " --out " + out.string() + " --mode nonsense"), kExitConfig);
  EXPECT_EQ(sh(cli + " --config /nonexistent.ini"), kExitConfig);
  EXPECT_EQ(sh(cli + " --help"), 0);
}
