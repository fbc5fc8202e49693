#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into stdout.
Run cli(const std::string& args, const char* redirect = " 2>&1") {
  const std::string cmd = std::string("\"") + KD_CLI + "\" " + args + redirect;
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// stdout only, for --json parsing.
Run cli_stdout(const std::string& args) {
  return cli(args, " 2>/dev/null");
}

std::string sample(const char* f) { return std::string(KD_SAMPLE_DIR) + "/" + f; }

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("kardashev_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

const std::string kPanel = " --panel " + sample("panel.csv");
const std::string kScenario = " --scenario " + sample("scenario.csv");
const std::string kRatio = " --ratio " + sample("ratio.csv");

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Cli, VersionAndUsage) {
  EXPECT_EQ(cli("--version").code, 0);
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("frobnicate").code, 1);
  EXPECT_EQ(cli("train --no-such-flag").code, 1);
}

TEST(Cli, ValidateSampleFiles) {
  const auto r = cli("validate" + kPanel + kScenario + kRatio);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  EXPECT_EQ(cli("validate").code, 1);
}

TEST(Cli, ValidateCorruptAndMissing) {
  const auto dir = scratch("validate");
  std::ofstream(dir / "ratio.csv") << "year,ratio\n2000,0.80\n2001,0.79\n2002,abc\n";
  const auto r = cli("validate --ratio " + q(dir / "ratio.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("ratio.csv:4"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(cli("validate --panel " + q(dir / "missing.csv")).code, 2);
}

TEST(Cli, TrainDeterministicAndSeeded) {
  const auto dir = scratch("train");
  const std::string base = "--out " + q(dir) + " train" + kPanel + " --trees 40";
  const auto a = cli("--seed 42 " + base);
  ASSERT_EQ(a.code, 0) << a.out;
  const std::string model_a = slurp(dir / "model.json");
  const std::string metrics_a = slurp(dir / "train_metrics.json");
  const auto b = cli("--seed 42 " + base);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(slurp(dir / "model.json"), model_a);
  EXPECT_EQ(slurp(dir / "train_metrics.json"), metrics_a);

  const auto m = json::parse(metrics_a);
  EXPECT_GE(m.at("r2").get<double>(), 0.9);
  EXPECT_EQ(m.at("seed").get<std::uint64_t>(), 42u);
  EXPECT_TRUE(m.contains("config_hash"));
  const auto saved = json::parse(model_a);
  EXPECT_EQ(saved.at("metadata").at("seed").get<std::uint64_t>(), 42u);
  EXPECT_EQ(saved.at("metadata").at("test_r2"), m.at("r2"));

  ASSERT_EQ(cli("--seed 7 " + base).code, 0);
  const auto m7 = json::parse(slurp(dir / "train_metrics.json"));
  EXPECT_EQ(m7.at("seed").get<std::uint64_t>(), 7u);
  EXPECT_NE(m7.at("r2").get<double>(), m.at("r2").get<double>());
}

TEST(Cli, TrainDataErrors) {
  const auto dir = scratch("train_err");
  std::ofstream(dir / "empty.csv") << slurp(sample("panel.csv")).substr(
      0, slurp(sample("panel.csv")).find('\n') + 1);
  EXPECT_EQ(cli("--out " + q(dir) + " train --panel " + q(dir / "empty.csv")).code, 2);
  EXPECT_EQ(cli("--out " + q(dir) + " train --panel " + q(dir / "nope.csv")).code, 2);
  EXPECT_EQ(cli("--out " + q(dir) + " train").code, 1);
}

TEST(Cli, ShapRanking) {
  const auto dir = scratch("shap");
  ASSERT_EQ(cli("--out " + q(dir) + " train" + kPanel + " --trees 20").code, 0);
  const auto r = cli("--out " + q(dir) + " shap" + kPanel);
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rows = lines_of(slurp(dir / "shap_summary.csv"));
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0].rfind("# seed=42 config_hash=", 0), 0u);
  EXPECT_EQ(rows[1], "feature,mean_abs_shap,rank");
  EXPECT_EQ(rows[2].rfind("gdp_usd2015,", 0), 0u);
  EXPECT_NE(r.out.find("gdp_usd2015"), std::string::npos);
}

TEST(Cli, ShapEmptyDatasetAndCapabilityGuard) {
  const auto dir = scratch("shap_err");
  ASSERT_EQ(cli("--out " + q(dir) + " train" + kPanel + " --trees 5").code, 0);
  const std::string text = slurp(sample("panel.csv"));
  std::ofstream(dir / "empty.csv") << text.substr(0, text.find('\n') + 1);
  EXPECT_EQ(cli("--out " + q(dir) + " shap --panel " + q(dir / "empty.csv")).code, 2);

  // 21 drivers: the ten core columns plus eleven extras.
  std::istringstream in(text);
  std::ofstream wide(dir / "wide.csv");
  std::string line;
  std::getline(in, line);
  wide << line;
  for (int i = 0; i < 11; ++i) wide << ",extra" << i;
  wide << '\n';
  for (int n = 0; n < 80 && std::getline(in, line); ++n) {
    wide << line;
    for (int i = 0; i < 11; ++i) wide << ',' << (n * 7 + i) % 13;
    wide << '\n';
  }
  wide.close();
  const std::string wide_flags = " --panel " + q(dir / "wide.csv") + " --model " + q(dir / "w.json");
  ASSERT_EQ(cli("--out " + q(dir) + " train --trees 5" + wide_flags).code, 0);
  const auto r = cli("--out " + q(dir) + " shap --method exact" + wide_flags);
  EXPECT_EQ(r.code, 4) << r.out;
  EXPECT_NE(r.out.find("--method path"), std::string::npos);
  EXPECT_EQ(cli("--out " + q(dir) + " shap --method path" + wide_flags).code, 0);
}

TEST(Cli, ArimaSampleForecast) {
  const auto dir = scratch("arima");
  const auto r = cli("--out " + q(dir) + " arima" + kRatio);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("ARIMA("), std::string::npos);
  EXPECT_NE(r.out.find("AICc"), std::string::npos);
  const auto rows = lines_of(slurp(dir / "arima_forecast.csv"));
  ASSERT_EQ(rows.size(), 42u);
  EXPECT_EQ(rows[1], "year,point,lower95,upper95");
  double prev_point = 1e9, prev_half = -1.0;
  for (std::size_t i = 2; i < rows.size(); ++i) {
    int year;
    double p, lo, hi;
    ASSERT_EQ(std::sscanf(rows[i].c_str(), "%d,%lf,%lf,%lf", &year, &p, &lo, &hi), 4);
    EXPECT_EQ(year, 2019 + static_cast<int>(i));
    EXPECT_LT(p, prev_point);
    EXPECT_GT((hi - lo) / 2.0, prev_half);
    prev_point = p;
    prev_half = (hi - lo) / 2.0;
  }
  const auto acf = lines_of(slurp(dir / "acf_pacf.csv"));
  ASSERT_GE(acf.size(), 3u);
  EXPECT_EQ(acf[1], "lag,acf,pacf,acf_diff1,pacf_diff1");
}

TEST(Cli, ArimaOrderOverrideAndHorizon) {
  const auto dir = scratch("arima_order");
  const auto r = cli("--out " + q(dir) + " arima --order 0,1,0 --horizon 5" + kRatio);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("ARIMA(0,1,0)"), std::string::npos);
  EXPECT_EQ(lines_of(slurp(dir / "arima_forecast.csv")).size(), 7u);
  EXPECT_EQ(cli("--out " + q(dir) + " arima --horizon 0" + kRatio).code, 1);
  EXPECT_EQ(cli("--out " + q(dir) + " arima --order 0,0,0" + kRatio).code, 1);
  EXPECT_EQ(cli("--out " + q(dir) + " arima --order x" + kRatio).code, 1);
}

TEST(Cli, PipelineByteIdenticalAndFusion) {
  const auto a = scratch("pipe_a");
  const auto b = scratch("pipe_b");
  const std::string args = " pipeline" + kPanel + kScenario + kRatio + " --trees 60 --fusion";
  const auto ra = cli("--threads 1 --out " + q(a) + args);
  ASSERT_EQ(ra.code, 0) << ra.out;
  ASSERT_EQ(cli("--threads 3 --out " + q(b) + args).code, 0);
  for (const char* f : {"table1.csv", "ratio_forecast.csv", "k_trajectory.csv",
                        "pipeline_run.json"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const auto table = lines_of(slurp(a / "table1.csv"));
  ASSERT_EQ(table.size(), 10u);
  EXPECT_EQ(table[0].rfind("# seed=42 config_hash=", 0), 0u);
  EXPECT_EQ(table[1], "year,ssp126_ej,ssp245_ej,ssp370_ej,ssp585_ej,k");
  EXPECT_EQ(table[9].rfind("2060,", 0), 0u);
  const auto traj = lines_of(slurp(a / "k_trajectory.csv"));
  EXPECT_EQ(traj[0], table[0]);
  EXPECT_EQ(traj.size(), 2u + 41u);

  const auto c = scratch("pipe_c");
  ASSERT_EQ(cli("--out " + q(c) + " pipeline" + kPanel + kScenario + kRatio + " --trees 60")
                .code,
            0);
  EXPECT_FALSE(fs::exists(c / "k_trajectory.csv"));
}

TEST(Cli, PipelineConfigFile) {
  const auto dir = scratch("pipe_cfg");
  json cfg = {{"panel", sample("panel.csv")},
              {"scenario", sample("scenario.csv")},
              {"ratio", sample("ratio.csv")},
              {"seed", 9},
              {"out", dir.string()},
              {"forest", {{"n_trees", 30}}},
              {"forecast_years", {2030, 2060}}};
  std::ofstream(dir / "cfg.json") << cfg.dump();
  const auto r = cli("--config " + q(dir / "cfg.json") + " pipeline");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto table = lines_of(slurp(dir / "table1.csv"));
  EXPECT_EQ(table.size(), 4u);
  EXPECT_EQ(table[0].rfind("# seed=9 ", 0), 0u);
  const auto run = json::parse(slurp(dir / "pipeline_run.json"));
  EXPECT_EQ(run.dump().find("\"n_trees\":30") != std::string::npos, true);

  // A flag beats the config file.
  ASSERT_EQ(cli("--config " + q(dir / "cfg.json") + " --seed 10 pipeline").code, 0);
  EXPECT_EQ(lines_of(slurp(dir / "table1.csv"))[0].rfind("# seed=10 ", 0), 0u);
}

TEST(Cli, PipelineIncompleteScenario) {
  const auto dir = scratch("pipe_gap");
  const std::string text = slurp(sample("scenario.csv"));
  const auto cut = text.find('\n', text.find('\n') + 1);
  std::ofstream(dir / "scen.csv") << text.substr(0, text.find('\n') + 1) << text.substr(cut + 1);
  const auto r = cli("--out " + q(dir) + " pipeline" + kPanel + kRatio + " --scenario " +
                     q(dir / "scen.csv") + " --trees 5");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("missing"), std::string::npos);
}

TEST(Cli, KardashevConversions) {
  auto r = cli("kardashev --ej 939.72");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("K:      0.74742"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("civil365"), std::string::npos);
  r = cli("kardashev --k 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("1.000000e+16 W"), std::string::npos) << r.out;
  r = cli("kardashev --watts 1e6");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("K:      0.00000"), std::string::npos) << r.out;
  r = cli("--year-convention julian kardashev --ej 939.72");
  EXPECT_NE(r.out.find("julian"), std::string::npos);

  EXPECT_EQ(cli("kardashev --ej -5").code, 1);
  EXPECT_EQ(cli("kardashev --watts 0").code, 1);
  EXPECT_EQ(cli("kardashev").code, 1);
  EXPECT_EQ(cli("kardashev --ej 1 --k 1").code, 1);
  EXPECT_EQ(cli("--year-convention lunar kardashev --ej 1").code, 1);
}

TEST(Cli, FusionCommand) {
  const auto dir = scratch("fusion");
  const auto r = cli("--out " + q(dir) + " fusion");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rows = lines_of(slurp(dir / "k_trajectory.csv"));
  ASSERT_EQ(rows.size(), 43u);
  double kf = 0.0, kb = 0.0;
  int year = 0;
  ASSERT_EQ(std::sscanf(rows.back().c_str(), "%d,%lf,%lf", &year, &kf, &kb), 3);
  EXPECT_EQ(year, 2100);
  EXPECT_NEAR(kf, 0.7719, 5e-4);
  EXPECT_NEAR(kb, 0.7534, 5e-4);
  EXPECT_EQ(cli("--out " + q(dir) + " fusion --g-fusion 0.001 --g-baseline 0.002").code, 1);
}

TEST(Cli, JsonMode) {
  auto r = cli_stdout("--json kardashev --ej 939.72");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_NEAR(j.at("k").get<double>(), 0.74741, 1e-5);
  EXPECT_EQ(j.at("year_convention"), "civil365");

  const auto dir = scratch("json");
  r = cli_stdout("--json --out " + q(dir) + " arima" + kRatio);
  ASSERT_EQ(r.code, 0);
  j = json::parse(r.out);
  EXPECT_EQ(j.at("model").at("order").size(), 3u);
  EXPECT_TRUE(j.contains("config_hash"));

  r = cli_stdout("--json validate" + kRatio);
  ASSERT_EQ(r.code, 0);
  EXPECT_NO_THROW(json::parse(r.out));

  r = cli_stdout("--json kardashev --ej -1");
  EXPECT_EQ(r.code, 1);
  j = json::parse(r.out);
  EXPECT_EQ(j.at("error").at("exit_code"), 1);
}
