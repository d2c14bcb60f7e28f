// Copyright 2026 The ocpshoot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "ocpshoot/bench.hpp"

namespace fs = std::filesystem;

namespace ocpshoot::bench {
namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(OCPSHOOT_CLI) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

using Rows = std::vector<std::map<std::string, std::string>>;

Rows read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::string> header;
  Rows rows;
  auto split = [](const std::string& s) {
    std::vector<std::string> f;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!s.empty() && s.back() == ',') f.emplace_back();
    return f;
  };
  if (!std::getline(in, line)) return rows;
  header = split(line);
  while (std::getline(in, line)) {
    const auto f = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < f.size(); ++i) row[header[i]] = f[i];
    rows.push_back(row);
  }
  return rows;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ocpshoot_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string out(const std::string& sub = "") const { return (dir_ / sub).string(); }
  fs::path dir_;
};

TEST_F(CliTest, ListProblems) {
  const RunResult r = run_cli("list-problems");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "chen1998\nlti-toy\n");
}

TEST_F(CliTest, LtiDdpSolvesInTwoIterations) {
  const RunResult r =
      run_cli("solve --problem lti-toy --method ddp --mode ggn --out " + out());
  ASSERT_EQ(r.status, 0) << r.out;
  const Rows h = read_csv(dir_ / "history_ddp_ggn.csv");
  ASSERT_GE(h.size(), 2u);
  EXPECT_LE(h.size(), 3u);
  EXPECT_LE(std::stod(h.back().at("step_norm")), 1e-12);
}

TEST_F(CliTest, ChenBacktrackingMsHistory) {
  const RunResult r = run_cli("solve --problem chen1998 --method ms --mode ggn "
                              "--line-search backtracking --max-iters 400 --out " + out());
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("converged"), std::string::npos);
  const std::string text = slurp(dir_ / "history_ms_ggn.csv");
  EXPECT_EQ(text.rfind("iter,step_norm,objective,feas_norm,kappa_hat\n", 0), 0u);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  const Rows h = read_csv(dir_ / "history_ms_ggn.csv");
  EXPECT_TRUE(h.front().at("step_norm").empty());
  EXPECT_LE(std::stod(h.back().at("step_norm")), 1e-12);
  // kappa_hat is the ratio of the two latest step norms
  const std::size_t k = h.size() - 1;
  EXPECT_NEAR(std::stod(h[k].at("kappa_hat")),
              std::stod(h[k].at("step_norm")) / std::stod(h[k - 1].at("step_norm")), 1e-12);

  const Rows t = read_csv(dir_ / "trajectory_ms_ggn.csv");
  ASSERT_EQ(t.size(), 21u);
  EXPECT_EQ(std::stod(t[0].at("x0")), 0.42);
  EXPECT_TRUE(t[20].at("u0").empty());
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  for (const char* sub : {"a", "b"}) {
    ASSERT_EQ(run_cli("solve --method all --mode all --init near-solution --seed 3 --out " +
                      out(sub)).status, 0);
    ASSERT_EQ(run_cli("analyze --out " + out(sub)).status, 0);
  }
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / e.path().filename())) << e.path();
    ++files;
  }
  EXPECT_EQ(files, 13);
}

TEST_F(CliTest, Fig1GapsAndControls) {
  ASSERT_EQ(run_cli("reproduce fig1 --out " + out()).status, 0);
  const Rows rows = read_csv(dir_ / "fig1_trajectories.csv");
  ASSERT_EQ(rows.size(), 21u);
  double ms_gap = 0.0, ss_gap = 0.0, du = 0.0;
  for (const auto& r : rows) {
    ms_gap = std::max(ms_gap, std::stod(r.at("ms_gap")));
    ss_gap = std::max(ss_gap, std::stod(r.at("ss_gap")));
    if (!r.at("ms_u0").empty()) du = std::max(du, std::abs(std::stod(r.at("ms_u0")) - std::stod(r.at("ss_u0"))));
  }
  EXPECT_GT(ms_gap, 1e-6);
  EXPECT_LE(ss_gap, 1e-12);
  EXPECT_LE(du, 1e-10);
}

TEST_F(CliTest, Fig2SettledRatesAgree) {
  ASSERT_EQ(run_cli("reproduce fig2 --out " + out()).status, 0);
  const Rows s = read_csv(dir_ / "fig2_summary.csv");
  ASSERT_EQ(s.size(), 6u);
  std::vector<double> ggn;
  for (const auto& r : s) {
    EXPECT_EQ(r.at("termination"), "converged");
    if (r.at("mode") == "ggn") ggn.push_back(std::stod(r.at("kappa_hat_settled")));
    else EXPECT_LT(std::stod(r.at("kappa_hat_settled")), 1e-2);
  }
  ASSERT_EQ(ggn.size(), 3u);
  EXPECT_NEAR(ggn[0], ggn[1], 1e-2);
  EXPECT_NEAR(ggn[0], ggn[2], 1e-2);
  EXPECT_FALSE(read_csv(dir_ / "fig2_kappa_hat.csv").empty());
}

TEST_F(CliTest, Fig3Slopes) {
  ASSERT_EQ(run_cli("reproduce fig3 --out " + out()).status, 0);
  for (const auto& r : read_csv(dir_ / "fig3_fits.csv")) {
    if (r.at("basis") != "distance") continue;
    const double slope = std::stod(r.at("slope"));
    if (r.at("mode") == "ggn") EXPECT_NEAR(slope, 1.0, 0.05) << r.at("method");
    else EXPECT_GE(slope, 1.7) << r.at("method");
  }
  EXPECT_FALSE(read_csv(dir_ / "fig3_step_pairs.csv").empty());
}

TEST_F(CliTest, AnalyzeReport) {
  ASSERT_EQ(run_cli("analyze --out " + out()).status, 0);
  const auto j = nlohmann::json::parse(slurp(dir_ / "contraction_report.json"));
  const double lmi = j.at("kappa_lmi");
  EXPECT_GT(lmi, 0.0);
  EXPECT_LT(lmi, 1.0);
  EXPECT_NEAR(lmi, j.at("kappa_spectral").at("ms").get<double>(), 1e-3);
  EXPECT_EQ(j.at("diagnostics").at("reference_source"), "eh-ms");

  ASSERT_EQ(run_cli("analyze --cost-scale 10 --out " + out("scaled")).status, 0);
  const auto js = nlohmann::json::parse(slurp(dir_ / "scaled" / "contraction_report.json"));
  EXPECT_NEAR(js.at("kappa_lmi").get<double>(), lmi, 1e-10);

  ASSERT_EQ(run_cli("analyze --problem lti-toy --out " + out("lti")).status, 0);
  const auto jl = nlohmann::json::parse(slurp(dir_ / "lti" / "contraction_report.json"));
  EXPECT_EQ(jl.at("kappa_lmi").get<double>(), 0.0);
}

TEST_F(CliTest, InlineProblemFile) {
  write_text_file(dir_ / "p.json",
                  R"({"family": "lti-toy", "A": [[1.0, 0.2], [0.0, 0.9]], "B": [[0.0], [1.0]],
                      "x0": [1.0, -1.0], "horizon": 6})");
  const RunResult r = run_cli("solve --problem " + (dir_ / "p.json").string() +
                              " --method ss --out " + out());
  ASSERT_EQ(r.status, 0) << r.out;
  const Rows t = read_csv(dir_ / "trajectory_ss_ggn.csv");
  ASSERT_EQ(t.size(), 7u);
  EXPECT_EQ(std::stod(t[0].at("x1")), -1.0);
}

TEST_F(CliTest, BadInputsFail) {
  EXPECT_EQ(run_cli("solve --problem nope --out " + out()).status, 2);
  EXPECT_NE(run_cli("solve --method newton --out " + out()).status, 0);
  EXPECT_NE(run_cli("solve --step-tol -1 --out " + out()).status, 0);
  EXPECT_NE(run_cli("solve --x0 1,2,3 --out " + out()).status, 0);
  write_text_file(dir_ / "bad.json", "{\"A\": [[1]]}");
  EXPECT_EQ(run_cli("solve --problem " + (dir_ / "bad.json").string() + " --out " + out()).status,
            2);
  EXPECT_NE(run_cli("reproduce fig9 --out " + out()).status, 0);
}

TEST(Format, Doubles) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_optional(std::nullopt), "");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Config, ValidationAndNames) {
  RunConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.max_iters = -1;
  EXPECT_THROW(cfg.validate(), ConfigurationError);
  cfg = RunConfig{};
  cfg.problem = "nope";
  EXPECT_THROW(cfg.validate(), LookupError);
  EXPECT_EQ(parse_method("ddp"), Method::DDP);
  EXPECT_EQ(parse_mode("eh"), HessianMode::ExactHessian);
  EXPECT_THROW(parse_method("sqp"), ConfigurationError);
  EXPECT_EQ(cmd_list_problems(), registry_names());
}

TEST(Config, LtiSpecParsing) {
  const LtiSpec s = parse_lti_spec(R"({"A": [[0.5]], "B": [[1.0]], "R": [[2.0]]})");
  EXPECT_EQ(s.A(0, 0), 0.5);
  EXPECT_EQ(s.R(0, 0), 2.0);
  EXPECT_EQ(s.N, 10);
  EXPECT_THROW(parse_lti_spec("[1, 2"), ConfigurationError);
  EXPECT_THROW(parse_lti_spec(R"({"family": "chen1998", "A": [[1]], "B": [[1]]})"),
               ConfigurationError);
}

}  // namespace
}  // namespace ocpshoot::bench
