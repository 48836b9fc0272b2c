// Copyright 2026 The ravine Authors
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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ravine/ravine.hpp"

using namespace ravine;
namespace fs = std::filesystem;

namespace {

const std::string kConfigDir = RAVINE_CONFIG_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("ravine_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RAVINE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, MinimalDefaults) {
  const RunConfig c = parse_config(kConfigDir + "/minimal.ini");
  EXPECT_EQ(c.schedule.kind, "nesterov_offset");
  EXPECT_EQ(c.schedule.alpha, 3.0);
  EXPECT_TRUE(c.schedule.clamp);
  EXPECT_EQ(c.noise.family, "none");
  EXPECT_EQ(c.stepsize.rule, "constant");
  EXPECT_EQ(c.stepsize.s0.value, 1.0);
  EXPECT_TRUE(c.stepsize.s0.per_lipschitz);
  const ravine::Setup s = make_setup(c);
  EXPECT_DOUBLE_EQ(s.options.step.at(1), 1.0 / s.problem.lipschitz());
  EXPECT_TRUE(s.options.noise->is_zero());
  EXPECT_EQ(s.schedule.describe(), "nesterov_offset(alpha=3, clamped)");
  // defaults are echoed by the emitter
  const std::string text = emit_config(c);
  EXPECT_NE(text.find("[noise]"), std::string::npos);
  EXPECT_NE(text.find("family = none"), std::string::npos);
}

TEST(Config, StepAboveBoundNamesL) {
  TempDir d;
  const fs::path p = write_file(d.path(), "c.ini", "[problem]\ndim = 4\n[stepsize]\ns0 = 2/L\n[run]\niterations = 5\n");
  try {
    parse_config(p.string());
    FAIL() << "expected a ConfigError";
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("L ="), std::string::npos) << m;
  }
}

TEST(Config, UnknownKeysAndLineNumbers) {
  EXPECT_THROW(parse_config_text("[problem]\ndim = 4\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[nowhere]\nx = 1\n"), ConfigError);
  try {
    parse_config_text("[problem]\ndim = 4\n\n[run]\niterations = many\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config_text("[run]\niterations = 0\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[run]\nrecord_every = 0\n"), ConfigError);
  EXPECT_THROW(parse_config_text("dim = 4\n"), ConfigError);
}

TEST(Config, RoundTrip) {
  for (const auto& entry : fs::directory_iterator(kConfigDir)) {
    if (entry.path().extension() != ".ini") continue;
    const RunConfig c = read_config_file(entry.path().string());
    const RunConfig back = parse_config_text(emit_config(c));
    EXPECT_TRUE(back == c) << entry.path();
    EXPECT_EQ(emit_config(back), emit_config(c));
  }
}

TEST(RunExperiment, RecordCountAndDeterminism) {
  TempDir d;
  RunConfig c = read_config_file(kConfigDir + "/minimal.ini");
  c.run.iterations = 100;
  c.run.record_every = 10;
  run_experiment(c, d.path(), "a");
  run_experiment(c, d.path(), "b");
  const RunFiles a = run_files(d.path(), "a"), b = run_files(d.path(), "b");
  const std::string body = slurp(a.trace);
  EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 11);
  EXPECT_EQ(body, slurp(b.trace));
  EXPECT_EQ(slurp(a.diagnostics), slurp(b.diagnostics));
  const std::string diag = slurp(a.diagnostics);
  EXPECT_EQ(diag.substr(0, diag.find('\n')), kDiagnosticsHeader);
  EXPECT_EQ(std::count(diag.begin(), diag.end(), '\n'), 11);
  EXPECT_TRUE(fs::exists(a.meta));
  const auto meta = nlohmann::json::parse(slurp(a.meta));
  EXPECT_TRUE(meta.contains("created"));
  for (const auto& f : fs::directory_iterator(d.path())) {
    EXPECT_EQ(f.path().string().find(".partial"), std::string::npos);
  }
}

TEST(RunExperiment, TraceRecordsAreParseableAndFinite) {
  TempDir d;
  RunConfig c = read_config_file(kConfigDir + "/logistic.ini");
  c.run.iterations = 50;
  run_experiment(c, d.path(), "t");
  std::istringstream in(slurp(run_files(d.path(), "t").trace));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(nlohmann::json::parse(line)["format"], "ravine-trace");
  long n = 0;
  while (std::getline(in, line)) {
    const auto rec = nlohmann::json::parse(line);
    ++n;
    EXPECT_EQ(rec["k"].get<long>(), n);
    for (const char* key : {"y", "w", "e", "s", "alpha", "gap", "grad_norm", "step_norm"}) {
      EXPECT_TRUE(rec.contains(key)) << key;
    }
    EXPECT_TRUE(std::isfinite(rec["gap"].get<double>()));
  }
  EXPECT_EQ(n, 50);
}

TEST(RunExperiment, FailureLeavesNoFiles) {
  TempDir d;
  RunConfig c = read_config_file(kConfigDir + "/minimal.ini");
  c.stepsize.s0 = {3.0, true};
  c.run.step_policy = "warn";
  c.run.iterations = 20000;
  EXPECT_THROW(run_experiment(c, d.path(), "bad"), NumericError);
  EXPECT_TRUE(fs::is_empty(d.path()));
}

TEST(RunExperiment, BenchmarkSlope) {
  const RunResult r = execute_run(read_config_file(kConfigDir + "/quadratic_benchmark.ini"));
  ASSERT_TRUE(r.slope.has_value());
  EXPECT_LE(*r.slope, -1.9);
  EXPECT_NE(summary_line(r).find("slope="), std::string::npos);
}

TEST(MonteCarlo, NoNoiseGivesZeroSpread) {
  RunConfig c = read_config_file(kConfigDir + "/minimal.ini");
  c.run.iterations = 50;
  const McSummary m = monte_carlo(c, 5, 100, 2);
  EXPECT_EQ(m.completed, 5);
  for (std::size_t i = 0; i < m.k.size(); ++i) {
    EXPECT_EQ(m.gap_q10[i], m.gap_q90[i]);
    EXPECT_DOUBLE_EQ(m.gap_mean[i], m.gap_median[i]);
    if (std::isfinite(m.drift_halfwidth[i])) {
      EXPECT_LE(m.drift_halfwidth[i], 1e-12 * std::abs(m.drift_mean[i]) + 1e-300);
    }
  }
  EXPECT_THROW(monte_carlo(c, 1, 0), ConfigError);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  RunConfig c = read_config_file(kConfigDir + "/noisy_summable.ini");
  c.run.iterations = 200;
  const McSummary a = monte_carlo(c, 6, 9, 1), b = monte_carlo(c, 6, 9, 3);
  std::ostringstream sa, sb;
  write_mc_summary(sa, a);
  write_mc_summary(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  for (std::size_t i = 0; i < a.k.size(); ++i) {
    EXPECT_LE(a.gap_q10[i], a.gap_median[i]);
    EXPECT_LE(a.gap_median[i], a.gap_q90[i]);
  }
}

TEST(Sweep, EmptyListAndInvalidAxis) {
  const RunConfig c = read_config_file(kConfigDir + "/minimal.ini");
  const auto rows = sweep(c, "schedule.alpha", {});
  EXPECT_TRUE(rows.empty());
  std::ostringstream out;
  write_sweep_csv(out, "schedule.alpha", rows);
  EXPECT_EQ(out.str(), "schedule.alpha,final_gap,slope,k1plus_m,special_class_c,k1_holds\n");
  EXPECT_THROW(sweep(c, "no_such_key", {"1"}), ConfigError);
  EXPECT_THROW(sweep(c, "alpha", {"1"}), ConfigError);  // ambiguous: schedule or ode
  EXPECT_THROW(sweep(c, "diagnostics.energies", {"V"}), ConfigError);
}

TEST(Sweep, AlphaOnBenchmark) {
  RunConfig c = read_config_file(kConfigDir + "/quadratic_benchmark.ini");
  const auto rows = sweep(c, "schedule.alpha", {"3", "5", "10"});
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.slope.has_value());
    EXPECT_LE(*r.slope, -1.9) << r.value;
    ASSERT_TRUE(r.conditions.has_value());
    EXPECT_TRUE(r.conditions->k1_holds);
  }
}

TEST(Sweep, PowerRateOrdering) {
  RunConfig c = read_config_file(kConfigDir + "/power_schedule.ini");
  c.run.iterations = 20000;
  c.diagnostics.rate_window = {100, 20000};
  const auto rows = sweep(c, "schedule.r", {"0.25", "0.5", "0.75"});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(*rows[0].slope, *rows[1].slope);
  EXPECT_GT(*rows[1].slope, *rows[2].slope);
}

TEST(Cli, ExitCodes) {
  TempDir d;
  const std::string minimal = kConfigDir + "/minimal.ini";
  EXPECT_EQ(run_cli("run " + minimal + " --out " + d.path().string()), 0);
  EXPECT_EQ(run_cli("check " + minimal + " --kmax 1000"), 0);
  EXPECT_EQ(run_cli("mc " + minimal + " --reps 3 --seed 1 --out " + d.path().string()), 0);
  EXPECT_EQ(run_cli("sweep " + minimal + " --axis schedule.alpha --values 3,4 --out " + d.path().string()), 0);
  EXPECT_EQ(run_cli("run /nonexistent.ini"), 1);
  const fs::path bad = write_file(d.path(), "bad.ini", "[problem]\ndim = 4\n[stepsize]\ns0 = 2/L\n");
  EXPECT_EQ(run_cli("run " + bad.string()), 1);
  const fs::path diverge = write_file(
      d.path(), "div.ini", "[problem]\ndim = 4\n[stepsize]\ns0 = 3/L\n[run]\niterations = 20000\nstep_policy = warn\n");
  EXPECT_EQ(run_cli("run " + diverge.string() + " --out " + d.path().string()), 2);
  EXPECT_FALSE(fs::exists(d.path() / "div.trace.jsonl"));
  EXPECT_EQ(run_cli("sweep " + minimal + " --axis bogus --values 1"), 1);
  EXPECT_EQ(run_cli("mc " + minimal + " --reps 1 --seed 1"), 1);
}
