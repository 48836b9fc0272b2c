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

// Command-line front end: run, check, mc, ode-compare, sweep.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ravine/ravine.hpp"

namespace fs = std::filesystem;
using namespace ravine;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (config_detail::trim(text).empty()) return out;
  for (auto& item : config_detail::split(text, ',')) out.push_back(item);
  return out;
}

int cmd_run(const std::string& path, const std::string& out_dir) {
  const RunConfig c = parse_config(path);
  const RunResult r = run_experiment(c, out_dir, stem_of(path));
  std::cout << summary_line(r) << '\n';
  return 0;
}

int cmd_check(const std::string& path, long k_min, long k_max, double tol) {
  const RunConfig c = parse_config(path);
  const Schedule s = build_schedule(c.schedule);
  if (k_max <= 0) k_max = s.first_index() + c.run.iterations;
  const ConditionReport rep = check_conditions(s, std::max(k_min, s.first_index()), k_max, tol);
  std::cout << format_report(rep, s);
  std::cout << to_json(rep).dump() << '\n';
  return 0;
}

int cmd_mc(const std::string& path, long reps, std::uint64_t seed, const std::string& out_dir,
           unsigned threads) {
  const RunConfig c = parse_config(path);
  const McSummary m = monte_carlo(c, reps, seed, threads);
  const std::string stem = stem_of(path);
  OutputFile summary(fs::path(out_dir) / (stem + ".mc_summary.csv"));
  write_mc_summary(summary.stream(), m);
  OutputFile status(fs::path(out_dir) / (stem + ".mc_replications.csv"));
  status.stream() << "seed,status,reason\n";
  for (std::size_t i = 0; i < m.missing_seeds.size(); ++i) {
    std::string reason = m.missing_reasons[i];
    for (char& ch : reason) {
      if (ch == ',' || ch == '\n') ch = ' ';
    }
    status.stream() << m.missing_seeds[i] << ",missing," << reason << '\n';
  }
  summary.commit();
  status.commit();
  const long first = m.k.front();
  const long last = m.k.back();
  std::string slope = "n/a";
  try {
    slope = num(rate_slope(m.gap_median, first, std::max(first, last / 10), last));
  } catch (const ContractViolation&) {
  }
  std::cout << "replications=" << m.completed << "/" << m.replications
            << " final_median_gap=" << num(m.gap_median.back()) << " median_slope=" << slope
            << '\n';
  return m.completed == m.replications ? 0 : kExitNumeric;
}

int cmd_ode(const std::string& path, const std::string& s_values, std::optional<double> offset,
            const std::string& out_dir) {
  const RunConfig c = parse_config(path);
  std::vector<double> ss = c.ode.s_values;
  if (!s_values.empty()) ss = config_detail::to_doubles(s_values, "--s-values", 0);
  const auto rows = ode_compare(c, ss, offset.value_or(c.ode.offset));
  const std::string stem = stem_of(path);
  std::vector<std::unique_ptr<OutputFile>> files;
  files.push_back(std::make_unique<OutputFile>(fs::path(out_dir) / (stem + ".ode_compare.csv")));
  write_ode_compare_csv(files.back()->stream(), rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    files.push_back(std::make_unique<OutputFile>(
        fs::path(out_dir) / (stem + ".trajectory_" + std::to_string(i) + ".csv")));
    write_trajectory_csv(files.back()->stream(), rows[i].trajectory);
  }
  for (auto& f : files) f->commit();
  for (const auto& r : rows) {
    std::cout << "s=" << num(r.s) << " offset=" << num(r.offset) << " sup_error=" << num(r.highres.sup)
              << " sup_error_igs=" << num(r.igs.sup) << '\n';
  }
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& axis, const std::string& values,
              const std::string& out_dir) {
  const RunConfig c = parse_config(path);
  const auto rows = sweep(c, axis, split_list(values));
  OutputFile out(fs::path(out_dir) / (stem_of(path) + ".sweep.csv"));
  write_sweep_csv(out.stream(), axis, rows);
  out.commit();
  write_sweep_csv(std::cout, axis, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nesterov and Ravine accelerated gradient experiments"};
  app.require_subcommand(1);
  std::string config, out_dir = ".";

  auto* run = app.add_subcommand("run", "run one config; write trace and diagnostics");
  run->add_option("config", config, "experiment config")->required();
  run->add_option("--out", out_dir, "output directory");

  long k_min = 1, k_max = 0;
  double tol = 1e-12;
  auto* check = app.add_subcommand("check", "certify schedule conditions over a range");
  check->add_option("config", config)->required();
  check->add_option("--kmin", k_min, "first k");
  check->add_option("--kmax", k_max, "last k (default: first index + iterations)");
  check->add_option("--tol", tol, "series tolerance");

  long reps = 200;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  auto* mc = app.add_subcommand("mc", "seeded Monte Carlo replications");
  mc->add_option("config", config)->required();
  mc->add_option("--reps", reps, "replication count")->required();
  mc->add_option("--seed", seed, "base seed; replications use seed+1..seed+R")->required();
  mc->add_option("--threads", threads, "worker threads (default: all cores)");
  mc->add_option("--out", out_dir, "output directory");

  std::string s_values;
  std::optional<double> offset;
  auto* ode = app.add_subcommand("ode-compare", "discrete iterates against ODE trajectories");
  ode->add_option("config", config)->required();
  ode->add_option("--s-values", s_values, "comma-separated step sizes");
  ode->add_option("--offset", offset, "grid offset c in tau_k = (k + c) h");
  ode->add_option("--out", out_dir, "output directory");

  std::string axis, values;
  auto* sw = app.add_subcommand("sweep", "one run per value of a config key");
  sw->add_option("config", config)->required();
  sw->add_option("--axis", axis, "key, as section.key or a unique bare key")->required();
  sw->add_option("--values", values, "comma-separated values")->required();
  sw->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out_dir);
    if (*check) return cmd_check(config, k_min, k_max, tol);
    if (*mc) return cmd_mc(config, reps, seed, out_dir, threads);
    if (*ode) return cmd_ode(config, s_values, offset, out_dir);
    if (*sw) return cmd_sweep(config, axis, values, out_dir);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
