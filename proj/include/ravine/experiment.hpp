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

#ifndef RAVINE_EXPERIMENT_HPP_
#define RAVINE_EXPERIMENT_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "ravine/config.hpp"
#include "ravine/core.hpp"
#include "ravine/errors.hpp"
#include "ravine/io.hpp"
#include "ravine/lyapunov.hpp"
#include "ravine/noise.hpp"
#include "ravine/ode.hpp"
#include "ravine/problems.hpp"
#include "ravine/schedules.hpp"

namespace ravine {

namespace experiment_detail {

inline Matrix parse_rows(const std::vector<std::vector<double>>& rows, const std::string& what) {
  if (rows.empty()) throw ConfigError(what + ": no data");
  const auto cols = rows.front().size();
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw ConfigError(what + ": ragged rows");
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return m;
}

inline Matrix inline_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : config_detail::split(text, ';')) {
    if (!row.empty()) rows.push_back(config_detail::to_doubles(row, "problem.matrix", 0));
  }
  return parse_rows(rows, "problem.matrix");
}

inline Vector inline_vector(const std::string& text) {
  const auto xs = config_detail::to_doubles(text, "problem.vector", 0);
  return Eigen::Map<const Vector>(xs.data(), static_cast<Index>(xs.size()));
}

inline Matrix file_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double x;
    while (ls >> x) row.push_back(x);
    if (!ls.eof()) throw ConfigError("malformed number in '" + path + "'");
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return parse_rows(rows, path);
}

inline Vector file_vector(const std::string& path) {
  const Matrix m = file_matrix(path);
  return Eigen::Map<const Vector>(m.data(), m.size());
}

}  // namespace experiment_detail

inline Vector generator_spectrum(const ProblemConfig& p) {
  const double hi = p.spectrum_range[0], lo = p.spectrum_range[1];
  if (p.spectrum == "log") return log_spectrum(p.dim, hi, lo);
  Vector out(p.dim);
  for (Index i = 0; i < p.dim; ++i) out[i] = hi * std::pow(static_cast<double>(i + 1), -p.spectrum_power);
  return out;
}

/// Minimizer for generated quadratics. "profile" gives components
/// lambda_i^((beta-1)/2)/sqrt(dim), so that from x0 = 0 the share of the
/// initial gap below eigenvalue eps scales like eps^beta.
inline Vector generator_minimizer(const ProblemConfig& p, const Vector& spectrum) {
  if (p.minimizer == "zero") return Vector::Zero(p.dim);
  if (p.minimizer == "ones") return Vector::Ones(p.dim);
  if (p.minimizer == "profile") {
    Vector m(p.dim);
    for (Index i = 0; i < p.dim; ++i) {
      m[i] = std::pow(spectrum[i], 0.5 * (p.profile_beta - 1.0)) / std::sqrt(static_cast<double>(p.dim));
    }
    return m;
  }
  return standard_normal(p.dim, mix_keys(p.seed, 0x313u));
}

inline Problem build_problem(const RunConfig& c) {
  namespace ed = experiment_detail;
  const ProblemConfig& p = c.problem;
  try {
    if (p.source == "generator") {
      if (p.kind == "quadratic") {
        const Vector spectrum = generator_spectrum(p);
        return make_quadratic(spectrum, generator_minimizer(p, spectrum), p.rotate, p.seed);
      }
      if (p.kind == "least_squares") {
        const Index rank = p.rank > 0 ? p.rank : std::min<Index>(p.samples, p.dim);
        return make_least_squares(p.samples, p.dim, rank, p.seed);
      }
      return make_logistic(p.samples, p.dim, p.ridge, p.seed);
    }
    Matrix m;
    Vector v;
    if (p.source == "inline") {
      m = ed::inline_matrix(p.matrix);
      v = ed::inline_vector(p.vector);
    } else {
      m = ed::file_matrix(c.base_dir + p.matrix_file);
      v = ed::file_vector(c.base_dir + p.vector_file);
    }
    if (p.kind == "quadratic") return Problem::quadratic(m, v);
    if (p.kind == "least_squares") return Problem::least_squares(m, v);
    return Problem::logistic_regression(m, v, p.ridge);
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

inline Schedule build_schedule(const ScheduleConfig& s) {
  try {
    if (s.kind == "nesterov_offset") return Schedule::nesterov_offset(s.alpha, s.clamp);
    if (s.kind == "nesterov_ratio") return Schedule::nesterov_ratio(s.alpha);
    if (s.kind == "power") return Schedule::power(s.alpha, s.r, s.clamp);
    return Schedule::constant(s.alpha);
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
}

/// Noise stream seed: noise.seed combined with the run seed, so Monte Carlo
/// replications differ while one config stays reproducible.
inline NoiseModel build_noise(const RunConfig& c, Index dim) {
  const NoiseConfig& n = c.noise;
  if (n.family == "none") return NoiseModel::none(dim);
  try {
    const SigmaSchedule sched = n.schedule == "constant" ? SigmaSchedule::constant(n.sigma0)
                                                         : SigmaSchedule::polynomial(n.sigma0, n.p);
    return NoiseModel::gaussian(dim, sched, mix_keys(n.seed, c.run.seed));
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
}

inline StepSize build_step(const RunConfig& c, double lipschitz) {
  const double s0 = c.stepsize.s0.resolve(lipschitz);
  if (s0 * lipschitz > 1.0 + kStepBoundSlack && c.run.step_policy == "enforce") {
    throw ConfigError("stepsize.s0 = " + num(s0) + " exceeds the bound 1/L = " +
                      num(1.0 / lipschitz) + " (L = " + num(lipschitz) + ")");
  }
  return c.stepsize.rule == "constant" ? StepSize::constant(s0) : StepSize::polynomial(s0, c.stepsize.d);
}

inline Vector build_x0(const RunConfig& c, Index dim) {
  if (c.run.x0 == "ones") return Vector::Ones(dim);
  if (c.run.x0 == "zeros") return Vector::Zero(dim);
  const auto xs = config_detail::to_doubles(c.run.x0, "run.x0", 0);
  if (static_cast<Index>(xs.size()) != dim) {
    throw ConfigError("run.x0 has " + std::to_string(xs.size()) + " entries, problem dim is " +
                      std::to_string(dim));
  }
  return Eigen::Map<const Vector>(xs.data(), dim);
}

/// Reads, normalizes and validates a config, including the step bound
/// against the problem's L.
inline RunConfig parse_config(const std::string& path) {
  RunConfig c = read_config_file(path);
  const Problem problem = build_problem(c);
  build_step(c, problem.lipschitz());
  build_schedule(c.schedule);
  build_noise(c, problem.dim());
  build_x0(c, problem.dim());
  return c;
}

struct Setup {
  Problem problem;
  Schedule schedule;
  RunOptions options;
};

inline Setup make_setup(const RunConfig& c) {
  Problem problem = build_problem(c);
  Schedule schedule = build_schedule(c.schedule);
  RunOptions o;
  o.method = c.run.method == "nag" ? Method::nag : Method::rag;
  o.schedule = schedule;
  o.step = build_step(c, problem.lipschitz());
  o.noise = build_noise(c, problem.dim());
  o.iterations = c.run.iterations;
  o.x0 = build_x0(c, problem.dim());
  o.policy = c.run.step_policy == "enforce" ? StepBoundPolicy::enforce : StepBoundPolicy::warn;
  o.config_hash = fnv1a(emit_config(c));
  o.seed = c.run.seed;
  return {std::move(problem), std::move(schedule), std::move(o)};
}

/// t accessor for schedules whose t-series diverges: every value is NaN.
struct MissingT {
  double operator()(long) const { return std::numeric_limits<double>::quiet_NaN(); }
};

struct RunResult {
  Trace trace;
  DiagnosticsSeries diagnostics;
  bool t_available = true;
  double final_gap = 0.0;
  std::optional<double> slope;
  long window_lo = 0;
  long window_hi = 0;
};

inline std::pair<long, long> rate_window(const RunConfig& c, long first, long last) {
  if (!c.diagnostics.rate_window.empty()) {
    return {c.diagnostics.rate_window[0], c.diagnostics.rate_window[1]};
  }
  return {std::max(first, last / 10), last};
}

inline RunResult execute_run(const RunConfig& c) {
  Setup setup = make_setup(c);
  RunResult r;
  r.trace = run(setup.problem, setup.options);
  const Trace& t = r.trace;
  try {
    const TSequence ts(setup.schedule, t.first(), t.last() + 2);
    r.diagnostics = compute_diagnostics(t, ts, setup.problem);
  } catch (const NonConvergence&) {
    r.t_available = false;
    r.diagnostics = compute_diagnostics(t, MissingT{}, setup.problem);
  }
  r.final_gap = t.gap(t.last());
  std::tie(r.window_lo, r.window_hi) = rate_window(c, t.first(), t.last());
  try {
    r.slope = rate_slope(t.gaps(), t.first(), r.window_lo, r.window_hi);
  } catch (const ContractViolation&) {
    r.slope = std::nullopt;
  }
  return r;
}

inline std::string summary_line(const RunResult& r) {
  std::ostringstream o;
  o << "final_gap=" << num(r.final_gap) << " slope=" << (r.slope ? num(*r.slope) : "n/a")
    << " window=[" << r.window_lo << "," << r.window_hi << "]";
  return o.str();
}

struct RunFiles {
  std::filesystem::path trace;
  std::filesystem::path meta;
  std::filesystem::path diagnostics;
};

inline RunFiles run_files(const std::filesystem::path& out_dir, const std::string& stem) {
  return {out_dir / (stem + ".trace.jsonl"), out_dir / (stem + ".trace.meta.json"),
          out_dir / (stem + ".diagnostics.csv")};
}

/// Runs one config and writes trace, sidecar metadata and diagnostics.
/// Nothing is left behind if any step fails.
inline RunResult run_experiment(const RunConfig& c, const std::filesystem::path& out_dir,
                                const std::string& stem) {
  RunResult r = execute_run(c);
  const RunFiles files = run_files(out_dir, stem);
  const Schedule schedule = build_schedule(c.schedule);
  OutputFile trace_out(files.trace);
  write_trace_jsonl(trace_out.stream(), r.trace, c.run.record_every, schedule.describe());
  OutputFile diag_out(files.diagnostics);
  auto wants = [&](const char* e) {
    return std::find(c.diagnostics.energies.begin(), c.diagnostics.energies.end(), e) !=
           c.diagnostics.energies.end();
  };
  write_diagnostics_csv(diag_out.stream(), r.diagnostics, r.trace.first(), c.run.record_every,
                        wants("V"), wants("W"), wants("E"));
  OutputFile meta_out(files.meta);
  nlohmann::ordered_json meta;
  meta["created"] = utc_timestamp();
  meta["config_hash"] = hex64(r.trace.meta().config_hash);
  meta["seed"] = r.trace.meta().seed;
  meta["method"] = to_string(r.trace.method());
  meta["iterations"] = r.trace.size();
  meta["record_every"] = c.run.record_every;
  meta["t_available"] = r.t_available;
  meta["final_gap"] = r.final_gap;
  meta["slope"] = r.slope ? nlohmann::json(*r.slope) : nlohmann::json(nullptr);
  meta["window"] = {r.window_lo, r.window_hi};
  meta["config"] = emit_config(c);
  meta_out.stream() << meta.dump(2) << '\n';
  trace_out.commit();
  diag_out.commit();
  meta_out.commit();
  return r;
}

/// Type-7 quantile of an unsorted sample.
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

struct McSummary {
  long replications = 0;
  long completed = 0;
  std::vector<std::uint64_t> missing_seeds;
  std::vector<std::string> missing_reasons;
  std::vector<long> k;
  std::vector<double> gap_mean, gap_median, gap_q10, gap_q90;
  std::vector<double> grad_mean, grad_median, grad_q10, grad_q90;
  // V_{k+1} - V_k averaged over replications, its std/sqrt(R), and the
  // variance allowance 4 s_k^2 t_k^2 sigma_k^2.
  std::vector<double> drift_mean, drift_halfwidth, drift_bound;
};

/// R replications with run seeds base_seed + 1 .. base_seed + R, executed
/// concurrently; the summary is independent of thread scheduling.
inline McSummary monte_carlo(const RunConfig& config, long R, std::uint64_t base_seed,
                             unsigned threads = 0) {
  if (R < 2) throw ConfigError("monte carlo needs at least 2 replications");
  struct Rep {
    bool ok = false;
    std::string reason;
    std::vector<double> gap, grad, V;
  };
  std::vector<Rep> reps(static_cast<std::size_t>(R));
  const Setup base = make_setup(config);
  std::optional<TSequence> ts;
  try {
    ts.emplace(base.schedule, base.schedule.first_index(),
               base.schedule.first_index() + config.run.iterations + 1);
  } catch (const NonConvergence&) {
  }

  std::atomic<long> next{0};
  auto worker = [&] {
    for (long i; (i = next.fetch_add(1)) < R;) {
      Rep& rep = reps[static_cast<std::size_t>(i)];
      RunConfig c = config;
      c.run.seed = base_seed + static_cast<std::uint64_t>(i) + 1;
      try {
        Setup s = make_setup(c);
        const Trace t = run(s.problem, s.options);
        rep.gap = t.gaps();
        rep.grad = t.grad_norms();
        if (ts) {
          for (long k = t.first(); k <= t.last(); ++k) rep.V.push_back(energy_V(t, *ts, s.problem, k));
        }
        rep.ok = true;
      } catch (const std::exception& e) {
        rep.reason = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<void>> pool;
  for (unsigned w = 0; w < std::min<unsigned>(threads, static_cast<unsigned>(R)); ++w) {
    pool.push_back(std::async(std::launch::async, worker));
  }
  for (auto& f : pool) f.get();

  McSummary m;
  m.replications = R;
  for (long i = 0; i < R; ++i) {
    const Rep& rep = reps[static_cast<std::size_t>(i)];
    if (rep.ok) {
      ++m.completed;
    } else {
      m.missing_seeds.push_back(base_seed + static_cast<std::uint64_t>(i) + 1);
      m.missing_reasons.push_back(rep.reason);
    }
  }
  const long first = base.schedule.first_index();
  const long K = config.run.iterations;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> gaps, grads, drifts;
  for (long j = 0; j < K; ++j) {
    const long k = first + j;
    gaps.clear();
    grads.clear();
    drifts.clear();
    for (const Rep& rep : reps) {
      if (!rep.ok) continue;
      const auto u = static_cast<std::size_t>(j);
      gaps.push_back(rep.gap[u]);
      grads.push_back(rep.grad[u]);
      if (!rep.V.empty() && u + 1 < rep.V.size()) drifts.push_back(rep.V[u + 1] - rep.V[u]);
    }
    auto mean = [](const std::vector<double>& xs) {
      double s = 0.0;
      for (double x : xs) s += x;
      return xs.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(xs.size());
    };
    m.k.push_back(k);
    m.gap_mean.push_back(mean(gaps));
    m.gap_median.push_back(quantile(gaps, 0.5));
    m.gap_q10.push_back(quantile(gaps, 0.1));
    m.gap_q90.push_back(quantile(gaps, 0.9));
    m.grad_mean.push_back(mean(grads));
    m.grad_median.push_back(quantile(grads, 0.5));
    m.grad_q10.push_back(quantile(grads, 0.1));
    m.grad_q90.push_back(quantile(grads, 0.9));
    if (drifts.size() >= 2) {
      const double mu = mean(drifts);
      double var = 0.0;
      for (double d : drifts) var += (d - mu) * (d - mu);
      var /= static_cast<double>(drifts.size() - 1);
      m.drift_mean.push_back(mu);
      m.drift_halfwidth.push_back(std::sqrt(var / static_cast<double>(drifts.size())));
    } else {
      m.drift_mean.push_back(nan);
      m.drift_halfwidth.push_back(nan);
    }
    if (ts && j + 1 < K) {
      const double s = base.options.step.at(k), tk = (*ts)(k);
      const double sigma = base.options.noise->sigma(k);
      m.drift_bound.push_back(4.0 * s * s * tk * tk * sigma * sigma);
    } else {
      m.drift_bound.push_back(nan);
    }
  }
  return m;
}

inline void write_mc_summary(std::ostream& out, const McSummary& m) {
  out << "k,gap_mean,gap_median,gap_q10,gap_q90,grad_mean,grad_median,grad_q10,grad_q90,"
         "drift_mean,drift_halfwidth,drift_bound\n";
  for (std::size_t i = 0; i < m.k.size(); ++i) {
    out << m.k[i] << ',' << num(m.gap_mean[i]) << ',' << num(m.gap_median[i]) << ','
        << num(m.gap_q10[i]) << ',' << num(m.gap_q90[i]) << ',' << num(m.grad_mean[i]) << ','
        << num(m.grad_median[i]) << ',' << num(m.grad_q10[i]) << ',' << num(m.grad_q90[i])
        << ',' << num(m.drift_mean[i]) << ',' << num(m.drift_halfwidth[i]) << ','
        << num(m.drift_bound[i]) << '\n';
  }
}

struct SweepRow {
  std::string value;
  double final_gap = 0.0;
  std::optional<double> slope;
  std::optional<ConditionReport> conditions;
};

inline std::optional<ConditionReport> try_check_conditions(const Schedule& schedule, long k_min,
                                                           long k_max, double tol) {
  try {
    return check_conditions(schedule, k_min, k_max, tol);
  } catch (const NonConvergence&) {
    return std::nullopt;
  }
}

/// One run per axis value; the axis must name a scalar key.
inline std::vector<SweepRow> sweep(const RunConfig& base, const std::string& axis,
                                   const std::vector<std::string>& values) {
  const auto [section, key] = resolve_axis(axis);
  std::vector<SweepRow> rows;
  for (const auto& v : values) {
    RunConfig c = base;
    apply_setting(c, section, key, v);
    validate_basic(c);
    const RunResult r = execute_run(c);
    SweepRow row;
    row.value = v;
    row.final_gap = r.final_gap;
    row.slope = r.slope;
    const Schedule sch = build_schedule(c.schedule);
    row.conditions = try_check_conditions(sch, sch.first_index(), r.trace.last(), 1e-12);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::string& axis,
                            const std::vector<SweepRow>& rows) {
  out << axis << ",final_gap,slope,k1plus_m,special_class_c,k1_holds\n";
  for (const auto& r : rows) {
    out << r.value << ',' << num(r.final_gap) << ',' << (r.slope ? num(*r.slope) : "") << ','
        << (r.conditions ? num(r.conditions->k1plus_m) : "") << ','
        << (r.conditions ? num(r.conditions->special_class_c) : "") << ','
        << (r.conditions ? (r.conditions->k1_holds ? "true" : "false") : "") << '\n';
  }
}

inline DampingFunction build_damping(const OdeConfig& o) {
  try {
    return o.damping == "alpha_over_t" ? DampingFunction::alpha_over_t(o.alpha, o.t_min)
                                       : DampingFunction::constant(o.gamma0, o.t_min);
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("ode: ") + e.what());
  }
}

struct OdeComparison {
  double s = 0.0;
  double h = 0.0;
  double offset = 0.0;
  long k0 = 0;
  ErrorProfile highres;
  ErrorProfile igs;
  Trajectory trajectory;
};

/// RAG with gamma_k = 1 - h gamma((k+1)h) against the high-resolution ODE
/// (and the plain inertial system) sampled at tau_k = (k + c)h. The run
/// starts at the first k whose tau_k and (k+1)h lie in the damping's
/// domain; both the run and the ODE start there from x0 at rest.
inline OdeComparison ode_compare_one(const Problem& problem, const DampingFunction& damping,
                                     const Vector& x0, double s, double offset_c, double horizon) {
  const double h = std::sqrt(s);
  long k0 = 1;
  while (static_cast<double>(k0 + 1) * h < damping.t_min ||
         (static_cast<double>(k0) + offset_c) * h < damping.t_min) {
    ++k0;
  }
  const double tau0 = (static_cast<double>(k0) + offset_c) * h;
  if (!(horizon > tau0)) throw ConfigError("ode.horizon must exceed the first grid time");
  const long k_end = static_cast<long>(std::floor(horizon / h - offset_c));
  const long iterations = std::max(1L, k_end - k0 + 1);
  const Trace trace = run_with_coefficients(
      problem, Method::rag, [&](long k) { return discretize_gamma(damping, h, k); },
      StepSize::constant(s), NoiseModel::none(problem.dim()), iterations, x0, k0);
  const Vector v0 = Vector::Zero(problem.dim());
  OdeComparison out;
  out.s = s;
  out.h = h;
  out.offset = offset_c;
  out.k0 = k0;
  out.trajectory = integrate_highres(problem, damping, s, x0, v0, default_h_int(h), horizon, tau0);
  const Trajectory igs = integrate_igs(problem, damping, x0, v0, default_h_int(h), horizon, tau0);
  out.highres = compare_discrete_continuous(trace, out.trajectory, offset_c, h, horizon);
  out.igs = compare_discrete_continuous(trace, igs, offset_c, h, horizon);
  return out;
}

inline std::vector<OdeComparison> ode_compare(const RunConfig& c, const std::vector<double>& s_values,
                                              double offset_c) {
  const Problem problem = build_problem(c);
  const DampingFunction damping = build_damping(c.ode);
  const Vector x0 = build_x0(c, problem.dim());
  std::vector<OdeComparison> out;
  for (double s : s_values) {
    if (s * problem.lipschitz() > 1.0 + kStepBoundSlack) {
      throw ConfigError("ode: s = " + num(s) + " exceeds 1/L = " + num(1.0 / problem.lipschitz()));
    }
    out.push_back(ode_compare_one(problem, damping, x0, s, offset_c, c.ode.horizon));
  }
  return out;
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const Index d = traj.positions.empty() ? 0 : traj.positions.front().size();
  out << "tau";
  for (Index i = 1; i <= d; ++i) out << ",y_" << i;
  for (Index i = 1; i <= d; ++i) out << ",v_" << i;
  out << '\n';
  for (std::size_t j = 0; j < traj.tau.size(); ++j) {
    out << num(traj.tau[j]);
    for (Index i = 0; i < d; ++i) out << ',' << num(traj.positions[j][i]);
    for (Index i = 0; i < d; ++i) out << ',' << num(traj.velocities[j][i]);
    out << '\n';
  }
}

inline void write_ode_compare_csv(std::ostream& out, const std::vector<OdeComparison>& rows) {
  out << "s,h,offset,k0,points,sup_error_highres,sup_error_igs\n";
  for (const auto& r : rows) {
    out << num(r.s) << ',' << num(r.h) << ',' << num(r.offset) << ',' << r.k0 << ','
        << r.highres.k.size() << ',' << num(r.highres.sup) << ',' << num(r.igs.sup) << '\n';
  }
}

inline nlohmann::ordered_json to_json(const ConditionReport& r) {
  auto f = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  nlohmann::ordered_json j;
  j["k_min"] = r.k_min;
  j["k_max"] = r.k_max;
  j["tol"] = r.tol;
  j["k0_converges"] = r.k0_converges;
  j["k0_terms"] = r.k0_terms;
  j["k0_last_product"] = f(r.k0_last_product);
  j["k1_holds"] = r.k1_holds;
  j["k1_holds_up_to"] = r.k1_holds_up_to;
  j["k1plus_m"] = f(r.k1plus_m);
  j["special_class_c"] = f(r.special_class_c);
  j["special_class_c_tail"] = f(r.special_class_c_tail);
  j["bound_violation"] = f(r.bound_violation);
  j["asymptote_ratio"] = f(r.asymptote_ratio);
  return j;
}

inline std::string format_report(const ConditionReport& r, const Schedule& s) {
  std::ostringstream o;
  auto line = [&](const char* name, const std::string& value) {
    o << "  " << name;
    for (std::size_t i = std::string(name).size(); i < 22; ++i) o << ' ';
    o << value << '\n';
  };
  o << "schedule " << s.describe() << ", k in [" << r.k_min << ", " << r.k_max << "]\n";
  line("K0 series", r.k0_terms == 0 ? std::string("converges (closed form)")
                                    : "converged (" + std::to_string(r.k0_terms) +
                                          " terms, last product " + num(r.k0_last_product) + ")");
  line("K1", r.k1_holds ? "holds on range"
                        : "fails; holds up to k = " + std::to_string(r.k1_holds_up_to));
  line("K1+ m", num(r.k1plus_m) + (r.k1plus_m < 1.0 ? " (< 1)" : " (>= 1)"));
  line("special-class c", num(r.special_class_c) + " (tail " + num(r.special_class_c_tail) + ")");
  line("bound violation", std::isfinite(r.bound_violation) ? num(r.bound_violation) : "n/a (c >= 1)");
  line("asymptote ratio", num(r.asymptote_ratio));
  return o.str();
}

}  // namespace ravine

#endif  // RAVINE_EXPERIMENT_HPP_
