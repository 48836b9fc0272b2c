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

#ifndef RAVINE_CORE_HPP_
#define RAVINE_CORE_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ravine/errors.hpp"
#include "ravine/linalg.hpp"
#include "ravine/noise.hpp"
#include "ravine/problems.hpp"
#include "ravine/schedules.hpp"

namespace ravine {

/// s_k = s0 (constant) or s0 / k^d (polynomial, d >= 0).
struct StepSize {
  enum class Rule { constant, polynomial };
  Rule rule = Rule::constant;
  double s0 = 0.0;
  double d = 0.0;

  static StepSize constant(double s0) { return {Rule::constant, s0, 0.0}; }
  static StepSize polynomial(double s0, double d) {
    if (!(d >= 0.0)) throw ContractViolation("step size: d must be >= 0");
    return {Rule::polynomial, s0, d};
  }

  double at(long k) const {
    if (rule == Rule::constant || d == 0.0) return s0;
    return s0 / std::pow(static_cast<double>(k), d);
  }
  bool is_constant() const { return rule == Rule::constant || d == 0.0; }

  friend bool operator==(const StepSize&, const StepSize&) = default;
};

// warn reports an oversized step on stderr; ignore skips the bound check.
enum class StepBoundPolicy { enforce, warn, ignore };
enum class Method { nag, rag };

inline const char* to_string(Method m) { return m == Method::nag ? "nag" : "rag"; }

inline constexpr double kStepBoundSlack = 1e-12;

inline void check_step(double s, double lipschitz, StepBoundPolicy policy) {
  if (!(s > 0.0) || !std::isfinite(s)) throw ContractViolation("step size must be positive");
  if (policy != StepBoundPolicy::ignore && s * lipschitz > 1.0 + kStepBoundSlack) {
    const std::string msg = "step size " + std::to_string(s) + " exceeds 1/L = " +
                            std::to_string(1.0 / lipschitz) + " (L = " +
                            std::to_string(lipschitz) + ")";
    if (policy == StepBoundPolicy::enforce) throw ContractViolation(msg);
    std::cerr << "warning: " << msg << '\n';
  }
}

inline void check_coefficient(double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw ContractViolation("extrapolation coefficient " + std::to_string(c) +
                            " outside [0, 1]");
  }
}

struct NagState {
  long k = 1;
  Vector x_prev;
  Vector x;

  static NagState start(const Vector& x0, long k = 1) { return {k, x0, x0}; }
};

struct RagState {
  long k = 1;
  Vector w_prev;
  Vector y;

  static RagState start(const Vector& y0, long k = 1) { return {k, y0, y0}; }
};

/// One step's worth of data. For NAG, w is x_{k+1}; coeff is alpha_k.
/// For RAG, coeff is gamma_k.
struct StepRecord {
  long k = 0;
  Vector y;
  Vector w;
  Vector grad;   // grad f(y_k), without the error
  Vector error;  // e_k as sampled
  double s = 0.0;
  double coeff = 0.0;
};

inline std::pair<NagState, StepRecord> nag_step(const NagState& state, double alpha_k,
                                                double s_k, const Problem& problem,
                                                const NoiseModel& noise,
                                                StepBoundPolicy policy = StepBoundPolicy::enforce) {
  check_step(s_k, problem.lipschitz(), policy);
  check_coefficient(alpha_k);
  StepRecord rec;
  rec.k = state.k;
  rec.s = s_k;
  rec.coeff = alpha_k;
  rec.y = state.x + alpha_k * (state.x - state.x_prev);
  rec.grad = problem.gradient(rec.y);
  rec.error = noise.sample(state.k);
  rec.w = rec.y - s_k * (rec.grad + rec.error);
  return {NagState{state.k + 1, state.x, rec.w}, std::move(rec)};
}

inline std::pair<RagState, StepRecord> rag_step(const RagState& state, double gamma_k,
                                                double s_k, const Problem& problem,
                                                const NoiseModel& noise,
                                                StepBoundPolicy policy = StepBoundPolicy::enforce) {
  check_step(s_k, problem.lipschitz(), policy);
  check_coefficient(gamma_k);
  StepRecord rec;
  rec.k = state.k;
  rec.s = s_k;
  rec.coeff = gamma_k;
  rec.y = state.y;
  rec.grad = problem.gradient(rec.y);
  rec.error = noise.sample(state.k);
  rec.w = rec.y - s_k * (rec.grad + rec.error);
  Vector y_next = rec.w + gamma_k * (rec.w - state.w_prev);
  return {RagState{state.k + 1, rec.w, std::move(y_next)}, std::move(rec)};
}

/// Contiguous record of a run over k = first .. last.
///
/// Both methods store y_k and w_k = y_k - s_k(grad f(y_k) + e_k), plus
/// w_{first-1}, the starting point. For NAG w_k is x_{k+1}; for RAG it is
/// the Nesterov iterate of the equivalent run. Either way x_k = w_{k-1}.
class Trace {
 public:
  Trace() = default;
  Trace(Method method, Index dim, long first, const Vector& start)
      : method_(method), dim_(dim), first_(first) {
    require_dim(start, dim, "trace start");
    ws_.assign(start.data(), start.data() + dim);
  }

  struct Meta {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
  };

  Method method() const { return method_; }
  Index dim() const { return dim_; }
  long first() const { return first_; }
  long last() const { return first_ + size() - 1; }
  long size() const { return static_cast<long>(s_.size()); }
  bool empty() const { return s_.empty(); }
  Meta& meta() { return meta_; }
  const Meta& meta() const { return meta_; }

  void reserve(long n) {
    const auto m = static_cast<std::size_t>(n);
    const auto d = static_cast<std::size_t>(dim_);
    ys_.reserve(m * d);
    ws_.reserve((m + 1) * d);
    grads_.reserve(m * d);
    errs_.reserve(m * d);
    for (auto* v : {&s_, &coeff_, &gap_, &grad_norm_, &step_norm_}) v->reserve(m);
  }

  void append(const StepRecord& rec, double gap, double grad_norm, double step_norm) {
    if (rec.k != first_ + size()) throw ContractViolation("trace: records must be contiguous");
    push(ys_, rec.y);
    push(ws_, rec.w);
    push(grads_, rec.grad);
    push(errs_, rec.error);
    if (!s_.empty() && rec.s != s_.front()) constant_step_ = false;
    s_.push_back(rec.s);
    coeff_.push_back(rec.coeff);
    gap_.push_back(gap);
    grad_norm_.push_back(grad_norm);
    step_norm_.push_back(step_norm);
  }

  Eigen::Map<const Vector> y(long k) const { return view(ys_, slot(k, first_, last())); }
  Eigen::Map<Vector> y_mut(long k) { return view(ys_, slot(k, first_, last())); }
  Eigen::Map<const Vector> w(long k) const { return view(ws_, slot(k, first_ - 1, last())); }
  Eigen::Map<const Vector> grad(long k) const { return view(grads_, slot(k, first_, last())); }
  Eigen::Map<const Vector> error(long k) const { return view(errs_, slot(k, first_, last())); }
  Vector noisy_grad(long k) const { return grad(k) + error(k); }

  /// Nesterov iterate x_k for k in [first-1, last+1]; x_{first-1} = x_first.
  Eigen::Map<const Vector> x(long k) const {
    if (k == first_ - 1) return w(first_ - 1);
    return w(k - 1);
  }

  /// v_k = (y_k - y_{k-1}) / sqrt(s), k in [first+1, last].
  Vector velocity(long k) const {
    const double h = std::sqrt(s(k));
    return (y(k) - y(k - 1)) / h;
  }

  double s(long k) const { return s_[slot(k, first_, last())]; }
  double coeff(long k) const { return coeff_[slot(k, first_, last())]; }
  double gap(long k) const { return gap_[slot(k, first_, last())]; }
  double grad_norm(long k) const { return grad_norm_[slot(k, first_, last())]; }
  double step_norm(long k) const { return step_norm_[slot(k, first_, last())]; }
  const std::vector<double>& gaps() const { return gap_; }
  const std::vector<double>& grad_norms() const { return grad_norm_; }
  const std::vector<double>& step_norms() const { return step_norm_; }

  bool constant_step() const { return constant_step_; }

 private:
  static void push(std::vector<double>& dst, const Vector& v) {
    dst.insert(dst.end(), v.data(), v.data() + v.size());
  }
  std::size_t slot(long k, long lo, long hi) const {
    if (k < lo || k > hi) {
      throw ContractViolation("trace: index " + std::to_string(k) + " outside [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return static_cast<std::size_t>(k - lo);
  }
  Eigen::Map<const Vector> view(const std::vector<double>& buf, std::size_t i) const {
    return Eigen::Map<const Vector>(buf.data() + i * static_cast<std::size_t>(dim_), dim_);
  }
  Eigen::Map<Vector> view(std::vector<double>& buf, std::size_t i) {
    return Eigen::Map<Vector>(buf.data() + i * static_cast<std::size_t>(dim_), dim_);
  }

  Method method_ = Method::nag;
  Index dim_ = 0;
  long first_ = 1;
  bool constant_step_ = true;
  Meta meta_;
  std::vector<double> ys_, ws_, grads_, errs_;
  std::vector<double> s_, coeff_, gap_, grad_norm_, step_norm_;
};

inline constexpr double kDivergenceFactor = 1e12;

/// Drives nag_step or rag_step for `iterations` steps from k = first.
/// coeff(k) supplies alpha_k (NAG) or gamma_k (RAG).
inline Trace run_with_coefficients(const Problem& problem, Method method,
                                   const std::function<double(long)>& coeff,
                                   const StepSize& step, const NoiseModel& noise,
                                   long iterations, const Vector& x0, long first = 1,
                                   StepBoundPolicy policy = StepBoundPolicy::enforce) {
  if (iterations < 0) throw ContractViolation("run: iterations must be >= 0");
  if (first < 1) throw ContractViolation("run: first index must be >= 1");
  require_dim(x0, problem.dim(), "run: x0");
  if (noise.dim() != problem.dim()) throw ContractViolation("run: noise dimension mismatch");

  Trace trace(method, problem.dim(), first, x0);
  trace.reserve(iterations);
  if (iterations == 0) return trace;
  check_step(step.at(first), problem.lipschitz(), policy);
  // the schedule is non-increasing, so a warning is issued at most once
  if (policy == StepBoundPolicy::warn) policy = StepBoundPolicy::ignore;

  const double initial_gap = problem.gap(x0);
  const double limit = kDivergenceFactor * std::max(initial_gap, 1e-12);
  auto guard = [&](const StepRecord& rec, double gap) {
    if (!rec.w.allFinite() || !rec.y.allFinite() || !std::isfinite(gap)) {
      throw NumericError("run: non-finite iterate at k = " + std::to_string(rec.k));
    }
    if (gap > limit) {
      throw NumericError("run: diverged at k = " + std::to_string(rec.k) + " (gap " +
                         std::to_string(gap) + " > 1e12 x initial gap)");
    }
  };

  if (method == Method::nag) {
    NagState state = NagState::start(x0, first);
    for (long k = first; k < first + iterations; ++k) {
      const double gap = problem.gap(state.x);
      const double step_norm = (state.x - state.x_prev).norm();
      auto [next, rec] = nag_step(state, coeff(k), step.at(k), problem, noise, policy);
      guard(rec, gap);
      const double grad_norm = rec.grad.norm();
      trace.append(rec, gap, grad_norm, step_norm);
      state = std::move(next);
    }
    const double final_gap = problem.gap(state.x);
    if (!std::isfinite(final_gap) || final_gap > limit) {
      throw NumericError("run: diverged on the final step");
    }
  } else {
    RagState state = RagState::start(x0, first);
    Vector y_prev = x0;
    for (long k = first; k < first + iterations; ++k) {
      const double step_norm = (state.y - y_prev).norm();
      y_prev = state.y;
      auto [next, rec] = rag_step(state, coeff(k), step.at(k), problem, noise, policy);
      const double gap = problem.gap(rec.y);
      guard(rec, gap);
      trace.append(rec, gap, rec.grad.norm(), step_norm);
      state = std::move(next);
    }
  }
  return trace;
}

struct RunOptions {
  Method method = Method::nag;
  Schedule schedule = Schedule::nesterov_offset(3.0);
  StepSize step;  // s0 = 0 means 1/L
  std::optional<NoiseModel> noise;
  long iterations = 0;
  std::optional<Vector> x0;  // default: all ones
  StepBoundPolicy policy = StepBoundPolicy::enforce;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

/// NAG with alpha_k, or RAG with gamma_k = alpha_{k+1}, starting at the
/// schedule's first index. Deterministic in the options.
inline Trace run(const Problem& problem, const RunOptions& opt) {
  StepSize step = opt.step;
  if (step.s0 == 0.0) step.s0 = 1.0 / problem.lipschitz();
  const NoiseModel noise = opt.noise ? *opt.noise : NoiseModel::none(problem.dim());
  const Vector x0 = opt.x0 ? *opt.x0 : Vector::Ones(problem.dim());
  const Schedule& sch = opt.schedule;
  std::function<double(long)> coeff;
  if (opt.method == Method::nag) {
    coeff = [&sch](long k) { return sch.alpha(k); };
  } else {
    coeff = [&sch](long k) { return sch.alpha(k + 1); };
  }
  Trace trace = run_with_coefficients(problem, opt.method, coeff, step, noise, opt.iterations,
                                      x0, sch.first_index(), opt.policy);
  trace.meta() = {opt.config_hash, opt.seed};
  return trace;
}

/// The y-sequence of a trace, y_first .. y_last.
inline std::vector<Vector> nag_to_ravine(const Trace& trace) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(trace.size()));
  for (long k = trace.first(); k <= trace.last(); ++k) out.emplace_back(trace.y(k));
  return out;
}

/// x_{k+1} = y_k - s_k(grad f(y_k) + e_k) = w_k for k = first .. last.
inline std::vector<Vector> ravine_to_nag(const Trace& trace) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(trace.size()));
  for (long k = trace.first(); k <= trace.last(); ++k) out.emplace_back(trace.w(k));
  return out;
}

/// Norm of an identity's left-hand side, with the sum of |coefficient| x
/// |raw vector| over its terms as the scale for relative comparison.
struct Residual {
  double value = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? value / scale : value; }
};

/// t_{k+1}(v_k + h G_{k-1}) - (t_k - 1)(v_{k-1} + h G_{k-2}) + h (t_k - 1) G_{k-1}
/// with G_j = grad f(y_j) + e_j and v_j = (y_j - y_{j-1})/h, h = sqrt(s).
/// Needs a constant step and k >= first + 2.
template <class TSeq>
Residual constitutive_residual(const Trace& trace, const TSeq& t, long k) {
  if (!trace.constant_step()) {
    throw UnsupportedOperation("constitutive residual is a constant-step identity");
  }
  if (k < trace.first() + 2 || k > trace.last()) {
    throw ContractViolation("constitutive residual: k must lie in [first+2, last]");
  }
  const double h = std::sqrt(trace.s(k));
  const double tk = t(k), tn = t(k + 1);
  const Vector g1 = trace.noisy_grad(k - 1);
  const Vector g2 = trace.noisy_grad(k - 2);
  const Vector vk = (trace.y(k) - trace.y(k - 1)) / h;
  const Vector vp = (trace.y(k - 1) - trace.y(k - 2)) / h;
  const Vector lhs = tn * (vk + h * g1) - (tk - 1.0) * (vp + h * g2) + h * (tk - 1.0) * g1;
  Residual r;
  r.value = lhs.norm();
  const double ny0 = trace.y(k).norm(), ny1 = trace.y(k - 1).norm(), ny2 = trace.y(k - 2).norm();
  r.scale = tn * ((ny0 + ny1) / h + h * g1.norm()) +
            std::abs(tk - 1.0) * ((ny1 + ny2) / h + h * g2.norm() + h * g1.norm());
  return r;
}

}  // namespace ravine

#endif  // RAVINE_CORE_HPP_
