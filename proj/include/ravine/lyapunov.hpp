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

#ifndef RAVINE_LYAPUNOV_HPP_
#define RAVINE_LYAPUNOV_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "ravine/core.hpp"
#include "ravine/errors.hpp"
#include "ravine/linalg.hpp"
#include "ravine/problems.hpp"

namespace ravine {

/// z_k = x_{k-1} + t_k (x_k - x_{k-1}), k in [first, last+1].
template <class TSeq>
Vector nag_anchor(const Trace& trace, const TSeq& t, long k) {
  if (k < trace.first() || k > trace.last() + 1) {
    throw ContractViolation("nag_anchor: k out of range");
  }
  return trace.x(k - 1) + t(k) * (trace.x(k) - trace.x(k - 1));
}

/// |z_{k+1} - z_k + s_k t_{k+1} (grad f(y_k) + e_k)|, k in [first, last].
template <class TSeq>
Residual nag_anchor_residual(const Trace& trace, const TSeq& t, long k) {
  if (k < trace.first() || k > trace.last()) {
    throw ContractViolation("nag_anchor_residual: k out of range");
  }
  const Vector g = trace.noisy_grad(k);
  const double tk = t(k), tn = t(k + 1), s = trace.s(k);
  const Vector lhs = nag_anchor(trace, t, k + 1) - nag_anchor(trace, t, k) + s * tn * g;
  const double n0 = trace.x(k - 1).norm(), n1 = trace.x(k).norm(), n2 = trace.x(k + 1).norm();
  Residual r;
  r.value = lhs.norm();
  r.scale = tn * n2 + std::abs(tn - 1.0) * n1 + tk * n1 + std::abs(tk - 1.0) * n0 +
            s * tn * g.norm();
  return r;
}

/// V_k = s_k t_k^2 (f(x_k) - min f) + dist(z_k)^2 / 2.
template <class TSeq>
double energy_V(const Trace& trace, const TSeq& t, const Problem& problem, long k) {
  const double tk = t(k);
  const double dist = problem.distance_to_solutions(nag_anchor(trace, t, k));
  return trace.s(k) * tk * tk * problem.gap(trace.x(k)) + 0.5 * dist * dist;
}

/// W_k = s_k (f(x_k) - min f) + |x_k - x_{k-1}|^2 / 2.
inline double energy_W(const Trace& trace, const Problem& problem, long k) {
  return trace.s(k) * problem.gap(trace.x(k)) + 0.5 * (trace.x(k) - trace.x(k - 1)).squaredNorm();
}

/// z_k = y_k + h (t_{k+1} - 1)(v_k + h G_{k-1}), k in [first, last].
/// At k = first the bracket vanishes because w_{first-1} = y_first.
template <class TSeq>
Vector ravine_anchor(const Trace& trace, const TSeq& t, long k) {
  if (!trace.constant_step()) {
    throw UnsupportedOperation("ravine anchor is defined for a constant step");
  }
  if (k < trace.first() || k > trace.last()) {
    throw ContractViolation("ravine_anchor: k out of range");
  }
  if (k == trace.first()) return trace.y(k);
  const double h = std::sqrt(trace.s(k));
  const Vector bracket = trace.velocity(k) + h * trace.noisy_grad(k - 1);
  return trace.y(k) + h * (t(k + 1) - 1.0) * bracket;
}

/// (z_k, E_k) with E_k = h^2 (t_{k+1} - 1) t_{k+1} (f(y_{k-1}) - min f) + dist(z_k)^2 / 2,
/// k in [first+1, last].
template <class TSeq>
std::pair<Vector, double> ravine_anchor_and_E(const Trace& trace, const TSeq& t,
                                              const Problem& problem, long k) {
  if (k < trace.first() + 1) throw ContractViolation("ravine energy needs k >= first + 1");
  Vector z = ravine_anchor(trace, t, k);
  const double h2 = trace.s(k);
  const double tn = t(k + 1);
  const double dist = problem.distance_to_solutions(z);
  const double e = h2 * (tn - 1.0) * tn * problem.gap(trace.y(k - 1)) + 0.5 * dist * dist;
  return {std::move(z), e};
}

/// |z_{k+1} - z_k + h^2 t_{k+1} G_k|, k in [first, last-1].
template <class TSeq>
Residual ravine_anchor_residual(const Trace& trace, const TSeq& t, long k) {
  if (k < trace.first() || k + 1 > trace.last()) {
    throw ContractViolation("ravine_anchor_residual: k out of range");
  }
  const double h2 = trace.s(k);
  const Vector g = trace.noisy_grad(k);
  const double tn = t(k + 1), tnn = t(k + 2);
  const Vector lhs = ravine_anchor(trace, t, k + 1) - ravine_anchor(trace, t, k) + h2 * tn * g;
  auto term = [&](long j, double coef) {
    double sum = trace.y(j).norm();
    if (j > trace.first()) {
      sum += std::abs(coef) * (trace.y(j).norm() + trace.y(j - 1).norm() +
                               h2 * trace.noisy_grad(j - 1).norm());
    }
    return sum;
  };
  Residual r;
  r.value = lhs.norm();
  r.scale = term(k + 1, tnn - 1.0) + term(k, tn - 1.0) + h2 * tn * g.norm();
  return r;
}

/// Per-k diagnostics over a trace, rows k = first .. last. E is NaN where
/// undefined (k = first, or a varying step).
struct DiagnosticsSeries {
  std::vector<long> k;
  std::vector<double> V, W, E, gap, grad_norm, step_norm;
  std::vector<double> sum_t2_grad2;  // sum_j t_{j+1}^2 |grad f(y_j)|^2
  std::vector<double> sum_st_gap;    // sum_j s_j t_{j+1} (f(y_j) - min f)
  std::vector<double> half_dist2;    // |x_k - proj(x_k)|^2 / 2

  std::size_t size() const { return k.size(); }
};

template <class TSeq>
DiagnosticsSeries compute_diagnostics(const Trace& trace, const TSeq& t,
                                      const Problem& problem) {
  DiagnosticsSeries d;
  const bool with_e = trace.constant_step();
  double acc_grad = 0.0, acc_gap = 0.0;
  for (long k = trace.first(); k <= trace.last(); ++k) {
    const double tn = t(k + 1);
    d.k.push_back(k);
    d.V.push_back(energy_V(trace, t, problem, k));
    d.W.push_back(energy_W(trace, problem, k));
    d.E.push_back(with_e && k > trace.first() ? ravine_anchor_and_E(trace, t, problem, k).second
                                              : std::numeric_limits<double>::quiet_NaN());
    d.gap.push_back(trace.gap(k));
    d.grad_norm.push_back(trace.grad_norm(k));
    d.step_norm.push_back(trace.step_norm(k));
    acc_grad += tn * tn * trace.grad_norm(k) * trace.grad_norm(k);
    acc_gap += trace.s(k) * tn * problem.gap(trace.y(k));
    d.sum_t2_grad2.push_back(acc_grad);
    d.sum_st_gap.push_back(acc_gap);
    const double dist = problem.distance_to_solutions(trace.x(k));
    d.half_dist2.push_back(0.5 * dist * dist);
  }
  return d;
}

inline constexpr double kSlopeFloor = 1e-300;

/// Least-squares slope of log(a_k) against log(k) for k in [k_lo, k_hi],
/// where series[i] holds a_{first_k + i}.
inline double rate_slope(const std::vector<double>& series, long first_k, long k_lo, long k_hi) {
  const long lo = std::max(k_lo, first_k);
  const long hi = std::min(k_hi, first_k + static_cast<long>(series.size()) - 1);
  if (hi - lo + 1 < 10) throw ContractViolation("rate_slope: window has fewer than 10 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(hi - lo + 1);
  for (long k = lo; k <= hi; ++k) {
    const double lx = std::log(static_cast<double>(k));
    const double ly = std::log(std::max(series[static_cast<std::size_t>(k - first_k)], kSlopeFloor));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double mx = sx / n, my = sy / n;
  return (sxy / n - mx * my) / (sxx / n - mx * mx);
}

/// S_K = sum_{k <= K} w_k a_k, compensated.
inline std::vector<double> weighted_partial_sums(const std::vector<double>& series,
                                                 const std::vector<double>& weights) {
  if (series.size() != weights.size()) {
    throw ContractViolation("weighted_partial_sums: length mismatch");
  }
  std::vector<double> out(series.size());
  double sum = 0.0, carry = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double term = weights[i] * series[i];
    const double t = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    out[i] = sum + carry;
  }
  return out;
}

inline constexpr double kPlateauThreshold = 0.05;

/// (S_{2K} - S_K) / S_{2K}, with S_K the sum of the first K terms.
inline double plateau_statistic(const std::vector<double>& partial, std::size_t K) {
  if (K < 1 || 2 * K > partial.size()) {
    throw ContractViolation("plateau_statistic: need 1 <= K and 2K <= length");
  }
  const double s1 = partial[K - 1], s2 = partial[2 * K - 1];
  return s2 == 0.0 ? 0.0 : (s2 - s1) / s2;
}

/// g(x) + <grad g(y), y - x> - (s/2)|grad g(y)|^2 - (s/2)|grad g(x) - grad g(y)|^2
///   - g(y - s grad g(y)),
/// nonnegative whenever 0 < s <= 1/L.
inline double descent_margin(const Problem& problem, double s, const Vector& x, const Vector& y) {
  check_step(s, problem.lipschitz(), StepBoundPolicy::enforce);
  const Vector gy = problem.gradient(y);
  const Vector gx = problem.gradient(x);
  const double rhs = problem.evaluate(x) + gy.dot(y - x) - 0.5 * s * gy.squaredNorm() -
                     0.5 * s * (gx - gy).squaredNorm();
  return rhs - problem.evaluate(y - s * gy);
}

}  // namespace ravine

#endif  // RAVINE_LYAPUNOV_HPP_
