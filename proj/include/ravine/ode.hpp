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

#ifndef RAVINE_ODE_HPP_
#define RAVINE_ODE_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ravine/core.hpp"
#include "ravine/errors.hpp"
#include "ravine/linalg.hpp"
#include "ravine/problems.hpp"

namespace ravine {

/// gamma(t) = alpha / t, or a constant gamma0; defined for t >= t_min.
struct DampingFunction {
  enum class Kind { alpha_over_t, constant };
  Kind kind = Kind::alpha_over_t;
  double value = 3.0;  // alpha or gamma0
  double t_min = 1.0;

  static DampingFunction alpha_over_t(double alpha, double t_min = 1.0) {
    if (!(alpha > 0.0)) throw ContractViolation("damping: alpha must be > 0");
    if (!(t_min > 0.0)) throw ContractViolation("damping: t_min must be > 0");
    return {Kind::alpha_over_t, alpha, t_min};
  }
  static DampingFunction constant(double gamma0, double t_min = 1.0) {
    if (!(gamma0 > 0.0)) throw ContractViolation("damping: gamma0 must be > 0");
    return {Kind::constant, gamma0, t_min};
  }

  double operator()(double t) const {
    if (kind == Kind::constant) return value;
    if (!(t > 0.0)) throw ContractViolation("damping: alpha/t needs t > 0");
    return value / t;
  }
};

struct Trajectory {
  std::vector<double> tau;
  std::vector<Vector> positions;
  std::vector<Vector> velocities;
  std::string method;
  double h_int = 0.0;

  double start() const { return tau.front(); }
  double end() const { return tau.back(); }

  /// Position at time t by linear interpolation on the uniform grid.
  Vector position_at(double t) const {
    const double slack = 1e-9 * std::max(1.0, std::abs(t));
    if (t < start() - slack || t > end() + slack) {
      throw ContractViolation("trajectory does not cover t = " + std::to_string(t));
    }
    const double u = (t - start()) / h_int;
    const double nearest = std::round(u);
    if (std::abs(u - nearest) <= 1e-9 && nearest >= 0.0 && nearest < static_cast<double>(tau.size())) {
      return positions[static_cast<std::size_t>(nearest)];
    }
    auto i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(tau.size() - 1)));
    if (i + 1 >= tau.size()) return positions.back();
    const double w = std::clamp(u - static_cast<double>(i), 0.0, 1.0);
    if (w == 0.0) return positions[i];
    return (1.0 - w) * positions[i] + w * positions[i + 1];
  }
};

inline constexpr double kBlowUpNorm = 1e12;

/// Classical RK4 for x' = v, v' = accel(t, x, v) on a uniform grid from t0
/// to T with step at most h_int.
template <class Accel>
Trajectory integrate_second_order(Accel accel, const Vector& x0, const Vector& v0, double h_int,
                                  double t0, double T, std::string method) {
  if (!(h_int > 0.0)) throw ContractViolation("integrate: h_int must be > 0");
  if (!(T > t0)) throw ContractViolation("integrate: T must exceed the start time");
  const auto n = static_cast<long>(std::ceil((T - t0) / h_int - 1e-9));
  const double h = (T - t0) / static_cast<double>(n);
  Trajectory traj;
  traj.method = std::move(method);
  traj.h_int = h;
  traj.tau.reserve(static_cast<std::size_t>(n + 1));
  traj.positions.reserve(static_cast<std::size_t>(n + 1));
  traj.velocities.reserve(static_cast<std::size_t>(n + 1));
  Vector x = x0, v = v0;
  traj.tau.push_back(t0);
  traj.positions.push_back(x);
  traj.velocities.push_back(v);
  for (long i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    const Vector k1x = v;
    const Vector k1v = accel(t, x, v);
    const Vector k2x = v + 0.5 * h * k1v;
    const Vector k2v = accel(t + 0.5 * h, x + 0.5 * h * k1x, k2x);
    const Vector k3x = v + 0.5 * h * k2v;
    const Vector k3v = accel(t + 0.5 * h, x + 0.5 * h * k2x, k3x);
    const Vector k4x = v + h * k3v;
    const Vector k4v = accel(t + h, x + h * k3x, k4x);
    x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!x.allFinite() || !v.allFinite() || x.norm() > kBlowUpNorm || v.norm() > kBlowUpNorm) {
      throw NumericError("integrate: trajectory blew up near t = " + std::to_string(t + h));
    }
    traj.tau.push_back(t0 + static_cast<double>(i + 1) * h);
    traj.positions.push_back(x);
    traj.velocities.push_back(v);
  }
  return traj;
}

/// x'' + gamma(t) x' + grad f(x) = 0 from t0 (default t_min) to T.
inline Trajectory integrate_igs(const Problem& problem, const DampingFunction& damping,
                                const Vector& x0, const Vector& v0, double h_int, double T,
                                std::optional<double> t0 = std::nullopt) {
  require_dim(x0, problem.dim(), "integrate_igs: x0");
  require_dim(v0, problem.dim(), "integrate_igs: v0");
  auto accel = [&](double t, const Vector& x, const Vector& v) -> Vector {
    return -damping(t) * v - problem.gradient(x);
  };
  return integrate_second_order(accel, x0, v0, h_int, t0.value_or(damping.t_min), T, "igs-rk4");
}

/// y'' + gamma (1 + (sqrt(s)/2) gamma) y' + sqrt(s) H(y) y' + (1 + (sqrt(s)/2) gamma) grad f(y) = 0.
inline Trajectory integrate_highres(const Problem& problem, const DampingFunction& damping,
                                    double s, const Vector& y0, const Vector& v0, double h_int,
                                    double T, std::optional<double> t0 = std::nullopt) {
  if (!(s > 0.0)) throw ContractViolation("integrate_highres: s must be > 0");
  check_step(s, problem.lipschitz(), StepBoundPolicy::enforce);
  require_dim(y0, problem.dim(), "integrate_highres: y0");
  require_dim(v0, problem.dim(), "integrate_highres: v0");
  const double rs = std::sqrt(s);
  auto accel = [&](double t, const Vector& y, const Vector& v) -> Vector {
    const double g = damping(t);
    const double lift = 1.0 + 0.5 * rs * g;
    return -g * lift * v - rs * problem.hessian_vec(y, v) - lift * problem.gradient(y);
  };
  return integrate_second_order(accel, y0, v0, h_int, t0.value_or(damping.t_min), T,
                                "highres-rk4");
}

/// h_int = min(0.01, h/10).
inline double default_h_int(double h) { return std::min(0.01, h / 10.0); }

/// gamma_k = max(0, 1 - h gamma((k+1)h)).
inline double discretize_gamma(const DampingFunction& damping, double h, long k) {
  if (!(h > 0.0)) throw ContractViolation("discretize_gamma: h must be > 0");
  return std::max(0.0, 1.0 - h * damping(static_cast<double>(k + 1) * h));
}

/// prox_{sf}(x + (1 - gamma_h)(x - x_prev)).
inline Vector inertial_prox_step(const Problem& problem, double s, double gamma_h,
                                 const Vector& x, const Vector& x_prev) {
  return problem.prox(s, x + (1.0 - gamma_h) * (x - x_prev));
}

struct ErrorProfile {
  std::vector<long> k;
  std::vector<double> tau;
  std::vector<double> error;
  double sup = 0.0;
};

/// e_k = |y_k - Y(tau_k)| with tau_k = (k + c) h, over trace indices whose
/// tau_k does not exceed the horizon (default: the trajectory's end).
inline ErrorProfile compare_discrete_continuous(const Trace& trace, const Trajectory& trajectory,
                                                double offset_c, double h,
                                                std::optional<double> horizon = std::nullopt) {
  const double T = horizon.value_or(trajectory.end());
  if (T > trajectory.end() * (1.0 + 1e-12)) {
    throw ContractViolation("compare: trajectory ends before the horizon");
  }
  ErrorProfile p;
  for (long k = trace.first(); k <= trace.last(); ++k) {
    const double tau = (static_cast<double>(k) + offset_c) * h;
    if (tau > T * (1.0 + 1e-12)) break;
    const double e = (trace.y(k) - trajectory.position_at(tau)).norm();
    p.k.push_back(k);
    p.tau.push_back(tau);
    p.error.push_back(e);
    p.sup = std::max(p.sup, e);
  }
  if (p.k.empty()) throw ContractViolation("compare: no trace index falls inside the horizon");
  return p;
}

/// Number of strict sign changes of one coordinate along a trajectory.
inline long count_sign_changes(const Trajectory& trajectory, Index coordinate) {
  long count = 0;
  double prev = 0.0;
  for (const Vector& p : trajectory.positions) {
    const double v = p[coordinate];
    if (v == 0.0) continue;
    if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++count;
    prev = v;
  }
  return count;
}

}  // namespace ravine

#endif  // RAVINE_ODE_HPP_
