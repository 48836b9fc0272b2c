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

#ifndef RAVINE_SCHEDULES_HPP_
#define RAVINE_SCHEDULES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ravine/errors.hpp"

namespace ravine {

enum class ScheduleKind { nesterov_offset, nesterov_ratio, power, constant };

inline const char* to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::nesterov_offset: return "nesterov_offset";
    case ScheduleKind::nesterov_ratio: return "nesterov_ratio";
    case ScheduleKind::power: return "power";
    case ScheduleKind::constant: return "constant";
  }
  return "?";
}

/// Extrapolation coefficients alpha_k, k >= 1.
///
///   nesterov_offset(a)  alpha_k = 1 - a/k
///   nesterov_ratio(a)   alpha_k = k/(k + a)
///   power(a, r)         alpha_k = 1 - a/k^r,  0 < r < 1
///   constant(a)         alpha_k = a,          0 <= a < 1
///
/// Every kind is nondecreasing in k. Negative raw values (small k in the
/// offset and power kinds) are clamped to zero unless clamping is switched
/// off, in which case iteration starts at first_index() where the raw value
/// is already nonnegative.
class Schedule {
 public:
  static Schedule nesterov_offset(double alpha, bool clamp = true) {
    if (!(alpha > 0.0)) throw ContractViolation("nesterov_offset: alpha must be > 0");
    return Schedule(ScheduleKind::nesterov_offset, alpha, 1.0, clamp);
  }
  static Schedule nesterov_ratio(double alpha) {
    if (!(alpha > 0.0)) throw ContractViolation("nesterov_ratio: alpha must be > 0");
    return Schedule(ScheduleKind::nesterov_ratio, alpha, 1.0, true);
  }
  static Schedule power(double alpha, double r, bool clamp = true) {
    if (!(alpha > 0.0)) throw ContractViolation("power: alpha must be > 0");
    if (!(r > 0.0 && r < 1.0)) throw ContractViolation("power: r must lie in (0, 1)");
    return Schedule(ScheduleKind::power, alpha, r, clamp);
  }
  static Schedule constant(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
      throw ContractViolation("constant: alpha must lie in [0, 1]");
    }
    return Schedule(ScheduleKind::constant, alpha, 0.0, true);
  }

  ScheduleKind kind() const { return kind_; }
  double alpha_param() const { return alpha_; }
  double r() const { return r_; }
  bool clamp() const { return clamp_; }

  double raw_alpha(long k) const {
    if (k < 1) throw ContractViolation("schedule: k must be >= 1");
    const double kd = static_cast<double>(k);
    switch (kind_) {
      case ScheduleKind::nesterov_offset: return 1.0 - alpha_ / kd;
      case ScheduleKind::nesterov_ratio: return kd / (kd + alpha_);
      case ScheduleKind::power: return 1.0 - alpha_ / std::pow(kd, r_);
      case ScheduleKind::constant: return alpha_;
    }
    return 0.0;
  }

  double alpha(long k) const {
    const double raw = raw_alpha(k);
    return clamp_ ? std::max(raw, 0.0) : raw;
  }

  /// 1 - alpha_k without the cancellation of forming alpha_k first.
  double complement(long k) const {
    if (k < 1) throw ContractViolation("schedule: k must be >= 1");
    const double kd = static_cast<double>(k);
    double c = 1.0 - alpha_;
    switch (kind_) {
      case ScheduleKind::nesterov_offset: c = alpha_ / kd; break;
      case ScheduleKind::nesterov_ratio: c = alpha_ / (kd + alpha_); break;
      case ScheduleKind::power: c = alpha_ / std::pow(kd, r_); break;
      case ScheduleKind::constant: break;
    }
    return clamp_ ? std::min(c, 1.0) : c;
  }

  /// First iteration index; 1 unless clamping is off and early raw values
  /// are negative.
  long first_index() const {
    if (clamp_) return 1;
    switch (kind_) {
      case ScheduleKind::nesterov_offset:
        return std::max(1L, static_cast<long>(std::ceil(alpha_)));
      case ScheduleKind::power: {
        long k = std::max(1L, static_cast<long>(std::floor(std::pow(alpha_, 1.0 / r_))));
        while (raw_alpha(k) < 0.0) ++k;
        return k;
      }
      default: return 1;
    }
  }

  /// Closed-form t_k where one exists:
  ///   nesterov_offset  t_k = (k-1)/(a-1)    for k >= a, a > 1
  ///   nesterov_ratio   t_k = (k+a-1)/(a-1)  for a > 1
  ///   constant         t_k = 1/(1-a)        for a < 1
  std::optional<double> t_closed_form(long k) const {
    if (k < 1) throw ContractViolation("t_closed_form: k must be >= 1");
    const double kd = static_cast<double>(k);
    switch (kind_) {
      case ScheduleKind::nesterov_offset:
        if (alpha_ > 1.0 && kd >= alpha_) return (kd - 1.0) / (alpha_ - 1.0);
        return std::nullopt;
      case ScheduleKind::nesterov_ratio:
        if (alpha_ > 1.0) return (kd + alpha_ - 1.0) / (alpha_ - 1.0);
        return std::nullopt;
      case ScheduleKind::constant:
        if (alpha_ < 1.0) return 1.0 / (1.0 - alpha_);
        return std::nullopt;
      case ScheduleKind::power: return std::nullopt;
    }
    return std::nullopt;
  }

  /// Smallest k from which t_closed_form is defined, if any.
  std::optional<long> closed_form_from() const {
    switch (kind_) {
      case ScheduleKind::nesterov_offset:
        if (alpha_ > 1.0) return std::max(1L, static_cast<long>(std::ceil(alpha_)));
        return std::nullopt;
      case ScheduleKind::nesterov_ratio:
        if (alpha_ > 1.0) return 1L;
        return std::nullopt;
      case ScheduleKind::constant:
        if (alpha_ < 1.0) return 1L;
        return std::nullopt;
      case ScheduleKind::power: return std::nullopt;
    }
    return std::nullopt;
  }

  /// Exponent r with t_k ~ k^r.
  double t_growth_exponent() const {
    switch (kind_) {
      case ScheduleKind::nesterov_offset:
      case ScheduleKind::nesterov_ratio: return 1.0;
      case ScheduleKind::power: return r_;
      case ScheduleKind::constant: return 0.0;
    }
    return 0.0;
  }

  std::string describe() const {
    char buf[96];
    if (kind_ == ScheduleKind::power) {
      std::snprintf(buf, sizeof buf, "power(alpha=%g, r=%g", alpha_, r_);
    } else {
      std::snprintf(buf, sizeof buf, "%s(alpha=%g", to_string(kind_), alpha_);
    }
    return std::string(buf) + (clamp_ ? ", clamped)" : ", offset start)");
  }

  friend bool operator==(const Schedule&, const Schedule&) = default;

 private:
  Schedule(ScheduleKind kind, double alpha, double r, bool clamp)
      : kind_(kind), alpha_(alpha), r_(r), clamp_(clamp) {}

  ScheduleKind kind_;
  double alpha_;
  double r_;
  bool clamp_;
};

inline constexpr long kSeriesTermBudget = 10'000'000;

struct SeriesResult {
  double value = 1.0;
  long terms = 0;
  double last_product = 1.0;  // prod_{j=k}^{i} alpha_j at the truncation index
};

/// t_k = 1 + sum_{i>=k} prod_{j=k}^{i} alpha_j, truncated at the first i
/// whose running product P_i satisfies P_i / (1 - abar) < tol, with abar the
/// largest coefficient seen so far, alpha_{i+1} (every kind is
/// nondecreasing). The geometric tail bound is exact for constant schedules;
/// for alpha_k = 1 - a/k the true tail is larger by at most a/(a-1). Throws
/// NonConvergence when the budget runs out first.
inline SeriesResult t_series(const Schedule& schedule, long k, double tol,
                             long budget = kSeriesTermBudget) {
  if (!(tol > 0.0)) throw ContractViolation("t_numeric: tol must be > 0");
  if (k < schedule.first_index()) {
    throw ContractViolation("t_numeric: k precedes the schedule's first index");
  }
  double sum = 1.0;
  double carry = 0.0;  // Neumaier compensation
  double product = 1.0;
  for (long n = 0; n < budget; ++n) {
    const long i = k + n;
    product *= schedule.alpha(i);
    const double t = sum + product;
    carry += std::abs(sum) >= std::abs(product) ? (sum - t) + product : (product - t) + sum;
    sum = t;
    if (product == 0.0) return {sum + carry, n + 1, 0.0};
    const double gap = schedule.complement(i + 1);
    if (gap > 0.0 && product / gap < tol) return {sum + carry, n + 1, product};
  }
  throw NonConvergence("t_numeric: series for t_" + std::to_string(k) +
                       " did not meet the tail bound within " + std::to_string(budget) +
                       " terms");
}

inline double t_numeric(const Schedule& schedule, long k, double tol) {
  return t_series(schedule, k, tol).value;
}

/// alpha_k = (t_k - 1) / t_{k+1}.
inline double alpha_from_t(double t_k, double t_next) {
  if (!(t_k >= 1.0 - 1e-12)) throw ContractViolation("alpha_from_t: t_k must be >= 1");
  if (!(t_next > 0.0)) throw ContractViolation("alpha_from_t: t_{k+1} must be > 0");
  return (t_k - 1.0) / t_next;
}

/// Table of t_k over [k_lo, k_hi].
///
/// Closed forms are used where they hold; elsewhere one truncated series at
/// the top of the range seeds the backward recursion t_k = 1 + alpha_k
/// t_{k+1}, which only shrinks the seed error (alpha_k <= 1). The table is
/// immutable once built.
class TSequence {
 public:
  TSequence(const Schedule& schedule, long k_lo, long k_hi, double tol = 1e-12,
            bool use_closed_form = true)
      : k_lo_(k_lo), k_hi_(k_hi) {
    if (k_lo < schedule.first_index() || k_hi < k_lo) {
      throw ContractViolation("TSequence: invalid range");
    }
    values_.resize(static_cast<std::size_t>(k_hi - k_lo + 1));
    const auto cf_from = use_closed_form ? schedule.closed_form_from() : std::nullopt;
    long seed_k = k_hi;
    if (cf_from && *cf_from <= k_hi) {
      for (long k = std::max(k_lo, *cf_from); k <= k_hi; ++k) {
        at(k) = *schedule.t_closed_form(k);
      }
      seed_k = std::max(k_lo, *cf_from);
    } else {
      at(k_hi) = t_numeric(schedule, k_hi, tol);
    }
    for (long k = seed_k - 1; k >= k_lo; --k) at(k) = 1.0 + schedule.alpha(k) * at(k + 1);
  }

  double operator()(long k) const {
    if (k < k_lo_ || k > k_hi_) {
      throw ContractViolation("TSequence: t_" + std::to_string(k) + " outside [" +
                              std::to_string(k_lo_) + ", " + std::to_string(k_hi_) + "]");
    }
    return values_[static_cast<std::size_t>(k - k_lo_)];
  }

  long first() const { return k_lo_; }
  long last() const { return k_hi_; }

 private:
  double& at(long k) { return values_[static_cast<std::size_t>(k - k_lo_)]; }

  long k_lo_;
  long k_hi_;
  std::vector<double> values_;
};

/// Range-certified evidence for the extrapolation conditions.
struct ConditionReport {
  long k_min = 0;
  long k_max = 0;
  double tol = 0.0;

  // (K0): the t-series at k_min converged; evidence from the truncation
  // (k0_terms = 0 when a closed form covers the tail).
  bool k0_converges = false;
  long k0_terms = 0;
  double k0_last_product = 0.0;

  // (K1): t_{k+1}^2 - t_k^2 <= t_{k+1}
  long k1_holds_up_to = 0;  // largest k with (K1) on [k_min, k]; k_min - 1 if none
  bool k1_holds = false;    // on the whole range

  // (K1+): smallest uniform m, max_k (t_{k+1}^2 - t_k^2) / t_{k+1}
  double k1plus_m = 0.0;

  // sup_k 1/(1-alpha_{k+1}) - 1/(1-alpha_k), and its value at k_max
  double special_class_c = 0.0;
  double special_class_c_tail = 0.0;

  // max_k t_{k+1} (1-c)(1-alpha_k) - 1; <= 0 when the bound holds
  double bound_violation = 0.0;
  // t_{k_max+1} (1 - c_tail)(1 - alpha_{k_max})
  double asymptote_ratio = 0.0;
};

inline ConditionReport check_conditions(const Schedule& schedule, long k_min, long k_max,
                                        double tol) {
  if (!(1 <= k_min && k_min < k_max)) {
    throw ContractViolation("check_conditions: need 1 <= k_min < k_max");
  }
  k_min = std::max(k_min, schedule.first_index());
  if (k_min >= k_max) throw ContractViolation("check_conditions: empty range after first index");

  ConditionReport rep;
  rep.k_min = k_min;
  rep.k_max = k_max;
  rep.tol = tol;

  // With a closed form the tail is known analytically; the clamped head
  // below it is a finite recursion.
  if (schedule.closed_form_from() && *schedule.closed_form_from() <= k_max + 1) {
    rep.k0_converges = true;
  } else {
    const SeriesResult head = t_series(schedule, k_min, tol);
    rep.k0_converges = true;
    rep.k0_terms = head.terms;
    rep.k0_last_product = head.last_product;
  }

  const TSequence t(schedule, k_min, k_max + 1, tol);
  rep.k1_holds_up_to = k_min - 1;
  bool k1_prefix = true;
  double m = -std::numeric_limits<double>::infinity();
  for (long k = k_min; k <= k_max; ++k) {
    const double tk = t(k), tn = t(k + 1);
    const double growth = tn * tn - tk * tk;
    const bool ok = growth <= tn + tol * tn * tn;
    if (ok && k1_prefix) rep.k1_holds_up_to = k;
    if (!ok) k1_prefix = false;
    m = std::max(m, growth / tn);
  }
  rep.k1_holds = rep.k1_holds_up_to == k_max;
  rep.k1plus_m = m;

  double c = -std::numeric_limits<double>::infinity();
  for (long k = k_min; k <= k_max; ++k) {
    const double c0 = schedule.complement(k), c1 = schedule.complement(k + 1);
    const double diff = (c0 > 0.0 && c1 > 0.0) ? 1.0 / c1 - 1.0 / c0
                                               : std::numeric_limits<double>::infinity();
    c = std::max(c, diff);
    if (k == k_max) rep.special_class_c_tail = diff;
  }
  rep.special_class_c = c;

  if (c < 1.0) {
    double worst = -std::numeric_limits<double>::infinity();
    for (long k = k_min; k <= k_max; ++k) {
      worst = std::max(worst, t(k + 1) * (1.0 - c) * schedule.complement(k) - 1.0);
    }
    rep.bound_violation = worst;
  } else {
    rep.bound_violation = std::numeric_limits<double>::infinity();
  }
  rep.asymptote_ratio =
      t(k_max + 1) * (1.0 - rep.special_class_c_tail) * schedule.complement(k_max);
  return rep;
}

}  // namespace ravine

#endif  // RAVINE_SCHEDULES_HPP_
