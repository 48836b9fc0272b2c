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

#ifndef RAVINE_NOISE_HPP_
#define RAVINE_NOISE_HPP_

#include <cmath>
#include <cstdint>

#include "ravine/errors.hpp"
#include "ravine/linalg.hpp"

namespace ravine {

enum class NoiseFamily { none, gaussian_isotropic };

/// Deterministic standard deviation schedule sigma_k.
struct SigmaSchedule {
  enum class Kind { constant, polynomial };
  Kind kind = Kind::constant;
  double sigma0 = 0.0;
  double power = 0.0;  // polynomial only: sigma_k = sigma0 / k^power

  static SigmaSchedule constant(double sigma0) { return {Kind::constant, sigma0, 0.0}; }
  static SigmaSchedule polynomial(double sigma0, double power) {
    return {Kind::polynomial, sigma0, power};
  }

  double at(long k) const {
    if (kind == Kind::constant) return sigma0;
    return sigma0 / std::pow(static_cast<double>(k), power);
  }

  // Exponent p with sigma_k ~ k^-p.
  double decay_exponent() const { return kind == Kind::constant ? 0.0 : power; }

  friend bool operator==(const SigmaSchedule&, const SigmaSchedule&) = default;
};

/// Zero-mean gradient errors e_k indexed by iteration.
///
/// e_k is generated from a stream keyed by hash(seed, k), so it depends on
/// nothing but (seed, k): two algorithms sharing a model see identical error
/// realizations at equal k, in any call order. Gaussian errors use
/// per-coordinate variance sigma_k^2 / dim, so E||e_k||^2 = sigma_k^2.
class NoiseModel {
 public:
  NoiseModel() = default;

  static NoiseModel none(Index dim) {
    NoiseModel m;
    m.dim_ = dim;
    return m;
  }

  static NoiseModel gaussian(Index dim, SigmaSchedule schedule, std::uint64_t seed) {
    if (dim <= 0) throw ContractViolation("noise: dimension must be positive");
    if (schedule.sigma0 < 0.0) throw ContractViolation("noise: sigma0 must be >= 0");
    NoiseModel m;
    m.family_ = NoiseFamily::gaussian_isotropic;
    m.schedule_ = schedule;
    m.seed_ = seed;
    m.dim_ = dim;
    return m;
  }

  NoiseFamily family() const { return family_; }
  const SigmaSchedule& schedule() const { return schedule_; }
  std::uint64_t seed() const { return seed_; }
  Index dim() const { return dim_; }
  bool is_zero() const { return family_ == NoiseFamily::none || schedule_.sigma0 == 0.0; }

  NoiseModel with_seed(std::uint64_t seed) const {
    NoiseModel m = *this;
    m.seed_ = seed;
    return m;
  }

  double sigma(long k) const {
    if (k < 1) throw ContractViolation("noise: k must be >= 1");
    return family_ == NoiseFamily::none ? 0.0 : schedule_.at(k);
  }

  Vector sample(long k) const {
    if (k < 1) throw ContractViolation("noise: k must be >= 1");
    if (is_zero()) return Vector::Zero(dim_);
    const double scale = schedule_.at(k) / std::sqrt(static_cast<double>(dim_));
    return scale * standard_normal(dim_, mix_keys(seed_, static_cast<std::uint64_t>(k)));
  }

  friend bool operator==(const NoiseModel& a, const NoiseModel& b) {
    return a.family_ == b.family_ && a.schedule_ == b.schedule_ && a.seed_ == b.seed_ &&
           a.dim_ == b.dim_;
  }

 private:
  NoiseFamily family_ = NoiseFamily::none;
  SigmaSchedule schedule_{};
  std::uint64_t seed_ = 0;
  Index dim_ = 0;
};

/// Symbolic summability of sum_k s_k t_k sigma_k for power laws
/// s_k ~ k^-step_decay, t_k ~ k^t_growth, sigma_k ~ k^-sigma_decay.
inline bool weighted_sigma_summable(double sigma_decay, double t_growth,
                                    double step_decay = 0.0) {
  return sigma_decay + step_decay - t_growth > 1.0;
}

}  // namespace ravine

#endif  // RAVINE_NOISE_HPP_
