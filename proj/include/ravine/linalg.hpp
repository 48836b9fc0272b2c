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

#ifndef RAVINE_LINALG_HPP_
#define RAVINE_LINALG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "ravine/errors.hpp"

namespace ravine {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline void require_dim(const Eigen::Ref<const Vector>& v, Index dim,
                        const char* what) {
  if (v.size() != dim) {
    throw ContractViolation(std::string(what) + ": expected dimension " +
                            std::to_string(dim) + ", got " +
                            std::to_string(v.size()));
  }
}

// SplitMix64 finalizer. Used to derive independent stream keys from
// (seed, counter) pairs.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL));
}

inline Vector standard_normal(Index dim, std::uint64_t key) {
  std::mt19937_64 gen(key);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector out(dim);
  for (Index i = 0; i < dim; ++i) out[i] = normal(gen);
  return out;
}

struct EigenEstimate {
  double value = 0.0;
  double residual = 0.0;  // ||M v - value v|| at the returned unit vector
  long iterations = 0;
};

// Power iteration for the largest eigenvalue of a symmetric positive
// semidefinite matrix. Stops once the eigen-residual drops below
// tol * value. The start vector is a fixed-seed Gaussian, so the result
// is deterministic.
inline EigenEstimate power_iteration(const Matrix& m, double tol = 1e-10,
                                     long max_iter = 1000000) {
  const Index n = m.rows();
  if (m.cols() != n) throw ContractViolation("power_iteration: matrix not square");
  EigenEstimate est;
  if (n == 0) return est;
  Vector v = standard_normal(n, 0x5eedULL);
  v.normalize();
  Vector mv = m * v;
  for (long it = 1; it <= max_iter; ++it) {
    const double rayleigh = v.dot(mv);
    const double res = (mv - rayleigh * v).norm();
    est = {rayleigh, res, it};
    if (res <= tol * std::abs(rayleigh) || mv.norm() == 0.0) return est;
    v = mv.normalized();
    mv = m * v;
  }
  throw NonConvergence("power_iteration: no convergence after " +
                       std::to_string(max_iter) + " iterations");
}

}  // namespace ravine

#endif  // RAVINE_LINALG_HPP_
