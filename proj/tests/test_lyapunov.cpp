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

#include <cmath>
#include <random>

#include "ravine/lyapunov.hpp"

using namespace ravine;

namespace {

Problem test_quadratic() {
  return make_quadratic(log_spectrum(6, 1.0, 1e-2), standard_normal(6, 4), true, 5);
}

// Hand-built one-dimensional trace for f = x^2/2.
Trace manual_trace(double s, const std::vector<double>& ys, double w_start) {
  const Problem f = Problem::quadratic(Matrix::Identity(1, 1), Vector::Zero(1));
  Trace t(Method::nag, 1, 1, Vector::Constant(1, w_start));
  for (std::size_t i = 0; i < ys.size(); ++i) {
    StepRecord r;
    r.k = static_cast<long>(i) + 1;
    r.y = Vector::Constant(1, ys[i]);
    r.grad = f.gradient(r.y);
    r.error = Vector::Zero(1);
    r.s = s;
    r.w = r.y - s * r.grad;
    t.append(r, 0, 0, 0);
  }
  return t;
}

struct ConstT {
  double v;
  double operator()(long) const { return v; }
};

}  // namespace

TEST(NagAnchor, HandValues) {
  // x_0 = x_1 = 0 (start), x_2 = w_1 = y_1 - s y_1 with s = 0, y_1 = 1: x_2 = 1
  const Trace t = manual_trace(1e-300, {1.0, 1.0}, 0.0);
  EXPECT_DOUBLE_EQ(nag_anchor(t, ConstT{2.0}, 1)[0], 0.0);  // z_1 = x_0
  EXPECT_NEAR(nag_anchor(t, ConstT{2.0}, 2)[0], 2.0, 1e-12);
  EXPECT_NEAR(nag_anchor(t, ConstT{5.0}, 3)[0], 1.0, 1e-12);  // x_2 = x_3 gives z = x
  EXPECT_THROW(nag_anchor(t, ConstT{2.0}, 4), ContractViolation);
}

TEST(NagAnchor, RecursionHoldsOnNoisyRuns) {
  const Problem p = test_quadratic();
  for (const Schedule& sch : {Schedule::nesterov_offset(3), Schedule::power(1, 0.5), Schedule::constant(0.6)}) {
    RunOptions o;
    o.schedule = sch;
    o.iterations = 500;
    o.step = StepSize::polynomial(1.0 / p.lipschitz(), 0.25);
    o.noise = NoiseModel::gaussian(6, SigmaSchedule::constant(0.3), 2);
    const Trace t = run(p, o);
    const TSequence ts(sch, 1, 502);
    for (long k = 1; k <= t.last(); ++k) EXPECT_LE(nag_anchor_residual(t, ts, k).relative(), 1e-9);
  }
}

TEST(NagAnchor, WrongTIsDetected) {
  const Problem p = test_quadratic();
  RunOptions o;
  o.iterations = 100;
  const Trace t = run(p, o);
  const TSequence ts(o.schedule, 1, 102);
  auto shifted = [&](long k) { return ts(k) + 1.0; };
  // Shifting t by one adds (alpha_k - 1)(x_k - x_{k-1}) to the residual.
  for (long k : {5L, 40L, 90L}) {
    const double expected = (1.0 - o.schedule.alpha(k)) * (t.x(k) - t.x(k - 1)).norm();
    EXPECT_NEAR(nag_anchor_residual(t, shifted, k).value, expected, 1e-9 * expected + 1e-15);
  }
}

TEST(Energies, HandValues) {
  const Problem f = Problem::quadratic(Matrix::Identity(1, 1), Vector::Zero(1));
  // x_{k-1} = x_k = 1 with s = 1 and t_k = 2: V = 1*4*0.5 + 0.5*1
  const Trace t1 = manual_trace(1.0, {1.0, 1.0}, 1.0);
  EXPECT_DOUBLE_EQ(energy_V(t1, ConstT{2.0}, f, 1), 2.5);
  // s = 0.5, x_k = 1, x_{k-1} = 0: W = 0.5*0.5 + 0.5
  Trace t2(Method::nag, 1, 1, Vector::Zero(1));
  StepRecord r;
  r.k = 1;
  r.y = Vector::Zero(1);
  r.grad = Vector::Zero(1);
  r.error = Vector::Zero(1);
  r.w = Vector::Ones(1);
  r.s = 0.5;
  t2.append(r, 0, 0, 0);
  r.k = 2;
  r.y = Vector::Ones(1);
  t2.append(r, 0, 0, 0);
  EXPECT_DOUBLE_EQ(energy_W(t2, f, 2), 0.75);
}

TEST(Energies, ZeroAtMinimizer) {
  const Problem p = test_quadratic();
  RunOptions o;
  o.iterations = 5;
  o.x0 = *p.x_star();
  const Trace t = run(p, o);
  const TSequence ts(o.schedule, 1, 10);
  EXPECT_NEAR(energy_V(t, ts, p, 3), 0.0, 1e-14);
  EXPECT_NEAR(energy_W(t, p, 3), 0.0, 1e-14);
}

TEST(Energies, DeterministicMonotonicity) {
  const Problem p = test_quadratic();
  RunOptions o;
  o.schedule = Schedule::nesterov_offset(4);
  o.iterations = 3000;
  const Trace t = run(p, o);
  const TSequence ts(o.schedule, 1, 3002);
  const double v1 = energy_V(t, ts, p, 1), w1 = energy_W(t, p, 1);
  for (long k = 1; k < t.last(); ++k) {
    EXPECT_LE(energy_V(t, ts, p, k + 1), energy_V(t, ts, p, k) + 1e-12 * v1) << k;
    EXPECT_LE(energy_W(t, p, k + 1), energy_W(t, p, k) + 1e-12 * w1) << k;
  }
}

TEST(RavineAnchor, RestGivesY) {
  const Problem f = Problem::quadratic(Matrix::Zero(2, 2), Vector::Zero(2));
  const Trace t = run_with_coefficients(f, Method::rag, [](long) { return 0.5; }, StepSize::constant(1.0),
                                        NoiseModel::none(2), 5, Vector::Ones(2));
  const TSequence ts(Schedule::constant(0.5), 1, 10);
  for (long k = 1; k <= 5; ++k) EXPECT_EQ(ravine_anchor(t, ts, k), t.y(k));
}

TEST(RavineAnchor, RecursionAndEnergy) {
  const Problem p = Problem::quadratic(Matrix::Identity(3, 3), Vector::Zero(3));
  RunOptions o;
  o.method = Method::rag;
  o.schedule = Schedule::nesterov_offset(5);
  o.iterations = 2000;
  const Trace t = run(p, o);
  const TSequence ts(o.schedule, 1, 2003);
  for (long k = 1; k < t.last(); ++k) EXPECT_LE(ravine_anchor_residual(t, ts, k).relative(), 1e-9);
  const double e_first = ravine_anchor_and_E(t, ts, p, 2).second;
  double prev = e_first, drift = 0.0;
  for (long k = 3; k <= t.last(); ++k) {
    const double e = ravine_anchor_and_E(t, ts, p, k).second;
    drift = std::max(drift, e - prev);
    EXPECT_LE(e, e_first + 1e-10);
    prev = e;
  }
  EXPECT_LE(drift, 1e-10);
}

TEST(RavineAnchor, RequiresConstantStep) {
  const Problem p = test_quadratic();
  RunOptions o;
  o.method = Method::rag;
  o.iterations = 10;
  o.step = StepSize::polynomial(1.0 / p.lipschitz(), 1);
  const Trace t = run(p, o);
  const TSequence ts(o.schedule, 1, 12);
  EXPECT_THROW(ravine_anchor(t, ts, 3), UnsupportedOperation);
}

TEST(Diagnostics, SeriesAreNonnegativeAndEmptyEForVaryingStep) {
  const Problem p = test_quadratic();
  RunOptions o;
  o.iterations = 200;
  o.noise = NoiseModel::gaussian(6, SigmaSchedule::constant(0.1), 1);
  const TSequence ts(o.schedule, 1, 202);
  const DiagnosticsSeries d = compute_diagnostics(run(p, o), ts, p);
  ASSERT_EQ(d.size(), 200u);
  EXPECT_TRUE(std::isnan(d.E[0]));
  for (std::size_t i = 1; i < d.size(); ++i) {
    for (double v : {d.V[i], d.W[i], d.gap[i], d.grad_norm[i], d.step_norm[i], d.half_dist2[i]}) {
      EXPECT_GE(v, 0.0);
    }
    EXPECT_GE(d.sum_t2_grad2[i], d.sum_t2_grad2[i - 1]);
  }
  o.step = StepSize::polynomial(1.0 / p.lipschitz(), 0.5);
  const DiagnosticsSeries d2 = compute_diagnostics(run(p, o), ts, p);
  for (double e : d2.E) EXPECT_TRUE(std::isnan(e));
}

TEST(RateSlope, ExactPowerLaws) {
  std::vector<double> a, b;
  for (int k = 1; k <= 1000; ++k) {
    a.push_back(1.0 / (double(k) * k));
    b.push_back(5.0 / std::pow(k, 0.8));
  }
  EXPECT_NEAR(rate_slope(a, 1, 1, 1000), -2.0, 1e-12);
  EXPECT_NEAR(rate_slope(b, 1, 10, 500), -0.8, 1e-12);
  EXPECT_THROW(rate_slope(a, 1, 5, 13), ContractViolation);
}

TEST(RateSlope, ZerosAreFloored) {
  std::vector<double> a(100, 0.0);
  EXPECT_NEAR(rate_slope(a, 1, 1, 100), 0.0, 1e-9);
}

TEST(RateSlope, DeterministicRavineCaseOne) {
  const Problem p = test_quadratic();
  RunOptions o;
  o.method = Method::rag;
  o.schedule = Schedule::nesterov_offset(4);
  o.iterations = 10000;
  const Trace t = run(p, o);
  EXPECT_LE(rate_slope(t.gaps(), 1, 100, 10000), -1.9);
}

TEST(PartialSums, BaselAndHarmonic) {
  const std::size_t K = 10000;
  std::vector<double> basel(2 * K), harmonic(2 * K), ones(2 * K, 1.0), zeros(2 * K, 0.0);
  for (std::size_t i = 0; i < 2 * K; ++i) {
    const double k = static_cast<double>(i + 1);
    basel[i] = 1.0 / (k * k);
    harmonic[i] = 1.0 / k;
  }
  const auto sb = weighted_partial_sums(basel, ones);
  EXPECT_NEAR(sb.back(), M_PI * M_PI / 6.0, 1.0 / K);
  EXPECT_LE(plateau_statistic(sb, K), 1e-4);
  const auto sh = weighted_partial_sums(harmonic, ones);
  EXPECT_NEAR(plateau_statistic(sh, K), std::log(2.0) / std::log(2.0 * K), 0.01);
  EXPECT_GT(plateau_statistic(sh, K), kPlateauThreshold);
  const auto sz = weighted_partial_sums(zeros, ones);
  EXPECT_EQ(sz.back(), 0.0);
  EXPECT_EQ(plateau_statistic(sz, K), 0.0);
  EXPECT_THROW(weighted_partial_sums(basel, std::vector<double>(3)), ContractViolation);
}

TEST(DescentMargin, HandValues) {
  const Problem f = Problem::quadratic(Matrix::Identity(1, 1), Vector::Zero(1));
  EXPECT_NEAR(descent_margin(f, 1.0, Vector::Zero(1), Vector::Ones(1)), 0.0, 1e-15);
  EXPECT_NEAR(descent_margin(f, 1.0, Vector::Ones(1), Vector::Ones(1)), 0.0, 1e-15);
  EXPECT_THROW(descent_margin(f, 1.5, Vector::Zero(1), Vector::Ones(1)), ContractViolation);
}

TEST(DescentMargin, NonnegativeOnRandomPairs) {
  std::mt19937_64 gen(3);
  for (const Problem& p : {test_quadratic(), make_least_squares(20, 8, 4, 2), make_logistic(50, 4, 0.1, 3)}) {
    for (double factor : {1.0, 0.5}) {
      const double s = factor / p.lipschitz();
      for (int i = 0; i < 2000; ++i) {
        const Vector x = 3.0 * standard_normal(p.dim(), gen());
        const Vector y = 3.0 * standard_normal(p.dim(), gen());
        const double scale = std::abs(p.evaluate(x)) + std::abs(p.evaluate(y)) +
                             s * p.gradient(y).squaredNorm() + 1.0;
        EXPECT_GE(descent_margin(p, s, x, y), -1e-10 * scale);
      }
    }
  }
}
