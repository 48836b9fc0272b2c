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

#include "ravine/schedules.hpp"

using namespace ravine;

TEST(Schedule, Alpha) {
  const Schedule s = Schedule::nesterov_offset(3);
  EXPECT_DOUBLE_EQ(s.alpha(6), 0.5);
  EXPECT_DOUBLE_EQ(s.raw_alpha(2), -0.5);
  EXPECT_DOUBLE_EQ(s.alpha(2), 0.0);
  EXPECT_DOUBLE_EQ(Schedule::constant(0.5).alpha(100), 0.5);
  EXPECT_DOUBLE_EQ(Schedule::nesterov_ratio(3).alpha(3), 0.5);
  EXPECT_DOUBLE_EQ(Schedule::power(2, 0.5).alpha(16), 0.5);
  EXPECT_THROW(s.alpha(0), ContractViolation);
}

TEST(Schedule, ValuesStayInUnitInterval) {
  for (const Schedule& s : {Schedule::nesterov_offset(7), Schedule::nesterov_ratio(2),
                            Schedule::power(3, 0.3), Schedule::constant(0.9)}) {
    for (long k = 1; k <= 5000; ++k) {
      EXPECT_GE(s.alpha(k), 0.0);
      EXPECT_LT(s.alpha(k), 1.0);
    }
  }
}

TEST(Schedule, OffsetStartWhenClampIsOff) {
  EXPECT_EQ(Schedule::nesterov_offset(3, false).first_index(), 3);
  EXPECT_EQ(Schedule::nesterov_offset(3.5, false).first_index(), 4);
  EXPECT_EQ(Schedule::nesterov_offset(3, true).first_index(), 1);
  const Schedule p = Schedule::power(2, 0.5, false);
  EXPECT_EQ(p.first_index(), 4);
  EXPECT_GE(p.raw_alpha(p.first_index()), 0.0);
  EXPECT_LT(p.raw_alpha(p.first_index() - 1), 0.0);
}

TEST(Schedule, RejectsInvalidParameters) {
  EXPECT_THROW(Schedule::nesterov_offset(0), ContractViolation);
  EXPECT_THROW(Schedule::power(1, 1.0), ContractViolation);
  EXPECT_THROW(Schedule::power(1, 0.0), ContractViolation);
  EXPECT_THROW(Schedule::constant(-0.1), ContractViolation);
}

TEST(TClosedForm, KnownValues) {
  EXPECT_DOUBLE_EQ(*Schedule::nesterov_offset(3).t_closed_form(5), 2.0);
  EXPECT_DOUBLE_EQ(*Schedule::constant(0.5).t_closed_form(17), 2.0);
  EXPECT_FALSE(Schedule::power(1, 0.5).t_closed_form(10).has_value());
  EXPECT_FALSE(Schedule::nesterov_offset(3).t_closed_form(2).has_value());
}

TEST(TNumeric, GeometricSeries) {
  EXPECT_NEAR(t_numeric(Schedule::constant(0.5), 3, 1e-10), 2.0, 1e-10);
}

TEST(TNumeric, MatchesClosedFormCaseOne) {
  EXPECT_NEAR(t_numeric(Schedule::nesterov_offset(3), 5, 1e-8), 2.0, 1e-6);
  const Schedule s = Schedule::nesterov_offset(4);
  for (long k : {4L, 10L, 57L, 300L}) {
    EXPECT_NEAR(t_numeric(s, k, 1e-9), *s.t_closed_form(k), 1e-8) << k;
  }
}

TEST(TNumeric, MatchesClosedFormRatio) {
  const Schedule s = Schedule::nesterov_ratio(3);
  for (long k : {1L, 9L, 120L}) EXPECT_NEAR(t_numeric(s, k, 1e-7), *s.t_closed_form(k), 2e-7);
}

TEST(TNumeric, DivergentSeriesSignalsNonConvergence) {
  EXPECT_THROW(t_numeric(Schedule::constant(1.0), 1, 1e-6), NonConvergence);
  // alpha_k = 1 - 1/k: products decay like 1/i, the series diverges
  EXPECT_THROW(t_series(Schedule::nesterov_offset(1), 2, 1e-6, 100000), NonConvergence);
  EXPECT_THROW(t_numeric(Schedule::constant(0.5), 1, 0.0), ContractViolation);
}

TEST(TNumeric, PowerAsymptote) {
  const Schedule s = Schedule::power(1, 0.5);
  double prev_err = 1e9;
  for (long k : {100L, 10000L, 1000000L}) {
    const double ratio = t_numeric(s, k, 1e-10) * 1.0 / std::sqrt(static_cast<double>(k));
    const double err = std::abs(ratio - 1.0);
    EXPECT_LT(err, prev_err);
    prev_err = err;
  }
  EXPECT_LT(prev_err, 2e-3);
}

TEST(AlphaFromT, Values) {
  EXPECT_DOUBLE_EQ(alpha_from_t(2, 2), 0.5);
  EXPECT_DOUBLE_EQ(alpha_from_t(1, 7), 0.0);
  EXPECT_THROW(alpha_from_t(0.5, 1), ContractViolation);
  EXPECT_THROW(alpha_from_t(2, 0), ContractViolation);
}

TEST(AlphaFromT, RoundTripAllKinds) {
  // Numeric t: one truncated series at the top index, then the backward
  // recursion, which contracts the truncation error.
  for (const Schedule& s : {Schedule::nesterov_offset(3), Schedule::nesterov_ratio(3), Schedule::power(1.5, 0.6),
                            Schedule::constant(0.7)}) {
    const TSequence t(s, 3, 201, 1e-7, false);
    for (long k = 3; k <= 200; ++k) {
      if (t(k) < 1.0) continue;
      EXPECT_NEAR(alpha_from_t(t(k), t(k + 1)), s.alpha(k), 1e-6) << s.describe() << " k=" << k;
    }
  }
  for (long k : {5L, 50L}) {
    const Schedule s = Schedule::nesterov_ratio(3);
    EXPECT_NEAR(alpha_from_t(t_numeric(s, k, 1e-7), t_numeric(s, k + 1, 1e-7)), s.alpha(k), 1e-6);
  }
}

TEST(TSequence, AgreesWithSeriesAndIsConsistent) {
  const Schedule s = Schedule::power(1, 0.75);
  const TSequence t(s, 1, 2000);
  for (long k : {1L, 50L, 1999L}) EXPECT_NEAR(t(k), t_numeric(s, k, 1e-12), 1e-9 * t(k));
  for (long k = 1; k < 2000; ++k) {
    EXPECT_NEAR(t(k), 1.0 + s.alpha(k) * t(k + 1), 1e-12 * t(k));
    EXPECT_GE(t(k), 1.0);
  }
  EXPECT_THROW(t(2001), ContractViolation);
}

TEST(TSequence, ClampedHeadOfCaseOne) {
  const Schedule s = Schedule::nesterov_offset(4.5);
  const TSequence closed(s, 1, 100);
  const TSequence numeric(s, 1, 100, 1e-13, false);
  for (long k = 1; k <= 100; ++k) EXPECT_NEAR(closed(k), numeric(k), 1e-9 * closed(k)) << k;
  EXPECT_DOUBLE_EQ(closed(1), 1.0);  // alpha_1..alpha_4 clamp to 0
}

TEST(CheckConditions, ConstantMomentum) {
  const ConditionReport r = check_conditions(Schedule::constant(0.5), 1, 1000, 1e-12);
  EXPECT_TRUE(r.k0_converges);
  EXPECT_TRUE(r.k1_holds);
  EXPECT_NEAR(r.special_class_c, 0.0, 1e-15);
  EXPECT_NEAR(r.k1plus_m, 0.0, 1e-15);
  EXPECT_LE(r.bound_violation, 1e-12);
}

TEST(CheckConditions, CaseOne) {
  const ConditionReport r5 = check_conditions(Schedule::nesterov_offset(5), 2, 10000, 1e-12);
  EXPECT_LE(r5.k1plus_m, 0.5 + 1e-12);
  EXPECT_TRUE(r5.k1_holds);

  const ConditionReport r3 = check_conditions(Schedule::nesterov_offset(3), 2, 10000, 1e-12);
  EXPECT_TRUE(r3.k1_holds);
  EXPECT_LT(r3.k1plus_m, 1.0);
  EXPECT_GT(r3.k1plus_m, 1.0 - 1e-3);
  EXPECT_NEAR(r3.special_class_c, 1.0 / 3.0, 1e-12);
  EXPECT_EQ(r3.k1_holds_up_to, 10000);
}

TEST(CheckConditions, TwoTImpliedByK1) {
  const Schedule s = Schedule::nesterov_ratio(3);
  const ConditionReport r = check_conditions(s, 1, 5000, 1e-12);
  ASSERT_TRUE(r.k1_holds);
  const TSequence t(s, 1, 5001);
  for (long k = 1; k <= 5000; ++k) EXPECT_LE(t(k + 1), 2 * t(k));
}

TEST(CheckConditions, K1FailureIsLocated) {
  // alpha = 1.5: t_k = 2(k-1), growth (t_{k+1}^2 - t_k^2)/t_{k+1} -> 4 > 1
  const ConditionReport r = check_conditions(Schedule::nesterov_offset(1.5), 2, 100, 1e-12);
  EXPECT_FALSE(r.k1_holds);
  EXPECT_LT(r.k1_holds_up_to, 100);
  EXPECT_GT(r.k1plus_m, 1.0);
}

TEST(CheckConditions, PowerAsymptoteRatio) {
  const ConditionReport r = check_conditions(Schedule::power(1, 0.5), 1, 100000, 1e-12);
  EXPECT_NEAR(r.asymptote_ratio, 1.0, 0.05);
  EXPECT_LE(r.bound_violation, 1e-12);
  EXPECT_TRUE(r.k1_holds);
}

TEST(CheckConditions, RequiresOrderedRange) {
  EXPECT_THROW(check_conditions(Schedule::constant(0.5), 5, 5, 1e-9), ContractViolation);
  EXPECT_THROW(check_conditions(Schedule::constant(0.5), 0, 5, 1e-9), ContractViolation);
  EXPECT_THROW(check_conditions(Schedule::constant(1.0), 1, 5, 1e-9), NonConvergence);
}
