#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eulerforge/errors.hpp"
#include "eulerforge/schedule.hpp"

using namespace ef;

TEST(Schedule, EvolutionMatrices) {
  const Matrix3 S = evolution_matrix(ScheduleMode::standard, 0.1);
  EXPECT_NEAR(S.row(0).sum(), 1.1, 1e-15);
  EXPECT_NEAR(S.row(1).sum(), -0.1, 1e-15);
  EXPECT_NEAR(S.row(2).sum(), 1.3, 1e-15);
  const Matrix3 I = evolution_matrix(ScheduleMode::ideal, 0.1);
  EXPECT_EQ((S - I).cwiseAbs().sum(), 0.1);  // only entry (3,1) differs
  EXPECT_NEAR(S(2, 0) - I(2, 0), -0.1, 1e-16);
  Eigen::EigenSolver<Matrix3> es(S);
  std::vector<double> ev;
  for (int i = 0; i < 3; ++i) ev.push_back(es.eigenvalues()[i].real());
  std::sort(ev.begin(), ev.end());
  EXPECT_NEAR(ev[0], 0.0, 1e-14);
  EXPECT_NEAR(ev[1], 1.0, 1e-14);
  EXPECT_NEAR(ev[2], 1.1, 1e-14);
  EXPECT_THROW(evolution_matrix(ScheduleMode::no_material, 0.1), ContractError);
  EXPECT_THROW(evolution_matrix(ScheduleMode::standard, 0.0), ContractError);
}

TEST(Schedule, DominantEigenvector) {
  const Vector3 psi = dominant_eigenvector(evolution_matrix(ScheduleMode::standard, 0.2), 0.2);
  EXPECT_NEAR(psi[0], -1.2, 1e-14);
  EXPECT_NEAR(psi[1], 0.2, 1e-14);
  EXPECT_NEAR(psi[2], 2.9, 1e-14);
  for (auto mode : {ScheduleMode::standard, ScheduleMode::ideal})
    for (double d = 0.02; d <= 2.0; d += 0.02) {
      const Matrix3 T = evolution_matrix(mode, d);
      const Vector3 p = dominant_eigenvector(T, d);
      EXPECT_LT((T * p - (1 + d) * p).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT(p[0], 0.0);
      EXPECT_GT(p[1], 0.0);
      EXPECT_GT(p[2], 0.0);
      const Vector3 closed = mode == ScheduleMode::standard ? Vector3(-1 - d, d, 2.5 + 2 * d)
                                                            : Vector3(-1 - d, d, 1.5 + d);
      EXPECT_LT((p - closed).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Schedule, HolderExponents) {
  EXPECT_NEAR(holder_exponent(ScheduleMode::standard, 1e-12), 0.2, 1e-11);
  EXPECT_NEAR(holder_exponent(ScheduleMode::ideal, 1e-12), 1.0 / 3.0, 1e-11);
  EXPECT_NEAR(holder_exponent(ScheduleMode::no_material, 1.0 / std::sqrt(2.0)), 1.0 / (3.0 + std::sqrt(8.0)), 1e-15);
  // no_material is maximized at 1/sqrt 2
  const double top = holder_exponent(ScheduleMode::no_material, 1.0 / std::sqrt(2.0));
  for (double d : {0.5, 0.6, 0.8, 0.9}) EXPECT_LT(holder_exponent(ScheduleMode::no_material, d), top);
  EXPECT_NEAR(holder_exponent(ScheduleMode::standard, 1e-4), 0.199984, 1e-6);
  EXPECT_DOUBLE_EQ(pressure_exponent(ScheduleMode::standard, 0.3), 2 * holder_exponent(ScheduleMode::standard, 0.3));
}

TEST(Schedule, GrowthClassificationFlipsAtTheExponent) {
  for (auto mode : {ScheduleMode::standard, ScheduleMode::ideal})
    for (double d : {0.05, 0.1, 0.5, 1.0}) {
      const double a = holder_exponent(mode, d);
      const Vector3 psi = dominant_eigenvector(evolution_matrix(mode, d), d);
      EXPECT_EQ(classify_growth(velocity_weights(mode, d, a - 0.01), psi), Growth::converges);
      EXPECT_EQ(classify_growth(velocity_weights(mode, d, a), psi), Growth::critical);
      EXPECT_EQ(classify_growth(velocity_weights(mode, d, a + 0.01), psi), Growth::diverges);
      EXPECT_EQ(classify_growth(pressure_weights(mode, d, 2 * a), psi), Growth::critical);
      EXPECT_NEAR(bisect_exponent(mode, d, false), a, 1e-10);
      EXPECT_NEAR(bisect_exponent(mode, d, true), 2 * a, 1e-10);
    }
  const Vector3 psi = dominant_eigenvector(evolution_matrix(ScheduleMode::standard, 0.1), 0.1);
  const double ts = time_support_weights().dot(psi);
  EXPECT_LT(ts, -2.0);
  EXPECT_EQ(classify_growth(time_support_weights(), psi), Growth::converges);
}

TEST(Schedule, LagrangeProjectionAndMinimalPolynomial) {
  for (auto mode : {ScheduleMode::standard, ScheduleMode::ideal})
    for (double d : {0.01, 0.1, 1.0}) {
      const Matrix3 T = evolution_matrix(mode, d);
      EXPECT_LT(minimal_polynomial_residual(T, d), 1e-12);
      // bounded: the remainder lives on the eigenvalues 0 and 1
      const double b20 = lagrange_projection_bound(T, d, 20);
      const double b50 = lagrange_projection_bound(T, d, 50);
      EXPECT_LT(b50, 10.0 / d);
      EXPECT_NEAR(b20, b50, 1e-9 * b50);
    }
}

TEST(Schedule, PlanWithSearchedZ) {
  PlanInput in;
  in.search = true;
  const IterationPlan p = plan_parameters(in);
  EXPECT_TRUE(p.all_admissible());
  ASSERT_EQ(p.steps.size(), 21u);
  for (std::size_t k = 0; k + 1 < p.steps.size(); ++k) {
    const auto& a = p.steps[k];
    const auto& b = p.steps[k + 1];
    EXPECT_NEAR(b.log_e_R, 1.1 * a.log_e_R - std::log(p.Z), 1e-9 * std::abs(b.log_e_R));
    EXPECT_NEAR(b.log_e_v, a.log_e_R, 1e-12);
    EXPECT_LT(b.log_e_R, a.log_e_R);
  }
  EXPECT_NEAR(p.loglog_slope, 1.1, 0.02);
  EXPECT_LT(p.theta_sum, 2.0 * std::exp(p.steps[0].log_theta));
  // slightly smaller Z is no longer admissible
  PlanInput fixed = in;
  fixed.search = false;
  fixed.Z = p.Z * (1 - 1e-6);
  EXPECT_FALSE(plan_parameters(fixed).all_admissible());
  fixed.Z = p.Z;
  EXPECT_TRUE(plan_parameters(fixed).all_admissible());
}

TEST(Schedule, PlanInputsValidated) {
  PlanInput in;
  in.Z = 0.5;  // below e_R0^delta
  EXPECT_THROW(plan_parameters(in), ContractError);
  in.Z = 10.0;
  in.mode = ScheduleMode::no_material;
  EXPECT_THROW(plan_parameters(in), ContractError);
  EXPECT_THROW(parse_mode("fancy"), ContractError);
  EXPECT_EQ(parse_mode("ideal"), ScheduleMode::ideal);
}

TEST(Schedule, ExponentFormulaOnRandomDeltas) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1e-3, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double d = u(rng);
    EXPECT_NEAR(holder_exponent(ScheduleMode::standard, d), (1 + d) / (5 + 9 * d + 4 * d * d), 1e-14);
  }
}
