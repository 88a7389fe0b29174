#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eulerforge/microstress.hpp"

using namespace ef;

namespace {

std::array<Vector3, 6> rotated_frame(const IcosaFrame& fr, const Matrix3& O, double scale = 1.0) {
  std::array<Vector3, 6> g;
  for (int i = 0; i < 6; ++i) g[i] = scale * compose(fr.F[i], O);
  return g;
}

Matrix3 random_trace_free(std::mt19937_64& rng, double size) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix3 M;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) M(i, j) = M(j, i) = u(rng);
  M -= M.trace() / 3.0 * Matrix3::Identity();
  return size * M / M.cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Newton, ReferenceSolutionIsGammaTilde) {
  Matrix6 A = Matrix6::Constant(16.0 / 25.0);
  A.diagonal().setZero();
  const GammaSolve s = solve_gamma(A, Vector6::Constant(1.0 / 6.0));
  EXPECT_EQ(s.iterations, 0);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(s.gamma(i), std::sqrt(5.0 / 96.0), 1e-15);
}

TEST(Newton, ConvergesQuadraticallyNearTheReference) {
  const IcosaFrame fr = build_frame();
  const auto g = rotated_frame(fr, Matrix3::Identity());
  const Matrix6 A = stress_matrix(g, sigma_partners(fr, g));
  Vector6 y;
  for (int J = 0; J < 6; ++J) y(J) = 1.0 / 6.0 + 0.01 * std::sin(J + 1.0);
  const GammaSolve s = solve_gamma(A, y);
  EXPECT_LE(s.iterations, 6);
  EXPECT_LT((A.transpose() * s.gamma.cwiseProduct(s.gamma) - y).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Newton, OutsideTheDomainIsANumericalError) {
  Matrix6 A = Matrix6::Constant(16.0 / 25.0);
  A.diagonal().setZero();
  Vector6 y = Vector6::Constant(1.0 / 6.0);
  y(0) = 1.0;
  EXPECT_THROW(solve_gamma(A, y), NumericalError);
  EXPECT_THROW(solve_gamma(A, -y), NumericalError);
}

TEST(Newton, BasinCalibrationIsDeterministic) {
  const double a = calibrate_newton_basin(300, 7);
  const double b = calibrate_newton_basin(300, 7);
  EXPECT_EQ(a, b);
  EXPECT_GT(a, 0.01);
  EXPECT_LE(a, 0.2);
}

TEST(Amplitudes, StressEquationAndBeltramiAtAPoint) {
  const IcosaFrame fr = build_frame();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix3 O = axis_rotation(Vector3(1, -2, 0.5).normalized(), 0.3 * trial);
    const double scale = 0.98 + 0.002 * trial;  // |grad xi| need not be exactly one
    const auto g = rotated_frame(fr, O, scale);
    const Matrix3 eps = random_trace_free(rng, 0.03);
    const double w = 1.7;
    const PointWaves pw = point_amplitudes(fr, g, eps, w);
    Matrix3 S = Matrix3::Zero();
    for (int I = 0; I < 6; ++I) {
      S += 2.0 * (pw.a[I] * pw.a[I].transpose() + pw.b[I] * pw.b[I].transpose());
      const Vector3 n = g[I].normalized();
      // (i g) x (a + i b) = |g| (a + i b)
      EXPECT_LT((-g[I].cross(pw.b[I]) - g[I].norm() * pw.a[I]).norm(), 1e-12);
      EXPECT_LT((g[I].cross(pw.a[I]) - g[I].norm() * pw.b[I]).norm(), 1e-12);
      EXPECT_LT(std::abs(n.dot(pw.a[I])) + std::abs(n.dot(pw.b[I])), 1e-13);
    }
    const Matrix3 target = w * w * (Matrix3::Identity() / 3.0 + eps);
    EXPECT_LT((S - target).cwiseAbs().maxCoeff(), 1e-10) << trial;
  }
}

TEST(Amplitudes, EpsilonTensorIsTraceFree) {
  GridSpec gs;
  gs.n = 8;
  Field R = Field::sym_tensor(gs);
  R.tc(0, 0)[5] = 3.0;
  R.tc(0, 1)[5] = -1.0;
  R.tc(2, 2)[5] = 0.5;
  const Matrix3 e = epsilon_tensor(R, 5, 2.0);
  EXPECT_NEAR(e.trace(), 0.0, 1e-15);
  EXPECT_NEAR(e(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(e(0, 0), -(3.0 - 3.5 / 3.0) / 2.0, 1e-15);
}

TEST(EnergyProfile, PlateauAndSupport) {
  const EnergyProfile e = build_energy_profile(0.0, 0.5, 2.0, 0.1, 0.3, 0.05);
  EXPECT_NEAR(e.e(0.25), 20.0 * 0.3 * 2.0, 1e-12);
  EXPECT_NEAR(e.e(-0.1), 12.0, 1e-12);  // still on the plateau lo - theta
  EXPECT_EQ(e.e(e.support_lo() - 1e-9), 0.0);
  EXPECT_EQ(e.e(e.support_hi() + 1e-9), 0.0);
  EXPECT_NEAR(e.plateau_lo(), -0.1, 1e-15);
  // derivatives consistent with finite differences
  const double t = e.a + 0.3 * e.tau_s, h = 1e-6;
  EXPECT_NEAR(e.d_sqrt_e(t), (e.sqrt_e(t + h) - e.sqrt_e(t - h)) / (2 * h), 1e-5 * std::abs(e.d_sqrt_e(t)));
  EXPECT_NEAR(e.d2_sqrt_e(t), (e.d_sqrt_e(t + h) - e.d_sqrt_e(t - h)) / (2 * h), 1e-4 * std::abs(e.d2_sqrt_e(t)));
}

TEST(EnergyProfile, DerivativeBoundsScaleWithTheSmoothingTime) {
  // tau_s = B0 theta with theta = 1/(Xi e_v^1/2): normalized bounds independent of Xi
  const double e_v = 1.5, e_R = 0.4, K = 0.2;
  std::array<double, 3> prev{};
  for (double Xi : {5.0, 20.0}) {
    const double theta = 1.0 / (Xi * std::sqrt(e_v));
    const auto b = energy_profile_bounds(build_energy_profile(0.0, 0.3, e_R, theta, K, theta), Xi, e_v);
    EXPECT_NEAR(b[0], std::sqrt(20.0), 1e-12);
    if (Xi > 5.0)
      for (int r = 1; r < 3; ++r) EXPECT_NEAR(b[r], prev[r], 1e-2 * prev[r]);
    prev = b;
  }
}
