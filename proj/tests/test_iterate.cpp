#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "eulerforge/iterate.hpp"

using namespace ef;

namespace {

GridSpec grid(int n) {
  GridSpec g;
  g.n = n;
  return g;
}

FrequencyEnergyLevels fixed_levels() {
  FrequencyEnergyLevels lv;
  lv.Xi = 2.0;
  lv.L = 4;
  lv.e_v = 1.27324;
  lv.e_R = 1.27324;
  return lv;
}

// 32^3 stage: coarser mollifiers and lambda kept below the resolvable limit
StageConfig small_config() {
  StageConfig c;
  c.grid = grid(32);
  c.B_lambda = 0.4;
  c.a_v = c.a_R = 2.0;
  c.K = 2.41167;
  c.levels = fixed_levels();
  return c;
}

}  // namespace

TEST(Levels, StationaryFlowHasNoStress) {
  const GridSpec g = grid(16);
  StationaryState s(g, AbcFlow{});
  const FrequencyEnergyLevels lv = measure_levels(s, 2.0, 4, {0.0, 0.5}, 1e-3);
  EXPECT_EQ(lv.e_R, 0.0);
  // each partial of U is a single mode of size (2 pi)^k, so k = 1 dominates: (2 pi / 4 pi)^2
  EXPECT_GT(lv.e_v, 0.0);
  EXPECT_NEAR(lv.from_v, std::pow(2 * M_PI / (2 * M_PI * 2.0), 2), 1e-10);
}

TEST(Levels, CutoffAbcLevelsAreOrdered) {
  const GridSpec g = grid(16);
  CutoffAbcState s(g, AbcFlow{}, 0.0, 0.5);
  const FrequencyEnergyLevels lv = measure_levels(s, 2.0, 4, {0.0, 0.125, 0.25, 0.375, 0.5}, 1e-4);
  EXPECT_GT(lv.e_R, 0.0);
  EXPECT_LE(lv.e_R, lv.e_v);
  EXPECT_GE(lv.e_R, lv.from_R);
  EXPECT_GE(lv.e_R, lv.from_DtR);
}

TEST(Parameters, DerivedValues) {
  StageConfig c = small_config();
  c.grid = grid(64);
  c.B_lambda = 1.0;
  const StageParameters p = derive_parameters(c, fixed_levels(), {0.0, 0.5}, 2.41167);
  const double Xa = 4 * M_PI;
  EXPECT_NEAR(p.theta, 1.0 / (Xa * std::sqrt(1.27324)), 1e-12);
  EXPECT_NEAR(p.b, 0.25 * std::sqrt(1.0 / 8.0), 1e-12);
  EXPECT_NEAR(p.tau, p.b * p.theta, 1e-15);
  EXPECT_NEAR(p.lambda, Xa * 8.0, 1e-12);
  EXPECT_NEAR(p.eps_v, 2.0 / Xa * std::pow(8.0, -0.25), 1e-12);
  EXPECT_NEAR(p.eps_t, 0.5 / (Xa * 8.0 * std::sqrt(1.27324)), 1e-12);
  EXPECT_LT(p.window.lo, 0.0);
  EXPECT_GT(p.window.hi, 0.5);
}

TEST(Parameters, InadmissibleRegimesThrow) {
  StageConfig c = small_config();
  c.N = 1.5;
  c.eta = 1.0;  // Xi^eta = 2 > N
  EXPECT_THROW(derive_parameters(c, fixed_levels(), {0.0, 0.5}, 1.0), NumericalError);
  c = small_config();
  FrequencyEnergyLevels lv = fixed_levels();
  lv.e_R = 0.01;  // (e_v/e_R)^{3/2} = 1436 > N
  EXPECT_THROW(derive_parameters(c, lv, {0.0, 0.5}, 1.0), NumericalError);
  lv.e_R = 0.0;
  EXPECT_TRUE(derive_parameters(c, lv, {0.0, 0.5}, 1.0).trivial);
}

TEST(Parameters, ConfigValidation) {
  StageConfig c = small_config();
  c.grid.n = 256;
  EXPECT_THROW(c.validate(), ContractError);
  c = small_config();
  c.parametrix_H = 1;
  EXPECT_THROW(c.validate(), ContractError);
  c = small_config();
  c.steps_per_tau = 2;
  EXPECT_THROW(c.validate(), ContractError);
}

TEST(Stage, TrivialForAnExactSolution) {
  const GridSpec g = grid(16);
  StageConfig c;
  c.grid = g;
  c.K = 1.0;
  Stage st(std::make_shared<StationaryState>(g, AbcFlow{}), c);
  EXPECT_TRUE(st.params().trivial);
  const StageSlice s = st.evaluate(0.3);
  EXPECT_EQ(s.V.max_abs(), 0.0);
  EXPECT_EQ(s.R1.max_abs(), 0.0);
  EXPECT_LT(max_diff(s.v1, s.v), 1e-15);
}

TEST(Stage, OneSliceOnACoarseGrid) {
  auto state = std::make_shared<CutoffAbcState>(grid(32), AbcFlow{}, 0.0, 0.5);
  Stage st(state, small_config());
  const StageParameters& p = st.params();
  EXPECT_FALSE(p.trivial);
  EXPECT_NEAR(p.K, 2.41167, 1e-12);
  // the energy profile covers supp R with margin theta on the plateau
  EXPECT_LE(st.energy().plateau_lo(), -p.theta + 1e-12);
  EXPECT_NEAR(st.energy().e(0.25), 20.0 * p.K * p.e_R, 1e-9);

  const StageSlice s = st.evaluate(0.25);
  EXPECT_GT(s.waves, 0);
  EXPECT_LT(s.beltrami, 1e-10);
  EXPECT_LT(s.div_V, 1e-10);
  EXPECT_LT(s.imag_V, 1e-12);
  EXPECT_LT(s.stress_eq, 1e-8 * p.e_R);
  EXPECT_LT(s.momentum_drift, 1e-10);
  EXPECT_LT(s.measured_residual, 1e-6 * s.residual_scale);
  EXPECT_LT(std::max({s.div_res_L, s.div_res_T, s.div_res_H}), 1e-7 * std::max(1.0, s.R1.max_abs()));
  // R1 is the sum of its families
  Field sum = s.Q_M;
  for (const Field* f : {&s.Q_S, &s.Q_L, &s.Q_T, &s.Q_H}) sum += *f;
  EXPECT_LT(max_diff(sum, s.R1), 1e-12 * s.R1.max_abs());
  EXPECT_LT(max_diff(s.v1, s.v + s.V), 1e-14);

  const StageReport rep = summarize(st, {s});
  EXPECT_NEAR(rep.norm_R1, s.R1.max_abs(), 1e-12);
  EXPECT_NE(rep.to_json().find("\"lambda\""), std::string::npos);
}

TEST(Stage, NoCorrectionOutsideTheEnergyWindow) {
  auto state = std::make_shared<CutoffAbcState>(grid(32), AbcFlow{}, 0.0, 0.5);
  Stage st(state, small_config());
  const double t = st.energy().support_lo() - 0.01;
  if (t >= st.params().window.lo) {
    EXPECT_TRUE(st.waves(t).empty());
  }
  EXPECT_EQ(st.energy().e(t), 0.0);
}
