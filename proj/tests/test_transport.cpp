#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "eulerforge/iterate.hpp"
#include "eulerforge/transport.hpp"

using namespace ef;

namespace {

GridSpec grid(int n) {
  GridSpec g;
  g.n = n;
  return g;
}

Field constant_velocity(const GridSpec& g, const Vec3& c, double t) {
  Field v = Field::vector(g, t);
  for (int a = 0; a < 3; ++a)
    for (auto& x : v[a]) x = c[a];
  return v;
}

Field bump_scalar(const GridSpec& g) {
  Field f = Field::scalar(g);
  const double h = g.spacing();
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k)
        f[0][flat_index(g.n, i, j, k)] =
            std::sin(2 * M_PI * i * h) * std::cos(2 * M_PI * (j + 2 * k) * h) + 0.3 * std::cos(4 * M_PI * k * h);
  return f;
}

}  // namespace

TEST(Transport, UniformFlowIsAShift) {
  const GridSpec g = grid(16);
  const Vec3 c{0.4, -0.2, 0.1};
  const auto flow = CoarseFlow::unmollified(g, [&](double t) { return constant_velocity(g, c, t); }, -1, 1);
  EXPECT_NEAR(flow.mean()[0], 0.4, 1e-13);
  const Field f = bump_scalar(g);
  const Field moved = transport_field(f, flow, 0.0, 0.3);
  EXPECT_LT(max_diff(moved, shift(f, {0.12, -0.06, 0.03})), 1e-12);
  const Field d = displacement_field(flow, 0.0, 0.3);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(d[a][17].real(), -0.3 * c[a], 1e-13);
}

TEST(Transport, TransportedFieldIsMaterial) {
  // (d_t + v.grad) F = 0 checked by a centred difference in time
  const GridSpec g = grid(16);
  const Field U = AbcFlow{}.velocity(g);
  const auto flow = CoarseFlow::unmollified(g, [&](double t) { Field v = U; v *= 0.3; v.time = t; return v; }, -1, 1);
  const Field f = bump_scalar(g);
  const double h = 1e-3;
  const Field a = transport_field(f, flow, 0.0, 0.1 + h, 64);
  const Field b = transport_field(f, flow, 0.0, 0.1 - h, 64);
  const Field m = transport_field(f, flow, 0.0, 0.1, 64);
  Field Dt = a - b;
  Dt *= 1.0 / (2 * h);
  Field v = U;
  v *= 0.3;
  Dt += advect(v, m);
  EXPECT_LT(Dt.max_abs(), 1e-3 * sup_derivative(m, 1));
}

TEST(Transport, CharacteristicFootMatchesPointIntegration) {
  const GridSpec g = grid(32);
  const Field U = AbcFlow{}.velocity(g);
  const auto flow = CoarseFlow::unmollified(g, [&](double t) { Field v = U; v *= 0.5; v.time = t; return v; }, -1, 1);
  const Field d = displacement_field(flow, 0.0, 0.2, 80);
  const int i = 3, j = 7, k = 11;
  const Vec3 x{i * g.spacing(), j * g.spacing(), k * g.spacing()};
  // backward characteristic from (0.2, x) lands at x + d
  const Vec3 foot = advect_point(flow, 0.2, x, -0.2, 400);
  for (int a = 0; a < 3; ++a)
    EXPECT_NEAR(wrap_half(foot[a] - x[a] - d[a][flat_index(g.n, i, j, k)].real()), 0.0, 1e-6);
}

TEST(Transport, MollifyAlongFlowPreservesSteadyTransportedData) {
  // R(t) = R0(x - c t) is transported exactly, so the time average returns R(t)
  const GridSpec g = grid(16);
  const Vec3 c{0.5, 0.25, -0.5};
  const auto flow = CoarseFlow::unmollified(g, [&](double t) { return constant_velocity(g, c, t); }, -1, 1);
  const Field R0 = bump_scalar(g);
  auto R = [&](double t) { Field r = shift(R0, {c[0] * t, c[1] * t, c[2] * t}); r.time = t; return r; };
  const Field avg = mollify_along_flow(R, flow, 0.2, 0.05);
  EXPECT_LT(max_diff(avg, R(0.2)), 1e-12);
}

TEST(Transport, CoarseFlowWindowIsEnforced) {
  const GridSpec g = grid(8);
  const auto flow = CoarseFlow::unmollified(g, [&](double t) { return Field::vector(g, t); }, 0.0, 1.0);
  EXPECT_NO_THROW(flow.check_window(0.5));
  EXPECT_THROW(flow.check_window(1.5), ContractError);
}

TEST(States, CutoffAbcSatisfiesEulerReynolds) {
  const GridSpec g = grid(16);
  CutoffAbcState s(g, AbcFlow{}, 0.0, 0.5);
  for (double t : {-0.1, 0.1, 0.25, 0.45, 0.7}) {
    const ResidualReport r = verify_state(s, t, 2e-4);
    EXPECT_LT(r.residual, 1e-8 * std::max(1.0, r.scale)) << t;
    EXPECT_LT(r.div_v, 1e-12);
  }
  EXPECT_EQ(s.stress(-0.2).max_abs(), 0.0);
  EXPECT_EQ(s.stress(0.6).max_abs(), 0.0);
  EXPECT_GT(s.stress(0.25).max_abs(), 0.1);
}

TEST(States, GalileanAndComovingFramesInvert) {
  const GridSpec g = grid(16);
  auto base = std::make_shared<CutoffAbcState>(g, AbcFlow{}, 0.0, 0.5);
  const Vec3 c{1.0, 0.5, -0.3};
  auto boosted = std::make_shared<GalileanState>(base, c);
  ComovingState co(boosted, c);
  for (double t : {0.1, 0.3}) {
    EXPECT_LT(max_diff(co.velocity(t), base->velocity(t)), 1e-13);
    EXPECT_LT(max_diff(co.pressure(t), base->pressure(t)), 1e-13);
    EXPECT_LT(max_diff(co.stress(t), base->stress(t)), 1e-13);
    const ResidualReport r = verify_state(*boosted, t, 2e-4);
    EXPECT_LT(r.residual, 1e-8 * std::max(1.0, r.scale));
  }
}

TEST(Phases, PartitionOfUnityAlongTheFlow) {
  const GridSpec g = grid(16);
  const Field U = AbcFlow{}.velocity(g);
  const auto flow = CoarseFlow::unmollified(g, [&](double t) { Field v = U; v *= 0.2; v.time = t; return v; }, -1, 1);
  const IcosaFrame fr = build_frame();
  const RotationFamily rot = build_rotations(fr, Vector3(1, 2, 3));
  PhaseConfig pc;
  pc.tau = 0.05;
  PhaseBundle b(fr, rot, flow, pc);
  EXPECT_LT(b.partition_error(0.13), 1e-12);
  // at the generation time each phase is the rotated linear phase
  const GenerationSlice s = b.slice(2, b.t_gen(2));
  const WaveIndex I{{1, 0, 1}, 2, 3};
  for (std::size_t p : {0ul, 100ul, 2047ul})
    EXPECT_LT((b.phase_gradient(s, I, p) - b.rotated_face(I)).norm(), 1e-12);
  // gradients drift only slowly over one tau
  const GenerationSlice s2 = b.slice(2, b.t_gen(2) + 0.5 * pc.tau);
  EXPECT_LT(b.stability(s2, false), pc.stability_c);
}
