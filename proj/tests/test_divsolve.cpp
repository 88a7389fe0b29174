#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eulerforge/divsolve.hpp"
#include "eulerforge/state.hpp"

using namespace ef;

namespace {

GridSpec grid(int n) {
  GridSpec g;
  g.n = n;
  return g;
}

// smooth phase xi = f.x + 0.05 sin(2 pi x) and a compactly supported amplitude
OscillatoryData bump_data(const GridSpec& g, double lambda) {
  OscillatoryData d;
  d.lambda = lambda;
  d.u = Field::vector(g);
  const Vector3 f = Vector3(1, 2, 2).normalized();
  const double h = g.spacing();
  d.phase.resize(g.size());
  d.grad.resize(g.size());
  d.mask.assign(g.size(), 0);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        const std::size_t p = flat_index(g.n, i, j, k);
        const Vector3 x(i * h, j * h, k * h);
        d.phase[p] = f.dot(x) + 0.05 * std::sin(2 * M_PI * x[0]);
        d.grad[p] = f + Vector3(0.1 * M_PI * std::cos(2 * M_PI * x[0]), 0, 0);
        const double r2 = (x - Vector3(0.5, 0.5, 0.5)).squaredNorm();
        if (r2 < 0.09) {
          d.mask[p] = 1;
          const double w = std::exp(-1.0 / (1.0 - r2 / 0.09));
          d.u[0][p] = w;
          d.u[1][p] = cplx(0.0, -0.5 * w);
          d.u[2][p] = 0.25 * w * x[1];
        }
      }
  return d;
}

}  // namespace

TEST(DivSolve, SymbolInvertsTheDivergence) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector3 g(u(rng), u(rng), u(rng));
    const Vector3c v(cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng)));
    const Matrix3c q = q_symbol(g, v);
    EXPECT_LT((q - q.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    const Vector3c back = cplx(0, 1) * (q.transpose() * g.cast<cplx>());
    EXPECT_LT((back - v).cwiseAbs().maxCoeff(), 1e-13);
    // degree -1 in grad xi
    EXPECT_LT((q_symbol(2.0 * g, v) - 0.5 * q).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_THROW(q_symbol(Vector3::Zero(), Vector3c::Ones()), NumericalError);
}

TEST(DivSolve, ParametrixTelescopes) {
  const GridSpec g = grid(16);
  const OscillatoryData d = bump_data(g, 40.0);
  for (int D = 1; D <= 3; ++D) {
    const ParametrixExpansion e = parametrix_expand(d, D);
    EXPECT_EQ(int(e.q.size()), D);
    EXPECT_LT(telescoping_residual(d, e), 1e-12 * std::max(1.0, d.u.max_abs()));
  }
  // each order gains a factor 1/lambda in the remainder
  const double r1 = parametrix_expand(d, 1).residual.max_abs() / 40.0;
  const double r2 = parametrix_expand(d, 2).residual.max_abs() / (40.0 * 40.0);
  EXPECT_LT(r2, r1);
}

TEST(DivSolve, ParametrixPlusSpectralSolveIsExact) {
  const GridSpec g = grid(16);
  const OscillatoryData d = bump_data(g, 30.0);
  Field U = multiply(d.carrier(), d.u);
  U = remove_mean(U);
  const Field Qp = parametrix_tensor(d, parametrix_expand(d, 2));
  const Field Q = solve_with_parametrix(U, Qp);
  EXPECT_TRUE(Q.symmetric());
  EXPECT_LT(divergence_residual(Q, U), 1e-10 * U.max_abs());
  EXPECT_LT(divergence_residual(solve_with_parametrix(U, Field()), U), 1e-10 * U.max_abs());
}

TEST(DivSolve, TimeCutoff) {
  EXPECT_EQ(elliptic_time_cutoff(0.0), 1.0);
  EXPECT_EQ(elliptic_time_cutoff(-1.0), 1.0);
  EXPECT_EQ(elliptic_time_cutoff(1.5), 0.0);
  EXPECT_EQ(elliptic_time_cutoff(-2.0), 0.0);
  EXPECT_GT(elliptic_time_cutoff(1.25), 0.0);
}

TEST(DivSolve, TransportEllipticTracksTheData) {
  const GridSpec g = grid(16);
  const Field v0 = AbcFlow{}.velocity(g);
  const auto flow = CoarseFlow::unmollified(g, [&](double t) { Field f = v0; f *= 0.5; f.time = t; return f; }, -1, 1);
  auto U = [&](double t) {
    Field u = Field::vector(g, t);
    const double h = g.spacing();
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        for (int k = 0; k < g.n; ++k) {
          const std::size_t p = flat_index(g.n, i, j, k);
          u[0][p] = std::sin(2 * M_PI * (j * h + 0.3 * t)) * std::cos(2 * M_PI * k * h);
          u[1][p] = std::cos(2 * M_PI * (i * h - t));
          u[2][p] = (1 + t * t) * std::sin(2 * M_PI * (i + j) * h);
        }
    return u;
  };
  const double tau = 0.05, tI = 0.1;
  const std::vector<double> times{tI - 1.6 * tau, tI - 0.5 * tau, tI, tI + 1.2 * tau, tI + 1.5 * tau};
  TransportEllipticOptions opt;
  opt.steps_per_tau = 16;
  const auto r = transport_elliptic_solve(U, flow, tau, tI, times, opt);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double s = (times[k] - tI) / tau;
    Field target = U(times[k]);
    target *= elliptic_time_cutoff(s);
    EXPECT_LT(divergence_residual(r.Q[k], target), 1e-8) << s;
    if (std::abs(s) >= 1.5) EXPECT_EQ(r.Q[k].max_abs(), 0.0);
  }
}

TEST(DivSolve, TransportEllipticRejectsNonzeroMean) {
  const GridSpec g = grid(8);
  const auto flow = CoarseFlow::unmollified(g, [&](double t) { return Field::vector(g, t); }, -1, 1);
  auto U = [&](double t) {
    Field u = Field::vector(g, t);
    for (auto& x : u[0]) x = 1.0;
    return u;
  };
  EXPECT_THROW(transport_elliptic_solve(U, flow, 0.1, 0.0, {0.0}), ContractError);
}
