// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// The 64^3 cut-off ABC stage is built once and shared by criteria 4-9 and 11.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "eulerforge/iterate.hpp"
#include "eulerforge/schedule.hpp"

using namespace ef;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, double secs, double limit, const std::string& detail) {
  const bool in_time = secs < limit;
  if (!(ok && in_time)) ++failures;
  std::printf("criterion %2d: %s  %s  [%.1f s, limit %.0f s%s]\n", id, ok && in_time ? "PASS" : "FAIL", detail.c_str(),
              secs, limit, in_time ? "" : ", over time");
  std::fflush(stdout);
}

double rel_diff(const Field& a, const Field& b) { return max_diff(a, b) / std::max(1e-300, b.max_abs()); }

// ---------------------------------------------------------------- 1-3

void geometry_identities() {
  const auto t0 = Clock::now();
  const IcosaFrame fr = build_frame();
  const FrameIdentityReport r = check_frame(fr);
  const double worst = std::max({r.unit_norm, r.metric, r.dot_squared, r.wedge_squared, r.sigma_wedge, r.sigma_order});
  char buf[256];
  std::snprintf(buf, sizeof buf, "metric %.1e, (f.f')^2 %.1e, |f^sf|^2 %.1e, worst %.1e <= 1e-12", r.metric,
                r.dot_squared, r.sigma_wedge, worst);
  report(1, worst <= 1e-12, seconds_since(t0), 1.0, buf);
}

void stress_matrix_check() {
  const auto t0 = Clock::now();
  const IcosaFrame fr = build_frame();
  std::array<Vector3, 6> g;
  for (int i = 0; i < 6; ++i) g[i] = fr.F[i];
  const Matrix6 A = stress_matrix(g, sigma_partners(fr, g));
  double diag = 0.0, off = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      (i == j ? diag : off) = std::max(i == j ? diag : off, std::abs(A(i, j) - (i == j ? 0.0 : 16.0 / 25.0)));
  Eigen::SelfAdjointEigenSolver<Matrix6> es(0.5 * (A + A.transpose()));
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 6);
  std::sort(ev.begin(), ev.end());
  double eig = std::abs(ev[5] - 16.0 / 5.0);
  for (int i = 0; i < 5; ++i) eig = std::max(eig, std::abs(ev[i] + 16.0 / 25.0));
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  // gamma~ from the Newton solve against 1/6 and the closed form
  const GammaSolve s = solve_gamma(A, Vector6::Constant(1.0 / 6.0));
  double gam = 0.0;
  for (int i = 0; i < 6; ++i) gam = std::max(gam, std::abs(s.gamma(i) * s.gamma(i) - 5.0 / 96.0));
  const double consistency = std::abs(5.0 * (16.0 / 25.0) * (5.0 / 96.0) - 1.0 / 6.0);
  char buf[256];
  std::snprintf(buf, sizeof buf, "diag %.1e, off-diag %.1e, eigenvalues %.1e, gamma^2 - 5/96 %.1e, 5(16/25)(5/96) - 1/6 %.1e",
                diag, off, eig, gam, consistency);
  report(2, diag <= 1e-12 && off <= 1e-12 && asym <= 1e-12 && eig <= 1e-10 && gam <= 1e-14 && consistency <= 1e-16,
         seconds_since(t0), 1.0, buf);
}

void rotation_family() {
  const auto t0 = Clock::now();
  const IcosaFrame fr = build_frame();
  const RotationFamily rot = build_rotations(fr, Vector3(1, 2, 3));
  const SeparationReport r = separation(fr, rot);
  char buf[256];
  std::snprintf(buf, sizeof buf, "16 rotations, min separation %.4f over %ld admissible pairs (%ld excluded f,-f pairs)",
                r.min_sep, r.admissible_pairs, r.zero_pairs);
  report(3, r.min_sep >= 0.05 && r.admissible_pairs + r.zero_pairs <= 36864, seconds_since(t0), 5.0, buf);
}

// ---------------------------------------------------------------- 4-5

void stress_and_beltrami(const Stage& st, double setup) {
  const GridSpec& g = st.config().grid;
  const double eR = st.params().e_R;
  double worst_eq = 0.0, worst_belt = 0.0, worst_div = 0.0, worst_imag = 0.0, min_ratio = 1e300;
  double t4 = 0.0, t5 = 0.0;
  int charts = 0;
  for (double t : {0.1, 0.25, 0.4}) {
    auto c0 = Clock::now();
    const double e = st.energy().e(t);
    const Field Re = st.R_eps(t);
    min_ratio = std::min(min_ratio, e / std::max(1e-300, Re.max_abs()));
    const auto cw = st.waves(t);
    StressSum ssum(g);
    for (const auto& c : cw) ssum.add(c);
    worst_eq = std::max(worst_eq, ssum.residual(Re, e));
    t4 += seconds_since(c0);

    c0 = Clock::now();
    CorrectionBuilder b(g, st.params().lambda, t);
    for (const auto& c : cw) {
      b.add(c);
      if (!c.points.empty()) ++charts;
      for (int f = 0; f < 6; ++f)
        for (std::size_t k = 0; k < c.points.size(); ++k) {
          const Vector3& gr = c.grad[f][k];
          const Vector3& a = c.a[f][k];
          const Vector3& bb = c.b[f][k];
          // (i g) x (a + i b) = |g| (a + i b), real and imaginary parts
          const Vector3 re = -gr.cross(bb) - gr.norm() * a;
          const Vector3 im = gr.cross(a) - gr.norm() * bb;
          worst_belt = std::max({worst_belt, re.cwiseAbs().maxCoeff(), im.cwiseAbs().maxCoeff()});
        }
    }
    Field V = b.V();
    worst_imag = std::max(worst_imag, V.max_imag());
    V.make_real();
    worst_div = std::max(worst_div, div(V).max_abs());
    t5 += seconds_since(c0);
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "max |sum v v* - (e/3 - R_eps)| = %.2e (bound %.2e), min e/|R_eps| = %.2f >= K = %.2f, t = 0.1/0.25/0.4; "
                "shared stage setup %.0f s",
                worst_eq, 1e-8 * eR, min_ratio, st.params().K, setup);
  report(4, worst_eq <= 1e-8 * eR && min_ratio >= st.params().K * (1 - 1e-12) && charts > 0, t4, 60.0, buf);
  std::snprintf(buf, sizeof buf, "Beltrami %.1e, div V %.1e, imag V %.1e over %d live charts", worst_belt, worst_div,
                worst_imag, charts);
  report(5, worst_belt <= 1e-10 && worst_div <= 1e-10 && worst_imag <= 1e-12 && charts > 0, t5, 30.0, buf);
}

// ---------------------------------------------------------------- 6

void energy_prescription(const Stage& st) {
  const auto t0 = Clock::now();
  const double lam = st.params().lambda;
  const std::vector<double> lams{0.25 * lam, 0.5 * lam, lam};
  std::array<double, 3> gap{0, 0, 0};
  for (double t : {0.0, 0.1, 0.25, 0.4, 0.6}) {
    const EnergySample es = st.energy_sample(t, lams);
    for (int i = 0; i < 3; ++i) gap[i] = std::max(gap[i], std::abs(es.int_V2[i] - es.e));
  }
  const double bound = 10.0 * st.params().e_R / st.config().N;
  const double r1 = gap[0] / gap[1], r2 = gap[1] / gap[2];
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "gaps %.3g, %.3g, %.3g at lambda/4, lambda/2, lambda = %.1f; bound 10 e_R/N = %.3g; ratios %.2f, %.2f",
                gap[0], gap[1], gap[2], lam, bound, r1, r2);
  report(6, gap[2] <= bound && r1 >= 1.8 && r2 >= 1.8, seconds_since(t0), 300.0, buf);
}

// ---------------------------------------------------------------- 7

void divergence_solvers(const StageSlice& s, double slice_secs) {
  const auto t0 = Clock::now();
  const double rL = s.div_res_L / std::max(1e-300, s.U_L.max_abs());
  const double rT = s.div_res_T / std::max(1e-300, s.U_T.max_abs());
  const double rH = s.div_res_H / std::max(1e-300, s.U_H.max_abs());

  // transport-elliptic solver against the cut-off spectral inverse
  GridSpec g;
  g.n = 32;
  const Field v0 = AbcFlow{}.velocity(g);
  const auto flow = CoarseFlow::unmollified(g, [&](double t) { Field f = v0; f.time = t; return f; }, -1, 1);
  auto U = [&](double t) {
    Field u = Field::vector(g, t);
    const double h = g.spacing();
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        for (int k = 0; k < g.n; ++k) {
          const double x = i * h, y = j * h, z = k * h;
          const auto p = flat_index(g.n, i, j, k);
          u[0][p] = std::sin(2 * M_PI * (y + 0.3 * t)) * std::cos(2 * M_PI * z);
          u[1][p] = std::cos(2 * M_PI * (x - t)) + 0.5 * std::sin(4 * M_PI * z);
          u[2][p] = std::sin(2 * M_PI * (x + y)) * (1 + t * t);
        }
    return u;
  };
  const double tau = 0.05, tI = 0.1;
  std::vector<double> times;
  for (int q = -8; q <= 8; ++q) times.push_back(tI + 0.25 * q * tau);
  const auto te = transport_elliptic_solve(U, flow, tau, tI, times);
  double oracle = 0.0, outside = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double sc = (times[k] - tI) / tau;
    const Field oracle_div = div(elliptic_time_cutoff(sc) * inverse_divergence(U(times[k])));
    oracle = std::max(oracle, max_diff(div(te.Q[k]), oracle_div));
    if (std::abs(sc) >= 1.5) outside = std::max(outside, te.Q[k].max_abs());
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "relative |div Q - data|: L %.1e, T %.1e, H %.1e; transport-elliptic vs spectral %.1e; "
                "max |Q| outside 3tau/2 = %g",
                rL, rT, rH, oracle, outside);
  report(7, std::max({rL, rT, rH}) <= 1e-7 && oracle <= 1e-8 && outside == 0.0, seconds_since(t0) + slice_secs,
         300.0, buf);
}

// ---------------------------------------------------------------- 8

void self_consistency(const Stage& st, const StageSlice& s, double secs) {
  const auto t0 = Clock::now();
  const double rel = s.measured_residual / std::max(1e-300, s.residual_scale);
  // corrections vanish outside supp e
  bool confined = true;
  for (double t : {st.energy().support_lo() - 0.01, st.energy().support_hi() + 0.01})
    confined = confined && st.energy().e(t) == 0.0 && st.waves(t).empty();
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "ER residual vs div R1: %.2e relative (|div R1| = %.3g); momentum drift %.1e; corrections confined to "
                "supp e: %s",
                rel, s.residual_scale, s.momentum_drift, confined ? "yes" : "no");
  report(8, rel <= 1e-6 && s.momentum_drift <= 1e-10 && confined, secs + seconds_since(t0),
         1200.0, buf);
}

// ---------------------------------------------------------------- 9

void stress_reduction(std::shared_ptr<const StateProvider> state, const Stage& st, const StageSlice& s_full) {
  const auto t0 = Clock::now();
  std::vector<double> norms;
  for (double scale : {0.25, 0.5}) {
    StageConfig c = st.config();
    c.B_lambda_tau = st.config().B_lambda;
    c.B_lambda = scale * st.config().B_lambda;
    c.levels = st.levels();
    c.K = st.params().K;
    Stage sub(state, c);
    norms.push_back(sub.evaluate(0.25).R1.max_abs());
  }
  norms.push_back(s_full.R1.max_abs());
  const double r1 = norms[1] / norms[0], r2 = norms[2] / norms[1];
  char buf[256];
  std::snprintf(buf, sizeof buf, "|R1| at t = 0.25: %.4g, %.4g, %.4g for lambda/4, lambda/2, lambda; ratios %.3f, %.3f",
                norms[0], norms[1], norms[2], r1, r2);
  report(9, r1 <= 0.67 && r2 <= 0.67, seconds_since(t0), 1800.0, buf);
}

// ---------------------------------------------------------------- 10

void scheduler() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(1e-3, 3.0);
  double formula = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double d = u(rng);
    formula = std::max(formula, std::abs(holder_exponent(ScheduleMode::standard, d) - (1 + d) / (5 + 9 * d + 4 * d * d)));
  }
  const double lim = std::max({std::abs(holder_exponent(ScheduleMode::standard, 1e-12) - 0.2),
                               std::abs(holder_exponent(ScheduleMode::ideal, 1e-12) - 1.0 / 3.0),
                               std::abs(holder_exponent(ScheduleMode::no_material, 1.0 / std::sqrt(2.0)) -
                                        1.0 / (3.0 + std::sqrt(8.0)))});
  double eig = 0.0, bis = 0.0;
  for (auto mode : {ScheduleMode::standard, ScheduleMode::ideal})
    for (double d = 0.01; d <= 2.0; d += 0.01) {
      const Matrix3 T = evolution_matrix(mode, d);
      const Vector3 psi = dominant_eigenvector(T, d);
      eig = std::max(eig, (T * psi - (1 + d) * psi).cwiseAbs().maxCoeff());
      const double a = holder_exponent(mode, d);
      bis = std::max({bis, std::abs(bisect_exponent(mode, d, false) - a), std::abs(bisect_exponent(mode, d, true) - 2 * a)});
    }
  PlanInput in;
  in.search = true;
  const IterationPlan p = plan_parameters(in);
  const bool plan_ok = p.all_admissible() && p.steps.size() == 21;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "formula %.1e, limits %.1e, T psi - (1+d) psi %.1e, bisection %.1e, Z-search %s (Z = %.4g, k <= 20)",
                formula, lim, eig, bis, plan_ok ? "admissible" : "FAILED", p.Z);
  report(10, formula <= 1e-14 && lim <= 1e-11 && eig <= 1e-12 && bis <= 1e-10 && plan_ok, seconds_since(t0), 5.0, buf);
}

// ---------------------------------------------------------------- 11

void galilean(std::shared_ptr<const StateProvider> base, const Stage& st, const StageSlice& s_base) {
  const auto t0 = Clock::now();
  const Vec3 c{1.0, 0.5, -0.3};
  auto boosted = std::make_shared<GalileanState>(base, c);
  StageConfig cfg = st.config();
  Stage sb(boosted, cfg);
  const StageSlice s = sb.evaluate(0.25);
  const double dR = rel_diff(s.R1, s_base.R1), dV = rel_diff(s.V, s_base.V), dv = rel_diff(s.v1, s_base.v1);
  const double dK = std::abs(sb.params().K - st.params().K), dl = std::abs(sb.params().lambda - st.params().lambda);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "boost (1, 0.5, -0.3), co-moving frame at t = 0.25: R1 %.1e, V %.1e, v1 %.1e relative; lambda, K "
                "differ by %.1e, %.1e",
                dR, dV, dv, dl, dK);
  report(11, std::max({dR, dV, dv}) <= 1e-7 && dl <= 1e-9 && dK <= 1e-9, seconds_since(t0), 1200.0, buf);
}

}  // namespace

int main() {
  geometry_identities();
  stress_matrix_check();
  rotation_family();

  // the standard test: cut-off ABC flow on 64^3, Xi = 2, N = 8, measured levels, calibrated K
  const auto t0 = Clock::now();
  GridSpec g;
  g.n = 64;
  auto state = std::make_shared<CutoffAbcState>(g, AbcFlow{}, 0.0, 0.5);
  StageConfig cfg;
  cfg.grid = g;
  const Stage st(state, cfg);
  const double setup = seconds_since(t0);
  std::printf("standard stage: lambda %.2f, e_v %.5g, e_R %.5g, K %.5g, tau %.4g (setup %.0f s)\n",
              st.params().lambda, st.params().e_v, st.params().e_R, st.params().K, st.params().tau, setup);
  std::fflush(stdout);

  stress_and_beltrami(st, setup);
  energy_prescription(st);

  const auto t1 = Clock::now();
  const StageSlice slice = st.evaluate(0.25);
  const double slice_secs = seconds_since(t1);

  divergence_solvers(slice, slice_secs);
  self_consistency(st, slice, setup + slice_secs);
  stress_reduction(state, st, slice);
  scheduler();
  galilean(state, st, slice);

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
