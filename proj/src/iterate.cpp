#include "eulerforge/iterate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ef {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// fourth-order central difference weights for offsets -2..2 (divide by h)
constexpr double kFd[5] = {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0};

Field fd_derivative(const std::array<Field, 5>& f, double h) {
  Field d = kFd[0] / h * f[0];
  for (int j = 1; j < 5; ++j)
    if (kFd[j] != 0.0) d += kFd[j] / h * f[j];
  return d;
}

double entry_max(const Field& f) { return f.empty() ? 0.0 : f.max_abs(); }

void add_real_part(Field& acc, const Field& z, double scale) {
  for (int c = 0; c < acc.ncomp(); ++c)
    for (std::size_t p = 0; p < acc.npts(); ++p) acc[c][p] += scale * z[c][p].real();
}

double cached_basin(std::uint64_t seed) {
  static std::mutex mu;
  static std::map<std::uint64_t, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(seed);
  if (it == cache.end()) it = cache.emplace(seed, calibrate_newton_basin(10000, seed)).first;
  return it->second;
}
}  // namespace

double FrequencyEnergyLevels::Xi_ang() const { return kTwoPi * Xi; }

FrequencyEnergyLevels measure_levels(const StateProvider& s, double Xi, int L, const std::vector<double>& times,
                                     double h) {
  require(Xi > 0.0 && L >= 1, "measure_levels: need Xi > 0 and L >= 1");
  FrequencyEnergyLevels lv;
  lv.Xi = Xi;
  lv.L = L;
  const double Xa = lv.Xi_ang();
  double dt_family = 0.0;  // max ||grad^k D_t R|| / Xa^{k+1}
  for (double t : times) {
    const Field v = s.velocity(t);
    const Field p = s.pressure(t);
    const Field R = s.stress(t);
    for (int k = 1; k <= L; ++k) {
      lv.from_v = std::max(lv.from_v, std::pow(sup_derivative(v, k) / std::pow(Xa, k), 2));
      lv.from_p = std::max(lv.from_p, sup_derivative(p, k) / std::pow(Xa, k));
    }
    if (R.max_abs() == 0.0 && s.stress(t - h).max_abs() == 0.0 && s.stress(t + h).max_abs() == 0.0) continue;
    for (int k = 0; k <= L; ++k) lv.from_R = std::max(lv.from_R, sup_derivative(R, k) / std::pow(Xa, k));
    std::array<Field, 5> Rs;
    for (int j = 0; j < 5; ++j) Rs[j] = j == 2 ? R : s.stress(t + (j - 2) * h);
    Field DtR = fd_derivative(Rs, h);
    DtR += advect(v, R);
    for (int k = 0; k < L; ++k) dt_family = std::max(dt_family, sup_derivative(DtR, k) / std::pow(Xa, k + 1));
  }
  lv.e_v = std::max(lv.from_v, lv.from_p);
  auto eR_for = [&](double ev) { return std::max(lv.from_R, ev > 0.0 ? dt_family / std::sqrt(ev) : 0.0); };
  lv.e_R = eR_for(lv.e_v);
  if (lv.e_R > lv.e_v) {
    // raise e_v until e_R <= e_v; e_R is decreasing in e_v
    double lo = lv.e_v, hi = std::max(lv.e_R, lv.e_v);
    while (eR_for(hi) > hi) hi *= 2.0;
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      (eR_for(mid) > mid ? lo : hi) = mid;
    }
    lv.e_v = hi;
    lv.e_R = eR_for(hi);
  }
  lv.from_DtR = lv.e_v > 0.0 ? dt_family / std::sqrt(lv.e_v) : 0.0;
  return lv;
}

ResidualReport verify_state(const StateProvider& s, double t, double h) {
  std::array<Field, 5> vs;
  for (int j = 0; j < 5; ++j) vs[j] = s.velocity(t + (j - 2) * h);
  const Field& v = vs[2];
  const Field dv = fd_derivative(vs, h);
  const Field divR = div(s.stress(t));
  Field r = dv;
  r += div(outer(v, v));
  r += grad(s.pressure(t));
  r -= divR;
  ResidualReport rep;
  rep.residual = r.max_abs();
  rep.div_v = div(v).max_abs();
  rep.scale = divR.max_abs() + dv.max_abs();
  return rep;
}

// ---------------- configuration ----------------

void StageConfig::validate() const {
  grid.validate();
  require(grid.n <= 128, "stage: grids beyond 128^3 exceed the desk-scale cap");
  require(Xi >= 1.0, "stage: Xi must be >= 1 (cycles)");
  require(N >= 1.0, "stage: N must be >= 1");
  require(L >= 2, "stage: L must be >= 2");
  require(B_lambda > 0.0 && b0 > 0.0 && B0 > 0.0, "stage: B_lambda, b0, B0 must be positive");
  require(K >= 0.0, "stage: K must be non-negative (0 selects calibration)");
  require(a_v > 0.0 && a_R > 0.0 && c_t > 0.0, "stage: a_v, a_R, c must be positive");
  require(time_nodes >= 1 && steps_per_tau >= 4, "stage: need time_nodes >= 1 and steps_per_tau >= 4");
  require(parametrix_L >= 0 && parametrix_L <= 6 && parametrix_T >= 0 && parametrix_T <= 6,
          "stage: parametrix order must lie in 0..6");
  require(parametrix_H == 0, "stage: the high-high family is solved spectrally (parametrix_H = 0)");
  time_shape.validate();
  space_shape.validate();
}

StageParameters derive_parameters(const StageConfig& cfg, const FrequencyEnergyLevels& lv, const TimeInterval& supp,
                                  double K) {
  StageParameters p;
  p.Xi_ang = lv.Xi_ang();
  p.e_v = lv.e_v;
  p.e_R = lv.e_R;
  p.K = K;
  p.support = supp;
  p.trivial = !(lv.e_R > 0.0) || supp.length() <= 0.0;
  if (p.trivial) {
    p.theta = p.tau = p.tau_s = 1.0;
    p.b = cfg.b0;
    p.lambda = cfg.B_lambda * p.Xi_ang * cfg.N;
    p.eps_v = cfg.a_v / p.Xi_ang * std::pow(cfg.N, -1.0 / cfg.L);
    p.eps_x = cfg.a_R / p.Xi_ang * std::pow(cfg.N, -1.0 / cfg.L);
    p.eps_t = 0.0;
    p.fd_step = 1e-3;
    p.window = supp;
    return p;
  }
  if (cfg.N < std::pow(cfg.Xi, cfg.eta) * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "N = " << cfg.N << " violates N >= Xi^eta = " << std::pow(cfg.Xi, cfg.eta);
    throw NumericalError(os.str());
  }
  const double ratio = std::pow(lv.e_v / lv.e_R, 1.5);
  if (cfg.N < ratio * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "N = " << cfg.N << " violates N >= (e_v/e_R)^{3/2} = " << ratio;
    throw NumericalError(os.str());
  }
  p.theta = 1.0 / (p.Xi_ang * std::sqrt(lv.e_v));
  const double Bt = cfg.B_lambda_tau > 0.0 ? cfg.B_lambda_tau : cfg.B_lambda;
  p.b = cfg.b0 / std::sqrt(Bt) * std::sqrt(std::sqrt(lv.e_v) / (std::sqrt(lv.e_R) * cfg.N));
  p.tau = p.b * p.theta;
  p.lambda = cfg.B_lambda * p.Xi_ang * cfg.N;
  p.eps_v = cfg.a_v / p.Xi_ang * std::pow(cfg.N, -1.0 / cfg.L);
  p.eps_x = cfg.a_R / p.Xi_ang * std::pow(cfg.N, -1.0 / cfg.L);
  p.eps_t = cfg.c_t / (p.Xi_ang * cfg.N * std::sqrt(lv.e_R));
  if (p.eps_t > p.theta) throw NumericalError("eps_t exceeds Xi^-1 e_v^-1/2; lower c");
  if (p.tau > cfg.b0 * p.theta * (1.0 + 1e-12))
    throw NumericalError("tau exceeds b0 Xi^-1 e_v^-1/2; raise B_lambda or N");
  p.tau_s = cfg.B0 * p.theta;
  p.fd_step = p.tau / cfg.steps_per_tau;
  p.window = {supp.lo - p.theta - 2.0 * p.tau_s, supp.hi + p.theta + 2.0 * p.tau_s};
  return p;
}

// ---------------- the stage ----------------

Stage::Stage(std::shared_ptr<const StateProvider> state, const StageConfig& cfg) : cfg_(cfg), state_(std::move(state)) {
  cfg_.validate();
  require(state_->grid() == cfg_.grid, "stage: state grid differs from the configured grid");
  const TimeInterval supp = state_->stress_support();
  mean_ = mean_vector(state_->velocity(supp.lo));
  co_ = std::make_shared<ComovingState>(state_, mean_);

  if (cfg_.levels) {
    levels_ = *cfg_.levels;
  } else {
    std::vector<double> ts;
    const int ns = std::max(1, cfg_.level_samples);
    for (int k = 0; k < ns; ++k) ts.push_back(ns == 1 ? supp.lo : supp.lo + supp.length() * k / (ns - 1));
    levels_ = measure_levels(*co_, cfg_.Xi, cfg_.L, ts, 1e-4 * std::max(supp.length(), 1e-3));
  }
  double K = cfg_.K;
  double basin = 0.0;
  if (K <= 0.0) {
    basin = cached_basin(cfg_.seed);
    K = 1.0 / (10.0 * basin);
  }
  par_ = derive_parameters(cfg_, levels_, supp, K);
  par_.basin = basin;

  frame_ = build_frame();
  rot_ = build_rotations(frame_, cfg_.axis, cfg_.scan_step, cfg_.c_min);
  const double margin = 2.0 * par_.tau + par_.eps_t + 4.0 * par_.fd_step + 1e-9;
  auto co = co_;
  auto source = [co](double t) { return co->velocity(t); };
  if (par_.trivial) {
    // nothing to cancel: no mollification, the flow only backs the (empty) phase bundle
    flow_ = std::make_unique<CoarseFlow>(
        CoarseFlow::unmollified(cfg_.grid, source, par_.window.lo - margin, par_.window.hi + margin));
  } else {
    kv_ = std::make_unique<MollifierKernel>(build_moment_kernel(cfg_.L, par_.eps_v, cfg_.grid));
    kx_ = std::make_unique<MollifierKernel>(build_moment_kernel(cfg_.L, par_.eps_x, cfg_.grid));
    energy_ = build_energy_profile(supp.lo, supp.hi, par_.e_R, par_.theta, K, par_.tau_s);
    flow_ = std::make_unique<CoarseFlow>(cfg_.grid, source, *kv_, par_.window.lo - margin, par_.window.hi + margin);
  }
  PhaseConfig pc;
  pc.tau = par_.tau;
  pc.time_shape = cfg_.time_shape;
  pc.space_shape = cfg_.space_shape;
  pc.min_steps = cfg_.min_transport_steps;
  pc.stability_c = cfg_.stability_c;
  bundle_ = std::make_unique<PhaseBundle>(frame_, rot_, *flow_, pc);
}

Field Stage::to_lab(const Field& f, double t) const {
  Field g = shift(f, {mean_[0] * t, mean_[1] * t, mean_[2] * t});
  g.time = t;
  return g;
}

Field Stage::R_eps(double t) const {
  const TimeInterval supp = state_->stress_support();
  if (par_.trivial || t + par_.eps_t < supp.lo || t - par_.eps_t > supp.hi) return Field::sym_tensor(cfg_.grid, t);
  auto co = co_;
  const MollifierKernel* kx = kx_.get();
  return mollify_along_flow([co, kx](double s) { return mollify(co->stress(s), *kx); }, *flow_, t, par_.eps_t,
                            cfg_.time_nodes);
}

std::vector<ChartWaves> Stage::waves(double t) const {
  std::vector<ChartWaves> out;
  const double e = energy_.e(t);
  if (par_.trivial || e <= 0.0) return out;
  const Field Re = R_eps(t);
  for (long k4 : bundle_->active_generations(t)) {
    const GenerationSlice s = bundle_->slice(k4, t);
    bundle_->stability(s);
    for (int c = 0; c < 8; ++c)
      out.push_back(build_chart_waves(*bundle_, s, {c & 1, (c >> 1) & 1, (c >> 2) & 1}, Re, e, cfg_.newton,
                                      cfg_.min_projection));
  }
  return out;
}

EnergySample Stage::energy_sample(double t, const std::vector<double>& lambdas) const {
  EnergySample es;
  es.t = t;
  es.e = energy_.e(t);
  const auto cw = waves(t);
  for (double lam : lambdas) {
    CorrectionBuilder b(cfg_.grid, lam, t);
    for (const auto& c : cw) b.add(c);
    if (!cw.empty()) check_lambda(cfg_.grid, lam, b.sup_grad());
    es.int_V2.push_back(energy_integral(b.V()));
  }
  return es;
}

StageSlice Stage::evaluate(double t) const {
  const GridSpec& g = cfg_.grid;
  const double h = par_.fd_step;
  const double lam = par_.lambda;
  std::array<double, 5> T;
  for (int j = 0; j < 5; ++j) T[j] = t + (j - 2) * h;

  StageSlice out;
  out.t = t;
  out.v = co_->velocity(t);
  out.p = co_->pressure(t);
  out.R = co_->stress(t);
  out.v_eps = flow_->velocity(t);
  out.R_eps = R_eps(t);
  out.e = energy_.e(t);

  std::array<Field, 5> vs;
  for (int j = 0; j < 5; ++j) vs[j] = j == 2 ? out.v : co_->velocity(T[j]);

  std::vector<CorrectionBuilder> builders;
  for (int j = 0; j < 5; ++j) builders.emplace_back(g, lam, T[j], j == 2);
  Field QpL = Field::sym_tensor(g, t), QpT = Field::sym_tensor(g, t);

  std::array<double, 5> e;
  bool any = false;
  for (int j = 0; j < 5; ++j) {
    e[j] = energy_.e(T[j]);
    any = any || e[j] > 0.0;
  }
  if (!par_.trivial && any) {
    std::array<Field, 5> Re;
    for (int j = 0; j < 5; ++j)
      if (e[j] > 0.0) Re[j] = j == 2 ? out.R_eps : R_eps(T[j]);
    std::set<long> gens;
    for (int j = 0; j < 5; ++j)
      for (long k : bundle_->active_generations(T[j])) gens.insert(k);
    const Field gradve = grad_tensor(out.v_eps);
    StressSum ssum(g);
    out.min_gamma = 1e300;
    for (long k4 : gens) {
      const TransportMarch m = bundle_->march_to(k4, t);
      std::array<GenerationSlice, 5> sl;
      for (int j = 0; j < 5; ++j) sl[j] = bundle_->slice(j == 2 ? m : m.stepped(T[j] - t), k4);
      out.stability = std::max(out.stability, bundle_->stability(sl[2]));
      std::vector<Vector3> fullgrad(g.size());
      for (int c = 0; c < 8; ++c) {
        const std::array<int, 3> kappa{c & 1, (c >> 1) & 1, (c >> 2) & 1};
        std::array<ChartWaves, 5> cw;
        bool live = false;
        for (int j = 0; j < 5; ++j) {
          cw[j] = build_chart_waves(*bundle_, sl[j], kappa, e[j] > 0.0 ? Re[j] : out.R_eps, e[j], cfg_.newton,
                                    cfg_.min_projection);
          live = live || !cw[j].points.empty();
        }
        if (!live) continue;
        for (int j = 0; j < 5; ++j)
          if (j != 2) builders[j].add(cw[j]);
        const std::vector<Field> vt0 = builders[2].add(cw[2]);
        ssum.add(cw[2]);
        if (!cw[2].points.empty()) {
          out.waves += 12;
          out.min_gamma = std::min(out.min_gamma, cw[2].min_gamma);
          out.max_eps = std::max(out.max_eps, cw[2].max_eps);
        }
        std::vector<char> mask(g.size(), 0);
        for (auto p : cw[2].points) mask[p] = 1;
        for (int f = 0; f < 6; ++f) {
          const WaveIndex I = cw[2].index(f);
          for (std::size_t p = 0; p < g.size(); ++p) fullgrad[p] = bundle_->phase_gradient(sl[2], I, p);
          // microlocal Beltrami check on the support
          for (std::size_t k = 0; k < cw[2].points.size(); ++k) {
            const Vector3& gr = cw[2].grad[f][k];
            // (i g) x (a + i b) = -g x b + i g x a, split by hand since Eigen conjugates complex cross products
            const Vector3& a = cw[2].a[f][k];
            const Vector3& b = cw[2].b[f][k];
            const Vector3 re = -gr.cross(b) - gr.norm() * a;
            const Vector3 im = gr.cross(a) - gr.norm() * b;
            out.beltrami = std::max(out.beltrami, std::max(re.cwiseAbs().maxCoeff(), im.cwiseAbs().maxCoeff()));
          }
          // transport data D_t V~_I
          // FD of v + curl(w)/lambda, with one curl for the whole stencil
          Field uT = Field::vector(g, t), dw = Field::vector(g, t);
          for (int j = 0; j < 5; ++j) {
            if (j == 2 || cw[j].points.empty()) continue;
            const double c = kFd[j] / h;
            for (std::size_t k = 0; k < cw[j].points.size(); ++k) {
              const std::size_t p = cw[j].points[k];
              const double inv = 1.0 / cw[j].grad[f][k].norm();
              for (int l = 0; l < 3; ++l) {
                const cplx v(cw[j].a[f][k][l], cw[j].b[f][k][l]);
                uT[l][p] += c * v;
                dw[l][p] += c * inv * v;
              }
            }
          }
          Field cdw = curl(dw);
          cdw *= 1.0 / lam;
          uT += cdw;
          uT += advect(out.v_eps, vt0[f]);
          // high-low data (V~_I . grad) v_eps
          Field uL = Field::vector(g, t);
          for (int l = 0; l < 3; ++l)
            for (int jj = 0; jj < 3; ++jj) {
              const auto& a = vt0[f][jj];
              const auto& d = gradve.tc(jj, l);
              for (std::size_t p = 0; p < g.size(); ++p) uL[l][p] += a[p] * d[p];
            }
          OscillatoryData od;
          od.lambda = lam;
          od.grad = fullgrad;
          od.mask = mask;
          od.phase.assign(g.size(), 0.0);
          for (std::size_t k = 0; k < cw[2].points.size(); ++k) od.phase[cw[2].points[k]] = cw[2].phase[f][k];
          if (cfg_.parametrix_L > 0) {
            od.u = std::move(uL);
            add_real_part(QpL, parametrix_tensor(od, parametrix_expand(od, cfg_.parametrix_L)), 2.0);
          }
          if (cfg_.parametrix_T > 0) {
            od.u = std::move(uT);
            add_real_part(QpT, parametrix_tensor(od, parametrix_expand(od, cfg_.parametrix_T)), 2.0);
          }
        }
      }
    }
    if (out.e > 0.0) out.stress_eq = ssum.residual(out.R_eps, out.e);
    if (out.min_gamma == 1e300) out.min_gamma = 0.0;
  }

  std::array<Field, 5> V;
  for (int j = 0; j < 5; ++j) V[j] = builders[j].V();
  out.imag_V = V[2].max_imag();
  for (auto& x : V) x.make_real();
  out.V = V[2];
  out.W = builders[2].W();
  out.S = builders[2].S();
  out.div_V = div(out.V).max_abs();

  const PressureCorrection pc = assemble_pressure(out.V, out.S, out.R_eps, out.e);
  out.P0 = pc.P0;
  out.P = pc.P;

  // mollification and stress families, assembled directly
  out.Q_M = 2.0 * sym_outer(out.v - out.v_eps, out.V);
  out.Q_M += out.R;
  out.Q_M -= out.R_eps;
  out.Q_S = out.S;
  out.Q_S += out.R_eps;
  for (int i = 0; i < 3; ++i) {
    auto& d = out.Q_S.tc(i, i);
    for (std::size_t p = 0; p < g.size(); ++p) d[p] += out.P0[0][p];
  }

  // oscillatory families: parametrix plus spectral residual
  out.U_L = div(outer(out.V, out.v_eps));
  out.U_T = fd_derivative(V, h);
  out.U_T += div(outer(out.v_eps, out.V));
  out.U_H = div(outer(out.V, out.V));
  out.U_H -= div(out.S);
  out.U_H += grad(out.P - out.P0);
  out.Q_L = solve_with_parametrix(out.U_L, cfg_.parametrix_L > 0 ? QpL : Field());
  out.Q_T = solve_with_parametrix(out.U_T, cfg_.parametrix_T > 0 ? QpT : Field());
  out.Q_H = solve_with_parametrix(out.U_H, Field());
  for (Field* q : {&out.Q_L, &out.Q_T, &out.Q_H}) q->make_real();
  out.div_res_L = divergence_residual(out.Q_L, out.U_L);
  out.div_res_T = divergence_residual(out.Q_T, out.U_T);
  out.div_res_H = divergence_residual(out.Q_H, out.U_H);

  out.R1 = out.Q_M;
  out.R1 += out.Q_S;
  out.R1 += out.Q_L;
  out.R1 += out.Q_T;
  out.R1 += out.Q_H;
  out.R1.time = t;

  out.v1 = out.v + out.V;
  out.p1 = out.p + out.P;

  // measured Euler-Reynolds residual of (v1, p1) against div R1
  std::array<Field, 5> v1s;
  for (int j = 0; j < 5; ++j) v1s[j] = vs[j] + V[j];
  Field res = fd_derivative(v1s, h);
  res += div(outer(out.v1, out.v1));
  res += grad(out.p1);
  const Field divR1 = div(out.R1);
  out.residual_scale = divR1.max_abs();
  res -= divR1;
  out.measured_residual = res.max_abs();

  Field old = fd_derivative(vs, h);
  old += div(outer(out.v, out.v));
  old += grad(out.p);
  old -= div(out.R);
  out.old_residual = old.max_abs();

  const Vec3 m1 = mean_vector(out.v1), m0 = mean_vector(out.v);
  for (int a = 0; a < 3; ++a) out.momentum_drift = std::max(out.momentum_drift, std::abs(m1[a] - m0[a]));
  return out;
}

// ---------------- report ----------------

StageReport summarize(const Stage& stage, const std::vector<StageSlice>& slices) {
  StageReport r;
  r.params = stage.params();
  r.levels = stage.levels();
  const double Xi1 = stage.config().Xi * stage.config().N;
  r.new_Xi = Xi1;
  const double Xa1 = kTwoPi * Xi1;
  for (const auto& s : slices) {
    r.times.push_back(s.t);
    r.norm_Q_M = std::max(r.norm_Q_M, entry_max(s.Q_M));
    r.norm_Q_S = std::max(r.norm_Q_S, entry_max(s.Q_S));
    r.norm_Q_L = std::max(r.norm_Q_L, entry_max(s.Q_L));
    r.norm_Q_T = std::max(r.norm_Q_T, entry_max(s.Q_T));
    r.norm_Q_H = std::max(r.norm_Q_H, entry_max(s.Q_H));
    r.norm_R1 = std::max(r.norm_R1, entry_max(s.R1));
    r.norm_R = std::max(r.norm_R, entry_max(s.R));
    r.norm_V = std::max(r.norm_V, entry_max(s.V));
    r.norm_P = std::max(r.norm_P, entry_max(s.P));
    const double scale = std::max(s.residual_scale, 1e-300);
    r.max_relative_residual = std::max(r.max_relative_residual, s.measured_residual / scale);
    r.max_momentum_drift = std::max(r.max_momentum_drift, s.momentum_drift);
    r.max_div_res = std::max({r.max_div_res, s.div_res_L, s.div_res_T, s.div_res_H});
    for (int k = 1; k <= stage.config().L; ++k)
      r.new_e_v = std::max(r.new_e_v, std::pow(sup_derivative(s.v1, k) / std::pow(Xa1, k), 2));
    for (int k = 0; k <= stage.config().L; ++k)
      r.new_e_R = std::max(r.new_e_R, sup_derivative(s.R1, k) / std::pow(Xa1, k));
  }
  return r;
}

std::string StageReport::to_json() const {
  nlohmann::ordered_json j;
  j["parameters"] = {{"Xi_ang", params.Xi_ang}, {"e_v", params.e_v},     {"e_R", params.e_R},
                     {"theta", params.theta},   {"b", params.b},         {"tau", params.tau},
                     {"lambda", params.lambda}, {"eps_v", params.eps_v}, {"eps_x", params.eps_x},
                     {"eps_t", params.eps_t},   {"tau_s", params.tau_s}, {"K", params.K},
                     {"newton_basin", params.basin},
                     {"support", {params.support.lo, params.support.hi}},
                     {"window", {params.window.lo, params.window.hi}}};
  j["levels"] = {{"Xi", levels.Xi},         {"e_v", levels.e_v},       {"e_R", levels.e_R},
                 {"L", levels.L},           {"from_v", levels.from_v}, {"from_p", levels.from_p},
                 {"from_R", levels.from_R}, {"from_DtR", levels.from_DtR}};
  j["times"] = times;
  j["stress_families"] = {{"Q_M", norm_Q_M}, {"Q_S", norm_Q_S}, {"Q_L", norm_Q_L}, {"Q_T", norm_Q_T}, {"Q_H", norm_Q_H}};
  j["norms"] = {{"R", norm_R}, {"R1", norm_R1}, {"V", norm_V}, {"P", norm_P}};
  j["residuals"] = {{"max_relative_er_residual", max_relative_residual},
                    {"max_momentum_drift", max_momentum_drift},
                    {"max_divergence_residual", max_div_res}};
  if (energy_gap >= 0.0) j["energy_gap"] = energy_gap;
  j["new_levels"] = {{"Xi", new_Xi}, {"e_v", new_e_v}, {"e_R", new_e_R}, {"material_bound", "not sampled"}};
  return j.dump(2);
}

}  // namespace ef
