#include "eulerforge/schedule.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "eulerforge/errors.hpp"
#include "json.hpp"

namespace ef {

ScheduleMode parse_mode(const std::string& s) {
  if (s == "standard") return ScheduleMode::standard;
  if (s == "ideal") return ScheduleMode::ideal;
  if (s == "no_material") return ScheduleMode::no_material;
  throw ContractError("unknown schedule mode '" + s + "' (standard, ideal, no_material)");
}

std::string to_string(ScheduleMode m) {
  switch (m) {
    case ScheduleMode::standard: return "standard";
    case ScheduleMode::ideal: return "ideal";
    case ScheduleMode::no_material: return "no_material";
  }
  return "?";
}

std::string to_string(Growth g) {
  switch (g) {
    case Growth::converges: return "converges";
    case Growth::diverges: return "diverges";
    case Growth::critical: return "critical";
  }
  return "?";
}

Matrix3 evolution_matrix(ScheduleMode mode, double delta) {
  require(delta > 0.0, "evolution_matrix: delta must be positive");
  require(mode != ScheduleMode::no_material,
          "evolution_matrix: no_material mode has no evolution matrix; use holder_exponent");
  Matrix3 T;
  T << 1.0 + delta, 0.0, 0.0,  //
      -delta, 0.0, 0.0,        //
      (mode == ScheduleMode::standard ? -2.0 * delta : -delta), 0.5, 1.0;
  return T;
}

Vector3 dominant_eigenvector(const Matrix3& T, double delta) {
  require(delta > 0.0, "dominant_eigenvector: delta must be positive");
  // T(T - 1) annihilates the 0 and 1 eigenspaces
  const Vector3 v = T * (T - Matrix3::Identity()) * Vector3::UnitX();
  require(std::abs(v[0]) > 0.0, "dominant_eigenvector: degenerate matrix");
  return v * (-(1.0 + delta) / v[0]);
}

double holder_exponent(ScheduleMode mode, double delta) {
  require(delta > 0.0, "holder_exponent: delta must be positive");
  switch (mode) {
    case ScheduleMode::standard: return (1.0 + delta) / (5.0 + 9.0 * delta + 4.0 * delta * delta);
    case ScheduleMode::ideal: return 1.0 / (3.0 + 2.0 * delta);
    case ScheduleMode::no_material: return delta / ((1.0 + delta) * (1.0 + 2.0 * delta));
  }
  return 0.0;
}

Growth classify_growth(const Vector3& w, const Vector3& psi, double band) {
  const double s = w.dot(psi);
  if (std::abs(s) <= band) return Growth::critical;
  return s < 0.0 ? Growth::converges : Growth::diverges;
}

Vector3 velocity_weights(ScheduleMode mode, double delta, double alpha) {
  const double c = mode == ScheduleMode::ideal ? 1.0 : 2.0;
  return Vector3(0.5 - c * delta * alpha, alpha / 2.0, alpha);
}

Vector3 pressure_weights(ScheduleMode mode, double delta, double alpha) {
  const double c = mode == ScheduleMode::ideal ? 1.0 : 2.0;
  return Vector3(1.0 - c * delta * alpha, alpha / 2.0, alpha);
}

double bisect_exponent(ScheduleMode mode, double delta, bool pressure, double tol) {
  const Vector3 psi = dominant_eigenvector(evolution_matrix(mode, delta), delta);
  auto f = [&](double a) {
    return (pressure ? pressure_weights(mode, delta, a) : velocity_weights(mode, delta, a)).dot(psi);
  };
  double lo = 0.0, hi = 1.0;
  require(f(lo) < 0.0 && f(hi) > 0.0, "bisect_exponent: no sign change on [0, 1]");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double lagrange_projection_bound(const Matrix3& T, double delta, int kmax) {
  const Matrix3 P = T * (T - Matrix3::Identity()) / ((1.0 + delta) * delta);
  Matrix3 Tk = Matrix3::Identity();
  double worst = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    const Matrix3 D = Tk - std::pow(1.0 + delta, k) * P;
    worst = std::max(worst, D.jacobiSvd().singularValues()(0));
    Tk = T * Tk;
  }
  return worst;
}

double minimal_polynomial_residual(const Matrix3& T, double delta) {
  const Matrix3 I = Matrix3::Identity();
  return ((T - (1.0 + delta) * I) * T * (T - I)).cwiseAbs().maxCoeff();
}

// ---------------- planner ----------------

bool PlanStep::admissible() const {
  return n_at_least_xi_eta && n_at_least_ratio && continue_xi && energy_increases && decay_ratio_drops &&
         theta_halves;
}

bool IterationPlan::all_admissible() const {
  for (const auto& s : steps)
    if (!s.admissible()) return false;
  return !steps.empty();
}

namespace {

IterationPlan build_plan(const PlanInput& in, double Z) {
  IterationPlan plan;
  plan.input = in;
  plan.Z = Z;
  plan.T = evolution_matrix(in.mode, in.delta);
  plan.psi = dominant_eigenvector(plan.T, in.delta);
  plan.alpha = holder_exponent(in.mode, in.delta);
  plan.alpha_pressure = 2.0 * plan.alpha;
  const double d = in.delta;
  const double lZ = std::log(Z);
  const double gamma = 1.0 / (1.0 + d);
  // one extra stage so every reported step can look ahead
  const int K = in.k_max + 2;
  std::vector<PlanStep> s(K);
  s[0].log_e_R = std::log(in.e_R0);
  s[0].log_e_v = gamma * (lZ + s[0].log_e_R);
  s[0].log_Xi = std::log(in.Xi0);
  for (int k = 0; k < K; ++k) {
    auto& st = s[k];
    st.k = k;
    const double lratio = st.log_e_v - st.log_e_R;
    st.log_N = in.mode == ScheduleMode::ideal ? lZ + 0.5 * lratio - d * st.log_e_R
                                              : 2.0 * lZ + 0.5 * lratio - 2.0 * d * st.log_e_R;
    st.log_theta = -st.log_Xi - 0.5 * st.log_e_v;
    st.log_b = 0.5 * (0.5 * lratio - st.log_N);
    st.log_tau = st.log_b + st.log_theta;
    st.n_at_least_xi_eta = st.log_N >= in.eta * st.log_Xi;
    st.n_at_least_ratio = st.log_N >= 1.5 * lratio;
    st.energy_increases = std::log(in.A) > std::log(in.C) + 0.5 * lratio - st.log_N;
    if (k + 1 < K) {
      auto& nx = s[k + 1];
      nx.log_e_v = st.log_e_R;
      nx.log_e_R = (1.0 + d) * st.log_e_R - lZ;
      nx.log_Xi = std::log(in.C) + st.log_N + st.log_Xi;
    }
  }
  for (int k = 0; k + 1 < K; ++k) {
    auto& st = s[k];
    const auto& nx = s[k + 1];
    const double nx_ratio = nx.log_e_v - nx.log_e_R;
    const double nx_N = in.mode == ScheduleMode::ideal ? lZ + 0.5 * nx_ratio - d * nx.log_e_R
                                                       : 2.0 * lZ + 0.5 * nx_ratio - 2.0 * d * nx.log_e_R;
    st.continue_xi = nx_N - in.eta * (nx.log_Xi) >= st.log_N - in.eta * st.log_Xi;
    st.theta_halves = nx.log_theta <= st.log_theta - std::log(2.0);
    const double r_now = nx.log_e_R - st.log_e_R;
    const double r_prev = k == 0 ? 0.0 : st.log_e_R - s[k - 1].log_e_R;
    st.decay_ratio_drops = r_now < r_prev;
  }
  s.resize(in.k_max + 1);
  plan.steps = s;
  for (const auto& st : plan.steps) plan.theta_sum += std::exp(st.log_theta);
  // log(-log e_R) grows like k log(1 + delta)
  const int n = int(plan.steps.size());
  if (n >= 4 && plan.steps[n - 1].log_e_R < 0.0 && plan.steps[n - 2].log_e_R < 0.0)
    plan.loglog_slope = std::exp(std::log(-plan.steps[n - 1].log_e_R) - std::log(-plan.steps[n - 2].log_e_R));
  return plan;
}

}  // namespace

IterationPlan plan_parameters(const PlanInput& in) {
  require(in.delta > 0.0 && in.eta > 0.0, "plan_parameters: delta and eta must be positive");
  require(in.mode != ScheduleMode::no_material, "plan_parameters: no_material mode has no evolution law");
  require(in.Xi0 >= 2.0, "plan_parameters: Xi0 must be >= 2");
  require(in.e_R0 > 0.0, "plan_parameters: e_R0 must be positive");
  require(in.C > 0.0 && in.A > 0.0, "plan_parameters: C and A must be positive");
  require(in.k_max >= 1 && in.k_max <= 200, "plan_parameters: k_max must lie in 1..200");
  // e_R0 < e_v0 = (Z e_R0)^{1/(1+delta)}  <=>  Z > e_R0^delta
  const double z_floor = std::pow(in.e_R0, in.delta);
  if (!in.search) {
    require(in.Z > z_floor, "plan_parameters: Z must exceed e_R0^delta so that e_R0 < e_v0");
    return build_plan(in, in.Z);
  }
  auto ok = [&](double lz) { return build_plan(in, std::exp(lz)).all_admissible(); };
  const double l0 = std::log(z_floor) + 1e-9;
  double prev = l0, hit = -1.0;
  for (double lz = l0; lz <= 700.0; lz += 0.05) {
    if (ok(lz)) {
      hit = lz;
      break;
    }
    prev = lz;
  }
  if (hit < 0.0) throw NumericalError("plan_parameters: no admissible Z with log Z <= 700");
  double lo = prev, hi = hit;
  if (hi > lo)
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? hi : lo) = mid;
    }
  return build_plan(in, std::exp(hi));
}

std::string IterationPlan::to_json() const {
  nlohmann::ordered_json j;
  j["mode"] = to_string(input.mode);
  j["delta"] = input.delta;
  j["eta"] = input.eta;
  j["C"] = input.C;
  j["Z"] = Z;
  j["T"] = {{T(0, 0), T(0, 1), T(0, 2)}, {T(1, 0), T(1, 1), T(1, 2)}, {T(2, 0), T(2, 1), T(2, 2)}};
  j["psi_plus"] = {psi[0], psi[1], psi[2]};
  j["alpha_velocity"] = alpha;
  j["alpha_pressure"] = alpha_pressure;
  j["time_support"] = time_support_weights().dot(psi);
  j["loglog_slope"] = loglog_slope;
  j["theta_sum"] = theta_sum;
  j["all_admissible"] = all_admissible();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : steps)
    arr.push_back({{"k", s.k},
                   {"log_e_R", s.log_e_R},
                   {"log_e_v", s.log_e_v},
                   {"log_Xi", s.log_Xi},
                   {"log_N", s.log_N},
                   {"log_theta", s.log_theta},
                   {"log_tau", s.log_tau},
                   {"log_b", s.log_b},
                   {"admissible", s.admissible()}});
  j["sequence"] = arr;
  return j.dump(2);
}

std::string IterationPlan::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "k,log_e_R,log_e_v,log_Xi,log_N,log_theta,log_tau,log_b,N_ge_Xi_eta,N_ge_ratio,continue_xi,"
        "energy_increases,decay_ratio_drops,theta_halves\n";
  for (const auto& s : steps)
    os << s.k << ',' << s.log_e_R << ',' << s.log_e_v << ',' << s.log_Xi << ',' << s.log_N << ',' << s.log_theta
       << ',' << s.log_tau << ',' << s.log_b << ',' << s.n_at_least_xi_eta << ',' << s.n_at_least_ratio << ','
       << s.continue_xi << ',' << s.energy_increases << ',' << s.decay_ratio_drops << ',' << s.theta_halves
       << '\n';
  return os.str();
}

}  // namespace ef
