#include "eulerforge/microstress.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "eulerforge/cutoffs.hpp"

namespace ef {

// ---------------- energy profile ----------------

namespace {
// smooth CDF rising over [-w, w]
double H(double x, double w) { return smooth_step((x + w) / (2.0 * w)); }
double Hd(double x, double w) { return smooth_step_deriv((x + w) / (2.0 * w)) / (2.0 * w); }
}  // namespace

double EnergyProfile::sqrt_e(double t) const {
  if (amp == 0.0) return 0.0;
  return amp * (H(t - a, tau_s) - H(t - b, tau_s));
}

double EnergyProfile::d_sqrt_e(double t) const {
  if (amp == 0.0) return 0.0;
  return amp * (Hd(t - a, tau_s) - Hd(t - b, tau_s));
}

double EnergyProfile::d2_sqrt_e(double t) const {
  const double h = 1e-4 * tau_s;
  return (d_sqrt_e(t + h) - d_sqrt_e(t - h)) / (2.0 * h);
}

EnergyProfile build_energy_profile(double lo, double hi, double e_R, double theta, double K, double tau_s) {
  require(hi >= lo, "build_energy_profile: empty support interval");
  require(e_R >= 0.0 && theta >= 0.0 && K >= 0.0, "build_energy_profile: negative parameter");
  require(tau_s > 0.0, "build_energy_profile: tau_smooth must be positive");
  EnergyProfile p;
  p.K = K;
  p.e_R = e_R;
  p.tau_s = tau_s;
  p.amp = std::sqrt(20.0 * K * e_R);
  p.a = lo - theta - tau_s;
  p.b = hi + theta + tau_s;
  return p;
}

std::array<double, 3> energy_profile_bounds(const EnergyProfile& e, double Xi_ang, double e_v, int samples) {
  std::array<double, 3> r{0, 0, 0};
  if (e.vanishes()) return r;
  const double scale = std::sqrt(e.K * e.e_R);
  const double rate = Xi_ang * std::sqrt(e_v);
  const double lo = e.support_lo() - e.tau_s, hi = e.support_hi() + e.tau_s;
  for (int k = 0; k < samples; ++k) {
    const double t = lo + (hi - lo) * k / (samples - 1);
    r[0] = std::max(r[0], std::abs(e.sqrt_e(t)) / scale);
    r[1] = std::max(r[1], std::abs(e.d_sqrt_e(t)) / (rate * scale));
    r[2] = std::max(r[2], std::abs(e.d2_sqrt_e(t)) / (rate * rate * scale));
  }
  return r;
}

// ---------------- the quadratic system ----------------

namespace {
Matrix6 reference_matrix() {
  Matrix6 A = Matrix6::Constant(16.0 / 25.0);
  A.diagonal().setZero();
  return A;
}
}  // namespace

GammaSolve solve_gamma(const Matrix6& A, const Vector6& y, const NewtonOptions& opt) {
  static const Matrix6 A0 = reference_matrix();
  // homogeneity: solve for y normalized to the reference scale
  const double ymean = y.mean();
  if (!(ymean > 0.0)) throw NumericalError("solve_gamma: right side must be positive");
  const double dA = (A - A0).cwiseAbs().maxCoeff();
  const double dy = (y / (6.0 * ymean) - Vector6::Constant(1.0 / 6.0)).cwiseAbs().maxCoeff();
  if (dA > opt.radius_A || dy > opt.radius_y) {
    std::ostringstream os;
    os << "solve_gamma: outside the perturbation domain (|A - A_hat| = " << dA << ", |y - 1/6| = " << dy
       << "); shrink tau or raise K";
    throw NumericalError(os.str());
  }
  const double s = std::sqrt(6.0 * ymean);
  const Vector6 yn = y / (s * s);
  const double gt = gamma_tilde();
  Vector6 g = Vector6::Constant(gt);
  GammaSolve out;
  for (int it = 0; it <= opt.max_iter; ++it) {
    const Vector6 F = A.transpose() * g.cwiseProduct(g) - yn;
    out.residual = F.cwiseAbs().maxCoeff();
    out.iterations = it;
    if (out.residual <= opt.tol) break;
    if (it == opt.max_iter) throw NumericalError("solve_gamma: Newton did not converge in 50 steps");
    // dF_J/dgamma_I = 2 A^I_J gamma_I
    Matrix6 Jm = A.transpose();
    for (int I = 0; I < 6; ++I) Jm.col(I) *= 2.0 * g(I);
    g -= Jm.partialPivLu().solve(F);
  }
  for (int I = 0; I < 6; ++I)
    if (!(g(I) > 0.0) || std::abs(g(I) - gt) > opt.ball * gt)
      throw NumericalError("solve_gamma: Newton left the admissible ball around gamma~");
  out.gamma = s * g;
  out.residual *= s * s;
  return out;
}

double calibrate_newton_basin(int trials, std::uint64_t seed, double r_hi) {
  const IcosaFrame fr = build_frame();
  std::array<Vector3, 6> g;
  for (int i = 0; i < 6; ++i) g[i] = fr.F[i];
  const Matrix6 A = stress_matrix(g, sigma_partners(fr, g));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  // fixed bank of trace-free directions with unit max-norm
  std::vector<Matrix3> dirs(trials);
  for (auto& E : dirs) {
    Matrix3 M;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) M(i, j) = M(j, i) = U(rng);
    M -= M.trace() / 3.0 * Matrix3::Identity();
    E = M / M.cwiseAbs().maxCoeff();
  }
  NewtonOptions opt;
  opt.radius_A = opt.radius_y = 1e9;
  opt.ball = 1e9;
  auto all_converge = [&](double r) {
    for (const auto& E : dirs) {
      Vector6 y;
      for (int J = 0; J < 6; ++J) y(J) = 1.0 / 6.0 + 0.5 * r * g[J].dot(E * g[J]);
      try {
        const GammaSolve s = solve_gamma(A, y, opt);
        if ((s.gamma.array() <= 0.0).any()) return false;
      } catch (const NumericalError&) {
        return false;
      }
    }
    return true;
  };
  double lo = 0.0, hi = r_hi;
  if (all_converge(hi)) return hi;
  for (int k = 0; k < 40; ++k) {
    const double mid = 0.5 * (lo + hi);
    (all_converge(mid) ? lo : hi) = mid;
  }
  return lo;
}

// ---------------- amplitudes ----------------

PointWaves point_amplitudes(const IcosaFrame& frame, const std::array<Vector3, 6>& g, const Matrix3& eps,
                            double weight, const NewtonOptions& opt, double min_projection) {
  const auto gs = sigma_partners(frame, g);
  const Matrix6 A = stress_matrix(g, gs);
  Vector6 y;
  for (int J = 0; J < 6; ++J) y(J) = g[J].squaredNorm() / 6.0 + 0.5 * g[J].dot(eps * g[J]);
  PointWaves pw;
  pw.gamma = solve_gamma(A, y, opt).gamma;
  pw.min_projection = 1e300;
  for (int I = 0; I < 6; ++I) {
    const Vector3 n = g[I].normalized();
    const Vector3 P = gs[I] - gs[I].dot(n) * n;
    const double pn = P.norm();
    pw.min_projection = std::min(pw.min_projection, pn);
    if (pn < min_projection) {
      std::ostringstream os;
      os << "projection lower bound violated: |P_perp(grad xi_sigmaI)| = " << pn << " < " << min_projection;
      throw NumericalError(os.str());
    }
    pw.b[I] = weight * pw.gamma(I) * P;
    pw.a[I] = -n.cross(pw.b[I]);
  }
  return pw;
}

Matrix3 epsilon_tensor(const Field& R, std::size_t p, double e) {
  Matrix3 M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = R.tc(i, j)[p].real();
  M -= M.trace() / 3.0 * Matrix3::Identity();
  return -M / e;
}

ChartWaves build_chart_waves(const PhaseBundle& bundle, const GenerationSlice& s, const std::array<int, 3>& kappa,
                             const Field& R_eps, double e, const NewtonOptions& opt, double min_projection) {
  ChartWaves c;
  c.kappa = kappa;
  c.k4 = s.k4;
  c.t = s.t;
  const double tc = bundle.time_cutoff(s.k4, s.t);
  if (e <= 0.0 || tc == 0.0) return c;
  const double root_e = std::sqrt(e);
  c.min_gamma = 1e300;
  c.min_projection = 1e300;
  const std::size_t np = s.disp.size();
  for (std::size_t p = 0; p < np; ++p) {
    const double psi = bundle.chart_cutoff(s, kappa, p);
    if (psi == 0.0) continue;
    std::array<Vector3, 6> g;
    for (int f = 0; f < 6; ++f) g[f] = bundle.phase_gradient(s, c.index(f), p);
    const Matrix3 eps = epsilon_tensor(R_eps, p, e);
    c.max_eps = std::max(c.max_eps, eps.cwiseAbs().maxCoeff());
    PointWaves pw;
    try {
      pw = point_amplitudes(bundle.frame(), g, eps, tc * psi * root_e, opt, min_projection);
    } catch (const NumericalError& err) {
      std::ostringstream os;
      os << err.what() << " [chart " << kappa[0] << kappa[1] << kappa[2] << ", generation " << s.k4
         << ", t = " << s.t << "]";
      throw NumericalError(os.str());
    }
    c.points.push_back(std::uint32_t(p));
    for (int f = 0; f < 6; ++f) {
      c.grad[f].push_back(g[f]);
      c.phase[f].push_back(bundle.phase(s, c.index(f), p));
      c.a[f].push_back(pw.a[f]);
      c.b[f].push_back(pw.b[f]);
      c.gamma[f].push_back(pw.gamma(f));
    }
    c.min_gamma = std::min(c.min_gamma, pw.gamma.minCoeff());
    c.min_projection = std::min(c.min_projection, pw.min_projection);
  }
  return c;
}

Field ChartWaves::v_field(const GridSpec& g, int f) const {
  Field out = Field::vector(g, t);
  for (std::size_t k = 0; k < points.size(); ++k)
    for (int l = 0; l < 3; ++l) out[l][points[k]] = cplx(a[f][k][l], b[f][k][l]);
  return out;
}

Field ChartWaves::w_field(const GridSpec& g, int f) const {
  Field out = Field::vector(g, t);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double inv = 1.0 / grad[f][k].norm();
    for (int l = 0; l < 3; ++l) out[l][points[k]] = inv * cplx(a[f][k][l], b[f][k][l]);
  }
  return out;
}

Field ChartWaves::phase_factor(const GridSpec& g, int f, double lambda) const {
  Field out = Field::scalar(g, t);
  for (std::size_t k = 0; k < points.size(); ++k) out[0][points[k]] = std::polar(1.0, lambda * phase[f][k]);
  return out;
}

void StressSum::add(const ChartWaves& c) {
  for (std::size_t k = 0; k < c.points.size(); ++k) {
    const std::size_t p = c.points[k];
    for (int f = 0; f < 6; ++f) {
      const Vector3& a = c.a[f][k];
      const Vector3& b = c.b[f][k];
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) sum_.tc(i, j)[p] += 2.0 * (a[i] * a[j] + b[i] * b[j]);
      trace_[p] += 2.0 * (a.squaredNorm() + b.squaredNorm());
    }
  }
}

double StressSum::residual(const Field& R_eps, double e, const std::vector<char>& mask) const {
  double r = 0.0;
  for (std::size_t p = 0; p < sum_.npts(); ++p) {
    if (!mask.empty() && !mask[p]) continue;
    const double tr = (R_eps.tc(0, 0)[p] + R_eps.tc(1, 1)[p] + R_eps.tc(2, 2)[p]).real() / 3.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        const double target = (i == j ? e / 3.0 + tr : 0.0) - R_eps.tc(i, j)[p].real();
        r = std::max(r, std::abs(sum_.tc(i, j)[p].real() - target));
      }
  }
  return r;
}

double StressSum::trace_residual(double e, const std::vector<char>& mask) const {
  double r = 0.0;
  for (std::size_t p = 0; p < trace_.size(); ++p) {
    if (!mask.empty() && !mask[p]) continue;
    r = std::max(r, std::abs(trace_[p] - e));
  }
  return r;
}

}  // namespace ef
