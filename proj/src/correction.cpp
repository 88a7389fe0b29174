#include "eulerforge/correction.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "eulerforge/spectral.hpp"

namespace ef {

double lambda_limit(const GridSpec& g, double sup_grad) {
  return 2.0 * std::numbers::pi * g.n / 4.0 / sup_grad;
}

void check_lambda(const GridSpec& g, double lambda, double sup_grad) {
  if (lambda * sup_grad <= 2.0 * std::numbers::pi * g.n / 4.0) return;
  int need = g.n;
  while (lambda * sup_grad > 2.0 * std::numbers::pi * need / 4.0) need *= 2;
  std::ostringstream os;
  os << "lambda = " << lambda << " is not resolved on a " << g.n << "^3 grid (lambda sup|grad xi| = "
     << lambda * sup_grad << "); use n >= " << need << " or lower B_lambda";
  throw NumericalError(os.str());
}

CorrectionBuilder::CorrectionBuilder(const GridSpec& g, double lambda, double t, bool with_s)
    : grid_(g), lambda_(lambda), t_(t), with_s_(with_s), W_(Field::vector(g, t)) {
  require(lambda > 0.0, "CorrectionBuilder: lambda must be positive");
  if (with_s) S_ = Field::sym_tensor(g, t);
}

Field tilde_amplitude(const ChartWaves& c, int f, const GridSpec& g, double lambda) {
  Field w = c.w_field(g, f);
  Field cw = curl(w);
  cw *= 1.0 / lambda;
  Field v = c.v_field(g, f);
  v += cw;
  return v;
}

std::vector<Field> CorrectionBuilder::add(const ChartWaves& c) {
  std::vector<Field> tilde;
  for (int f = 0; f < 6; ++f) {
    for (std::size_t k = 0; k < c.points.size(); ++k) {
      const std::size_t p = c.points[k];
      const Vector3& g = c.grad[f][k];
      sup_grad_ = std::max(sup_grad_, g.norm());
      const cplx ph = std::polar(1.0, lambda_ * c.phase[f][k]) / g.norm();
      for (int l = 0; l < 3; ++l) W_[l][p] += 2.0 * (ph * cplx(c.a[f][k][l], c.b[f][k][l])).real() / lambda_;
    }
    if (with_s_) {
      Field vt = tilde_amplitude(c, f, grid_, lambda_);
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
          auto& s = S_.tc(i, j);
          const auto& a = vt[i];
          const auto& b = vt[j];
          for (std::size_t p = 0; p < s.size(); ++p) s[p] += 2.0 * (a[p] * std::conj(b[p])).real();
        }
      tilde.push_back(std::move(vt));
    }
  }
  return tilde;
}

Field CorrectionBuilder::W() const {
  Field w = W_;
  truncate(w);
  w.make_real();
  return w;
}

Field CorrectionBuilder::V() const { return curl(W()); }

Correction assemble_correction(const std::vector<ChartWaves>& charts, const GridSpec& g, double lambda, double t) {
  CorrectionBuilder b(g, lambda, t);
  for (const auto& c : charts) b.add(c);
  check_lambda(g, lambda, b.sup_grad());
  return {t, lambda, b.W(), b.V()};
}

PressureCorrection assemble_pressure(const Field& V, const Field& S, const Field& R_eps, double e) {
  const GridSpec& g = R_eps.grid();
  PressureCorrection pc;
  pc.P0 = Field::scalar(g, R_eps.time);
  const Field trR = R_eps.trace();
  for (std::size_t p = 0; p < g.size(); ++p) pc.P0[0][p] = -e / 3.0 - trR[0][p].real() / 3.0;
  pc.P = pc.P0;
  if (!V.empty()) {
    const Field V2 = dot(V, V);
    const Field trS = S.trace();
    for (std::size_t p = 0; p < g.size(); ++p) pc.P[0][p] -= 0.5 * (V2[0][p].real() - trS[0][p].real());
  }
  return pc;
}

double integral(const std::vector<cplx>& a) {
  double s = 0.0;
  for (const auto& x : a) s += x.real();
  return s / double(a.size());
}

double energy_integral(const Field& V) {
  double s = 0.0;
  for (int l = 0; l < 3; ++l)
    for (const auto& x : V[l]) s += std::norm(x);
  return s / double(V.npts());
}

EnergyGap energy_increment(const std::vector<double>& times, const std::vector<double>& int_V2,
                           const std::vector<double>& e_values) {
  require(times.size() == int_V2.size() && times.size() == e_values.size(), "energy_increment: size mismatch");
  EnergyGap g;
  g.t = times;
  g.integral_V2 = int_V2;
  g.integral_e = e_values;
  for (std::size_t k = 0; k < times.size(); ++k) {
    g.gap.push_back(int_V2[k] - e_values[k]);
    g.sup_gap = std::max(g.sup_gap, std::abs(g.gap.back()));
  }
  for (std::size_t k = 1; k + 1 < times.size(); ++k)
    g.sup_rate = std::max(g.sup_rate, std::abs((g.gap[k + 1] - g.gap[k - 1]) / (times[k + 1] - times[k - 1])));
  return g;
}

void write_energy_csv(const std::string& path, const EnergyGap& g) {
  std::ofstream os(path);
  if (!os) throw ContractError("cannot open " + path);
  os << "t,int_V2,int_e,gap\n" << std::setprecision(17);
  for (std::size_t k = 0; k < g.t.size(); ++k)
    os << g.t[k] << ',' << g.integral_V2[k] << ',' << g.integral_e[k] << ',' << g.gap[k] << '\n';
}

}  // namespace ef
