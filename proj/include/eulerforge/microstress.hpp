#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eulerforge/field.hpp"
#include "eulerforge/geometry.hpp"
#include "eulerforge/transport.hpp"

namespace ef {

// e^{1/2}(t) = (20 K e_R)^{1/2} (H(t-a) - H(t-b)), H a smooth step of
// half-width tau_s; e = 20 K e_R on [a + tau_s, b - tau_s].
struct EnergyProfile {
  double amp = 0.0;
  double a = 0.0, b = 0.0;
  double tau_s = 1.0;
  double K = 0.0, e_R = 0.0;

  double sqrt_e(double t) const;
  double e(double t) const { const double s = sqrt_e(t); return s * s; }
  double d_sqrt_e(double t) const;
  double d2_sqrt_e(double t) const;
  double support_lo() const { return a - tau_s; }
  double support_hi() const { return b + tau_s; }
  double plateau_lo() const { return a + tau_s; }
  double plateau_hi() const { return b - tau_s; }
  bool vanishes() const { return amp == 0.0; }
};

// plateau covers [lo - theta, hi + theta]
EnergyProfile build_energy_profile(double lo, double hi, double e_R, double theta, double K, double tau_s);

// max over samples of |d^r e^{1/2}/dt^r| / ((Xi e_v^{1/2})^r (K e_R)^{1/2}), r = 0, 1, 2
std::array<double, 3> energy_profile_bounds(const EnergyProfile& e, double Xi_ang, double e_v, int samples = 4001);

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 50;
  // perturbation domain around (A(xi_hat), 1/6)
  double radius_A = 0.2;
  double radius_y = 0.05;
  // solution must stay in |gamma - gamma~| <= ball * gamma~
  double ball = 0.9;
};

inline double gamma_tilde() { return 0.22821773229381923; }  // sqrt(5/96)

struct GammaSolve {
  Vector6 gamma;
  int iterations = 0;
  double residual = 0.0;
};

// Newton on F_J(gamma) = sum_I A^I_J gamma_I^2 - y_J from gamma~ = sqrt(5/96).
GammaSolve solve_gamma(const Matrix6& A, const Vector6& y, const NewtonOptions& opt = {});

// Largest ||eps||_max for which Newton converges in every random trial at xi_hat.
double calibrate_newton_basin(int trials = 10000, std::uint64_t seed = 12345, double r_hi = 0.2);

// Pointwise amplitudes for the six waves of F-bar at one point.
struct PointWaves {
  Vector6 gamma;
  std::array<Vector3, 6> a, b;
  double min_projection = 0.0;
};
// weight = eta(t) psi(x) e^{1/2}; eps the trace-free normalized stress
PointWaves point_amplitudes(const IcosaFrame& frame, const std::array<Vector3, 6>& g, const Matrix3& eps,
                            double weight, const NewtonOptions& opt = {}, double min_projection = 0.5);

// eps = -(R - tr R / 3)/e at a grid point of a symmetric field
Matrix3 epsilon_tensor(const Field& R_eps, std::size_t p, double e);

// All waves of one chart (kappa, k4) at one time, stored on the support.
struct ChartWaves {
  std::array<int, 3> kappa{0, 0, 0};
  long k4 = 0;
  double t = 0.0;
  std::vector<std::uint32_t> points;
  std::array<std::vector<Vector3>, 6> grad;
  std::array<std::vector<double>, 6> phase;
  std::array<std::vector<Vector3>, 6> a, b;
  std::array<std::vector<double>, 6> gamma;
  double min_gamma = 0.0, min_projection = 0.0, max_eps = 0.0;
  int max_newton = 0;

  WaveIndex index(int f) const { return {kappa, k4, f}; }
  // w_I = v_I / |grad xi_I| as a complex vector field (zero off support)
  Field w_field(const GridSpec& g, int f) const;
  Field v_field(const GridSpec& g, int f) const;
  Field phase_factor(const GridSpec& g, int f, double lambda) const;  // e^{i lambda xi}, zero off support
};

ChartWaves build_chart_waves(const PhaseBundle& bundle, const GenerationSlice& s, const std::array<int, 3>& kappa,
                             const Field& R_eps, double e, const NewtonOptions& opt = {},
                             double min_projection = 0.5);

// Accumulates sum_I v_I (x) conj(v_I) = 2 sum_{F-bar} (a a + b b).
class StressSum {
 public:
  explicit StressSum(const GridSpec& g) : sum_(Field::sym_tensor(g)), trace_(g.size(), 0.0) {}
  void add(const ChartWaves& c);
  const Field& sum() const { return sum_; }
  // || sum - (e delta/3 - R_eps_trace_free) ||_max over the mask (empty mask = everywhere)
  double residual(const Field& R_eps, double e, const std::vector<char>& mask = {}) const;
  // || sum |v_I|^2 - e ||_max
  double trace_residual(double e, const std::vector<char>& mask = {}) const;

 private:
  Field sum_;
  std::vector<double> trace_;
};

}  // namespace ef
