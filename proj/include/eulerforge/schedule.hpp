#pragma once
#include <string>
#include <vector>

#include "eulerforge/geometry.hpp"

// Parameter evolution calculus on psi = (log e_R, log(e_v/e_R), log Xi).
namespace ef {

enum class ScheduleMode { standard, ideal, no_material };
ScheduleMode parse_mode(const std::string& s);
std::string to_string(ScheduleMode m);

Matrix3 evolution_matrix(ScheduleMode mode, double delta);
// eigenvector for 1 + delta with first entry -(1 + delta)
Vector3 dominant_eigenvector(const Matrix3& T, double delta);
double holder_exponent(ScheduleMode mode, double delta);
inline double pressure_exponent(ScheduleMode mode, double delta) { return 2.0 * holder_exponent(mode, delta); }

enum class Growth { converges, diverges, critical };
std::string to_string(Growth g);
// sign of w . psi: negative means the bounds decay super-exponentially
Growth classify_growth(const Vector3& weights, const Vector3& psi, double band = 1e-12);

Vector3 velocity_weights(ScheduleMode mode, double delta, double alpha);
Vector3 pressure_weights(ScheduleMode mode, double delta, double alpha);
inline Vector3 time_support_weights() { return Vector3(-0.5, -0.5, -1.0); }

// root in alpha of weights(alpha) . psi by bisection on [0, 1]
double bisect_exponent(ScheduleMode mode, double delta, bool pressure, double tol = 1e-14);

// max_k ||T^k - (1+delta)^k T(T-1)/((1+delta)delta)||_2 for k <= kmax
double lagrange_projection_bound(const Matrix3& T, double delta, int kmax = 50);
// ||(T - (1+delta)) T (T - 1)||_max
double minimal_polynomial_residual(const Matrix3& T, double delta);

struct PlanInput {
  ScheduleMode mode = ScheduleMode::standard;
  double delta = 0.1;
  double Z = 0.0;  // 0 with search = true: find the smallest admissible Z
  double eta = 0.05;
  double C = 10.0;  // Main Lemma constant in the Xi law
  double A = 1.0;   // lower energy constant int |V|^2/2 >= A e_R
  double Xi0 = 2.0;
  double e_R0 = 0.5;
  int k_max = 20;
  bool search = false;
};

struct PlanStep {
  int k = 0;
  // natural logarithms
  double log_e_R = 0, log_e_v = 0, log_Xi = 0, log_N = 0, log_theta = 0, log_tau = 0, log_b = 0;
  bool n_at_least_xi_eta = false;     // N >= Xi^eta
  bool n_at_least_ratio = false;      // N >= (e_v/e_R)^{3/2}
  bool continue_xi = false;           // the factor carrying N >= Xi^eta to the next stage is < 1
  bool energy_increases = false;      // A e_R - C (e_v/e_R)^{1/2} e_R / N > 0
  bool decay_ratio_drops = false;     // e_R(k+1)/e_R(k) below the previous ratio
  bool theta_halves = false;          // theta(k+1) <= theta(k)/2
  bool admissible() const;
};

struct IterationPlan {
  PlanInput input;
  double Z = 0.0;
  double alpha = 0.0, alpha_pressure = 0.0;
  Matrix3 T = Matrix3::Zero();
  Vector3 psi = Vector3::Zero();
  std::vector<PlanStep> steps;
  double loglog_slope = 0.0;  // fit of log(-log e_R) against k, exponentiated: -> 1 + delta
  double theta_sum = 0.0;
  bool all_admissible() const;
  std::string to_json() const;
  std::string to_csv() const;
};

IterationPlan plan_parameters(const PlanInput& in);

}  // namespace ef
