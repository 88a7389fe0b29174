#pragma once
#include <functional>
#include <vector>

#include "eulerforge/field.hpp"
#include "eulerforge/geometry.hpp"
#include "eulerforge/transport.hpp"

namespace ef {

using Vector3c = Eigen::Vector3cd;
using Matrix3c = Eigen::Matrix3cd;

// q = (1/i)(q_perp + q_par): i d_j xi q^{jl} = u^l, symmetric, degree -1 in grad xi.
Matrix3c q_symbol(const Vector3& grad_xi, const Vector3c& u, double min_grad = 1e-8);

// Data e^{i lambda xi} u.  grad xi is known at every grid point; the phase is
// only meaningful on the mask, outside of which u vanishes.
struct OscillatoryData {
  double lambda = 1.0;
  std::vector<double> phase;
  std::vector<Vector3> grad;
  std::vector<char> mask;
  Field u;  // complex vector, zero off mask
  Field carrier() const;  // e^{i lambda xi} on the mask
};

struct ParametrixExpansion {
  int order = 0;
  std::vector<Field> q;  // q_(1..D), complex symmetric amplitudes
  Field residual;        // u_(D+1)
};
ParametrixExpansion parametrix_expand(const OscillatoryData& data, int order);

// sum_k e^{i lambda xi} q_(k) / lambda^k (complex)
Field parametrix_tensor(const OscillatoryData& data, const ParametrixExpansion& e);
// div of the above by the product rule plus e^{i lambda xi} u_(D+1)/lambda^D, minus e^{i lambda xi} u
double telescoping_residual(const OscillatoryData& data, const ParametrixExpansion& e);

// Q = Q_param + R[U - div Q_param]; div Q = U for mean-zero U.
Field solve_with_parametrix(const Field& U, const Field& Q_param);
// || div Q - U ||_max
double divergence_residual(const Field& Q, const Field& U);

// Transport-elliptic solver: march D_t Q = R[d_i v^b d_b Q^{il} + D_t U] from
// Q(t_I) = R[U(t_I)], then multiply by eta_bar((t - t_I)/tau).
struct TransportEllipticOptions {
  int steps_per_tau = 64;
  double fd_step = 0.0;  // time step for dU/dt; 0 -> 1e-3 tau
  double mean_tol = 1e-10;
};
struct TransportEllipticResult {
  std::vector<double> times;
  std::vector<Field> Q;          // cut-off solution
  std::vector<Field> material;   // D_t Q_* (before the cutoff)
};
double elliptic_time_cutoff(double s);  // 1 on |s| <= 1, 0 on |s| >= 3/2
TransportEllipticResult transport_elliptic_solve(const std::function<Field(double)>& U, const CoarseFlow& flow,
                                                 double tau, double t_I, const std::vector<double>& times,
                                                 const TransportEllipticOptions& opt = {});

}  // namespace ef
