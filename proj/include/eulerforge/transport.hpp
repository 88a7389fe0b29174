#pragma once
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "eulerforge/cutoffs.hpp"
#include "eulerforge/field.hpp"
#include "eulerforge/geometry.hpp"
#include "eulerforge/mollifier.hpp"
#include "eulerforge/spectral.hpp"

namespace ef {

// v_eps = eta_eps * eta_eps * v, evaluated lazily and cached per time.
// The spatial mean (conserved momentum) is split off: every transport solve
// below runs in the frame moving with it, so results are Galilean covariant.
class CoarseFlow {
 public:
  using Source = std::function<Field(double)>;

  CoarseFlow(const GridSpec& g, Source velocity, const MollifierKernel& kernel, double t_lo, double t_hi,
             double max_step = 0.0);
  // zero-mollification flow (v_eps = v) for tests
  static CoarseFlow unmollified(const GridSpec& g, Source velocity, double t_lo, double t_hi, double max_step = 0.0);

  const GridSpec& grid() const { return grid_; }
  Field velocity(double t) const;
  const Vec3& mean() const { return mean_; }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  // largest RK4 step used by automatic step selection
  double max_step() const { return max_step_; }
  int steps_for(double span, int min_steps = 1) const;
  void check_window(double t) const;

 private:
  CoarseFlow() = default;
  void init(double max_step);

  GridSpec grid_;
  Source source_;
  std::shared_ptr<const MollifierKernel> kernel_;
  double t_lo_ = 0.0, t_hi_ = 0.0, max_step_ = 0.0;
  Vec3 mean_{0, 0, 0};
  mutable std::shared_ptr<std::mutex> mu_;
  mutable std::shared_ptr<std::map<double, Field>> cache_;
};

// Flow map: RK4 for dPhi/ds = v_eps(Phi) starting from x at time t.
Vec3 advect_point(const CoarseFlow& flow, double t, const Vec3& x, double s, int nsteps);

// Pseudo-spectral RK4 transport in the co-moving frame.  With the
// displacement source the marched quantity d solves (d_t + v_eps.grad) d = -v_eps,
// so x + d(t,x) is the foot of the characteristic at the start time.
class TransportMarch {
 public:
  TransportMarch(const CoarseFlow& flow, const Field& init, double t0, bool displacement = false);
  static TransportMarch displacement(const CoarseFlow& flow, const GridSpec& g, double t0);

  void march(double t1, int nsteps);
  // one RK4 step of length h from the current state, leaving this untouched
  TransportMarch stepped(double h) const;
  double time() const { return t_; }
  double start() const { return t0_; }
  // solution at time() in lab coordinates
  Field lab() const;

 private:
  Field rhs(double t, const Field& G) const;
  void rk4(double h);

  const CoarseFlow* flow_;
  Field G_;
  double t0_, t_;
  bool disp_;
};

// value at t1 of the solution of (d_t + v_eps.grad) F = 0 with F(t0) = init
Field transport_field(const Field& init, const CoarseFlow& flow, double t0, double t1, int nsteps = 0);
// displacement d(t1) for characteristics released at t0
Field displacement_field(const CoarseFlow& flow, double t0, double t1, int nsteps = 0);

// R_eps(t) = int R_x(t+s, Phi_s(t,x)) eta_{eps_t}(s) ds by Gauss-Legendre
// quadrature; each node is pulled back by a transport solve.
Field mollify_along_flow(const std::function<Field(double)>& R_spatial, const CoarseFlow& flow, double t,
                         double eps_t, int npts = 6, int nsteps = 0);

// (d_t + v_eps.grad) v_eps = f_eps, f_eps = eta**(-grad p + div R) + Q(v,v),
// Q(v,v) = v_eps.grad v_eps - eta**(div(v v)).
struct CoarseForce {
  Field force;
  Field commutator;
};
CoarseForce coarse_force(const Field& v, const Field& p, const Field& R, const MollifierKernel& kernel);

// ---- waves and phases ----

struct WaveIndex {
  std::array<int, 3> kappa{0, 0, 0};
  long k4 = 0;
  int face = 0;  // 0..11 into IcosaFrame::F
  WaveIndex conj() const { return {kappa, k4, IcosaFrame::neg(face)}; }
  int rotation() const { return rotation_index(kappa[0], kappa[1], kappa[2], k4); }
  std::string label() const;
};

struct PhaseConfig {
  double tau = 0.0;
  BumpShape time_shape;
  BumpShape space_shape;
  int min_steps = 2;
  // largest admissible sup|grad xi - grad xi_hat| on the chart support
  double stability_c = 0.25;
};

// Characteristic data of one generation k4 at one time: the displacement d
// and its Jacobian, from which every phase and spatial cutoff of that
// generation is evaluated pointwise.
struct GenerationSlice {
  long k4 = 0;
  double t = 0.0;
  double t_gen = 0.0;
  Vec3 drift{0, 0, 0};  // chart centres x(I) = kappa/2 + drift
  std::vector<Vector3> disp;   // d at each grid point
  std::vector<Matrix3> jac;    // jac(i,j) = delta_ij + d_j d_i
};

class PhaseBundle {
 public:
  PhaseBundle(const IcosaFrame& frame, const RotationFamily& rot, const CoarseFlow& flow, const PhaseConfig& cfg);

  const PhaseConfig& config() const { return cfg_; }
  const IcosaFrame& frame() const { return *frame_; }
  const CoarseFlow& flow() const { return *flow_; }

  double t_gen(long k4) const { return cfg_.tau * double(k4); }
  double time_cutoff(long k4, double t) const;
  std::vector<long> active_generations(double t) const;
  // f o O_m for the wave's rotation
  Vector3 rotated_face(const WaveIndex& I) const;

  // characteristics of generation k4 marched to t; the march is kept so
  // neighbouring stencil times differ by one RK4 step
  TransportMarch march_to(long k4, double t) const;
  GenerationSlice slice(const TransportMarch& m, long k4) const;
  GenerationSlice slice(long k4, double t) const { return slice(march_to(k4, t), k4); }

  // pointwise phase data at grid point p
  double phase(const GenerationSlice& s, const WaveIndex& I, std::size_t p) const;
  Vector3 phase_gradient(const GenerationSlice& s, const WaveIndex& I, std::size_t p) const;
  double chart_cutoff(const GenerationSlice& s, const std::array<int, 3>& kappa, std::size_t p) const;

  // sum over kappa of psi^2 and over k4 of eta^2 on the grid at time t (should be 1)
  double partition_error(double t) const;
  // sup over chart support of |grad xi - grad xi_hat|; throws when above stability_c
  double stability(const GenerationSlice& s, bool throw_on_violation = true) const;

 private:
  const IcosaFrame* frame_;
  const RotationFamily* rot_;
  const CoarseFlow* flow_;
  PhaseConfig cfg_;
};

// Dimensionless energy E_M[xi] (angular Xi) sampled over the chart support.
double dimensionless_energy(const PhaseBundle& b, long k4, double t, const WaveIndex& I, int M, double Xi_ang,
                            double N, int L);

struct PhaseDiagRow {
  std::string index;
  double t = 0.0;
  double deviation = 0.0;
  double E1 = 0.0, E2 = 0.0, E3 = 0.0;
};
void write_phase_diagnostics(const std::string& path, const std::vector<PhaseDiagRow>& rows);

}  // namespace ef
