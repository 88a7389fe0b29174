#pragma once
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eulerforge/correction.hpp"
#include "eulerforge/divsolve.hpp"
#include "eulerforge/geometry.hpp"
#include "eulerforge/microstress.hpp"
#include "eulerforge/mollifier.hpp"
#include "eulerforge/state.hpp"
#include "eulerforge/transport.hpp"

namespace ef {

// Frequency and energy levels.  Xi is in cycles per unit length; the
// derivative bounds use the angular frequency 2 pi Xi.
struct FrequencyEnergyLevels {
  double Xi = 2.0;
  double e_v = 0.0;
  double e_R = 0.0;
  int L = 4;
  // the individual families (each the smallest admissible value)
  double from_v = 0.0, from_p = 0.0, from_R = 0.0, from_DtR = 0.0;
  double Xi_ang() const;
};

// Entrywise sup norms over the sample times; material derivatives of R by
// fourth-order central differences of step h.
FrequencyEnergyLevels measure_levels(const StateProvider& s, double Xi, int L, const std::vector<double>& times,
                                     double h);

struct ResidualReport {
  double residual = 0.0;  // || FD_h v + div(v v) + grad p - div R ||
  double div_v = 0.0;
  double scale = 0.0;     // || div R || + || FD_h v ||, for relative statements
};
ResidualReport verify_state(const StateProvider& s, double t, double h);

struct StageConfig {
  GridSpec grid;
  double Xi = 2.0;
  double N = 8.0;
  int L = 4;
  double eta = 1.0;  // N >= Xi^eta
  double B_lambda = 0.9;
  // B_lambda entering b (and hence tau); 0 means B_lambda.  Holding it fixed
  // while B_lambda varies isolates the lambda dependence.
  double B_lambda_tau = 0.0;
  double b0 = 0.25;
  double B0 = 1.0;
  double K = 0.0;  // 0: calibrated from the Newton basin
  std::uint64_t seed = 12345;  // sampling seed of the basin calibration
  double a_v = 1.0, a_R = 1.0, c_t = 0.5;
  BumpShape time_shape;
  BumpShape space_shape;
  int time_nodes = 4;
  int steps_per_tau = 16;  // the FD step is tau / steps_per_tau
  int min_transport_steps = 2;
  int parametrix_L = 1, parametrix_T = 1, parametrix_H = 0;
  NewtonOptions newton;
  double min_projection = 0.5;
  double stability_c = 0.25;
  Vector3 axis = Vector3(1, 2, 3);
  double scan_step = 1e-4;
  double c_min = 0.05;
  int level_samples = 9;
  std::optional<FrequencyEnergyLevels> levels;  // skip measurement when set
  void validate() const;
};

struct StageParameters {
  double Xi_ang = 0.0, e_v = 0.0, e_R = 0.0;
  double theta = 0.0, b = 0.0, tau = 0.0, lambda = 0.0;
  double eps_v = 0.0, eps_x = 0.0, eps_t = 0.0, tau_s = 0.0;
  double K = 0.0, basin = 0.0;
  double fd_step = 0.0;
  TimeInterval support;  // supp R
  TimeInterval window;   // supp e, where corrections live
  bool trivial = false;  // e_R = 0: nothing to correct
};

// One time slice of the stage output (all fields in the co-moving frame).
struct StageSlice {
  double t = 0.0;
  Field v, p, R, v_eps, R_eps;
  Field W, V, P0, P, S;
  Field v1, p1, R1;
  Field Q_M, Q_S, Q_L, Q_T, Q_H;
  Field U_L, U_T, U_H;
  double e = 0.0;
  int waves = 0;
  double div_res_L = 0.0, div_res_T = 0.0, div_res_H = 0.0;
  double measured_residual = 0.0;   // || ER residual of (v1,p1) - div R1 ||
  double residual_scale = 0.0;      // || div R1 ||
  double old_residual = 0.0;        // FD error of the old state
  double momentum_drift = 0.0;      // | int v1 - int v |
  double div_V = 0.0, imag_V = 0.0;
  double beltrami = 0.0;            // max |(i grad xi) x v_I - |grad xi| v_I|
  double stress_eq = 0.0;           // max | sum v v* - (e delta/3 - R_eps_trace_free) | where partitions are full
  double min_gamma = 0.0, max_eps = 0.0;
  double stability = 0.0;
};

struct EnergySample {
  double t = 0.0;
  double e = 0.0;
  std::vector<double> int_V2;  // one per lambda
};

class Stage {
 public:
  Stage(std::shared_ptr<const StateProvider> state, const StageConfig& cfg);

  const StageConfig& config() const { return cfg_; }
  const StageParameters& params() const { return par_; }
  const FrequencyEnergyLevels& levels() const { return levels_; }
  const EnergyProfile& energy() const { return energy_; }
  const IcosaFrame& frame() const { return frame_; }
  const RotationFamily& rotations() const { return rot_; }
  const Vec3& mean_velocity() const { return mean_; }
  const CoarseFlow& flow() const { return *flow_; }
  const PhaseBundle& bundle() const { return *bundle_; }
  const StateProvider& comoving() const { return *co_; }

  // R_eps(t) = along-flow average of eta_{eps_x} * R
  Field R_eps(double t) const;
  // chart waves of every live generation at t
  std::vector<ChartWaves> waves(double t) const;
  StageSlice evaluate(double t) const;
  // int |V|^2 for several lambdas sharing the amplitudes at t
  EnergySample energy_sample(double t, const std::vector<double>& lambdas) const;

  // field in the co-moving frame -> lab frame at time t
  Field to_lab(const Field& f, double t) const;

 private:
  StageConfig cfg_;
  std::shared_ptr<const StateProvider> state_;
  std::shared_ptr<const StateProvider> co_;
  Vec3 mean_{0, 0, 0};
  FrequencyEnergyLevels levels_;
  StageParameters par_;
  EnergyProfile energy_;
  IcosaFrame frame_;
  RotationFamily rot_;
  std::unique_ptr<MollifierKernel> kv_, kx_;
  std::unique_ptr<CoarseFlow> flow_;
  std::unique_ptr<PhaseBundle> bundle_;
};

// Derived parameters from levels and config (exposed for tests and the CLI).
StageParameters derive_parameters(const StageConfig& cfg, const FrequencyEnergyLevels& lv, const TimeInterval& supp,
                                  double K);

struct StageReport {
  StageParameters params;
  FrequencyEnergyLevels levels;
  std::vector<double> times;
  double norm_Q_M = 0.0, norm_Q_S = 0.0, norm_Q_L = 0.0, norm_Q_T = 0.0, norm_Q_H = 0.0;
  double norm_R1 = 0.0, norm_R = 0.0, norm_V = 0.0, norm_P = 0.0;
  double max_relative_residual = 0.0;
  double max_momentum_drift = 0.0;
  double max_div_res = 0.0;
  double energy_gap = -1.0;
  double new_e_v = 0.0, new_e_R = 0.0, new_Xi = 0.0;
  std::string to_json() const;
};
StageReport summarize(const Stage& stage, const std::vector<StageSlice>& slices);

}  // namespace ef
