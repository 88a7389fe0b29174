#pragma once
#include <string>
#include <vector>

#include "eulerforge/field.hpp"
#include "eulerforge/microstress.hpp"

namespace ef {

// lambda * sup|grad xi| must stay below 2 pi n / 4
double lambda_limit(const GridSpec& g, double sup_grad);
void check_lambda(const GridSpec& g, double lambda, double sup_grad);

// Builds W = sum_I e^{i lambda xi_I} w_I / lambda = sum_{F-bar} 2 Re(...) / lambda
// chart by chart; V = curl W after truncation.  When per-wave data is
// requested the accumulator also forms V~_I = v_I + curl(w_I)/lambda and
// S = sum_I V~_I (x) conj(V~_I).
class CorrectionBuilder {
 public:
  CorrectionBuilder(const GridSpec& g, double lambda, double t, bool with_s = false);

  // returns V~_I for the six waves when with_s is set (empty otherwise)
  std::vector<Field> add(const ChartWaves& c);

  double lambda() const { return lambda_; }
  double sup_grad() const { return sup_grad_; }
  Field W() const;
  Field V() const;  // curl of the truncated W; imaginary parts are roundoff
  const Field& S() const { return S_; }

 private:
  GridSpec grid_;
  double lambda_, t_;
  bool with_s_;
  Field W_, S_;
  double sup_grad_ = 0.0;
};

// V~_I = v_I + curl(w_I)/lambda for one wave
Field tilde_amplitude(const ChartWaves& c, int f, const GridSpec& g, double lambda);

struct Correction {
  double t = 0.0;
  double lambda = 0.0;
  Field W, V;
};
Correction assemble_correction(const std::vector<ChartWaves>& charts, const GridSpec& g, double lambda, double t);

// P0 = -e/3 - tr R_eps / 3 and P = P0 - (|V|^2 - tr S)/2
struct PressureCorrection {
  Field P0, P;
};
PressureCorrection assemble_pressure(const Field& V, const Field& S, const Field& R_eps, double e);

// gap(t) = int |V|^2 - int e; sup over samples of |gap| and of its central difference rate
struct EnergyGap {
  std::vector<double> t, integral_V2, integral_e, gap;
  double sup_gap = 0.0;
  double sup_rate = 0.0;
};
EnergyGap energy_increment(const std::vector<double>& times, const std::vector<double>& int_V2,
                           const std::vector<double>& e_values);
double integral(const std::vector<cplx>& a);
double energy_integral(const Field& V);  // int |V|^2 dx
void write_energy_csv(const std::string& path, const EnergyGap& g);

}  // namespace ef
