#pragma once
#include <array>

namespace ef {

// C-infinity step: 0 for x <= 0, 1 for x >= 1, f(x)/(f(x)+f(1-x)), f = exp(-1/x).
double smooth_step(double x);
double smooth_step_deriv(double x);

// Even bump: 1 on |t| <= plateau, 0 on |t| >= support.
struct BumpShape {
  double plateau = 1.0 / 6.0;
  double support = 5.0 / 6.0;
  void validate() const;
};

double bump_tilde(double t, const BumpShape& s = {});
// eta = eta~ / sqrt(sum_k eta~^2(t-k)); sum_k eta^2(t-k) = 1
double bump(double t, const BumpShape& s = {});
double bump_square_sum(double t, const BumpShape& s = {});
// 2Z-periodization of eta
double bump_2z(double y, const BumpShape& s = {});
// spatial partition psi_bar_kappa(x) = prod_i eta_2Z(2 x_i - kappa_i); sum_kappa psi^2 = 1
double chart_cutoff(const std::array<int, 3>& kappa, const std::array<double, 3>& x, const BumpShape& s = {});

// wrap to [-1/2, 1/2)
double wrap_half(double x);

}  // namespace ef
