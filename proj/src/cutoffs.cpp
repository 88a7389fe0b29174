#include "eulerforge/cutoffs.hpp"

#include <cmath>

#include "eulerforge/errors.hpp"

namespace ef {

namespace {
double fexp(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double fexp_d(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }
}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = fexp(x), b = fexp(1.0 - x);
  return a / (a + b);
}

double smooth_step_deriv(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = fexp(x), b = fexp(1.0 - x);
  const double da = fexp_d(x), db = -fexp_d(1.0 - x);
  return (da * b - a * db) / ((a + b) * (a + b));
}

void BumpShape::validate() const {
  require(plateau >= 0.0 && plateau < support, "BumpShape: need 0 <= plateau < support");
  // overlap of neighbours keeps the normalizer positive; support < 1 keeps eta_2Z single-valued
  require(support > 0.5 && support < 1.0, "BumpShape: support must lie in (1/2, 1)");
}

double bump_tilde(double t, const BumpShape& s) {
  const double a = std::abs(t);
  if (a <= s.plateau) return 1.0;
  if (a >= s.support) return 0.0;
  return smooth_step((s.support - a) / (s.support - s.plateau));
}

double bump_square_sum(double t, const BumpShape& s) {
  const double k0 = std::floor(t);
  double sum = 0.0;
  for (int k = -1; k <= 2; ++k) {
    const double b = bump_tilde(t - (k0 + k), s);
    sum += b * b;
  }
  return sum;
}

double bump(double t, const BumpShape& s) {
  const double num = bump_tilde(t, s);
  if (num == 0.0) return 0.0;
  return num / std::sqrt(bump_square_sum(t, s));
}

double bump_2z(double y, const BumpShape& s) {
  const double r = y - 2.0 * std::floor((y + 1.0) / 2.0);  // [-1, 1)
  return bump(r, s);
}

double chart_cutoff(const std::array<int, 3>& kappa, const std::array<double, 3>& x, const BumpShape& s) {
  double p = 1.0;
  for (int i = 0; i < 3 && p != 0.0; ++i) p *= bump_2z(2.0 * x[i] - kappa[i], s);
  return p;
}

double wrap_half(double x) { return x - std::floor(x + 0.5); }

}  // namespace ef
