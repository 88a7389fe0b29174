#pragma once
#include <vector>

#include "eulerforge/field.hpp"

namespace ef {

// Tensor product of 1-D kernels  eta1(s) = sum_j c_j (s/s0)^{2j} g(s/s0)/s0,
// g the unit Gaussian, with moments 1..L-1 vanishing.  Applied as the
// Fourier multiplier prod_i h(2 pi m_i eps s0).
class MollifierKernel {
 public:
  MollifierKernel(int L, double eps);

  int order() const { return L_; }
  double length() const { return eps_; }
  const std::vector<double>& coefficients() const { return c_; }

  // 1-D transform at angular frequency w (unscaled variable)
  double h(double w) const;
  // multiplier for integer wavenumber m on T^3
  double multiplier(int mx, int my, int mz) const;
  // p-th moment of the scaled 1-D kernel
  double moment(int p) const;
  // 1-D kernel value and its L1 norm (numerical)
  double value1d(double s) const;
  double l1_norm() const;

  static constexpr double kSigma = 0.5;

 private:
  int L_;
  double eps_;
  std::vector<double> c_;
};

MollifierKernel build_moment_kernel(int L, double eps, const GridSpec& grid);
Field mollify(const Field& f, const MollifierKernel& k);
Field double_mollify(const Field& f, const MollifierKernel& k);

// Gauss-Legendre nodes/weights on [-1,1]
void gauss_legendre(int npts, std::vector<double>& x, std::vector<double>& w);

// Quadrature for the time mollifier: even bump (1-(s/eps)^2)^4 on [-eps,eps],
// weights renormalized so constants are reproduced exactly.
struct TimeQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
TimeQuadrature time_mollifier_quadrature(double eps, int npts);

}  // namespace ef
