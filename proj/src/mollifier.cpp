#include "eulerforge/mollifier.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "eulerforge/spectral.hpp"

namespace ef {

namespace {

// E[t^{2n}] for the unit Gaussian
double gauss_moment(int p) {
  if (p % 2) return 0.0;
  double m = 1.0;
  for (int k = p - 1; k > 0; k -= 2) m *= k;
  return m;
}

// probabilists' Hermite polynomial
double hermite_e(int n, double x) {
  double h0 = 1.0, h1 = x;
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    const double h2 = x * h1 - k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

}  // namespace

MollifierKernel::MollifierKernel(int L, double eps) : L_(L), eps_(eps) {
  require(L >= 2, "mollifier: L must be >= 2");
  require(eps > 0.0, "mollifier: eps must be positive");
  const int J = (L - 1) / 2;
  Eigen::MatrixXd M(J + 1, J + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(J + 1);
  rhs(0) = 1.0;
  for (int m = 0; m <= J; ++m)
    for (int j = 0; j <= J; ++j) M(m, j) = gauss_moment(2 * j + 2 * m);
  Eigen::VectorXd c = M.fullPivLu().solve(rhs);
  c_.assign(c.data(), c.data() + c.size());
}

double MollifierKernel::h(double w) const {
  double s = 0.0;
  for (std::size_t j = 0; j < c_.size(); ++j) s += c_[j] * ((j % 2) ? -1.0 : 1.0) * hermite_e(int(2 * j), w);
  return s * std::exp(-0.5 * w * w);
}

double MollifierKernel::multiplier(int mx, int my, int mz) const {
  const double a = 2.0 * std::numbers::pi * eps_ * kSigma;
  return h(a * mx) * h(a * my) * h(a * mz);
}

double MollifierKernel::moment(int p) const {
  double s = 0.0;
  for (std::size_t j = 0; j < c_.size(); ++j) s += c_[j] * gauss_moment(int(2 * j) + p);
  return s * std::pow(eps_ * kSigma, p);
}

double MollifierKernel::value1d(double s) const {
  const double t = s / (eps_ * kSigma);
  double p = 0.0;
  for (std::size_t j = 0; j < c_.size(); ++j) p += c_[j] * std::pow(t, 2.0 * j);
  return p * std::exp(-0.5 * t * t) / (std::sqrt(2.0 * std::numbers::pi) * eps_ * kSigma);
}

double MollifierKernel::l1_norm() const {
  const double half = 12.0 * eps_ * kSigma;
  const int npts = 4000;
  const double h = 2.0 * half / npts;
  double s = 0.0;
  for (int i = 0; i <= npts; ++i) {
    const double w = (i == 0 || i == npts) ? 0.5 : 1.0;
    s += w * std::abs(value1d(-half + i * h));
  }
  return std::pow(s * h, 3);  // tensor product
}

MollifierKernel build_moment_kernel(int L, double eps, const GridSpec& grid) {
  if (eps < 2.0 * grid.spacing())
    throw NumericalError("mollifier: eps under-resolved (eps < 2 grid spacings)");
  return MollifierKernel(L, eps);
}

Field mollify(const Field& f, const MollifierKernel& k) {
  Field out(f.grid(), f.rank(), f.symmetric(), f.time);
  for (int c = 0; c < f.ncomp(); ++c)
    out[c] = apply_multiplier(f[c], f.grid().n, [&](int mx, int my, int mz) { return cplx(k.multiplier(mx, my, mz)); });
  return out;
}

Field double_mollify(const Field& f, const MollifierKernel& k) {
  Field out(f.grid(), f.rank(), f.symmetric(), f.time);
  for (int c = 0; c < f.ncomp(); ++c)
    out[c] = apply_multiplier(f[c], f.grid().n, [&](int mx, int my, int mz) {
      const double s = k.multiplier(mx, my, mz);
      return cplx(s * s);
    });
  return out;
}

void gauss_legendre(int npts, std::vector<double>& x, std::vector<double>& w) {
  require(npts >= 1, "gauss_legendre: need at least one node");
  // Golub-Welsch
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(npts, npts);
  for (int i = 1; i < npts; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(npts);
  w.resize(npts);
  for (int i = 0; i < npts; ++i) {
    x[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    w[i] = 2.0 * v * v;
  }
}

TimeQuadrature time_mollifier_quadrature(double eps, int npts) {
  std::vector<double> x, w;
  gauss_legendre(npts, x, w);
  TimeQuadrature q;
  double total = 0.0;
  for (int i = 0; i < npts; ++i) {
    const double b = std::pow(1.0 - x[i] * x[i], 4);
    q.nodes.push_back(eps * x[i]);
    q.weights.push_back(w[i] * b);
    total += w[i] * b;
  }
  for (auto& wi : q.weights) wi /= total;
  return q;
}

}  // namespace ef
