#pragma once
#include <complex>
#include <cstddef>
#include <vector>

#include "eulerforge/errors.hpp"

namespace ef {

using cplx = std::complex<double>;

// Uniform grid on T^3 = (R/Z)^3.
struct GridSpec {
  int n = 64;
  double dealias_fraction = 2.0 / 3.0;

  std::size_t size() const { return std::size_t(n) * n * n; }
  double spacing() const { return 1.0 / n; }
  // largest retained |m| per axis after truncation
  int band() const;
  void validate() const;
  bool operator==(const GridSpec& o) const { return n == o.n && dealias_fraction == o.dealias_fraction; }
};

// symmetric storage order: xx xy xz yy yz zz
inline int sym_index(int j, int l) {
  static const int tab[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return tab[j][l];
}

// Tensor field on the grid; components stored separately, x slowest, z fastest.
// Values are complex; real fields simply carry zero imaginary parts.
class Field {
 public:
  Field() = default;
  Field(const GridSpec& g, int rank, bool symmetric = false, double time = 0.0);

  static Field scalar(const GridSpec& g, double t = 0.0) { return Field(g, 0, false, t); }
  static Field vector(const GridSpec& g, double t = 0.0) { return Field(g, 1, false, t); }
  static Field sym_tensor(const GridSpec& g, double t = 0.0) { return Field(g, 2, true, t); }
  static Field tensor(const GridSpec& g, double t = 0.0) { return Field(g, 2, false, t); }

  const GridSpec& grid() const { return grid_; }
  int rank() const { return rank_; }
  bool symmetric() const { return sym_; }
  int ncomp() const { return int(comp_.size()); }
  std::size_t npts() const { return grid_.size(); }
  bool empty() const { return comp_.empty(); }

  std::vector<cplx>& operator[](int c) { return comp_[c]; }
  const std::vector<cplx>& operator[](int c) const { return comp_[c]; }

  // rank-2 component (j,l); symmetric fields alias (j,l) and (l,j)
  std::vector<cplx>& tc(int j, int l) { return comp_[tidx(j, l)]; }
  const std::vector<cplx>& tc(int j, int l) const { return comp_[tidx(j, l)]; }
  int tidx(int j, int l) const { return sym_ ? sym_index(j, l) : 3 * j + l; }

  bool same_shape(const Field& o) const;
  void require_shape(const Field& o, const char* op) const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  Field& operator*=(cplx s);
  // pointwise scaling by a scalar field
  Field& scale_by(const std::vector<double>& w);

  double max_abs() const;
  double max_imag() const;
  double max_abs_component(int c) const;
  void make_real();
  void zero();

  // copy as a symmetric rank-2 field (average of (j,l),(l,j))
  Field symmetrized() const;
  // contraction T^{jj}
  Field trace() const;

  double time = 0.0;

 private:
  GridSpec grid_;
  int rank_ = 0;
  bool sym_ = false;
  std::vector<std::vector<cplx>> comp_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

// L-infinity difference over all components
double max_diff(const Field& a, const Field& b);

inline std::size_t flat_index(int n, int i, int j, int k) { return (std::size_t(i) * n + j) * n + k; }

}  // namespace ef
