#include "eulerforge/field.hpp"

#include <algorithm>
#include <cmath>

namespace ef {

int GridSpec::band() const { return int(std::floor(dealias_fraction * n / 2.0 + 1e-12)); }

void GridSpec::validate() const {
  require(n >= 8, "grid: n must be >= 8");
  require((n & (n - 1)) == 0, "grid: n must be a power of two");
  require(dealias_fraction > 0.0 && dealias_fraction <= 1.0, "grid: dealias_fraction must lie in (0,1]");
  require(dealias_fraction * n / 2.0 >= 2.0, "grid: dealias band must retain |k| >= 2");
}

Field::Field(const GridSpec& g, int rank, bool symmetric, double t) : time(t), grid_(g), rank_(rank) {
  require(rank >= 0 && rank <= 2, "field: rank must be 0, 1 or 2");
  require(!symmetric || rank == 2, "field: symmetric flag only valid for rank 2");
  sym_ = symmetric;
  int nc = rank == 0 ? 1 : rank == 1 ? 3 : (symmetric ? 6 : 9);
  comp_.assign(nc, std::vector<cplx>(g.size(), cplx(0.0)));
}

bool Field::same_shape(const Field& o) const {
  return grid_ == o.grid_ && rank_ == o.rank_ && sym_ == o.sym_;
}

void Field::require_shape(const Field& o, const char* op) const {
  if (!same_shape(o)) throw ContractError(std::string(op) + ": field shape mismatch");
}

Field& Field::operator+=(const Field& o) {
  require_shape(o, "operator+=");
  for (int c = 0; c < ncomp(); ++c) {
    auto& a = comp_[c];
    const auto& b = o.comp_[c];
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  }
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_shape(o, "operator-=");
  for (int c = 0; c < ncomp(); ++c) {
    auto& a = comp_[c];
    const auto& b = o.comp_[c];
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  }
  return *this;
}

Field& Field::operator*=(double s) {
  for (auto& a : comp_)
    for (auto& x : a) x *= s;
  return *this;
}

Field& Field::operator*=(cplx s) {
  for (auto& a : comp_)
    for (auto& x : a) x *= s;
  return *this;
}

Field& Field::scale_by(const std::vector<double>& w) {
  require(w.size() == npts(), "scale_by: size mismatch");
  for (auto& a : comp_)
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= w[i];
  return *this;
}

double Field::max_abs() const {
  double m = 0.0;
  for (const auto& a : comp_)
    for (const auto& x : a) m = std::max(m, std::abs(x));
  return m;
}

double Field::max_abs_component(int c) const {
  double m = 0.0;
  for (const auto& x : comp_[c]) m = std::max(m, std::abs(x));
  return m;
}

double Field::max_imag() const {
  double m = 0.0;
  for (const auto& a : comp_)
    for (const auto& x : a) m = std::max(m, std::abs(x.imag()));
  return m;
}

void Field::make_real() {
  for (auto& a : comp_)
    for (auto& x : a) x = cplx(x.real(), 0.0);
}

void Field::zero() {
  for (auto& a : comp_) std::fill(a.begin(), a.end(), cplx(0.0));
}

Field Field::symmetrized() const {
  require(rank_ == 2, "symmetrized: rank 2 required");
  if (sym_) return *this;
  Field s(grid_, 2, true, time);
  for (int j = 0; j < 3; ++j)
    for (int l = j; l < 3; ++l) {
      auto& d = s.tc(j, l);
      const auto& a = tc(j, l);
      const auto& b = tc(l, j);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = 0.5 * (a[i] + b[i]);
    }
  return s;
}

Field Field::trace() const {
  require(rank_ == 2, "trace: rank 2 required");
  Field t(grid_, 0, false, time);
  for (int j = 0; j < 3; ++j) {
    const auto& a = tc(j, j);
    for (std::size_t i = 0; i < a.size(); ++i) t[0][i] += a[i];
  }
  return t;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

double max_diff(const Field& a, const Field& b) {
  a.require_shape(b, "max_diff");
  double m = 0.0;
  for (int c = 0; c < a.ncomp(); ++c)
    for (std::size_t i = 0; i < a.npts(); ++i) m = std::max(m, std::abs(a[c][i] - b[c][i]));
  return m;
}

}  // namespace ef
