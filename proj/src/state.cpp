#include "eulerforge/state.hpp"

#include <cmath>
#include <numbers>

#include "eulerforge/cutoffs.hpp"

namespace ef {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class Fn>
void fill(Field& f, Fn&& fn) {
  const int n = f.grid().n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) fn(flat_index(n, i, j, k), double(i) / n, double(j) / n, double(k) / n);
}
}  // namespace

Field AbcFlow::velocity(const GridSpec& g) const {
  Field U = Field::vector(g);
  fill(U, [&](std::size_t p, double x, double y, double z) {
    U[0][p] = A * std::sin(kTwoPi * z) + C * std::cos(kTwoPi * y);
    U[1][p] = B * std::sin(kTwoPi * x) + A * std::cos(kTwoPi * z);
    U[2][p] = C * std::sin(kTwoPi * y) + B * std::cos(kTwoPi * x);
  });
  return U;
}

Field AbcFlow::pressure(const GridSpec& g) const {
  const Field U = velocity(g);
  Field p = Field::scalar(g);
  for (std::size_t q = 0; q < p.npts(); ++q)
    p[0][q] = -0.5 * (std::norm(U[0][q]) + std::norm(U[1][q]) + std::norm(U[2][q]));
  return p;
}

CutoffAbcState::CutoffAbcState(const GridSpec& g, const AbcFlow& abc, double t0, double ramp)
    : grid_(g), t0_(t0), T_(ramp) {
  g.validate();
  require(ramp > 0.0, "CutoffAbcState: ramp length must be positive");
  U_ = abc.velocity(g);
  p_ = abc.pressure(g);
  RU_ = inverse_divergence(U_);
  RU_.make_real();
  Rq_ = inverse_divergence(div(outer(U_, U_)));
  Rq_.make_real();
}

double CutoffAbcState::ramp(double t) const { return smooth_step((t - t0_) / T_); }
double CutoffAbcState::ramp_deriv(double t) const { return smooth_step_deriv((t - t0_) / T_) / T_; }

Field CutoffAbcState::velocity(double t) const {
  Field v = ramp(t) * U_;
  v.time = t;
  return v;
}

Field CutoffAbcState::pressure(double t) const {
  Field p = ramp(t) * p_;
  p.time = t;
  return p;
}

Field CutoffAbcState::stress(double t) const {
  const double e = ramp(t);
  Field R = ramp_deriv(t) * RU_;
  R += (e * e - e) * Rq_;
  R.time = t;
  return R;
}

StationaryState::StationaryState(const GridSpec& g, const AbcFlow& abc)
    : grid_(g), U_(abc.velocity(g)), p_(abc.pressure(g)) {}

Field StationaryState::velocity(double t) const {
  Field v = U_;
  v.time = t;
  return v;
}
Field StationaryState::pressure(double t) const {
  Field p = p_;
  p.time = t;
  return p;
}
Field StationaryState::stress(double t) const { return Field::sym_tensor(grid_, t); }

Field GalileanState::velocity(double t) const {
  Field v = shift(base_->velocity(t), offset(t));
  for (int a = 0; a < 3; ++a)
    for (auto& x : v[a]) x += c_[a];
  v.make_real();
  v.time = t;
  return v;
}
Field GalileanState::pressure(double t) const {
  Field p = shift(base_->pressure(t), offset(t));
  p.make_real();
  p.time = t;
  return p;
}
Field GalileanState::stress(double t) const {
  Field R = shift(base_->stress(t), offset(t));
  R.make_real();
  R.time = t;
  return R;
}

Field ComovingState::velocity(double t) const {
  Field v = shift(base_->velocity(t), offset(t));
  for (int a = 0; a < 3; ++a)
    for (auto& x : v[a]) x -= m_[a];
  v.make_real();
  v.time = t;
  return v;
}
Field ComovingState::pressure(double t) const {
  Field p = shift(base_->pressure(t), offset(t));
  p.make_real();
  p.time = t;
  return p;
}
Field ComovingState::stress(double t) const {
  Field R = shift(base_->stress(t), offset(t));
  R.make_real();
  R.time = t;
  return R;
}

}  // namespace ef
