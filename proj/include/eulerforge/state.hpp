#pragma once
#include <memory>
#include <string>

#include "eulerforge/field.hpp"
#include "eulerforge/spectral.hpp"

namespace ef {

struct TimeInterval {
  double lo = 0.0, hi = 0.0;
  bool contains(double t) const { return t >= lo && t <= hi; }
  double length() const { return hi - lo; }
};

// A solution (v, p, R) of the Euler-Reynolds system, evaluated on demand.
class StateProvider {
 public:
  virtual ~StateProvider() = default;
  virtual const GridSpec& grid() const = 0;
  virtual Field velocity(double t) const = 0;
  virtual Field pressure(double t) const = 0;
  virtual Field stress(double t) const = 0;
  // interval containing supp R (empty interval when R = 0)
  virtual TimeInterval stress_support() const = 0;
  virtual std::string name() const = 0;
};

// Arnold-Beltrami-Childress flow: curl U = 2 pi U, a stationary Euler solution
// with pressure -|U|^2/2.
struct AbcFlow {
  double A = 1.0, B = 1.0, C = 1.0;
  Field velocity(const GridSpec& g) const;
  Field pressure(const GridSpec& g) const;
};

// (eta_bar U, eta_bar p, R_0) with eta_bar(t) = step((t - t0)/T) and
// d_j R_0^{jl} = eta_bar' U^l + d_j[(eta_bar^2 - eta_bar) U^j U^l], R_0 by
// slice-wise inverse divergence.
class CutoffAbcState : public StateProvider {
 public:
  CutoffAbcState(const GridSpec& g, const AbcFlow& abc, double t0, double ramp);
  const GridSpec& grid() const override { return grid_; }
  Field velocity(double t) const override;
  Field pressure(double t) const override;
  Field stress(double t) const override;
  TimeInterval stress_support() const override { return {t0_, t0_ + T_}; }
  std::string name() const override { return "cutoff_abc"; }

  double ramp(double t) const;
  double ramp_deriv(double t) const;

 private:
  GridSpec grid_;
  double t0_, T_;
  Field U_, p_, RU_, Rq_;
};

// Exact stationary Euler solution, R = 0 (ramp identically one).
class StationaryState : public StateProvider {
 public:
  StationaryState(const GridSpec& g, const AbcFlow& abc);
  const GridSpec& grid() const override { return grid_; }
  Field velocity(double t) const override;
  Field pressure(double t) const override;
  Field stress(double t) const override;
  TimeInterval stress_support() const override { return {0.0, 0.0}; }
  std::string name() const override { return "abc"; }

 private:
  GridSpec grid_;
  Field U_, p_;
};

class ZeroState : public StateProvider {
 public:
  explicit ZeroState(const GridSpec& g) : grid_(g) {}
  const GridSpec& grid() const override { return grid_; }
  Field velocity(double t) const override { return Field::vector(grid_, t); }
  Field pressure(double t) const override { return Field::scalar(grid_, t); }
  Field stress(double t) const override { return Field::sym_tensor(grid_, t); }
  TimeInterval stress_support() const override { return {0.0, 0.0}; }
  std::string name() const override { return "zero"; }

 private:
  GridSpec grid_;
};

// v^(t,x) = c + v(t, x - t c), p^ and R^ shifted alike.
class GalileanState : public StateProvider {
 public:
  GalileanState(std::shared_ptr<const StateProvider> base, const Vec3& c) : base_(std::move(base)), c_(c) {}
  const GridSpec& grid() const override { return base_->grid(); }
  Field velocity(double t) const override;
  Field pressure(double t) const override;
  Field stress(double t) const override;
  TimeInterval stress_support() const override { return base_->stress_support(); }
  std::string name() const override { return base_->name() + "+galilean"; }
  const Vec3& boost() const { return c_; }

 private:
  Vec3 offset(double t) const { return {t * c_[0], t * c_[1], t * c_[2]}; }
  std::shared_ptr<const StateProvider> base_;
  Vec3 c_;
};

// View of a state in the frame moving with its (conserved) mean velocity m:
// u(t,y) = v(t, y + m t) - m.  The Euler-Reynolds system is invariant under this change.
class ComovingState : public StateProvider {
 public:
  ComovingState(std::shared_ptr<const StateProvider> base, const Vec3& m) : base_(std::move(base)), m_(m) {}
  const GridSpec& grid() const override { return base_->grid(); }
  Field velocity(double t) const override;
  Field pressure(double t) const override;
  Field stress(double t) const override;
  TimeInterval stress_support() const override { return base_->stress_support(); }
  std::string name() const override { return base_->name() + "@comoving"; }

 private:
  Vec3 offset(double t) const { return {-t * m_[0], -t * m_[1], -t * m_[2]}; }
  std::shared_ptr<const StateProvider> base_;
  Vec3 m_;
};

}  // namespace ef
