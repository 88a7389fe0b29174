#include "eulerforge/divsolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "eulerforge/cutoffs.hpp"
#include "eulerforge/spectral.hpp"

namespace ef {

namespace {
const cplx I1(0.0, 1.0);
}

Matrix3c q_symbol(const Vector3& g, const Vector3c& u, double min_grad) {
  const double g2 = g.squaredNorm();
  if (!(std::sqrt(g2) > min_grad)) throw NumericalError("q_symbol: phase gradient degenerates");
  const Vector3c gc = g.cast<cplx>();
  const cplx ug = gc.dot(u) / g2;  // u.g/|g|^2; Eigen's dot conjugates its first argument and g is real
  const Vector3c uperp = u - ug * gc;
  Matrix3c q = (gc * uperp.transpose() + uperp * gc.transpose()) / g2;
  q += ug * Matrix3c::Identity();
  return q / I1;
}

Field OscillatoryData::carrier() const {
  Field c = Field::scalar(u.grid());
  for (std::size_t p = 0; p < c.npts(); ++p)
    if (mask[p]) c[0][p] = std::polar(1.0, lambda * phase[p]);
  return c;
}

namespace {
Field q_field(const OscillatoryData& d, const Field& u) {
  Field q = Field::sym_tensor(u.grid(), u.time);
  // the gradient is known everywhere, so the symbol is applied wherever u is nonzero
  for (std::size_t p = 0; p < u.npts(); ++p) {
    const Vector3c up(u[0][p], u[1][p], u[2][p]);
    if (up.squaredNorm() == 0.0) continue;
    const Matrix3c m = q_symbol(d.grad[p], up);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) q.tc(i, j)[p] = m(i, j);
  }
  return q;
}
}  // namespace

ParametrixExpansion parametrix_expand(const OscillatoryData& data, int order) {
  require(order >= 1, "parametrix_expand: order must be >= 1");
  require(data.u.rank() == 1, "parametrix_expand: amplitude must be a vector field");
  ParametrixExpansion e;
  e.order = order;
  Field u = data.u;
  for (int k = 1; k <= order; ++k) {
    Field q = q_field(data, u);
    u = div(q);
    u *= -1.0;
    e.q.push_back(std::move(q));
  }
  e.residual = std::move(u);
  return e;
}

Field parametrix_tensor(const OscillatoryData& data, const ParametrixExpansion& e) {
  const Field c = data.carrier();
  Field Q = Field::sym_tensor(data.u.grid(), data.u.time);
  double scale = 1.0;
  for (const auto& q : e.q) {
    scale /= data.lambda;
    for (int comp = 0; comp < 6; ++comp)
      for (std::size_t p = 0; p < Q.npts(); ++p) Q[comp][p] += scale * c[0][p] * q[comp][p];
  }
  return Q;
}

double telescoping_residual(const OscillatoryData& data, const ParametrixExpansion& e) {
  const Field c = data.carrier();
  const std::size_t np = c.npts();
  // d_j(e^{i lambda xi} q^{jl}) = e^{i lambda xi}(i lambda d_j xi q^{jl} + d_j q^{jl})
  std::vector<Vector3c> lhs(np, Vector3c::Zero());
  double scale = 1.0;
  for (const auto& q : e.q) {
    scale /= data.lambda;
    const Field dq = div(q);
    for (std::size_t p = 0; p < np; ++p) {
      Vector3c s = Vector3c::Zero();
      for (int l = 0; l < 3; ++l) {
          cplx acc = 0.0;
          for (int j = 0; j < 3; ++j) acc += data.grad[p][j] * q.tc(j, l)[p];
          s[l] = I1 * data.lambda * acc;
        }
      for (int l = 0; l < 3; ++l) s[l] += dq[l][p];
      lhs[p] += scale * s;
    }
  }
  double err = 0.0;
  const double rs = std::pow(data.lambda, -double(e.order - 1));  // u_(D+1)/lambda^D after one factor of lambda
  for (std::size_t p = 0; p < np; ++p)
    for (int l = 0; l < 3; ++l) {
      const cplx val = lhs[p][l] + rs / data.lambda * e.residual[l][p] - data.u[l][p];
      err = std::max(err, std::abs(val));
    }
  return err;
}

Field solve_with_parametrix(const Field& U, const Field& Q_param) {
  require(U.rank() == 1, "solve_with_parametrix: data must be a vector field");
  if (Q_param.empty()) return inverse_divergence(U);
  Field rest = U;
  rest -= div(Q_param);
  Field Q = inverse_divergence(rest);
  Q += Q_param;
  return Q;
}

double divergence_residual(const Field& Q, const Field& U) { return max_diff(div(Q), U); }

double elliptic_time_cutoff(double s) { return smooth_step((1.5 - std::abs(s)) / 0.5); }

TransportEllipticResult transport_elliptic_solve(const std::function<Field(double)>& U, const CoarseFlow& flow,
                                                 double tau, double t_I, const std::vector<double>& times,
                                                 const TransportEllipticOptions& opt) {
  require(tau > 0.0, "transport_elliptic_solve: tau must be positive");
  const GridSpec& g = flow.grid();
  const double hfd = opt.fd_step > 0.0 ? opt.fd_step : 1e-3 * tau;

  auto check_mean = [&](const Field& u, double t) {
    const Vec3 m = mean_vector(u);
    const double sc = std::max(1.0, u.max_abs());
    for (double x : m)
      if (std::abs(x) > opt.mean_tol * sc) {
        std::ostringstream os;
        os << "transport_elliptic_solve: data has nonzero spatial mean at t = " << t
           << " (momentum compatibility requires integral 0)";
        throw ContractError(os.str());
      }
  };
  auto material_U = [&](double t) {
    // fourth-order central difference in time plus v_eps . grad U
    Field d = (-1.0) * U(t + 2 * hfd);
    d += 8.0 * U(t + hfd);
    d -= 8.0 * U(t - hfd);
    d += U(t - 2 * hfd);
    d *= 1.0 / (12.0 * hfd);
    d += advect(flow.velocity(t), U(t));
    return d;
  };
  // D_t Q = R[W], W^l = d_j v^b d_b Q^{jl} + D_t U^l
  auto forcing = [&](double t, const Field& Q) {
    const Field v = flow.velocity(t);
    const Field gv = grad_tensor(v);  // gv(j,b) = d_j v^b
    Field W = Field::vector(g, t);
    for (int b = 0; b < 3; ++b) {
      const Field dQ = partial(Q, b);
      for (int l = 0; l < 3; ++l)
        for (int j = 0; j < 3; ++j) {
          const auto& a = gv.tc(j, b);
          const auto& q = dQ.tc(j, l);
          for (std::size_t p = 0; p < W.npts(); ++p) W[l][p] += a[p] * q[p];
        }
    }
    truncate(W);
    W += material_U(t);
    return inverse_divergence(W);
  };
  auto rhs = [&](double t, const Field& Q) {
    Field r = forcing(t, Q);
    r -= advect(flow.velocity(t), Q);
    return r;
  };
  auto rk4 = [&](Field& Q, double t, double h) {
    Field k1 = rhs(t, Q);
    Field y = Q;
    y += 0.5 * h * k1;
    Field k2 = rhs(t + 0.5 * h, y);
    y = Q;
    y += 0.5 * h * k2;
    Field k3 = rhs(t + 0.5 * h, y);
    y = Q;
    y += h * k3;
    Field k4 = rhs(t + h, y);
    k2 += k3;
    k1 += 2.0 * k2;
    k1 += k4;
    Q += (h / 6.0) * k1;
  };

  const Field U0 = U(t_I);
  check_mean(U0, t_I);
  const Field Q0 = inverse_divergence(U0);

  TransportEllipticResult res;
  res.times = times;
  res.Q.resize(times.size());
  res.material.resize(times.size());
  const double hmax = tau / opt.steps_per_tau;

  // march forward through the sorted later times and backward through the earlier ones
  std::vector<std::size_t> order(times.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  for (int dir : {+1, -1}) {
    Field Q = Q0;
    double t = t_I;
    std::vector<std::size_t> seq;
    for (std::size_t k : order)
      if ((dir > 0 && times[k] >= t_I) || (dir < 0 && times[k] < t_I)) seq.push_back(k);
    if (dir < 0) std::reverse(seq.begin(), seq.end());
    for (std::size_t k : seq) {
      const double target = times[k];
      const double s = (target - t_I) / tau;
      if (std::abs(s) >= 1.5) {
        res.Q[k] = Field::sym_tensor(g, target);
        res.material[k] = Field::sym_tensor(g, target);
        continue;
      }
      const double span = target - t;
      if (span != 0.0) {
        check_mean(U(target), target);
        const int nst = std::max(flow.steps_for(span), int(std::ceil(std::abs(span) / hmax - 1e-12)));
        const double h = span / nst;
        for (int st = 0; st < nst; ++st) rk4(Q, t + st * h, h);
        t = target;
      }
      res.material[k] = forcing(t, Q);
      Field out = Q;
      out *= elliptic_time_cutoff(s);
      out.make_real();
      out.time = target;
      res.Q[k] = std::move(out);
    }
  }
  return res;
}

}  // namespace ef
