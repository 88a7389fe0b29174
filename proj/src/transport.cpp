#include "eulerforge/transport.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ef {

namespace {
constexpr std::size_t kCacheLimit = 48;

Vec3 scaled(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

Field real_part(Field f) {
  f.make_real();
  return f;
}
}  // namespace

// ---------------- CoarseFlow ----------------

CoarseFlow::CoarseFlow(const GridSpec& g, Source velocity, const MollifierKernel& kernel, double t_lo,
                       double t_hi, double max_step)
    : grid_(g), source_(std::move(velocity)), kernel_(std::make_shared<MollifierKernel>(kernel)),
      t_lo_(t_lo), t_hi_(t_hi) {
  init(max_step);
}

CoarseFlow CoarseFlow::unmollified(const GridSpec& g, Source velocity, double t_lo, double t_hi,
                                   double max_step) {
  CoarseFlow f;
  f.grid_ = g;
  f.source_ = std::move(velocity);
  f.t_lo_ = t_lo;
  f.t_hi_ = t_hi;
  f.init(max_step);
  return f;
}

void CoarseFlow::init(double max_step) {
  require(t_hi_ >= t_lo_, "CoarseFlow: empty time window");
  mu_ = std::make_shared<std::mutex>();
  cache_ = std::make_shared<std::map<double, Field>>();
  const Field v0 = velocity(t_lo_);
  mean_ = mean_vector(v0);
  // a mean at roundoff level is zero; this keeps the co-moving frame shift-free
  const double vmax = v0.max_abs();
  for (auto& m : mean_)
    if (std::abs(m) <= 1e-14 * vmax) m = 0.0;
  if (max_step > 0.0) {
    max_step_ = max_step;
    return;
  }
  // CFL-type bound from the relative speed at three sample times
  double umax = 0.0;
  for (double t : {t_lo_, 0.5 * (t_lo_ + t_hi_), t_hi_}) {
    const Field v = velocity(t);
    for (std::size_t p = 0; p < v.npts(); ++p) {
      double s = 0.0;
      for (int a = 0; a < 3; ++a) s += std::norm(v[a][p].real() - mean_[a]);
      umax = std::max(umax, std::sqrt(s));
    }
  }
  max_step_ = umax > 0.0 ? 0.5 * grid_.spacing() / umax : (t_hi_ - t_lo_ + 1.0);
}

void CoarseFlow::check_window(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  if (t < t_lo_ - slack || t > t_hi_ + slack) {
    std::ostringstream os;
    os << "CoarseFlow: time " << t << " outside the stored window [" << t_lo_ << ", " << t_hi_ << "]";
    throw ContractError(os.str());
  }
}

Field CoarseFlow::velocity(double t) const {
  check_window(t);
  {
    std::lock_guard<std::mutex> lk(*mu_);
    auto it = cache_->find(t);
    if (it != cache_->end()) return it->second;
  }
  Field v = source_(t);
  require(v.rank() == 1 && v.grid() == grid_, "CoarseFlow: source must return a vector field on the flow grid");
  Field ve = kernel_ ? double_mollify(v, *kernel_) : v;
  ve.make_real();
  ve.time = t;
  std::lock_guard<std::mutex> lk(*mu_);
  if (cache_->size() >= kCacheLimit) cache_->erase(cache_->begin());
  cache_->emplace(t, ve);
  return ve;
}

int CoarseFlow::steps_for(double span, int min_steps) const {
  return std::max(min_steps, int(std::ceil(std::abs(span) / max_step_ - 1e-12)));
}

// ---------------- point advection ----------------

Vec3 advect_point(const CoarseFlow& flow, double t, const Vec3& x, double s, int nsteps) {
  require(nsteps >= 1, "advect_point: nsteps must be positive");
  flow.check_window(t);
  flow.check_window(t + s);
  const int n = flow.grid().n;
  std::map<double, std::array<std::vector<cplx>, 3>> spectra;
  auto vel = [&](double tt, const Vec3& y) {
    auto it = spectra.find(tt);
    if (it == spectra.end()) {
      const Field v = flow.velocity(tt);
      std::array<std::vector<cplx>, 3> sp;
      for (int a = 0; a < 3; ++a) sp[a] = fft_forward(v[a], n);
      it = spectra.emplace(tt, std::move(sp)).first;
    }
    Vec3 r;
    for (int a = 0; a < 3; ++a) r[a] = eval_spectral(it->second[a], n, y).real();
    return r;
  };
  const double h = s / nsteps;
  Vec3 y = x;
  double tt = t;
  for (int k = 0; k < nsteps; ++k) {
    const Vec3 k1 = vel(tt, y);
    Vec3 y2, y3, y4;
    for (int a = 0; a < 3; ++a) y2[a] = y[a] + 0.5 * h * k1[a];
    const Vec3 k2 = vel(tt + 0.5 * h, y2);
    for (int a = 0; a < 3; ++a) y3[a] = y[a] + 0.5 * h * k2[a];
    const Vec3 k3 = vel(tt + 0.5 * h, y3);
    for (int a = 0; a < 3; ++a) y4[a] = y[a] + h * k3[a];
    const Vec3 k4 = vel(tt + h, y4);
    for (int a = 0; a < 3; ++a) y[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    tt += h;
  }
  for (auto& c : y) c -= std::floor(c);
  return y;
}

// ---------------- field transport ----------------

TransportMarch::TransportMarch(const CoarseFlow& flow, const Field& init, double t0, bool displacement)
    : flow_(&flow), G_(init), t0_(t0), t_(t0), disp_(displacement) {
  require(init.grid() == flow.grid(), "TransportMarch: grid mismatch");
  if (displacement) require(init.rank() == 1, "TransportMarch: displacement must be a vector field");
  truncate(G_);
  G_.time = t0;
}

TransportMarch TransportMarch::displacement(const CoarseFlow& flow, const GridSpec& g, double t0) {
  return TransportMarch(flow, Field::vector(g, t0), t0, true);
}

// Frame velocity u(t,y) = v_eps(t, y + m (t - t0)) - m.
Field TransportMarch::rhs(double t, const Field& G) const {
  const Vec3& m = flow_->mean();
  Field u = shift(flow_->velocity(t), scaled(m, -(t - t0_)));
  for (int a = 0; a < 3; ++a)
    for (auto& x : u[a]) x -= m[a];
  Field r = advect(u, G);
  r *= -1.0;
  if (disp_) {
    truncate(u);
    r -= u;
  }
  return r;
}

void TransportMarch::rk4(double h) {
  const double t = t_;
  Field k1 = rhs(t, G_);
  Field y = G_;
  y += 0.5 * h * k1;
  Field k2 = rhs(t + 0.5 * h, y);
  y = G_;
  y += 0.5 * h * k2;
  Field k3 = rhs(t + 0.5 * h, y);
  y = G_;
  y += h * k3;
  Field k4 = rhs(t + h, y);
  k2 += k3;
  k1 += 2.0 * k2;
  k1 += k4;
  G_ += (h / 6.0) * k1;
  t_ = t + h;
  G_.time = t_;
}

void TransportMarch::march(double t1, int nsteps) {
  require(nsteps >= 1, "TransportMarch: nsteps must be positive");
  const double h = (t1 - t_) / nsteps;
  if (h == 0.0) return;
  for (int k = 0; k < nsteps; ++k) rk4(h);
  t_ = t1;  // no drift from repeated addition
  G_.time = t_;
}

TransportMarch TransportMarch::stepped(double h) const {
  TransportMarch m(*this);
  if (h != 0.0) m.rk4(h);
  return m;
}

Field TransportMarch::lab() const {
  const Vec3& m = flow_->mean();
  const double s = t_ - t0_;
  Field F = shift(G_, scaled(m, s));
  if (disp_)
    for (int a = 0; a < 3; ++a)
      for (auto& x : F[a]) x -= m[a] * s;
  F.make_real();
  F.time = t_;
  return F;
}

Field transport_field(const Field& init, const CoarseFlow& flow, double t0, double t1, int nsteps) {
  TransportMarch m(flow, init, t0);
  m.march(t1, nsteps > 0 ? nsteps : flow.steps_for(t1 - t0));
  return m.lab();
}

Field displacement_field(const CoarseFlow& flow, double t0, double t1, int nsteps) {
  auto m = TransportMarch::displacement(flow, flow.grid(), t0);
  m.march(t1, nsteps > 0 ? nsteps : flow.steps_for(t1 - t0));
  return m.lab();
}

Field mollify_along_flow(const std::function<Field(double)>& R_spatial, const CoarseFlow& flow, double t,
                         double eps_t, int npts, int nsteps) {
  require(eps_t >= 0.0, "mollify_along_flow: negative eps_t");
  if (eps_t == 0.0) return real_part(R_spatial(t));
  const TimeQuadrature q = time_mollifier_quadrature(eps_t, npts);
  // Transport is linear, so each side is one march from the outermost node
  // toward t, picking up the weighted slices on the way.
  Field out;
  for (int side : {1, -1}) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < q.nodes.size(); ++k)
      if (side * q.nodes[k] > 0.0) idx.push_back(k);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return side * q.nodes[a] > side * q.nodes[b]; });
    Field acc;
    double cur = 0.0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const double s = q.nodes[idx[j]];
      if (!acc.empty()) acc = transport_field(acc, flow, t + cur, t + s, nsteps > 0 ? nsteps : flow.steps_for(s - cur));
      Field Rs = R_spatial(t + s);
      Rs *= q.weights[idx[j]];
      if (acc.empty())
        acc = std::move(Rs);
      else
        acc += Rs;
      cur = s;
    }
    if (acc.empty()) continue;
    acc = transport_field(acc, flow, t + cur, t, nsteps > 0 ? nsteps : flow.steps_for(cur));
    if (out.empty())
      out = std::move(acc);
    else
      out += acc;
  }
  for (std::size_t k = 0; k < q.nodes.size(); ++k)
    if (q.nodes[k] == 0.0) {
      Field R0 = R_spatial(t);
      R0 *= q.weights[k];
      if (out.empty())
        out = std::move(R0);
      else
        out += R0;
    }
  out.make_real();
  out.time = t;
  return out;
}

CoarseForce coarse_force(const Field& v, const Field& p, const Field& R, const MollifierKernel& kernel) {
  require(v.rank() == 1 && p.rank() == 0 && R.rank() == 2, "coarse_force: expects (vector, scalar, tensor)");
  const Field ve = double_mollify(v, kernel);
  Field dvv = div(outer(v, v));
  Field comm = advect(ve, ve) - double_mollify(dvv, kernel);
  Field f = double_mollify(div(R) - grad(p), kernel);
  f += comm;
  comm.make_real();
  f.make_real();
  return {f, comm};
}

// ---------------- waves and phases ----------------

std::string WaveIndex::label() const {
  std::ostringstream os;
  os << "k" << kappa[0] << kappa[1] << kappa[2] << "_g" << k4 << "_f" << face;
  return os.str();
}

PhaseBundle::PhaseBundle(const IcosaFrame& frame, const RotationFamily& rot, const CoarseFlow& flow,
                         const PhaseConfig& cfg)
    : frame_(&frame), rot_(&rot), flow_(&flow), cfg_(cfg) {
  require(cfg.tau > 0.0, "PhaseBundle: tau must be positive");
  cfg.time_shape.validate();
  cfg.space_shape.validate();
}

double PhaseBundle::time_cutoff(long k4, double t) const {
  return bump((t - t_gen(k4)) / cfg_.tau, cfg_.time_shape);
}

std::vector<long> PhaseBundle::active_generations(double t) const {
  std::vector<long> out;
  const long c = long(std::floor(t / cfg_.tau));
  for (long k = c - 1; k <= c + 2; ++k)
    if (time_cutoff(k, t) > 0.0) out.push_back(k);
  require(out.size() <= 2, "PhaseBundle: more than two live generations");
  return out;
}

Vector3 PhaseBundle::rotated_face(const WaveIndex& I) const {
  return compose(frame_->F[I.face], rot_->O[I.rotation()]);
}

TransportMarch PhaseBundle::march_to(long k4, double t) const {
  const double t0 = t_gen(k4);
  auto m = TransportMarch::displacement(*flow_, flow_->grid(), t0);
  m.march(t, flow_->steps_for(t - t0, cfg_.min_steps));
  return m;
}

GenerationSlice PhaseBundle::slice(const TransportMarch& m, long k4) const {
  GenerationSlice s;
  s.k4 = k4;
  s.t = m.time();
  s.t_gen = m.start();
  s.drift = scaled(flow_->mean(), s.t_gen);
  const Field d = m.lab();
  const Field J = grad_tensor(d);  // J(j,l) = d_j d^l
  const std::size_t np = d.npts();
  s.disp.resize(np);
  s.jac.resize(np);
  for (std::size_t p = 0; p < np; ++p) {
    for (int a = 0; a < 3; ++a) s.disp[p][a] = d[a][p].real();
    Matrix3 M = Matrix3::Identity();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) M(i, j) += J.tc(j, i)[p].real();
    s.jac[p] = M;
  }
  return s;
}

namespace {
inline Vector3 grid_point(int n, std::size_t p) {
  const int k = int(p % n), j = int((p / n) % n), i = int(p / (std::size_t(n) * n));
  return Vector3(double(i) / n, double(j) / n, double(k) / n);
}
}  // namespace

double PhaseBundle::phase(const GenerationSlice& s, const WaveIndex& I, std::size_t p) const {
  const Vector3 X = grid_point(flow_->grid().n, p) + s.disp[p];
  Vector3 r;
  for (int a = 0; a < 3; ++a) r[a] = wrap_half(X[a] - 0.5 * I.kappa[a] - s.drift[a]);
  return rotated_face(I).dot(r);
}

Vector3 PhaseBundle::phase_gradient(const GenerationSlice& s, const WaveIndex& I, std::size_t p) const {
  return s.jac[p].transpose() * rotated_face(I);
}

double PhaseBundle::chart_cutoff(const GenerationSlice& s, const std::array<int, 3>& kappa, std::size_t p) const {
  const Vector3 X = grid_point(flow_->grid().n, p) + s.disp[p];
  return ef::chart_cutoff(kappa, {X[0] - s.drift[0], X[1] - s.drift[1], X[2] - s.drift[2]}, cfg_.space_shape);
}

double PhaseBundle::partition_error(double t) const {
  const auto gens = active_generations(t);
  double tsum = 0.0;
  for (long k : gens) tsum += std::pow(time_cutoff(k, t), 2);
  double err = std::abs(tsum - 1.0);
  for (long k : gens) {
    const GenerationSlice s = slice(k, t);
    for (std::size_t p = 0; p < s.disp.size(); ++p) {
      double sum = 0.0;
      for (int c = 0; c < 8; ++c) {
        const double w = chart_cutoff(s, {c & 1, (c >> 1) & 1, (c >> 2) & 1}, p);
        sum += w * w;
      }
      err = std::max(err, std::abs(sum - 1.0));
    }
  }
  return err;
}

double PhaseBundle::stability(const GenerationSlice& s, bool throw_on_violation) const {
  double dev = 0.0;
  for (std::size_t p = 0; p < s.disp.size(); ++p) {
    // |(J - I)^T f| <= ||J - I||_2 for every unit face
    const Matrix3 D = s.jac[p] - Matrix3::Identity();
    if (D.cwiseAbs().maxCoeff() == 0.0) continue;
    const double nrm = Eigen::JacobiSVD<Matrix3>(D).singularValues()(0);
    dev = std::max(dev, nrm);
  }
  if (throw_on_violation && dev > cfg_.stability_c) {
    std::ostringstream os;
    os << "phase stability violated: sup|grad xi - grad xi_hat| = " << dev << " > c = " << cfg_.stability_c
       << " (generation " << s.k4 << ", t = " << s.t << "); choose a smaller b";
    throw NumericalError(os.str());
  }
  return dev;
}

double dimensionless_energy(const PhaseBundle& b, long k4, double t, const WaveIndex& I, int M, double Xi_ang,
                            double N, int L) {
  require(M >= 1 && M <= 3, "dimensionless_energy: M in 1..3");
  const TransportMarch m = b.march_to(k4, t);
  const Field d = m.lab();
  const GenerationSlice s = b.slice(m, k4);
  const Vector3 f = b.rotated_face(I);
  // derivatives of xi of order >= 2 are f . d^gamma d
  Field xi_lin = Field::scalar(d.grid());
  for (int a = 0; a < 3; ++a)
    for (std::size_t p = 0; p < d.npts(); ++p) xi_lin[0][p] += f[a] * d[a][p];
  std::vector<std::pair<int, std::vector<cplx>>> higher;
  for (int ord = 2; ord <= M; ++ord)
    for (int a = 0; a <= ord; ++a)
      for (int bb = 0; bb <= ord - a; ++bb) {
        const int c = ord - a - bb;
        Field g = xi_lin;
        if (a) g = partial(g, 0, a);
        if (bb) g = partial(g, 1, bb);
        if (c) g = partial(g, 2, c);
        higher.emplace_back(ord, g[0]);
      }
  double best = 0.0;
  for (std::size_t p = 0; p < d.npts(); ++p) {
    if (b.chart_cutoff(s, I.kappa, p) == 0.0) continue;
    double E = b.phase_gradient(s, I, p).squaredNorm();
    for (const auto& [ord, vals] : higher) {
      const double w = std::pow(Xi_ang, -2.0 * (ord - 1)) * std::pow(N, -2.0 * std::max(0, ord - L) / L);
      E += w * std::norm(vals[p].real());
    }
    best = std::max(best, E);
  }
  return best;
}

void write_phase_diagnostics(const std::string& path, const std::vector<PhaseDiagRow>& rows) {
  std::ofstream os(path);
  if (!os) throw ContractError("cannot open " + path);
  os << "index,t,sup_grad_dev,E1,E2,E3\n" << std::setprecision(17);
  for (const auto& r : rows)
    os << r.index << ',' << r.t << ',' << r.deviation << ',' << r.E1 << ',' << r.E2 << ',' << r.E3 << '\n';
}

}  // namespace ef
