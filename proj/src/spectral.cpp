#include "eulerforge/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace ef {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int g_threads = 1;
bool g_threads_initialized = false;

struct Plans {
  fftw_plan fwd = nullptr, bwd = nullptr;        // out of place
  fftw_plan fwd_ip = nullptr, bwd_ip = nullptr;  // in place
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> a(std::size_t(n) * n * n), b(a.size());
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  // FFTW_ESTIMATE keeps the plan (and so every bit of output) reproducible.
  // Planned on 16-byte aligned storage; exec() copies anything else.
  unsigned flags = FFTW_ESTIMATE;
  Plans p;
  p.fwd = fftw_plan_dft_3d(n, n, n, pa, pb, FFTW_FORWARD, flags);
  p.bwd = fftw_plan_dft_3d(n, n, n, pa, pb, FFTW_BACKWARD, flags);
  p.fwd_ip = fftw_plan_dft_3d(n, n, n, pa, pa, FFTW_FORWARD, flags);
  p.bwd_ip = fftw_plan_dft_3d(n, n, n, pa, pa, FFTW_BACKWARD, flags);
  return cache.emplace(n, p).first->second;
}

bool aligned16(const void* p) { return reinterpret_cast<std::uintptr_t>(p) % 16 == 0; }

// p must be out of place when in != out and in place otherwise
void exec(fftw_plan p, fftw_plan p_ip, const cplx* in, cplx* out, std::size_t size) {
  if (aligned16(in) && aligned16(out)) {
    fftw_execute_dft(in == out ? p_ip : p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    return;
  }
  auto* a = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size));
  std::copy(in, in + size, reinterpret_cast<cplx*>(a));
  fftw_execute_dft(p_ip, a, a);
  std::copy(reinterpret_cast<cplx*>(a), reinterpret_cast<cplx*>(a) + size, out);
  fftw_free(a);
}

inline bool is_nyquist(int i, int n) { return i == n / 2; }

inline cplx ipow(cplx z, int p) {
  cplx r = 1.0;
  for (int i = 0; i < p; ++i) r *= z;
  return r;
}

}  // namespace

void set_fft_threads(int nthreads) {
  std::lock_guard<std::mutex> lock(plan_mutex());
  if (!g_threads_initialized) {
    fftw_init_threads();
    g_threads_initialized = true;
  }
  g_threads = std::max(1, nthreads);
  fftw_plan_with_nthreads(g_threads);
}

int fft_threads() { return g_threads; }

std::vector<cplx> fft_forward(const std::vector<cplx>& phys, int n) {
  std::vector<cplx> out(phys.size());
  const Plans& p = plans_for(n);
  exec(p.fwd, p.fwd_ip, phys.data(), out.data(), out.size());
  return out;
}

std::vector<cplx> fft_backward(const std::vector<cplx>& spec, int n) {
  std::vector<cplx> out(spec.size());
  const Plans& p = plans_for(n);
  exec(p.bwd, p.bwd_ip, spec.data(), out.data(), out.size());
  const double s = 1.0 / double(spec.size());
  for (auto& x : out) x *= s;
  return out;
}

void fft_forward_inplace(std::vector<cplx>& a, int n) {
  const Plans& p = plans_for(n);
  exec(p.fwd, p.fwd_ip, a.data(), a.data(), a.size());
}

void fft_backward_inplace(std::vector<cplx>& a, int n) {
  const Plans& p = plans_for(n);
  exec(p.bwd, p.bwd_ip, a.data(), a.data(), a.size());
  const double s = 1.0 / double(a.size());
  for (auto& x : a) x *= s;
}

namespace {

// iterate spectral indices with signed wavenumbers; fn(idx, mx, my, mz, nyquist)
template <class Fn>
void for_modes(int n, Fn&& fn) {
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    const int mx = wavenumber(i, n);
    const bool nx = is_nyquist(i, n);
    for (int j = 0; j < n; ++j) {
      const int my = wavenumber(j, n);
      const bool ny = nx || is_nyquist(j, n);
      for (int k = 0; k < n; ++k, ++idx) {
        fn(idx, mx, my, wavenumber(k, n), ny || is_nyquist(k, n));
      }
    }
  }
}

std::vector<cplx> deriv_spec(const std::vector<cplx>& spec, int n, int axis, int order) {
  // per-axis symbol (2 pi i m)^order; Nyquist planes are zeroed
  std::vector<cplx> sym(n);
  std::vector<char> live(n);
  for (int i = 0; i < n; ++i) {
    sym[i] = ipow(cplx(0.0, kTwoPi * wavenumber(i, n)), order);
    live[i] = !is_nyquist(i, n);
  }
  std::vector<cplx> out(spec.size());
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!live[i] || !live[j]) {
        std::fill_n(out.begin() + idx, n, cplx(0.0));
        idx += n;
        continue;
      }
      const cplx sij = axis == 0 ? sym[i] : axis == 1 ? sym[j] : cplx(1.0);
      for (int k = 0; k < n; ++k, ++idx)
        out[idx] = live[k] ? spec[idx] * (axis == 2 ? sym[k] : sij) : cplx(0.0);
    }
  return out;
}

}  // namespace

std::vector<cplx> apply_multiplier(const std::vector<cplx>& phys, int n,
                                   const std::function<cplx(int, int, int)>& symbol) {
  auto spec = fft_forward(phys, n);
  for_modes(n, [&](std::size_t idx, int mx, int my, int mz, bool) { spec[idx] *= symbol(mx, my, mz); });
  fft_backward_inplace(spec, n);
  return spec;
}

Field partial(const Field& f, int axis, int order) {
  const int n = f.grid().n;
  Field out(f.grid(), f.rank(), f.symmetric(), f.time);
  for (int c = 0; c < f.ncomp(); ++c) {
    auto spec = fft_forward(f[c], n);
    out[c] = fft_backward(deriv_spec(spec, n, axis, order), n);
  }
  return out;
}

Field grad(const Field& f) {
  require(f.rank() == 0, "grad: scalar field required");
  const int n = f.grid().n;
  Field out = Field::vector(f.grid(), f.time);
  auto spec = fft_forward(f[0], n);
  for (int a = 0; a < 3; ++a) out[a] = fft_backward(deriv_spec(spec, n, a, 1), n);
  return out;
}

Field grad_tensor(const Field& v) {
  require(v.rank() == 1, "grad_tensor: vector field required");
  const int n = v.grid().n;
  Field out = Field::tensor(v.grid(), v.time);
  for (int l = 0; l < 3; ++l) {
    auto spec = fft_forward(v[l], n);
    for (int j = 0; j < 3; ++j) out.tc(j, l) = fft_backward(deriv_spec(spec, n, j, 1), n);
  }
  return out;
}

Field curl(const Field& v) {
  require(v.rank() == 1, "curl: vector field required");
  const int n = v.grid().n;
  std::array<std::vector<cplx>, 3> s;
  for (int a = 0; a < 3; ++a) s[a] = fft_forward(v[a], n);
  Field out = Field::vector(v.grid(), v.time);
  std::array<std::vector<cplx>, 3> c;
  for (auto& x : c) x.assign(s[0].size(), 0.0);
  for_modes(n, [&](std::size_t idx, int mx, int my, int mz, bool nyq) {
    if (nyq) return;
    const cplx ix(0.0, kTwoPi * mx), iy(0.0, kTwoPi * my), iz(0.0, kTwoPi * mz);
    c[0][idx] = iy * s[2][idx] - iz * s[1][idx];
    c[1][idx] = iz * s[0][idx] - ix * s[2][idx];
    c[2][idx] = ix * s[1][idx] - iy * s[0][idx];
  });
  for (int a = 0; a < 3; ++a) out[a] = fft_backward(c[a], n);
  return out;
}

Field div(const Field& t) {
  require(t.rank() == 1 || t.rank() == 2, "div: rank 1 or 2 required");
  const int n = t.grid().n;
  if (t.rank() == 1) {
    std::vector<cplx> acc(t.npts(), 0.0);
    for (int j = 0; j < 3; ++j) {
      auto d = deriv_spec(fft_forward(t[j], n), n, j, 1);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += d[i];
    }
    Field out = Field::scalar(t.grid(), t.time);
    out[0] = fft_backward(acc, n);
    return out;
  }
  Field out = Field::vector(t.grid(), t.time);
  if (t.symmetric()) {
    // transform each of the six components once
    std::array<std::vector<cplx>, 6> s;
    for (int c = 0; c < 6; ++c) s[c] = fft_forward(t[c], n);
    for (int l = 0; l < 3; ++l) {
      std::vector<cplx> acc(t.npts(), 0.0);
      for (int j = 0; j < 3; ++j) {
        auto d = deriv_spec(s[sym_index(j, l)], n, j, 1);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += d[i];
      }
      out[l] = fft_backward(acc, n);
    }
    return out;
  }
  for (int l = 0; l < 3; ++l) {
    std::vector<cplx> acc(t.npts(), 0.0);
    for (int j = 0; j < 3; ++j) {
      auto d = deriv_spec(fft_forward(t.tc(j, l), n), n, j, 1);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += d[i];
    }
    out[l] = fft_backward(acc, n);
  }
  return out;
}

Field laplacian(const Field& f) {
  const int n = f.grid().n;
  Field out(f.grid(), f.rank(), f.symmetric(), f.time);
  for (int c = 0; c < f.ncomp(); ++c)
    out[c] = apply_multiplier(f[c], n, [](int mx, int my, int mz) {
      return cplx(-kTwoPi * kTwoPi * double(mx * mx + my * my + mz * mz), 0.0);
    });
  return out;
}

Field inverse_laplacian(const Field& f) {
  const int n = f.grid().n;
  Field out(f.grid(), f.rank(), f.symmetric(), f.time);
  for (int c = 0; c < f.ncomp(); ++c)
    out[c] = apply_multiplier(f[c], n, [](int mx, int my, int mz) {
      const double k2 = double(mx * mx + my * my + mz * mz);
      return k2 == 0.0 ? cplx(0.0) : cplx(-1.0 / (kTwoPi * kTwoPi * k2), 0.0);
    });
  return out;
}

Field remove_mean(const Field& f) {
  Field out = f;
  for (int c = 0; c < out.ncomp(); ++c) {
    const cplx m = mean(out[c]);
    for (auto& x : out[c]) x -= m;
  }
  return out;
}

cplx mean(const std::vector<cplx>& a) {
  cplx s = 0.0;
  for (const auto& x : a) s += x;
  return s / double(a.size());
}

Vec3 mean_vector(const Field& v) {
  require(v.rank() == 1, "mean_vector: vector field required");
  return {mean(v[0]).real(), mean(v[1]).real(), mean(v[2]).real()};
}

Field leray_project(const Field& v) {
  require(v.rank() == 1, "leray_project: vector field required");
  const int n = v.grid().n;
  std::array<std::vector<cplx>, 3> s;
  for (int a = 0; a < 3; ++a) s[a] = fft_forward(v[a], n);
  for_modes(n, [&](std::size_t idx, int mx, int my, int mz, bool nyq) {
    const double k2 = double(mx * mx + my * my + mz * mz);
    if (k2 == 0.0) return;  // the mean is divergence free
    if (nyq) {
      s[0][idx] = s[1][idx] = s[2][idx] = 0.0;
      return;
    }
    const cplx kd = (double(mx) * s[0][idx] + double(my) * s[1][idx] + double(mz) * s[2][idx]) / k2;
    s[0][idx] -= double(mx) * kd;
    s[1][idx] -= double(my) * kd;
    s[2][idx] -= double(mz) * kd;
  });
  Field out = Field::vector(v.grid(), v.time);
  for (int a = 0; a < 3; ++a) out[a] = fft_backward(s[a], n);
  return out;
}

// R^{jl} = delta^{jl} Lap^{-1} d_i U^i + d^j Lap^{-1} H^l + d^l Lap^{-1} H^j,
// H the divergence-free part of the mean-zero projection of U.
Field inverse_divergence(const Field& U) {
  require(U.rank() == 1, "inverse_divergence: vector field required");
  const int n = U.grid().n;
  std::array<std::vector<cplx>, 3> s;
  for (int a = 0; a < 3; ++a) s[a] = fft_forward(U[a], n);
  std::array<std::vector<cplx>, 6> r;
  for (auto& x : r) x.assign(s[0].size(), 0.0);
  for_modes(n, [&](std::size_t idx, int mx, int my, int mz, bool nyq) {
    const double k2 = double(mx * mx + my * my + mz * mz);
    if (k2 == 0.0 || nyq) return;
    const double K[3] = {kTwoPi * mx, kTwoPi * my, kTwoPi * mz};
    const double K2 = kTwoPi * kTwoPi * k2;
    const cplx u[3] = {s[0][idx], s[1][idx], s[2][idx]};
    const cplx kdotu = K[0] * u[0] + K[1] * u[1] + K[2] * u[2];
    cplx h[3];
    for (int a = 0; a < 3; ++a) h[a] = u[a] - K[a] * kdotu / K2;
    // i K.u / (-K^2) on the diagonal
    const cplx diag = cplx(0.0, 1.0) * kdotu / (-K2);
    for (int j = 0; j < 3; ++j)
      for (int l = j; l < 3; ++l) {
        cplx val = cplx(0.0, 1.0) * (K[j] * h[l] + K[l] * h[j]) / (-K2);
        if (j == l) val += diag;
        r[sym_index(j, l)][idx] = val;
      }
  });
  Field out = Field::sym_tensor(U.grid(), U.time);
  for (int c = 0; c < 6; ++c) out[c] = fft_backward(r[c], n);
  return out;
}

void truncate(Field& f) {
  const int n = f.grid().n;
  const int band = f.grid().band();
  std::vector<char> keep(n);
  for (int i = 0; i < n; ++i) keep[i] = !is_nyquist(i, n) && std::abs(wavenumber(i, n)) <= band;
  for (int c = 0; c < f.ncomp(); ++c) {
    auto& a = f[c];
    fft_forward_inplace(a, n);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (!keep[i] || !keep[j]) {
          std::fill_n(a.begin() + idx, n, cplx(0.0));
          idx += n;
          continue;
        }
        for (int k = 0; k < n; ++k, ++idx)
          if (!keep[k]) a[idx] = 0.0;
      }
    fft_backward_inplace(a, n);
  }
}

bool is_band_limited(const Field& f, double tol) {
  const int n = f.grid().n;
  const int band = f.grid().band();
  for (int c = 0; c < f.ncomp(); ++c) {
    auto spec = fft_forward(f[c], n);
    double outside = 0.0, total = 0.0;
    for_modes(n, [&](std::size_t idx, int mx, int my, int mz, bool nyq) {
      const double a = std::abs(spec[idx]);
      total = std::max(total, a);
      if (nyq || std::abs(mx) > band || std::abs(my) > band || std::abs(mz) > band) outside = std::max(outside, a);
    });
    if (outside > tol * std::max(total, 1e-300)) return false;
  }
  return true;
}

Field multiply(const Field& s, const Field& f) {
  require(s.rank() == 0, "multiply: first argument must be scalar");
  require(s.grid() == f.grid(), "multiply: grid mismatch");
  Field out = f;
  for (int c = 0; c < out.ncomp(); ++c)
    for (std::size_t i = 0; i < out.npts(); ++i) out[c][i] *= s[0][i];
  truncate(out);
  return out;
}

Field dot(const Field& a, const Field& b) {
  require(a.rank() == 1 && b.rank() == 1, "dot: vector fields required");
  Field out = Field::scalar(a.grid(), a.time);
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < out.npts(); ++i) out[0][i] += a[j][i] * b[j][i];
  truncate(out);
  return out;
}

Field outer(const Field& a, const Field& b) {
  require(a.rank() == 1 && b.rank() == 1, "outer: vector fields required");
  Field out = Field::tensor(a.grid(), a.time);
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l) {
      auto& d = out.tc(j, l);
      for (std::size_t i = 0; i < out.npts(); ++i) d[i] = a[j][i] * b[l][i];
    }
  truncate(out);
  return out;
}

Field sym_outer(const Field& a, const Field& b) {
  require(a.rank() == 1 && b.rank() == 1, "sym_outer: vector fields required");
  Field out = Field::sym_tensor(a.grid(), a.time);
  for (int j = 0; j < 3; ++j)
    for (int l = j; l < 3; ++l) {
      auto& d = out.tc(j, l);
      for (std::size_t i = 0; i < out.npts(); ++i) d[i] = 0.5 * (a[j][i] * b[l][i] + a[l][i] * b[j][i]);
    }
  truncate(out);
  return out;
}

Field advect(const Field& v, const Field& f) {
  require(v.rank() == 1, "advect: velocity must be a vector field");
  require(v.grid() == f.grid(), "advect: grid mismatch");
  const int n = f.grid().n;
  Field out(f.grid(), f.rank(), f.symmetric(), f.time);
  for (int c = 0; c < f.ncomp(); ++c) {
    auto spec = fft_forward(f[c], n);
    for (int a = 0; a < 3; ++a) {
      auto d = fft_backward(deriv_spec(spec, n, a, 1), n);
      for (std::size_t i = 0; i < out.npts(); ++i) out[c][i] += v[a][i] * d[i];
    }
  }
  truncate(out);
  return out;
}

Field div_outer(const Field& a, const Field& b) { return div(outer(a, b)); }

Field shift(const Field& f, const Vec3& a) {
  if (a[0] == 0.0 && a[1] == 0.0 && a[2] == 0.0) return f;
  const int n = f.grid().n;
  // separable phase factors e^{-2 pi i m a}
  std::array<std::vector<cplx>, 3> e;
  for (int d = 0; d < 3; ++d) {
    e[d].resize(n);
    for (int i = 0; i < n; ++i) e[d][i] = std::polar(1.0, -kTwoPi * wavenumber(i, n) * a[d]);
  }
  Field out(f.grid(), f.rank(), f.symmetric(), f.time);
  for (int c = 0; c < f.ncomp(); ++c) {
    auto spec = fft_forward(f[c], n);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const cplx exy = e[0][i] * e[1][j];
        for (int k = 0; k < n; ++k, ++idx) spec[idx] *= exy * e[2][k];
      }
    fft_backward_inplace(spec, n);
    out[c] = std::move(spec);
  }
  return out;
}

cplx eval_spectral(const std::vector<cplx>& spec, int n, const Vec3& x) {
  // separable phase factors; Nyquist modes are skipped so real data stays real
  std::vector<cplx> ex(n), ey(n), ez(n);
  for (int i = 0; i < n; ++i) {
    const int m = wavenumber(i, n);
    const bool nyq = is_nyquist(i, n);
    ex[i] = nyq ? 0.0 : std::polar(1.0, kTwoPi * m * x[0]);
    ey[i] = nyq ? 0.0 : std::polar(1.0, kTwoPi * m * x[1]);
    ez[i] = nyq ? 0.0 : std::polar(1.0, kTwoPi * m * x[2]);
  }
  cplx s = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx exy = ex[i] * ey[j];
      cplx row = 0.0;
      for (int k = 0; k < n; ++k, ++idx) row += spec[idx] * ez[k];
      s += exy * row;
    }
  return s / double(spec.size());
}

double sup_derivative(const Field& f, int k) {
  if (k == 0) return f.max_abs();
  const int n = f.grid().n;
  double m = 0.0;
  for (int c = 0; c < f.ncomp(); ++c) {
    auto spec = fft_forward(f[c], n);
    // all multi-indices (a,b,c) with a+b+c = k
    for (int ax = 0; ax <= k; ++ax)
      for (int ay = 0; ay <= k - ax; ++ay) {
        const int az = k - ax - ay;
        std::vector<cplx> d(spec.size());
        for_modes(n, [&](std::size_t idx, int mx, int my, int mz, bool nyq) {
          if (nyq) {
            d[idx] = 0.0;
            return;
          }
          d[idx] = spec[idx] * ipow(cplx(0.0, kTwoPi * mx), ax) * ipow(cplx(0.0, kTwoPi * my), ay) *
                   ipow(cplx(0.0, kTwoPi * mz), az);
        });
        fft_backward_inplace(d, n);
        for (const auto& x : d) m = std::max(m, std::abs(x));
      }
  }
  return m;
}

}  // namespace ef
