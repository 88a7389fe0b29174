#pragma once
#include <array>
#include <functional>
#include <vector>

#include "eulerforge/field.hpp"

// Pseudo-spectral calculus on T^3 with 2*pi*i*m derivative multipliers.
// Nyquist modes are dropped by every differential operator so real input
// stays real; products are truncated to the dealias band.
namespace ef {

using Vec3 = std::array<double, 3>;

// FFTW threading; call before the first transform.
void set_fft_threads(int nthreads);
int fft_threads();

// unnormalized forward, normalized backward
std::vector<cplx> fft_forward(const std::vector<cplx>& phys, int n);
std::vector<cplx> fft_backward(const std::vector<cplx>& spec, int n);
void fft_forward_inplace(std::vector<cplx>& a, int n);
void fft_backward_inplace(std::vector<cplx>& a, int n);

// signed wavenumber of a transform index
inline int wavenumber(int i, int n) { return i < n / 2 ? i : i - n; }

// Apply a multiplier m -> s(m) to one component (physical in, physical out).
std::vector<cplx> apply_multiplier(const std::vector<cplx>& phys, int n,
                                   const std::function<cplx(int, int, int)>& symbol);

Field partial(const Field& f, int axis, int order = 1);
Field grad(const Field& f);          // rank 0 -> 1
Field grad_tensor(const Field& v);   // rank 1 -> 2, T^{jl} = d_j v^l
Field curl(const Field& v);
Field div(const Field& t);           // rank 1 -> 0, rank 2 -> 1 (first slot)
Field laplacian(const Field& f);
Field inverse_laplacian(const Field& f);  // mean removed
Field leray_project(const Field& v);
// Symmetric R with d_j R^{jl} = P U^l, P the projection to mean zero.
Field inverse_divergence(const Field& U);
Field remove_mean(const Field& f);
cplx mean(const std::vector<cplx>& a);
Vec3 mean_vector(const Field& v);

// in-place 2/3-rule truncation
void truncate(Field& f);
bool is_band_limited(const Field& f, double tol);

// dealiased products
Field multiply(const Field& s, const Field& f);     // scalar * anything
Field dot(const Field& a, const Field& b);          // vectors -> scalar
Field outer(const Field& a, const Field& b);        // a^j b^l (not symmetric)
Field sym_outer(const Field& a, const Field& b);    // (a^j b^l + a^l b^j)/2
Field advect(const Field& v, const Field& f);       // v . grad f for rank 0,1,2
// (div of rank-2) contracted against a field: d_j(a^j b^l) computed spectrally
Field div_outer(const Field& a, const Field& b);

// f(x - a), exact for band-limited data
Field shift(const Field& f, const Vec3& a);

// trigonometric interpolant at an arbitrary point, given spectral coefficients
cplx eval_spectral(const std::vector<cplx>& spec, int n, const Vec3& x);

// sup over grid of all k-th order partials (entrywise), k = 0 returns max_abs
double sup_derivative(const Field& f, int k);

}  // namespace ef
