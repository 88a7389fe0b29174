#pragma once
#include <Eigen/Dense>
#include <array>
#include <vector>

namespace ef {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

// Unit normals to the faces of a dodecahedron.  F[i+6] = -F[i]; the first six
// are the representatives of F modulo +-1.
struct IcosaFrame {
  std::array<Vector3, 12> F;
  std::array<int, 12> sigma;  // sigma as a permutation of face indices
  Matrix3 sigma_rotation;
  Vector3 sigma_axis;

  static int neg(int i) { return (i + 6) % 12; }
  static int rep(int i) { return i % 6; }
  static double sign(int i) { return i < 6 ? 1.0 : -1.0; }
};

IcosaFrame build_frame();

// || delta - 1/4 sum f f^T ||_max over the given vectors
double metric_residual(const std::vector<Vector3>& faces);
double verify_metric_identity(const IcosaFrame& frame);

struct FrameIdentityReport {
  double unit_norm = 0.0;      // max | |f| - 1 |
  double metric = 0.0;         // metric identity residual
  double dot_squared = 0.0;    // max |(f.f')^2 - 1/5| over projectively distinct pairs
  double wedge_squared = 0.0;  // max ||f ^ f'|^2 - 4/5|
  double sigma_wedge = 0.0;    // max ||f ^ sigma f|^2 - 4/5|
  double sigma_order = 0.0;    // sigma^3 = id and sigma f != +-f (0 when true)
};
FrameIdentityReport check_frame(const IcosaFrame& frame);

// Rotation O(theta) about the unit axis u.
Matrix3 axis_rotation(const Vector3& u, double theta);
// f o O  (the covector f composed with O)
inline Vector3 compose(const Vector3& f, const Matrix3& O) { return O.transpose() * f; }

struct RotationFamily {
  std::array<Matrix3, 16> O;
  std::array<double, 16> angle{};
  Vector3 axis;
  double scan_step = 1e-4;
  double c_sep = 0.0;
};

// m in (Z/2)^4 packed as kappa0 + 2 kappa1 + 4 kappa2 + 8 k4
inline int rotation_index(int k0, int k1, int k2, long k4) {
  return k0 + 2 * k1 + 4 * k2 + 8 * int(((k4 % 2) + 2) % 2);
}

// Greedy angle scan: each new angle maximizes the minimum separation against
// the members already chosen, starting from O_0 = Id.
RotationFamily build_rotations(const IcosaFrame& frame, const Vector3& u, double scan_step = 1e-4,
                               double c_min = 0.05, int count = 16);

struct SeparationReport {
  double min_sep = 0.0;
  long admissible_pairs = 0;
  long zero_pairs = 0;  // pairs (f, -f, m = m') which are excluded by design
};
// exhaustive check over all (f, m, f', m')
SeparationReport separation(const IcosaFrame& frame, const RotationFamily& fam);

inline double wedge2(const Vector3& a, const Vector3& b) { return a.cross(b).squaredNorm(); }

// A^I_J = (|g_I ^ g_sI|^2/|g_I|^2)(|g_I ^ g_J|^2/|g_I|^2); row I, column J.
Matrix6 stress_matrix(const std::array<Vector3, 6>& g, const std::array<Vector3, 6>& g_sigma);
// gradients of the sigma partners from the six representatives
std::array<Vector3, 6> sigma_partners(const IcosaFrame& frame, const std::array<Vector3, 6>& g);
double condition_number(const Matrix6& A);

}  // namespace ef
