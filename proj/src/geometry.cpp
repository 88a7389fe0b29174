#include "eulerforge/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>

#include "eulerforge/errors.hpp"

namespace ef {

IcosaFrame build_frame() {
  const double phi = std::numbers::phi;
  const double s = 1.0 / std::sqrt(1.0 + phi * phi);
  IcosaFrame fr;
  const std::array<Vector3, 6> reps = {Vector3(0, 1, phi),  Vector3(0, 1, -phi), Vector3(1, phi, 0),
                                       Vector3(1, -phi, 0), Vector3(phi, 0, 1),  Vector3(-phi, 0, 1)};
  for (int i = 0; i < 6; ++i) {
    fr.F[i] = s * reps[i];
    fr.F[i + 6] = -fr.F[i];
  }

  // First triple of mutually adjacent faces (pairwise dot +1/sqrt5) whose
  // 2pi/3 rotation about f+f'+f'' permutes F.
  const double adj = 1.0 / std::sqrt(5.0);
  auto find = [&](const Vector3& v) {
    for (int i = 0; i < 12; ++i)
      if ((fr.F[i] - v).norm() < 1e-9) return i;
    return -1;
  };
  for (int a = 0; a < 12; ++a)
    for (int b = a + 1; b < 12; ++b)
      for (int c = b + 1; c < 12; ++c) {
        if (std::abs(fr.F[a].dot(fr.F[b]) - adj) > 1e-9 || std::abs(fr.F[b].dot(fr.F[c]) - adj) > 1e-9 ||
            std::abs(fr.F[a].dot(fr.F[c]) - adj) > 1e-9)
          continue;
        const Vector3 axis = (fr.F[a] + fr.F[b] + fr.F[c]).normalized();
        const Matrix3 R = axis_rotation(axis, 2.0 * std::numbers::pi / 3.0);
        std::array<int, 12> perm;
        bool ok = true;
        for (int i = 0; i < 12 && ok; ++i) {
          perm[i] = find(R * fr.F[i]);
          ok = perm[i] >= 0 && perm[i] != i && perm[i] != IcosaFrame::neg(i);
        }
        if (!ok) continue;
        fr.sigma = perm;
        fr.sigma_rotation = R;
        fr.sigma_axis = axis;
        return fr;
      }
  throw NumericalError("build_frame: no order-3 vertex rotation found");
}

double metric_residual(const std::vector<Vector3>& faces) {
  Matrix3 S = Matrix3::Zero();
  for (const auto& f : faces) S += f * f.transpose();
  S *= 0.25;
  return (S - Matrix3::Identity()).cwiseAbs().maxCoeff();
}

double verify_metric_identity(const IcosaFrame& frame) {
  return metric_residual(std::vector<Vector3>(frame.F.begin(), frame.F.end()));
}

FrameIdentityReport check_frame(const IcosaFrame& fr) {
  FrameIdentityReport r;
  for (const auto& f : fr.F) r.unit_norm = std::max(r.unit_norm, std::abs(f.norm() - 1.0));
  r.metric = verify_metric_identity(fr);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      if (j == i || j == IcosaFrame::neg(i)) continue;
      const double d = fr.F[i].dot(fr.F[j]);
      r.dot_squared = std::max(r.dot_squared, std::abs(d * d - 0.2));
      r.wedge_squared = std::max(r.wedge_squared, std::abs(wedge2(fr.F[i], fr.F[j]) - 0.8));
    }
  for (int i = 0; i < 12; ++i) {
    r.sigma_wedge = std::max(r.sigma_wedge, std::abs(wedge2(fr.F[i], fr.F[fr.sigma[i]]) - 0.8));
    const int s3 = fr.sigma[fr.sigma[fr.sigma[i]]];
    if (s3 != i || fr.sigma[i] == i || fr.sigma[i] == IcosaFrame::neg(i)) r.sigma_order = 1.0;
    // sigma must commute with negation
    if (fr.sigma[IcosaFrame::neg(i)] != IcosaFrame::neg(fr.sigma[i])) r.sigma_order = 1.0;
  }
  return r;
}

Matrix3 axis_rotation(const Vector3& u, double theta) {
  return Eigen::AngleAxisd(theta, u.normalized()).toRotationMatrix();
}

RotationFamily build_rotations(const IcosaFrame& frame, const Vector3& u, double scan_step, double c_min,
                               int count) {
  require(count >= 1 && count <= 16, "build_rotations: count must be in 1..16");
  require(scan_step > 0.0, "build_rotations: scan step must be positive");
  const Vector3 axis = u.normalized();
  for (const auto& f : frame.F)
    if (axis.cross(f).norm() < 1e-12) throw ContractError("build_rotations: axis parallel to a face normal");

  RotationFamily fam;
  fam.axis = axis;
  fam.scan_step = scan_step;
  const double period = 2.0 * std::numbers::pi;
  const long ncand = long(std::floor(period / scan_step));

  // rotated frames of all candidates, and each candidate's current min distance
  std::vector<std::array<Vector3, 12>> cand(ncand);
  for (long c = 0; c < ncand; ++c) {
    const Matrix3 O = axis_rotation(axis, c * scan_step);
    for (int i = 0; i < 12; ++i) cand[c][i] = compose(frame.F[i], O);
  }
  std::vector<double> dmin(ncand, std::numeric_limits<double>::infinity());
  std::vector<char> used(ncand, 0);

  // within a single rotation the closest admissible pair is min_{f' != -f} |f + f'|
  double self_sep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j)
      if (j != IcosaFrame::neg(i)) self_sep = std::min(self_sep, (frame.F[i] + frame.F[j]).norm());

  auto absorb = [&](long chosen) {
    for (long c = 0; c < ncand; ++c) {
      if (used[c]) continue;
      double d = dmin[c];
      for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) d = std::min(d, (cand[c][i] + cand[chosen][j]).norm());
      dmin[c] = d;
    }
  };

  long pick = 0;
  double achieved = self_sep;
  for (int m = 0; m < count; ++m) {
    if (m > 0) {
      pick = -1;
      double best = -1.0;
      for (long c = 0; c < ncand; ++c)
        if (!used[c] && dmin[c] > best) {
          best = dmin[c];
          pick = c;
        }
      if (pick < 0 || best < c_min)
        throw NumericalError("build_rotations: scan found no admissible angle; refine the scan step");
      achieved = std::min(achieved, best);
    }
    used[pick] = 1;
    fam.angle[m] = pick * scan_step;
    fam.O[m] = axis_rotation(axis, fam.angle[m]);
    absorb(pick);
  }
  for (int m = count; m < 16; ++m) {
    fam.angle[m] = 0.0;
    fam.O[m] = Matrix3::Identity();
  }
  fam.c_sep = achieved;
  return fam;
}

SeparationReport separation(const IcosaFrame& frame, const RotationFamily& fam) {
  SeparationReport r;
  r.min_sep = std::numeric_limits<double>::infinity();
  for (int m = 0; m < 16; ++m)
    for (int mp = 0; mp < 16; ++mp)
      for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
          const double d = (compose(frame.F[i], fam.O[m]) + compose(frame.F[j], fam.O[mp])).norm();
          if (m == mp && j == IcosaFrame::neg(i)) {
            ++r.zero_pairs;
            continue;
          }
          ++r.admissible_pairs;
          r.min_sep = std::min(r.min_sep, d);
        }
  return r;
}

std::array<Vector3, 6> sigma_partners(const IcosaFrame& frame, const std::array<Vector3, 6>& g) {
  std::array<Vector3, 6> gs;
  for (int i = 0; i < 6; ++i) {
    const int s = frame.sigma[i];
    gs[i] = IcosaFrame::sign(s) * g[IcosaFrame::rep(s)];
  }
  return gs;
}

Matrix6 stress_matrix(const std::array<Vector3, 6>& g, const std::array<Vector3, 6>& g_sigma) {
  Matrix6 A;
  for (int I = 0; I < 6; ++I) {
    const double n2 = g[I].squaredNorm();
    if (n2 < 1e-24) throw ContractError("stress_matrix: zero phase gradient");
    const double lead = wedge2(g[I], g_sigma[I]) / n2;
    for (int J = 0; J < 6; ++J) A(I, J) = lead * wedge2(g[I], g[J]) / n2;
  }
  return A;
}

double condition_number(const Matrix6& A) {
  Eigen::JacobiSVD<Matrix6> svd(A);
  const auto& s = svd.singularValues();
  return s(0) / s(5);
}

}  // namespace ef
