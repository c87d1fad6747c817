#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "biplanar/error.hpp"
#include "biplanar/geometry.hpp"

namespace biplanar {

inline constexpr double kWeakGeometryRatio = 10.0;
inline constexpr double kPointAtInfinityEps = 1e-10;

using NMatrix = Eigen::Matrix4d;

struct BiplanarObservation {
  Pixel2H p1;          // view 1 (AP)
  Pixel2H p2;          // view 2 (LAT)
  ProjectionMatrix a;  // view 1
  ProjectionMatrix b;  // view 2
};

struct TriangulationResult {
  Point3H q_aim;
  double condition_ratio = 0.0;  // sigma3 / sigma4 of N
  double residual = 0.0;         // sigma4 / sigma3 of N
};

/// Rows (u1 A_row3 - A_row1), (v1 A_row3 - A_row2), and the same for view 2.
[[nodiscard]] inline NMatrix build_n_matrix(const BiplanarObservation& obs) {
  const Pixel2H p1 = obs.p1.normalized();
  const Pixel2H p2 = obs.p2.normalized();
  const Matrix34& a = obs.a.matrix();
  const Matrix34& b = obs.b.matrix();
  NMatrix n;
  n.row(0) = p1.u() * a.row(2) - a.row(0);
  n.row(1) = p1.v() * a.row(2) - a.row(1);
  n.row(2) = p2.u() * b.row(2) - b.row(0);
  n.row(3) = p2.v() * b.row(2) - b.row(1);
  return n;
}

/// Null vector of N by SVD, dehomogenized. Throws WeakGeometry for nearly
/// rank-2 N and PointAtInfinity when the fourth component vanishes.
[[nodiscard]] inline TriangulationResult triangulate(const BiplanarObservation& obs) {
  const NMatrix n = build_n_matrix(obs);
  Eigen::JacobiSVD<NMatrix> svd(n, Eigen::ComputeFullV);
  const Eigen::Vector4d s = svd.singularValues();
  if (s(0) <= 0.0 || s(2) < 1e-12 * s(0) || (s(3) > 0.0 && s(2) / s(3) < kWeakGeometryRatio)) {
    throw Error(ErrorKind::WeakGeometry, "triangulation rays nearly degenerate (sigma3/sigma4 < 10)");
  }
  Eigen::Vector4d x = svd.matrixV().col(3);
  // The null vector has unit norm, so an absolute test on w is scale-free.
  if (std::abs(x(3)) < kPointAtInfinityEps) throw Error(ErrorKind::PointAtInfinity, "reconstructed point at infinity");
  x /= x(3);
  x(3) = 1.0;
  TriangulationResult r;
  r.q_aim = Point3H(x);
  r.condition_ratio = s(3) > 0.0 ? s(2) / s(3) : std::numeric_limits<double>::infinity();
  r.residual = s(3) / s(2);
  return r;
}

}  // namespace biplanar
