#pragma once

#include <cmath>
#include <functional>
#include <iostream>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "biplanar/error.hpp"

namespace biplanar {

using Vector3 = Eigen::Vector3d;
using Vector4 = Eigen::Vector4d;
using Matrix3 = Eigen::Matrix3d;
using Matrix4 = Eigen::Matrix4d;
using Matrix34 = Eigen::Matrix<double, 3, 4>;

/// Small-angle constructions outside this envelope are reported, not rejected.
inline constexpr double kSmallAngleWarnRad = 0.1;
inline constexpr double kHomogeneousEps = 1e-12;

using WarningHandler = std::function<void(std::string_view)>;

inline WarningHandler& warning_handler() {
  static WarningHandler handler = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return handler;
}

inline void warn(std::string_view msg) {
  if (warning_handler()) warning_handler()(msg);
}

[[nodiscard]] inline double deg_to_rad(double deg) noexcept { return deg * (M_PI / 180.0); }
[[nodiscard]] inline double rad_to_deg(double rad) noexcept { return rad * (180.0 / M_PI); }

/// Homogeneous 3D point (x, y, z in mm, w dimensionless).
class Point3H {
 public:
  Point3H() : h_(0.0, 0.0, 0.0, 1.0) {}
  Point3H(double x, double y, double z, double w = 1.0) : h_(x, y, z, w) {}
  explicit Point3H(const Vector4& h) : h_(h) {}
  explicit Point3H(const Vector3& p) : h_(p.x(), p.y(), p.z(), 1.0) {}

  [[nodiscard]] double x() const noexcept { return h_.x(); }
  [[nodiscard]] double y() const noexcept { return h_.y(); }
  [[nodiscard]] double z() const noexcept { return h_.z(); }
  [[nodiscard]] double w() const noexcept { return h_.w(); }
  [[nodiscard]] const Vector4& homogeneous() const noexcept { return h_; }

  [[nodiscard]] Point3H normalized() const {
    if (std::abs(h_.w()) < kHomogeneousEps) throw Error(ErrorKind::PointAtInfinity, "homogeneous scale is zero");
    if (h_.w() == 1.0) return *this;
    Vector4 out = h_ / h_.w();
    out.w() = 1.0;
    return Point3H(out);
  }

  /// Euclidean coordinates after normalization.
  [[nodiscard]] Vector3 euclidean() const { return normalized().h_.head<3>(); }

 private:
  Vector4 h_;
};

/// Homogeneous pixel (u, v in px, w scale).
class Pixel2H {
 public:
  Pixel2H() : h_(0.0, 0.0, 1.0) {}
  Pixel2H(double u, double v, double w = 1.0) : h_(u, v, w) {}
  explicit Pixel2H(const Vector3& h) : h_(h) {}

  [[nodiscard]] double u() const noexcept { return h_.x(); }
  [[nodiscard]] double v() const noexcept { return h_.y(); }
  [[nodiscard]] double w() const noexcept { return h_.z(); }
  [[nodiscard]] const Vector3& homogeneous() const noexcept { return h_; }

  [[nodiscard]] Pixel2H normalized() const {
    if (std::abs(h_.z()) < kHomogeneousEps) throw Error(ErrorKind::DegenerateProjection, "pixel scale is zero");
    if (h_.z() == 1.0) return *this;
    Vector3 out = h_ / h_.z();
    out.z() = 1.0;
    return Pixel2H(out);
  }

  [[nodiscard]] Eigen::Vector2d uv() const {
    const Pixel2H n = normalized();
    return {n.u(), n.v()};
  }

 private:
  Vector3 h_;
};

/// Rotation angles (rad) and translation (mm) of an installation perturbation.
struct SmallAngleSpec {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;

  [[nodiscard]] bool exceeds_small_angle_regime() const noexcept {
    return std::abs(alpha) > kSmallAngleWarnRad || std::abs(beta) > kSmallAngleWarnRad ||
           std::abs(gamma) > kSmallAngleWarnRad;
  }
  [[nodiscard]] bool is_finite() const noexcept {
    return std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(gamma) && std::isfinite(dx) &&
           std::isfinite(dy) && std::isfinite(dz);
  }
  [[nodiscard]] bool is_zero() const noexcept {
    return alpha == 0.0 && beta == 0.0 && gamma == 0.0 && dx == 0.0 && dy == 0.0 && dz == 0.0;
  }
  bool operator==(const SmallAngleSpec&) const = default;
};

/// 4x4 homogeneous map; the bottom row is always [0 0 0 1]. Small-angle
/// matrices are carried by the same type even though their rotation block is
/// only orthogonal to first order.
class RigidTransform {
 public:
  RigidTransform() : m_(Matrix4::Identity()) {}

  explicit RigidTransform(const Matrix4& m) : m_(m) {
    m_.row(3) << 0.0, 0.0, 0.0, 1.0;
  }

  RigidTransform(const Matrix3& rotation, const Vector3& translation) : m_(Matrix4::Identity()) {
    m_.topLeftCorner<3, 3>() = rotation;
    m_.topRightCorner<3, 1>() = translation;
  }

  [[nodiscard]] static RigidTransform identity() { return RigidTransform(); }
  [[nodiscard]] static RigidTransform translation(const Vector3& t) { return {Matrix3::Identity(), t}; }

  [[nodiscard]] const Matrix4& matrix() const noexcept { return m_; }
  [[nodiscard]] Matrix3 rotation() const { return m_.topLeftCorner<3, 3>(); }
  [[nodiscard]] Vector3 translation() const { return m_.topRightCorner<3, 1>(); }

  /// ||R^T R - I||_F.
  [[nodiscard]] double orthogonality_error() const {
    const Matrix3 r = rotation();
    return (r.transpose() * r - Matrix3::Identity()).norm();
  }
  [[nodiscard]] bool is_rigid(double tol = 1e-10) const { return orthogonality_error() < tol; }

  [[nodiscard]] RigidTransform inverse() const {
    if (orthogonality_error() < 1e-12) {
      const Matrix3 rt = rotation().transpose();
      return {rt, -rt * translation()};
    }
    return RigidTransform(Matrix4(m_.inverse()));
  }

  [[nodiscard]] RigidTransform operator*(const RigidTransform& rhs) const { return RigidTransform(Matrix4(m_ * rhs.m_)); }

 private:
  Matrix4 m_;
};

[[nodiscard]] inline RigidTransform compose(const RigidTransform& a, const RigidTransform& b) { return a * b; }
[[nodiscard]] inline RigidTransform inverse(const RigidTransform& t) { return t.inverse(); }

/// Returns T*q, normalized.
[[nodiscard]] inline Point3H apply(const RigidTransform& t, const Point3H& q) {
  return Point3H(Vector4(t.matrix() * q.normalized().homogeneous())).normalized();
}

[[nodiscard]] inline Vector3 apply(const RigidTransform& t, const Vector3& q) {
  return t.rotation() * q + t.translation();
}

[[nodiscard]] inline RigidTransform rotation_x(double a) {
  Matrix3 r;
  r << 1.0, 0.0, 0.0, 0.0, std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a);
  return {r, Vector3::Zero()};
}

[[nodiscard]] inline RigidTransform rotation_y(double b) {
  Matrix3 r;
  r << std::cos(b), 0.0, std::sin(b), 0.0, 1.0, 0.0, -std::sin(b), 0.0, std::cos(b);
  return {r, Vector3::Zero()};
}

[[nodiscard]] inline RigidTransform rotation_z(double g) {
  Matrix3 r;
  r << std::cos(g), -std::sin(g), 0.0, std::sin(g), std::cos(g), 0.0, 0.0, 0.0, 1.0;
  return {r, Vector3::Zero()};
}

/// T_t * T_rx(alpha) * T_ry(beta) * T_rz(gamma) with exact trigonometric entries.
[[nodiscard]] inline RigidTransform exact_transform(const SmallAngleSpec& s) {
  return RigidTransform::translation({s.dx, s.dy, s.dz}) * rotation_x(s.alpha) * rotation_y(s.beta) *
         rotation_z(s.gamma);
}

/// First-order form of exact_transform: cos -> 1, sin -> angle, products of
/// angles dropped.
[[nodiscard]] inline RigidTransform small_angle_transform(const SmallAngleSpec& s) {
  if (s.exceeds_small_angle_regime()) {
    warn("small-angle transform built with |angle| > 0.1 rad; first-order approximation degrades");
  }
  Matrix4 m;
  m << 1.0, -s.gamma, s.beta, s.dx,
       s.gamma, 1.0, -s.alpha, s.dy,
       -s.beta, s.alpha, 1.0, s.dz,
       0.0, 0.0, 0.0, 1.0;
  return RigidTransform(m);
}

/// 3x4 pinhole projection matrix, parameters A1..A12 in row-major order.
class ProjectionMatrix {
 public:
  ProjectionMatrix() : m_(Matrix34::Zero()) { m_.leftCols<3>().setIdentity(); }
  explicit ProjectionMatrix(const Matrix34& m) : m_(m) {}

  [[nodiscard]] static ProjectionMatrix from_parameters(const Eigen::Matrix<double, 12, 1>& a) {
    Matrix34 m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = a(4 * r + c);
    return ProjectionMatrix(m);
  }

  [[nodiscard]] const Matrix34& matrix() const noexcept { return m_; }

  /// A1..A12.
  [[nodiscard]] Eigen::Matrix<double, 12, 1> parameters() const {
    Eigen::Matrix<double, 12, 1> a;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) a(4 * r + c) = m_(r, c);
    return a;
  }

  /// Smallest over largest singular value.
  [[nodiscard]] double rank_ratio() const {
    Eigen::JacobiSVD<Matrix34> svd(m_);
    const auto& s = svd.singularValues();
    return s(0) > 0.0 ? s(2) / s(0) : 0.0;
  }
  [[nodiscard]] bool is_rank3() const { return rank_ratio() > 1e-8; }

  /// Unit Frobenius norm, sign chosen so the homogeneous scale at `reference` is positive.
  [[nodiscard]] ProjectionMatrix canonical(const Vector3& reference) const {
    const double norm = m_.norm();
    if (norm == 0.0) throw Error(ErrorKind::DegenerateProjection, "zero projection matrix");
    Matrix34 out = m_ / norm;
    const double s = out.row(2).dot(Vector4(reference.x(), reference.y(), reference.z(), 1.0));
    if (s < 0.0) out = -out;
    return ProjectionMatrix(out);
  }

  [[nodiscard]] ProjectionMatrix operator*(const RigidTransform& t) const {
    return ProjectionMatrix(Matrix34(m_ * t.matrix()));
  }

 private:
  Matrix34 m_;
};

/// p = A q. Throws DegenerateProjection when q lies on the principal plane.
[[nodiscard]] inline Pixel2H project(const ProjectionMatrix& a, const Point3H& q) {
  const Vector3 p = a.matrix() * q.normalized().homogeneous();
  if (std::abs(p.z()) < kHomogeneousEps) throw Error(ErrorKind::DegenerateProjection, "point on the principal plane");
  return Pixel2H(p);
}

[[nodiscard]] inline Eigen::Vector2d project_uv(const ProjectionMatrix& a, const Vector3& q) {
  return project(a, Point3H(q)).uv();
}

}  // namespace biplanar
