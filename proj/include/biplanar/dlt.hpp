#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "biplanar/error.hpp"
#include "biplanar/geometry.hpp"

namespace biplanar {

inline constexpr std::size_t kMinCorrespondences = 6;
inline constexpr double kCoplanarityTol = 1e-6;
inline constexpr double kDesignRankTol = 1e-10;

using DesignMatrix = Eigen::Matrix<double, Eigen::Dynamic, 12>;
using ParameterVector = Eigen::Matrix<double, 12, 1>;

struct Correspondence {
  Point3H q;  // control point, mm
  Pixel2H p;  // observation, px
};

/// Ordered control points whose 3D geometry is known in the connector frame.
class FiducialSet {
 public:
  FiducialSet() = default;
  FiducialSet(std::string name, std::vector<Vector3> points) : name_(std::move(name)), points_(std::move(points)) {}

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const std::vector<Vector3>& points() const noexcept { return points_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] const Vector3& operator[](std::size_t i) const { return points_[i]; }

  [[nodiscard]] Vector3 centroid() const {
    Vector3 c = Vector3::Zero();
    for (const auto& p : points_) c += p;
    return points_.empty() ? c : Vector3(c / static_cast<double>(points_.size()));
  }

  /// Smallest over largest singular value of the mean-centred 3xn coordinate matrix.
  [[nodiscard]] double planarity_ratio() const { return planarity_ratio(points_); }

  [[nodiscard]] static double planarity_ratio(std::span<const Vector3> pts) {
    if (pts.size() < 3) return 0.0;
    Vector3 c = Vector3::Zero();
    for (const auto& p : pts) c += p;
    c /= static_cast<double>(pts.size());
    Eigen::Matrix3Xd m(3, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pts[i] - c;
    Eigen::JacobiSVD<Eigen::Matrix3Xd> svd(m);
    const auto& s = svd.singularValues();
    return s(0) > 0.0 ? s(2) / s(0) : 0.0;
  }

  /// Throws when fewer than six points or all points (nearly) coplanar.
  void validate() const { validate_points(points_); }

  static void validate_points(std::span<const Vector3> pts) {
    if (pts.size() < kMinCorrespondences) {
      throw Error(ErrorKind::InsufficientCorrespondences,
                  "need at least 6 control points, got " + std::to_string(pts.size()));
    }
    if (planarity_ratio(pts) <= kCoplanarityTol) {
      throw Error(ErrorKind::DegenerateConfiguration, "control points are coplanar");
    }
  }

  bool operator==(const FiducialSet& o) const { return name_ == o.name_ && points_ == o.points_; }

 private:
  std::string name_;
  std::vector<Vector3> points_;
};

[[nodiscard]] inline std::vector<Correspondence> make_correspondences(std::span<const Vector3> points,
                                                                      std::span<const Eigen::Vector2d> pixels) {
  std::vector<Correspondence> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size() && i < pixels.size(); ++i) {
    out.push_back({Point3H(points[i]), Pixel2H(pixels[i].x(), pixels[i].y())});
  }
  return out;
}

namespace detail {

inline std::vector<Vector3> control_points(std::span<const Correspondence> c) {
  std::vector<Vector3> pts;
  pts.reserve(c.size());
  for (const auto& k : c) pts.push_back(k.q.euclidean());
  return pts;
}

/// Rows (2i, 2i+1) hold the coefficients of G_u and G_v for correspondence i.
inline DesignMatrix raw_design(std::span<const Correspondence> c) {
  DesignMatrix d(static_cast<Eigen::Index>(2 * c.size()), 12);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vector3 q = c[i].q.euclidean();
    const Eigen::Vector2d p = c[i].p.uv();
    const double x = q.x(), y = q.y(), z = q.z(), u = p.x(), v = p.y();
    const auto r = static_cast<Eigen::Index>(2 * i);
    d.row(r) << x, y, z, 1.0, 0.0, 0.0, 0.0, 0.0, -u * x, -u * y, -u * z, -u;
    d.row(r + 1) << 0.0, 0.0, 0.0, 0.0, x, y, z, 1.0, -v * x, -v * y, -v * z, -v;
  }
  return d;
}

struct NullVector {
  ParameterVector vector;
  Eigen::Matrix<double, 12, 1> singular_values;
};

inline NullVector smallest_right_singular_vector(const DesignMatrix& d) {
  // Thin SVD of a 2n x 12 matrix with 2n >= 12 yields all 12 right vectors.
  Eigen::JacobiSVD<DesignMatrix> svd(d, Eigen::ComputeFullV);
  return {svd.matrixV().col(11), svd.singularValues()};
}

inline void check_rank(const Eigen::Matrix<double, 12, 1>& s) {
  if (s(0) <= 0.0 || s(10) < kDesignRankTol * s(0)) {
    throw Error(ErrorKind::DegenerateConfiguration, "design matrix rank below 11");
  }
  if (s(10) - s(11) < kDesignRankTol * s(0)) {
    throw Error(ErrorKind::RankDeficient, "two smallest singular values coincide; solution not unique");
  }
}

/// Similarity that centres points and scales their mean distance to sqrt(dim).
template <int Dim>
Eigen::Matrix<double, Dim + 1, Dim + 1> isotropic_conditioner(std::span<const Eigen::Matrix<double, Dim, 1>> pts) {
  using Vec = Eigen::Matrix<double, Dim, 1>;
  Vec c = Vec::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += (p - c).norm();
  mean_dist /= static_cast<double>(pts.size());
  const double s = mean_dist > 0.0 ? std::sqrt(static_cast<double>(Dim)) / mean_dist : 1.0;
  Eigen::Matrix<double, Dim + 1, Dim + 1> t = Eigen::Matrix<double, Dim + 1, Dim + 1>::Identity();
  t.template topLeftCorner<Dim, Dim>() *= s;
  t.template topRightCorner<Dim, 1>() = -s * c;
  return t;
}

}  // namespace detail

/// 2n x 12 system with DesignMatrix * [A1..A12]^T = 0 for exact data.
[[nodiscard]] inline DesignMatrix build_design_matrix(std::span<const Correspondence> correspondences) {
  FiducialSet::validate_points(detail::control_points(correspondences));
  DesignMatrix d = detail::raw_design(correspondences);
  Eigen::JacobiSVD<DesignMatrix> svd(d);
  const auto& s = svd.singularValues();
  if (s(0) <= 0.0 || s(10) < kDesignRankTol * s(0)) {
    throw Error(ErrorKind::DegenerateConfiguration, "design matrix rank below 11");
  }
  return d;
}

/// Unit-norm homogeneous least squares (smallest right singular vector),
/// returned in the canonical gauge at the control-point centroid. With
/// `normalize` the inputs are isotropically conditioned first.
[[nodiscard]] inline ProjectionMatrix estimate_projection(std::span<const Correspondence> correspondences,
                                                          bool normalize = true) {
  const std::vector<Vector3> pts3 = detail::control_points(correspondences);
  FiducialSet::validate_points(pts3);
  Vector3 centroid = Vector3::Zero();
  for (const auto& p : pts3) centroid += p;
  centroid /= static_cast<double>(pts3.size());

  if (!normalize) {
    const auto nv = detail::smallest_right_singular_vector(detail::raw_design(correspondences));
    detail::check_rank(nv.singular_values);
    return ProjectionMatrix::from_parameters(nv.vector).canonical(centroid);
  }

  std::vector<Eigen::Vector2d> pts2;
  pts2.reserve(correspondences.size());
  for (const auto& c : correspondences) pts2.push_back(c.p.uv());
  const Eigen::Matrix4d t3 = detail::isotropic_conditioner<3>(std::span<const Vector3>(pts3));
  const Eigen::Matrix3d t2 = detail::isotropic_conditioner<2>(std::span<const Eigen::Vector2d>(pts2));

  std::vector<Correspondence> conditioned;
  conditioned.reserve(correspondences.size());
  for (std::size_t i = 0; i < pts3.size(); ++i) {
    const Vector4 q = t3 * Vector4(pts3[i].x(), pts3[i].y(), pts3[i].z(), 1.0);
    const Vector3 p = t2 * Vector3(pts2[i].x(), pts2[i].y(), 1.0);
    conditioned.push_back({Point3H(q), Pixel2H(p)});
  }
  const auto nv = detail::smallest_right_singular_vector(detail::raw_design(conditioned));
  detail::check_rank(nv.singular_values);
  const Matrix34 a_cond = ProjectionMatrix::from_parameters(nv.vector).matrix();
  const Matrix34 a = t2.inverse() * a_cond * t3;
  return ProjectionMatrix(a).canonical(centroid);
}

/// Mean Euclidean distance (px) between observations and reprojections.
[[nodiscard]] inline double reprojection_error(const ProjectionMatrix& a, std::span<const Correspondence> correspondences) {
  if (correspondences.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& c : correspondences) {
    sum += (c.p.uv() - project(a, c.q).uv()).norm();
  }
  return sum / static_cast<double>(correspondences.size());
}

}  // namespace biplanar
