#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "biplanar/dlt.hpp"
#include "biplanar/error.hpp"
#include "biplanar/geometry.hpp"
#include "biplanar/triangulation.hpp"

namespace biplanar {

inline constexpr double kGaugeGapTol = 1e-8;

using InputVariances = Eigen::Matrix<double, 5, 1>;  // x, y, z (mm^2), u, v (px^2)
using MatrixCovariance = Eigen::Matrix<double, 12, 12>;
using PointCovariance = Eigen::Matrix3d;
using PixelCovariance = Eigen::Matrix2d;

/// Block-diagonal input covariance, one diagonal 5x5 block per correspondence.
struct InputCovariance {
  std::vector<InputVariances> blocks;

  [[nodiscard]] static InputCovariance uniform(std::size_t n, double sigma_xyz_mm, double sigma_px) {
    InputVariances v;
    const double s3 = sigma_xyz_mm * sigma_xyz_mm;
    const double s2 = sigma_px * sigma_px;
    v << s3, s3, s3, s2, s2;
    return {std::vector<InputVariances>(n, v)};
  }

  [[nodiscard]] Eigen::MatrixXd matrix() const {
    const auto n = static_cast<Eigen::Index>(blocks.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5 * n, 5 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((blocks[static_cast<std::size_t>(i)].array() < 0.0).any()) {
        throw Error(ErrorKind::ValidationError, "negative input variance");
      }
      m.block<5, 5>(5 * i, 5 * i) = blocks[static_cast<std::size_t>(i)].asDiagonal();
    }
    return m;
  }
};

namespace detail {

/// Moore-Penrose pseudoinverse keeping only the leading `rank` singular values.
inline Eigen::MatrixXd truncated_pinv(const Eigen::MatrixXd& m, Eigen::Index rank) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < std::min(rank, s.size()); ++i) {
    if (s(i) > 0.0) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace detail

/// d(G_u, G_v)/d(x, y, z, u, v) per correspondence, as a dense 2n x 5n block-diagonal matrix.
[[nodiscard]] inline Eigen::MatrixXd jacobian_wrt_inputs(const ProjectionMatrix& a,
                                                         std::span<const Correspondence> correspondences) {
  const auto n = static_cast<Eigen::Index>(correspondences.size());
  const Matrix34& m = a.matrix();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 5 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = correspondences[static_cast<std::size_t>(i)];
    const Vector4 q = c.q.normalized().homogeneous();
    const Eigen::Vector2d p = c.p.uv();
    const double u = p.x(), v = p.y();
    const double s = m.row(2).dot(q);
    auto blk = j.block<2, 5>(2 * i, 5 * i);
    blk(0, 0) = m(0, 0) - m(2, 0) * u;
    blk(0, 1) = m(0, 1) - m(2, 1) * u;
    blk(0, 2) = m(0, 2) - m(2, 2) * u;
    blk(0, 3) = -s;
    blk(0, 4) = 0.0;
    blk(1, 0) = m(1, 0) - m(2, 0) * v;
    blk(1, 1) = m(1, 1) - m(2, 1) * v;
    blk(1, 2) = m(1, 2) - m(2, 2) * v;
    blk(1, 3) = 0.0;
    blk(1, 4) = -s;
  }
  return j;
}

/// d(G_u, G_v)/d(A1..A12). G is linear in the parameters, so this is the
/// design matrix and does not depend on A.
[[nodiscard]] inline DesignMatrix jacobian_wrt_params(std::span<const Correspondence> correspondences,
                                                      const ProjectionMatrix& /*a*/) {
  return detail::raw_design(correspondences);
}

/// Sigma_A = J_A^+ (J_a Sigma_a J_a^T) J_A^+^T with the gauge direction
/// (null space of J_A) projected out.
[[nodiscard]] inline MatrixCovariance propagate_matrix_covariance(const DesignMatrix& j_params,
                                                                  const Eigen::MatrixXd& j_inputs,
                                                                  const InputCovariance& sigma_a) {
  const Eigen::MatrixXd sa = sigma_a.matrix();
  if (j_inputs.cols() != sa.rows() || j_inputs.rows() != j_params.rows()) {
    throw Error(ErrorKind::ValidationError, "Jacobian and covariance shapes disagree");
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(j_params)};
  const auto& s = svd.singularValues();
  if (s(0) <= 0.0 || (s(10) - s(11)) < kGaugeGapTol * s(0)) {
    throw Error(ErrorKind::IllConditioned, "no gap between the 11th and 12th singular values of J_A");
  }
  const Eigen::MatrixXd pinv = detail::truncated_pinv(j_params, 11);
  const Eigen::MatrixXd eq_cov = j_inputs * sa * j_inputs.transpose();
  MatrixCovariance out = pinv * eq_cov * pinv.transpose();
  return 0.5 * (out + out.transpose());
}

/// dA~/da = -J_A^+ J_a (12 x 5n): first-order response of the unit-norm
/// estimate to input perturbations.
[[nodiscard]] inline Eigen::MatrixXd parameter_sensitivity(const DesignMatrix& j_params,
                                                           const Eigen::MatrixXd& j_inputs) {
  return -detail::truncated_pinv(j_params, 11) * j_inputs;
}

/// The four triangulation residuals evaluated at an arbitrary point.
[[nodiscard]] inline Eigen::Vector4d triangulation_residuals(const BiplanarObservation& obs, const Vector3& q) {
  return build_n_matrix(obs) * Vector4(q.x(), q.y(), q.z(), 1.0);
}

struct TriangulationJacobians {
  Eigen::Matrix<double, 4, 3> j_point;  // dH/d(x, y, z)
  Eigen::Matrix<double, 4, 28> j_beta;  // dH/d(u1, v1, u2, v2, A1..A12, B1..B12)
};

[[nodiscard]] inline TriangulationJacobians triangulation_jacobians(const BiplanarObservation& obs, const Vector3& q) {
  const NMatrix n = build_n_matrix(obs);
  const Vector4 qh(q.x(), q.y(), q.z(), 1.0);
  const Pixel2H p1 = obs.p1.normalized();
  const Pixel2H p2 = obs.p2.normalized();
  const double s1 = obs.a.matrix().row(2).dot(qh);
  const double s2 = obs.b.matrix().row(2).dot(qh);

  TriangulationJacobians j;
  j.j_point = n.leftCols<3>();
  j.j_beta.setZero();
  j.j_beta(0, 0) = s1;
  j.j_beta(1, 1) = s1;
  j.j_beta(2, 2) = s2;
  j.j_beta(3, 3) = s2;
  // View 1 parameters occupy columns 4..15, view 2 columns 16..27.
  j.j_beta.block<1, 4>(0, 4 + 0) = -qh.transpose();
  j.j_beta.block<1, 4>(0, 4 + 8) = p1.u() * qh.transpose();
  j.j_beta.block<1, 4>(1, 4 + 4) = -qh.transpose();
  j.j_beta.block<1, 4>(1, 4 + 8) = p1.v() * qh.transpose();
  j.j_beta.block<1, 4>(2, 16 + 0) = -qh.transpose();
  j.j_beta.block<1, 4>(2, 16 + 8) = p2.u() * qh.transpose();
  j.j_beta.block<1, 4>(3, 16 + 4) = -qh.transpose();
  j.j_beta.block<1, 4>(3, 16 + 8) = p2.v() * qh.transpose();
  return j;
}

/// dq/dbeta = -J_q^+ J_beta (3 x 28).
[[nodiscard]] inline Eigen::Matrix<double, 3, 28> point_sensitivity(const BiplanarObservation& obs) {
  const Vector3 q = triangulate(obs).q_aim.euclidean();
  const auto j = triangulation_jacobians(obs, q);
  const Eigen::Matrix<double, 3, 4> pinv = detail::truncated_pinv(j.j_point, 3);
  return -pinv * j.j_beta;
}

/// Sigma_q = J_q^+ J_beta Sigma_beta J_beta^T J_q^+^T with
/// Sigma_beta = diag(Sigma_p1, Sigma_p2, Sigma_A, Sigma_B).
[[nodiscard]] inline PointCovariance propagate_point_covariance(const BiplanarObservation& obs,
                                                                const PixelCovariance& sigma_p1,
                                                                const PixelCovariance& sigma_p2,
                                                                const MatrixCovariance& sigma_a,
                                                                const MatrixCovariance& sigma_b) {
  Eigen::Matrix<double, 28, 28> sb = Eigen::Matrix<double, 28, 28>::Zero();
  sb.block<2, 2>(0, 0) = sigma_p1;
  sb.block<2, 2>(2, 2) = sigma_p2;
  sb.block<12, 12>(4, 4) = sigma_a;
  sb.block<12, 12>(16, 16) = sigma_b;
  const Eigen::Matrix<double, 3, 28> sens = point_sensitivity(obs);
  PointCovariance out = sens * sb * sens.transpose();
  return 0.5 * (out + out.transpose());
}

/// Expected mean reprojection distance (px) of a DLT fit, to first order.
/// Algebraic residuals are the projection of J_a da onto the left null space
/// of J_A; dividing by the homogeneous scale converts them to pixels. The
/// per-point 2x2 residual covariance is mapped to an expected norm with
/// sqrt(pi/4 * trace), exact for isotropic residuals.
[[nodiscard]] inline double predicted_reprojection_error(const ProjectionMatrix& a,
                                                         std::span<const Correspondence> correspondences,
                                                         const InputCovariance& sigma_a) {
  const DesignMatrix ja = jacobian_wrt_params(correspondences, a);
  const Eigen::MatrixXd ji = jacobian_wrt_inputs(a, correspondences);
  const Eigen::MatrixXd pinv = detail::truncated_pinv(ja, 11);
  const auto rows = ja.rows();
  const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(rows, rows) - Eigen::MatrixXd(ja) * pinv;
  const Eigen::MatrixXd r = proj * ji;
  const Eigen::MatrixXd cov = r * sigma_a.matrix() * r.transpose();
  double sum = 0.0;
  for (std::size_t i = 0; i < correspondences.size(); ++i) {
    const double s = a.matrix().row(2).dot(correspondences[i].q.normalized().homogeneous());
    const auto k = static_cast<Eigen::Index>(2 * i);
    const double tr = (cov(k, k) + cov(k + 1, k + 1)) / (s * s);
    sum += std::sqrt(M_PI / 4.0 * tr);
  }
  return sum / static_cast<double>(correspondences.size());
}

}  // namespace biplanar
