#include <gtest/gtest.h>

#include <random>

#include "biplanar/random.hpp"
#include "biplanar/scenario.hpp"
#include "biplanar/triangulation.hpp"
#include "support.hpp"

using namespace biplanar;

namespace {

BiplanarObservation observe(const std::array<ProjectionMatrix, 2>& rig, const Vector3& q) {
  return {project(rig[0], Point3H(q)), project(rig[1], Point3H(q)), rig[0], rig[1]};
}

Vector3 random_target(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-200.0, 200.0);
  return {d(rng), d(rng), d(rng)};
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::IoError;
}

}  // namespace

TEST(NMatrix, ConsistentObservationIsInNullSpace) {
  const auto rig = build_rig(default_config());
  const Vector3 q(100.0, 0.0, 0.0);
  const NMatrix n = build_n_matrix(observe(rig, q));
  EXPECT_LT((n * Vector4(q.x(), q.y(), q.z(), 1.0)).norm(), 1e-9);
}

TEST(NMatrix, DefaultTargetRowsMatchSubstitution) {
  const auto rig = build_rig(default_config());
  const NMatrix n = build_n_matrix(observe(rig, {100.0, 0.0, 0.0}));
  for (int k = 0; k < 16; ++k) {
    EXPECT_NEAR(n(k / 4, k % 4), frozen::kNMatrixTarget[k], 1e-12 * std::max(1.0, std::abs(frozen::kNMatrixTarget[k])));
  }
}

TEST(NMatrix, RowLayout) {
  Matrix34 a = Matrix34::Zero(), b = Matrix34::Zero();
  for (int k = 0; k < 12; ++k) {
    a(k / 4, k % 4) = k + 1.0;
    b(k / 4, k % 4) = 2.0 * k - 5.0;
  }
  const BiplanarObservation obs{Pixel2H(3.0, 7.0), Pixel2H(-2.0, 4.0), ProjectionMatrix(a), ProjectionMatrix(b)};
  const NMatrix n = build_n_matrix(obs);
  EXPECT_EQ(n.row(0), Eigen::RowVector4d(3.0 * a.row(2) - a.row(0)));
  EXPECT_EQ(n.row(1), Eigen::RowVector4d(7.0 * a.row(2) - a.row(1)));
  EXPECT_EQ(n.row(2), Eigen::RowVector4d(-2.0 * b.row(2) - b.row(0)));
  EXPECT_EQ(n.row(3), Eigen::RowVector4d(4.0 * b.row(2) - b.row(1)));
}

TEST(Triangulate, DefaultTargetRoundTrip) {
  const auto rig = build_rig(default_config());
  const TriangulationResult r = triangulate(observe(rig, {100.0, 0.0, 0.0}));
  EXPECT_EQ(r.q_aim.w(), 1.0);
  EXPECT_LT((r.q_aim.euclidean() - Vector3(100.0, 0.0, 0.0)).norm(), 1e-8);
  EXPECT_GE(r.condition_ratio, 1.0);
  EXPECT_LT(r.residual, 1e-12);
}

TEST(Triangulate, RoundTripOverWorkingVolume) {
  const auto rig = build_rig(default_config());
  std::mt19937_64 rng(31);
  for (int i = 0; i < 500; ++i) {
    const Vector3 q = random_target(rng);
    const TriangulationResult r = triangulate(observe(rig, q));
    EXPECT_LT((r.q_aim.euclidean() - q).norm(), 1e-8) << q.transpose();
    EXPECT_LT(r.residual, 1e-12);
    EXPECT_GE(r.condition_ratio, 1.0);
  }
}

TEST(Triangulate, BiasedMatricesTransportThePoint) {
  const auto rig = build_rig(default_config());
  const Vector3 centroid = default_fiducials().centroid();
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> a(-0.035, 0.035), t(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const RigidTransform tr = exact_transform({a(rng), a(rng), a(rng), t(rng), t(rng), t(rng)});
    const Vector3 q = random_target(rng);
    const ProjectionMatrix ah = (rig[0] * tr.inverse()).canonical(centroid);
    const ProjectionMatrix bh = (rig[1] * tr.inverse()).canonical(centroid);
    const BiplanarObservation obs{project(rig[0], Point3H(q)), project(rig[1], Point3H(q)), ah, bh};
    EXPECT_LT((triangulate(obs).q_aim.euclidean() - apply(tr, q)).norm(), 1e-7);
  }
}

TEST(Triangulate, ScaleInvariance) {
  const auto rig = build_rig(default_config());
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> s(0.2, 5.0);
  for (int i = 0; i < 100; ++i) {
    const Vector3 q = random_target(rng);
    const BiplanarObservation base = observe(rig, q);
    const Vector3 ref = triangulate(base).q_aim.euclidean();
    BiplanarObservation scaled{Pixel2H(Vector3(s(rng) * base.p1.homogeneous())),
                               Pixel2H(Vector3(-s(rng) * base.p2.homogeneous())),
                               ProjectionMatrix(Matrix34(s(rng) * base.a.matrix())),
                               ProjectionMatrix(Matrix34(-s(rng) * base.b.matrix()))};
    EXPECT_LT((triangulate(scaled).q_aim.euclidean() - ref).norm(), 1e-9);
  }
}

TEST(Triangulate, NoiseMakesResidualPositive) {
  const auto rig = build_rig(default_config());
  NormalStream rng(5, 0, 0);
  BiplanarObservation obs = observe(rig, {100.0, 0.0, 0.0});
  const Pixel2H p1 = obs.p1.normalized();
  obs.p1 = Pixel2H(p1.u() + rng.next(), p1.v() + rng.next());
  const TriangulationResult r = triangulate(obs);
  EXPECT_GT(r.residual, 0.0);
  EXPECT_GE(r.condition_ratio, 1.0);
}

TEST(Triangulate, IdenticalViewsAreWeak) {
  const auto rig = build_rig(default_config());
  const Vector3 q(100.0, 0.0, 0.0);
  const BiplanarObservation obs{project(rig[0], Point3H(q)), project(rig[0], Point3H(q)), rig[0], rig[0]};
  EXPECT_EQ(kind_of([&] { (void)triangulate(obs); }), ErrorKind::WeakGeometry);
}

TEST(Triangulate, ParallelRaysMeetAtInfinity) {
  Matrix34 a = Matrix34::Zero(), b = Matrix34::Zero();
  a.leftCols<3>().setIdentity();
  b.leftCols<3>().setIdentity();
  b(0, 3) = -1.0;  // second camera shifted by +1 along x, same orientation
  const BiplanarObservation obs{Pixel2H(0.0, 0.0), Pixel2H(0.0, 0.0), ProjectionMatrix(a), ProjectionMatrix(b)};
  EXPECT_EQ(kind_of([&] { (void)triangulate(obs); }), ErrorKind::PointAtInfinity);
}
