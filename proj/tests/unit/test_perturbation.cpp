#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "biplanar/monte_carlo.hpp"
#include "biplanar/perturbation.hpp"
#include "biplanar/random.hpp"
#include "support.hpp"

using namespace biplanar;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswerZero) {
  const auto r = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(r, (Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto r = Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff});
  EXPECT_EQ(r, (Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  const auto r = Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
  EXPECT_EQ(r, (Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(NormalStream, SameKeySameDraws) {
  NormalStream a(42, 3, 17), b(42, 3, 17);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(NormalStream, DistinctTrialsAndStreamsDiffer) {
  NormalStream a(42, 0, 0), b(42, 0, 1), c(42, 1, 0), d(43, 0, 0);
  const double x = a.next();
  EXPECT_NE(x, b.next());
  EXPECT_NE(x, c.next());
  EXPECT_NE(x, d.next());
}

TEST(PixelNoise, ZeroSigmaIsIdentity) {
  NormalStream rng(1, 0, 0);
  const Pixel2H p(100.5, 200.25);
  const Pixel2H q = add_pixel_noise(p, {0.0}, rng);
  EXPECT_EQ(q.homogeneous(), p.homogeneous());
}

TEST(PixelNoise, SampleStdAndMean) {
  const std::size_t n = 100000;
  double su = 0, sv = 0, suu = 0, svv = 0, suv = 0;
  NormalStream rng(7, 0, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Pixel2H q = add_pixel_noise(Pixel2H(10.0, 20.0), {2.0}, rng);
    EXPECT_EQ(q.w(), 1.0);
    const double du = q.u() - 10.0, dv = q.v() - 20.0;
    su += du;
    sv += dv;
    suu += du * du;
    svv += dv * dv;
    suv += du * dv;
  }
  const double dn = static_cast<double>(n);
  const double mu = su / dn, mv = sv / dn;
  const double std_u = std::sqrt((suu - dn * mu * mu) / (dn - 1));
  const double std_v = std::sqrt((svv - dn * mv * mv) / (dn - 1));
  EXPECT_GE(std_u, 1.98);
  EXPECT_LE(std_u, 2.02);
  EXPECT_GE(std_v, 1.98);
  EXPECT_LE(std_v, 2.02);
  EXPECT_LT(std::abs(mu), 3.0 * 2.0 / std::sqrt(dn));
  EXPECT_LT(std::abs(mv), 3.0 * 2.0 / std::sqrt(dn));
  // Isotropy: u and v uncorrelated.
  const double corr = (suv / dn - mu * mv) / (std_u * std_v);
  EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(dn));
}

TEST(PixelNoise, SeparateStreamsWithSameSeedAgree) {
  NormalStream a(9, 2, 5), b(9, 2, 5);
  const Pixel2H p(1.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(add_pixel_noise(p, {1.5}, a).homogeneous(), add_pixel_noise(p, {1.5}, b).homogeneous());
  }
}

TEST(BiasControlPoints, ZeroBiasKeepsSet) {
  const FiducialSet f = default_fiducials();
  EXPECT_EQ(bias_control_points(f, {}).points(), f.points());
}

TEST(BiasControlPoints, PureTranslation) {
  const FiducialSet f = default_fiducials();
  InstallationBias b;
  b.reference_bias.dx = 5.0;
  const FiducialSet g = bias_control_points(f, b);
  ASSERT_EQ(g.size(), f.size());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(g[i], Vector3(f[i] + Vector3(5.0, 0.0, 0.0)));
}

TEST(BiasControlPoints, OneDegreeAlpha) {
  const FiducialSet f = default_fiducials();
  InstallationBias b;
  b.reference_bias.alpha = deg_to_rad(1.0);
  const FiducialSet g = bias_control_points(f, b);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto hand = oracle::apply(oracle::rot_x(deg_to_rad(1.0)), {f[i].x(), f[i].y(), f[i].z()});
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(g[i](k), hand[static_cast<std::size_t>(k)], 1e-12);
      EXPECT_NEAR(g[i](k), frozen::kFiducialsAlpha1Deg[3 * i + static_cast<std::size_t>(k)], 1e-12);
    }
  }
}

TEST(BiasControlPoints, SmallAngleFlagSelectsConstructor) {
  InstallationBias b;
  b.reference_bias = {0.01, 0.02, 0.03, 1.0, 2.0, 3.0};
  b.use_small_angle = true;
  EXPECT_EQ(reference_transform(b).matrix(), small_angle_transform(b.reference_bias).matrix());
  b.use_small_angle = false;
  EXPECT_EQ(reference_transform(b).matrix(), exact_transform(b.reference_bias).matrix());
}

TEST(BiasConvention, InverseAppliesTheInverse) {
  InstallationBias b;
  b.reference_bias = {0.01, -0.02, 0.03, 1.0, 2.0, 3.0};
  const Matrix4 fwd = physical_transform(b).matrix();
  b.convention = BiasConvention::inverse;
  const Matrix4 inv = physical_transform(b).matrix();
  EXPECT_LT((fwd * inv - Matrix4::Identity()).norm(), 1e-12);
}

TEST(MapToTcp, IdentityChainZeroBias) {
  const Point3H q(1.0, 2.0, 3.0);
  EXPECT_EQ(map_to_tcp(q, {}, {}).homogeneous(), q.homogeneous());
}

TEST(MapToTcp, MountTranslation) {
  InstallationBias b;
  b.mount_bias.dz = 3.0;
  EXPECT_EQ(map_to_tcp(Point3H(1.0, 2.0, 3.0), {}, b).euclidean(), Vector3(1.0, 2.0, 6.0));
}

TEST(MapToTcp, FullChainAtLevelTwo) {
  const ScenarioConfig cfg = default_config();
  BiasConfig bc;
  bc.mount = misalignment(2.0, 5.0, cfg.studies.rotation_axis, cfg.studies.translation_axis);
  const Vector3 got = map_to_tcp(Point3H(100.0, 0.0, 0.0), cfg.chain.build(), bc.build()).euclidean();

  const oracle::Mat4 l2_l1 = oracle::rigid(0, 0, deg_to_rad(90.0), 0, 0, 250.0);
  const oracle::Mat4 tcp_l2 = oracle::rigid(deg_to_rad(180.0), 0, 0, 0, 0, 120.0);
  const oracle::Mat4 mount = oracle::rigid(0, 0, deg_to_rad(2.0), 5.0, 0, 0);
  const auto hand = oracle::apply(oracle::mul(oracle::mul(tcp_l2, l2_l1), mount), {100.0, 0.0, 0.0});
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(got(k), hand[static_cast<std::size_t>(k)], 1e-12);
    EXPECT_NEAR(got(k), frozen::kTcpChainL2[k], 1e-12);
  }
}

TEST(MapToTcp, RigidChainIsIsometry) {
  const ExecutionChain chain = default_config().chain.build();
  EXPECT_TRUE(chain.is_rigid());
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> d(-300.0, 300.0);
  for (int i = 0; i < 200; ++i) {
    const Vector3 p(d(rng), d(rng), d(rng)), q(d(rng), d(rng), d(rng));
    const Vector3 tp = map_to_tcp(Point3H(p), chain, {}).euclidean();
    const Vector3 tq = map_to_tcp(Point3H(q), chain, {}).euclidean();
    EXPECT_NEAR((tp - tq).norm(), (p - q).norm(), 1e-10);
  }
}

TEST(BiasSeparability, FirstOrderAdditivity) {
  // Reference and mount displacements combine additively up to O(theta^2)|q|.
  ScenarioConfig base = default_config();
  const double th = 1e-3;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const SmallAngleSpec ref{th * u(rng), th * u(rng), th * u(rng), 0.0, 0.0, 0.0};
    const SmallAngleSpec mnt{th * u(rng), th * u(rng), th * u(rng), 0.0, 0.0, 0.0};
    auto tcp_error = [&](const SmallAngleSpec& r, const SmallAngleSpec& m) {
      ScenarioConfig c = base;
      c.bias.reference = {rad_to_deg(r.alpha), rad_to_deg(r.beta), rad_to_deg(r.gamma), r.dx, r.dy, r.dz};
      c.bias.mount = {rad_to_deg(m.alpha), rad_to_deg(m.beta), rad_to_deg(m.gamma), m.dx, m.dy, m.dz};
      const PreparedScenario s = prepare(c);
      const TrialOutcome t = run_trial(s, 0);
      return Vector3(t.q_tcp_hat - s.tcp_truth);
    };
    const Vector3 joint = tcp_error(ref, mnt);
    const Vector3 sum = tcp_error(ref, {}) + tcp_error({}, mnt);
    EXPECT_LT((joint - sum).norm(), 3.0 * th * th * base.target.norm());
    EXPECT_GT(joint.norm(), 10.0 * (joint - sum).norm());
  }
}

TEST(LeverArm, RotationErrorIsChord) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> ang(0.1, 3.0), rad(20.0, 200.0), phi(0.0, 2.0 * M_PI);
  for (int i = 0; i < 30; ++i) {
    ScenarioConfig c = default_config();
    const double deg = ang(rng), r = rad(rng), p = phi(rng);
    c.target = Vector3(r * std::cos(p), r * std::sin(p), 0.0);  // perpendicular to the z rotation axis
    c.bias.reference = misalignment(deg, 0.0, Vector3::UnitZ(), Vector3::UnitX());
    const TrialOutcome t = run_trial(c, 0);
    ASSERT_TRUE(t.ok());
    EXPECT_NEAR(t.e_3d, 2.0 * r * std::sin(deg_to_rad(deg) / 2.0), 1e-9);
  }
}
