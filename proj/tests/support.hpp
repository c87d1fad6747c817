// Test-only reference implementations. Deliberately written with plain loops
// and no library calls so they can serve as independent oracles.
#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using Mat4 = std::array<std::array<double, 4>, 4>;
using Mat34 = std::array<std::array<double, 4>, 3>;
using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;

inline Mat4 identity() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat4 mul(const Mat4& a, const Mat4& b) {
  Mat4 m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) m[i][j] += a[i][k] * b[k][j];
  return m;
}

inline Vec4 mul(const Mat4& a, const Vec4& x) {
  Vec4 r{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) r[i] += a[i][k] * x[k];
  return r;
}

inline std::array<double, 3> mul(const Mat34& a, const Vec4& x) {
  std::array<double, 3> r{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 4; ++k) r[i] += a[i][k] * x[k];
  return r;
}

inline Mat4 rot_x(double a) {
  Mat4 m = identity();
  m[1][1] = std::cos(a);
  m[1][2] = -std::sin(a);
  m[2][1] = std::sin(a);
  m[2][2] = std::cos(a);
  return m;
}

inline Mat4 rot_y(double b) {
  Mat4 m = identity();
  m[0][0] = std::cos(b);
  m[0][2] = std::sin(b);
  m[2][0] = -std::sin(b);
  m[2][2] = std::cos(b);
  return m;
}

inline Mat4 rot_z(double g) {
  Mat4 m = identity();
  m[0][0] = std::cos(g);
  m[0][1] = -std::sin(g);
  m[1][0] = std::sin(g);
  m[1][1] = std::cos(g);
  return m;
}

inline Mat4 trans(double x, double y, double z) {
  Mat4 m = identity();
  m[0][3] = x;
  m[1][3] = y;
  m[2][3] = z;
  return m;
}

/// T_t * Rx * Ry * Rz.
inline Mat4 rigid(double a, double b, double g, double x, double y, double z) {
  return mul(mul(mul(trans(x, y, z), rot_x(a)), rot_y(b)), rot_z(g));
}

inline Vec3 apply(const Mat4& t, const Vec3& p) {
  const Vec4 r = mul(t, Vec4{p[0], p[1], p[2], 1.0});
  return {r[0], r[1], r[2]};
}

inline std::array<double, 2> project(const Mat34& a, const Vec3& p) {
  const auto r = mul(a, Vec4{p[0], p[1], p[2], 1.0});
  return {r[0] / r[2], r[1] / r[2]};
}

inline double dist(const Vec3& a, const Vec3& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// Type-7 percentile by hand: h = (n-1) p, interpolate floor/ceil.
inline double percentile7(std::vector<double> x, double p) {
  for (std::size_t i = 1; i < x.size(); ++i)
    for (std::size_t j = i; j > 0 && x[j - 1] > x[j]; --j) std::swap(x[j - 1], x[j]);
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

}  // namespace oracle

// Values frozen from tests/oracles/derive_oracles.py (plain numpy).
namespace frozen {

inline constexpr double kRigA[12] = {
    0.004932259270091795, 0.0010101266985147995, 0.0, 0.7070886889603597,
    0.0, 0.0010101266985147995, -0.004932259270091795, 0.7070886889603597,
    0.0, 9.864518540183589e-07, 0.0, 0.0006905162978128513
};
inline constexpr double kRigB[12] = {
    0.0010101266985147995, -0.004932259270091795, 0.0, 0.7070886889603597,
    0.0010101266985147995, 0.0, -0.004932259270091795, 0.7070886889603597,
    9.864518540183589e-07, 0.0, 0.0, 0.0006905162978128513
};
inline constexpr double kPixelApFid1[2] = {800.1194029850747, 1247.8805970149253};
inline constexpr double kDesignRowU[12] = {
    -30.0, -30.0, -30.0, 1.0,
    0.0, 0.0, 0.0, 0.0,
    24003.58208955224, 24003.58208955224, 24003.58208955224, -800.1194029850747
};
inline constexpr double kDesignRowV[12] = {
    0.0, 0.0, 0.0, 0.0,
    -30.0, -30.0, -30.0, 1.0,
    37436.41791044776, 37436.41791044776, 37436.41791044776, -1247.8805970149253
};
inline constexpr double kJaBlockU[5] = {0.004932259270091795, 0.00022084743000411015, 0.0, -0.0006609227421923006, 0.0};
inline constexpr double kJaBlockV[5] = {
    0.0, -0.00022084743000411015, -0.004932259270091795, 0.0,
    -0.0006609227421923006
};
inline constexpr double kNMatrixTarget[16] = {
    -0.004932259270091795, 0.0007046084671559708, 0.0, 0.49322592700917955,
    0.0, 0.0, 0.004932259270091795, 0.0,
    0.0, 0.004932259270091795, 0.0, 0.0,
    0.0, 0.0, 0.004932259270091795, 0.0
};
inline constexpr double kRotX1DegPoint[3] = {10.0, 19.47338171000932, 30.34447898343741};
inline constexpr double kFiducialsAlpha1Deg[30] = {
    -30.0, -29.471858661573233, -30.519003047810244, 30.0,
    -29.471858661573233, -30.519003047810244, -30.0, 30.51900304781024,
    -29.471858661573233, 30.0, 29.471858661573233, 30.519003047810244,
    -30.0, -30.51900304781024, 29.471858661573233, 30.0,
    -30.51900304781024, 29.471858661573233, -30.0, 29.471858661573233,
    30.519003047810244, 0.0, 0.0, 0.0,
    15.0, -20.433264064059912, 24.64714425016411, -25.0,
    10.260263048123164, -14.823191362973034
};
inline constexpr double kTcpChainL2[3] = {-3.4899496702500903, -104.9390827019096, -130.0};

}  // namespace frozen
