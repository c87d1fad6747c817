#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "biplanar/error.hpp"
#include "biplanar/geometry.hpp"

namespace biplanar {

/// Percentile convention used everywhere: linear interpolation between
/// closest ranks, h = (n - 1) p (Hyndman-Fan type 7).
inline constexpr std::string_view kPercentileConvention = "linear interpolation between closest ranks (type 7)";

struct ErrorStats {
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator
  double p95 = 0.0;
  double worst = 0.0;
  std::size_t count = 0;
};

[[nodiscard]] inline double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorKind::EmptySample, "percentile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

[[nodiscard]] inline double percentile(std::vector<double> samples, double p) {
  std::sort(samples.begin(), samples.end());
  return percentile_sorted(samples, p);
}

/// Reductions run in input order so results are bitwise reproducible.
[[nodiscard]] inline ErrorStats summarize(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorKind::EmptySample, "summarize needs at least one sample");
  ErrorStats st;
  st.count = samples.size();
  double sum = 0.0;
  for (double s : samples) sum += s;
  st.mean = sum / static_cast<double>(st.count);
  if (st.count > 1) {
    double ss = 0.0;
    for (double s : samples) ss += (s - st.mean) * (s - st.mean);
    st.std = std::sqrt(ss / static_cast<double>(st.count - 1));
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  st.p95 = percentile_sorted(sorted, 0.95);
  st.worst = sorted.back();
  return st;
}

struct AxisStats {
  Vector3 mean = Vector3::Zero();
  Vector3 std = Vector3::Zero();
  Matrix3 covariance = Matrix3::Zero();
  Vector3 mean_offset = Vector3::Zero();  // mean - truth, when a truth is supplied
  std::size_t count = 0;
};

[[nodiscard]] inline AxisStats axis_stats(std::span<const Vector3> points) {
  if (points.size() < 2) throw Error(ErrorKind::EmptySample, "axis statistics need at least two samples");
  AxisStats a;
  a.count = points.size();
  for (const auto& p : points) a.mean += p;
  a.mean /= static_cast<double>(a.count);
  for (const auto& p : points) {
    const Vector3 d = p - a.mean;
    a.covariance += d * d.transpose();
  }
  a.covariance /= static_cast<double>(a.count - 1);
  a.std = a.covariance.diagonal().cwiseSqrt();
  return a;
}

[[nodiscard]] inline AxisStats axis_stats(std::span<const Vector3> points, const Vector3& truth) {
  AxisStats a = axis_stats(points);
  a.mean_offset = a.mean - truth;
  return a;
}

struct ComparisonReport {
  Vector3 std_ratio = Vector3::Ones();  // MC std / analytic std per axis
  double alignment_deg = 0.0;           // angle between leading eigenvectors
  bool analytic_underestimates = false;  // any ratio > 1.25
};

inline constexpr double kUnderestimateRatio = 1.25;

[[nodiscard]] inline Vector3 leading_eigenvector(const Matrix3& c) {
  Eigen::SelfAdjointEigenSolver<Matrix3> es(c);
  return es.eigenvectors().col(2);
}

[[nodiscard]] inline ComparisonReport compare_analytic_mc(const AxisStats& mc, const Matrix3& analytic) {
  ComparisonReport r;
  const Vector3 ana_std = analytic.diagonal().cwiseMax(0.0).cwiseSqrt();
  for (int i = 0; i < 3; ++i) {
    r.std_ratio(i) = ana_std(i) > 0.0 ? mc.std(i) / ana_std(i) : (mc.std(i) > 0.0 ? INFINITY : 1.0);
  }
  const double c = std::clamp(std::abs(leading_eigenvector(mc.covariance).dot(leading_eigenvector(analytic))), 0.0, 1.0);
  r.alignment_deg = rad_to_deg(std::acos(c));
  r.analytic_underestimates = (r.std_ratio.array() > kUnderestimateRatio).any();
  return r;
}

}  // namespace biplanar
