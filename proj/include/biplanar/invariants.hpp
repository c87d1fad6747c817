#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "biplanar/report.hpp"
#include "biplanar/studies.hpp"

namespace biplanar {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline SmallAngleSpec random_small_spec(std::mt19937_64& rng, double max_rad, double max_mm) {
  std::uniform_real_distribution<double> a(-max_rad, max_rad), t(-max_mm, max_mm);
  return {a(rng), a(rng), a(rng), t(rng), t(rng), t(rng)};
}

inline Vector3 random_target(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-100.0, 100.0);
  return {d(rng), d(rng), d(rng)};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

template <class F>
CheckResult run_check(std::string name, F&& f) {
  try {
    auto [ok, detail] = f();
    return {std::move(name), ok, std::move(detail)};
  } catch (const std::exception& e) {
    return {std::move(name), false, std::string("exception: ") + e.what()};
  }
}

using CheckOutcome = std::pair<bool, std::string>;

inline std::string num(double x) { return format_number(x); }

}  // namespace detail

/// Fast self-check of the library's algebraic and statistical contracts on the
/// default scene. Each entry is independent; failures are reported, not thrown.
[[nodiscard]] inline std::vector<CheckResult> verify_invariants(std::uint64_t seed = 1) {
  using detail::CheckOutcome;
  using detail::num;
  std::vector<CheckResult> out;
  const ScenarioConfig base = default_config();
  const PreparedScenario prepared = prepare(base);

  out.push_back(detail::run_check("noiseless round trip", [&]() -> CheckOutcome {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      ScenarioConfig c = base;
      c.target = detail::random_target(rng);
      const TrialOutcome t = run_trial(c, 0);
      if (!t.ok()) return {false, "trial failed"};
      worst = std::max({worst, t.e_3d, t.e_tcp, t.e_reproj});
    }
    return {worst < 1e-8, "max error " + num(worst)};
  }));

  out.push_back(detail::run_check("biased DLT equals A * T^-1", [&]() -> CheckOutcome {
    std::mt19937_64 rng(seed + 1);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const RigidTransform t = exact_transform(detail::random_small_spec(rng, 0.035, 5.0));
      for (int v = 0; v < 2; ++v) {
        std::vector<Correspondence> corr;
        for (const auto& x : base.fiducials.points()) {
          corr.push_back({Point3H(apply(t, x)), project(prepared.rig[v], Point3H(x))});
        }
        const ProjectionMatrix est = estimate_projection(corr);
        const ProjectionMatrix expect = (prepared.rig[v] * t.inverse()).canonical(base.fiducials.centroid());
        worst = std::max(worst, (est.matrix() - expect.matrix()).norm());
      }
    }
    return {worst < 1e-8, "max Frobenius gap " + num(worst)};
  }));

  out.push_back(detail::run_check("Jacobians match finite differences", [&]() -> CheckOutcome {
    const auto corr = make_correspondences(prepared.nominal, prepared.fiducial_px[0]);
    const ProjectionMatrix a = prepared.rig[0];
    const Eigen::MatrixXd ja = jacobian_wrt_inputs(a, corr);
    const Eigen::Matrix<double, 12, 1> theta = a.parameters();
    const double h = 1e-6;
    double worst = 0.0;
    for (std::size_t i = 0; i < corr.size(); ++i) {
      for (int k = 0; k < 5; ++k) {
        auto perturbed = [&](double d) {
          Vector3 q = corr[i].q.euclidean();
          Eigen::Vector2d p = corr[i].p.uv();
          if (k < 3) q(k) += d; else p(k - 3) += d;
          const Correspondence c{Point3H(q), Pixel2H(p.x(), p.y())};
          return Eigen::Vector2d(detail::raw_design(std::span(&c, 1)) * theta);
        };
        const Eigen::Vector2d fd = (perturbed(h) - perturbed(-h)) / (2 * h);
        for (int r = 0; r < 2; ++r) {
          worst = std::max(worst, detail::rel_err(fd(r), ja(2 * static_cast<Eigen::Index>(i) + r, 5 * static_cast<Eigen::Index>(i) + k)));
        }
      }
    }
    const BiplanarObservation obs{project(prepared.rig[0], Point3H(base.target)),
                                  project(prepared.rig[1], Point3H(base.target)), prepared.rig[0], prepared.rig[1]};
    const auto tj = triangulation_jacobians(obs, base.target);
    for (int k = 0; k < 3; ++k) {
      Vector3 qp = base.target, qm = base.target;
      qp(k) += h;
      qm(k) -= h;
      const Eigen::Vector4d fd = (triangulation_residuals(obs, qp) - triangulation_residuals(obs, qm)) / (2 * h);
      for (int r = 0; r < 4; ++r) worst = std::max(worst, detail::rel_err(fd(r), tj.j_point(r, k)));
    }
    return {worst < 1e-6, "max relative gap " + num(worst)};
  }));

  out.push_back(detail::run_check("small-angle error is quadratic", [&]() -> CheckOutcome {
    auto gap = [](double th) {
      const SmallAngleSpec s{th, th, th, 0.0, 0.0, 0.0};
      return (small_angle_transform(s).matrix() - exact_transform(s).matrix()).norm();
    };
    const double ratio = gap(1e-2) / gap(1e-3);
    return {ratio >= 80.0 && ratio <= 120.0, "ratio " + num(ratio)};
  }));

  out.push_back(detail::run_check("rotation lever-arm law", [&]() -> CheckOutcome {
    ScenarioConfig c = base;
    c.bias.reference = misalignment(2.0, 0.0, c.studies.rotation_axis, c.studies.translation_axis);
    const TrialOutcome t = run_trial(c, 0);
    const double r = c.target.norm();
    const double expect = 2.0 * r * std::sin(deg_to_rad(2.0) / 2.0);
    return {t.ok() && std::abs(t.e_3d - expect) < 1e-9, "e_3d " + num(t.e_3d) + " vs " + num(expect)};
  }));

  out.push_back(detail::run_check("percentile of 1..100", []() -> CheckOutcome {
    std::vector<double> v(100);
    for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = i + 1.0;
    const double p = summarize(v).p95;
    return {p == 95.05, "P95 " + num(p)};
  }));

  out.push_back(detail::run_check("worker count does not change results", [&]() -> CheckOutcome {
    ScenarioConfig c = with_level(base, level_preset("L1"));
    c.noise.sigma_px = 2.0;
    c.trials = 200;
    c.seed = seed;
    const auto a = to_csv(sweep_output({{"sigma_px", {2.0}}, {{2.0, summarize_batch(run_batch(c, {1, {}}))}}}, "x").table);
    const auto b = to_csv(sweep_output({{"sigma_px", {2.0}}, {{2.0, summarize_batch(run_batch(c, {4, {}}))}}}, "x").table);
    return {a == b, a == b ? "identical" : "differs"};
  }));

  out.push_back(detail::run_check("propagated covariances are PSD", [&]() -> CheckOutcome {
    ScenarioConfig c = with_level(base, level_preset("L2"));
    c.noise.sigma_px = 2.0;
    c.sigma_fiducial_mm = 0.1;
    const AnalyticPrediction p = analytic_prediction(c);
    double worst = 0.0;
    for (const auto& m : {Eigen::MatrixXd(p.matrix_covariance[0]), Eigen::MatrixXd(p.matrix_covariance[1]),
                          Eigen::MatrixXd(p.covariance)}) {
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      worst = std::min(worst, es.eigenvalues().minCoeff() / std::max(m.trace(), 1e-300));
    }
    return {worst >= -1e-10, "min eigenvalue / trace " + num(worst)};
  }));

  out.push_back(detail::run_check("rotation bias changes conditioning more than translation", [&]() -> CheckOutcome {
    auto smax = [&](double deg, double mm) {
      ScenarioConfig c = base;
      c.bias.reference = misalignment(deg, mm, c.studies.rotation_axis, c.studies.translation_axis);
      const PreparedScenario s = prepare(c);
      const AnalyticPrediction a = analytic_prediction(s);
      const BiplanarObservation obs{Pixel2H(s.target_px[0].x(), s.target_px[0].y()),
                                    Pixel2H(s.target_px[1].x(), s.target_px[1].y()), a.effective[0], a.effective[1]};
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(point_sensitivity(obs))};
      return svd.singularValues()(0);
    };
    const double s0 = smax(0.0, 0.0);
    const double d_rot = std::abs(smax(2.0, 0.0) - s0);
    const double d_trans = std::abs(smax(0.0, 5.0) - s0);
    const bool ok = d_rot > 1e-9 * s0 && d_trans * 10.0 <= d_rot;
    return {ok, "relative change: rotation " + num(d_rot / s0) + ", translation " + num(d_trans / s0)};
  }));

  return out;
}

}  // namespace biplanar
