#pragma once

#include <string>
#include <vector>

#include "biplanar/monte_carlo.hpp"
#include "biplanar/propagation.hpp"
#include "biplanar/scenario.hpp"
#include "biplanar/stats.hpp"

namespace biplanar {

/// First-order prediction for a configuration, with every Jacobian evaluated
/// at the effective geometry: noiseless observations of the (possibly biased)
/// physical points, fitted against the solver's nominal coordinates.
struct AnalyticPrediction {
  Vector3 mean = Vector3::Zero();
  PointCovariance covariance = PointCovariance::Zero();
  std::array<ProjectionMatrix, 2> effective;
  std::array<MatrixCovariance, 2> matrix_covariance;
  std::array<std::vector<Correspondence>, 2> correspondences;
  InputCovariance input_covariance;
};

[[nodiscard]] inline AnalyticPrediction analytic_prediction(const PreparedScenario& s) {
  const ScenarioConfig& c = s.config;
  AnalyticPrediction out;
  out.input_covariance = InputCovariance::uniform(s.nominal.size(), c.sigma_fiducial_mm, c.noise.sigma_px);
  for (int v = 0; v < 2; ++v) {
    out.correspondences[v] = make_correspondences(s.nominal, s.fiducial_px[v]);
    out.effective[v] = estimate_projection(out.correspondences[v], c.dlt_normalize);
    const DesignMatrix ja = jacobian_wrt_params(out.correspondences[v], out.effective[v]);
    const Eigen::MatrixXd ji = jacobian_wrt_inputs(out.effective[v], out.correspondences[v]);
    out.matrix_covariance[v] = propagate_matrix_covariance(ja, ji, out.input_covariance);
  }
  const BiplanarObservation obs{Pixel2H(s.target_px[0].x(), s.target_px[0].y()),
                                Pixel2H(s.target_px[1].x(), s.target_px[1].y()), out.effective[0], out.effective[1]};
  out.mean = triangulate(obs).q_aim.euclidean();
  const PixelCovariance sp = PixelCovariance::Identity() * (c.noise.sigma_px * c.noise.sigma_px);
  out.covariance = propagate_point_covariance(obs, sp, sp, out.matrix_covariance[0], out.matrix_covariance[1]);
  return out;
}

[[nodiscard]] inline AnalyticPrediction analytic_prediction(const ScenarioConfig& c) {
  validate(c);
  return analytic_prediction(prepare(c));
}

/// An ordered list of values for one swept parameter.
struct SweepSpec {
  std::string parameter;  // rotation_deg | translation_mm | sigma_px | level
  std::vector<double> values;
};

struct SweepRow {
  double value = 0.0;
  BatchSummary summary;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;
};

struct GridResult {
  std::vector<std::string> levels;
  std::vector<double> sigma_px;
  std::vector<std::vector<BatchSummary>> cells;  // [level][sigma]
};

struct Sim3Result {
  std::string level;
  double sigma_px = 0.0;
  Vector3 truth = Vector3::Zero();
  AxisStats mc;
  AnalyticPrediction analytic;
  ComparisonReport comparison;
  int depth_axis = 0;  // axis with the largest analytic std
  std::size_t failures = 0;
};

namespace detail {

inline void require_some_success(const BatchResult& b) {
  if (b.outcomes.empty()) {
    throw Error(ErrorKind::DegenerateConfiguration, "all " + std::to_string(b.config.trials) + " trials failed");
  }
}

inline SweepResult run_sweep(const SweepSpec& spec, const RunOptions& opt,
                             const std::function<ScenarioConfig(double)>& make) {
  SweepResult r{spec, {}};
  for (double v : spec.values) {
    const BatchResult b = run_batch(make(v), opt);
    require_some_success(b);
    r.rows.push_back({v, summarize_batch(b)});
  }
  return r;
}

}  // namespace detail

/// Rotation sweep at the low pixel-noise floor, translation zero.
[[nodiscard]] inline SweepResult sim1_rotation(const ScenarioConfig& base, const RunOptions& opt = {}) {
  const SweepSpec spec{"rotation_deg", base.studies.sim1_rotation_deg};
  return detail::run_sweep(spec, opt, [&](double deg) {
    ScenarioConfig c = base;
    c.bias.reference = misalignment(deg, 0.0, c.studies.rotation_axis, c.studies.translation_axis);
    c.noise.sigma_px = c.studies.sim1_sigma_px;
    return c;
  });
}

/// Translation sweep at the low pixel-noise floor, rotation zero.
[[nodiscard]] inline SweepResult sim1_translation(const ScenarioConfig& base, const RunOptions& opt = {}) {
  const SweepSpec spec{"translation_mm", base.studies.sim1_translation_mm};
  return detail::run_sweep(spec, opt, [&](double mm) {
    ScenarioConfig c = base;
    c.bias.reference = misalignment(0.0, mm, c.studies.rotation_axis, c.studies.translation_axis);
    c.noise.sigma_px = c.studies.sim1_sigma_px;
    return c;
  });
}

/// Installation level x pixel noise grid.
[[nodiscard]] inline GridResult sim2_coupled_grid(const ScenarioConfig& base, const RunOptions& opt = {}) {
  GridResult g;
  g.levels = base.studies.sim2_levels;
  g.sigma_px = base.studies.sim2_sigma_px;
  for (const auto& name : g.levels) {
    std::vector<BatchSummary> row;
    for (double sigma : g.sigma_px) {
      ScenarioConfig c = with_level(base, level_preset(name));
      c.noise.sigma_px = sigma;
      const BatchResult b = run_batch(c, opt);
      detail::require_some_success(b);
      row.push_back(summarize_batch(b));
    }
    g.cells.push_back(std::move(row));
  }
  return g;
}

[[nodiscard]] inline ScenarioConfig sim3_config(const ScenarioConfig& base) {
  ScenarioConfig c = with_level(base, level_preset(base.studies.sim3_level));
  c.noise.sigma_px = base.studies.sim3_sigma_px;
  return c;
}

/// Per-axis Monte Carlo statistics against the first-order prediction at one
/// representative condition.
[[nodiscard]] inline Sim3Result sim3_analytic_vs_mc(const ScenarioConfig& base, const RunOptions& opt = {}) {
  const ScenarioConfig c = sim3_config(base);
  const BatchResult b = run_batch(c, opt);
  detail::require_some_success(b);
  const PreparedScenario s = prepare(c);
  Sim3Result r;
  r.level = base.studies.sim3_level;
  r.sigma_px = c.noise.sigma_px;
  r.truth = s.target_truth;
  r.mc = axis_stats(b, s.target_truth);
  try {
    r.analytic = analytic_prediction(s);
  } catch (const Error& e) {
    // Noise can let a few trials through where the noiseless geometry itself is degenerate.
    if (e.is_config_error()) throw;
    throw Error(ErrorKind::DegenerateConfiguration, std::string("first-order prediction: ") + e.what());
  }
  r.comparison = compare_analytic_mc(r.mc, r.analytic.covariance);
  Eigen::Index depth = 0;
  r.analytic.covariance.diagonal().maxCoeff(&depth);
  r.depth_axis = static_cast<int>(depth);
  r.failures = b.failures.size();
  return r;
}

}  // namespace biplanar
