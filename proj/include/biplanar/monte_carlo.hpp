#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "biplanar/dlt.hpp"
#include "biplanar/error.hpp"
#include "biplanar/geometry.hpp"
#include "biplanar/perturbation.hpp"
#include "biplanar/random.hpp"
#include "biplanar/scenario.hpp"
#include "biplanar/stats.hpp"
#include "biplanar/triangulation.hpp"

namespace biplanar {

struct TrialOutcome {
  std::size_t trial_index = 0;
  Vector3 q_hat = Vector3::Zero();
  Vector3 q_tcp_hat = Vector3::Zero();
  double e_3d = 0.0;     // mm
  double e_tcp = 0.0;    // mm
  double e_reproj = 0.0; // px, mean over both views' control points
  std::optional<ErrorKind> failure;

  [[nodiscard]] bool ok() const noexcept { return !failure.has_value(); }
};

struct TrialFailure {
  std::size_t trial_index;
  ErrorKind kind;
};

struct BatchResult {
  ScenarioConfig config;
  std::vector<TrialOutcome> outcomes;  // successful trials, in trial order
  std::vector<TrialFailure> failures;
  std::uint64_t seed = 0;
};

/// Test hook: may rewrite the solver-side control-point coordinates of a trial.
using TrialHook = std::function<void(std::size_t trial_index, std::vector<Vector3>& solver_points)>;

struct RunOptions {
  unsigned workers = 1;
  TrialHook hook;
};

/// Everything about a configuration that does not depend on the trial.
struct PreparedScenario {
  ScenarioConfig config;
  std::array<ProjectionMatrix, 2> rig;
  std::vector<Vector3> nominal;   // coordinates the solver is given
  std::vector<Vector3> physical;  // where the control points really are
  std::array<std::vector<Eigen::Vector2d>, 2> fiducial_px;
  Vector3 target_truth = Vector3::Zero();     // reference frame
  Vector3 target_physical = Vector3::Zero();  // imaged location
  std::array<Eigen::Vector2d, 2> target_px;
  ExecutionChain chain;
  InstallationBias bias;
  Vector3 tcp_truth = Vector3::Zero();
};

/// Under the compensated chain the target frame shares the translational
/// part of the control points' physical displacement, so only the rotation
/// survives in the reconstruction.
[[nodiscard]] inline PreparedScenario prepare(const ScenarioConfig& config) {
  PreparedScenario s;
  s.config = config;
  s.rig = build_rig(config);
  s.nominal = config.fiducials.points();
  const RigidTransform phys = physical_transform(config.bias.build());
  s.physical.reserve(s.nominal.size());
  for (const auto& p : s.nominal) s.physical.push_back(apply(phys, p));
  for (int v = 0; v < 2; ++v) {
    s.fiducial_px[v].reserve(s.physical.size());
    for (const auto& p : s.physical) s.fiducial_px[v].push_back(project_uv(s.rig[v], p));
  }
  s.target_truth = config.target;
  s.target_physical = config.compensated_chain ? Vector3(config.target + phys.translation()) : config.target;
  for (int v = 0; v < 2; ++v) s.target_px[v] = project_uv(s.rig[v], s.target_physical);
  s.chain = config.chain.build();
  s.bias = config.bias.build();
  s.tcp_truth = apply(s.chain.composed(), s.target_truth);
  return s;
}

namespace detail {

inline bool is_geometric(ErrorKind k) {
  switch (k) {
    case ErrorKind::DegenerateProjection:
    case ErrorKind::InsufficientCorrespondences:
    case ErrorKind::DegenerateConfiguration:
    case ErrorKind::RankDeficient:
    case ErrorKind::PointAtInfinity:
    case ErrorKind::WeakGeometry:
    case ErrorKind::IllConditioned:
      return true;
    default:
      return false;
  }
}

}  // namespace detail

/// One pass of bias -> projection -> noise -> DLT -> triangulation -> TCP.
/// Draw order per trial: view-1 control points (u, v), view-2 control
/// points, view-1 target, view-2 target, then control-point 3D noise.
[[nodiscard]] inline TrialOutcome run_trial(const PreparedScenario& s, std::size_t trial_index,
                                            const TrialHook& hook = {}) {
  const ScenarioConfig& c = s.config;
  NormalStream rng(c.seed, c.stream, trial_index);
  const std::size_t n = s.nominal.size();
  const PixelNoiseModel noise = c.noise;

  std::array<std::vector<Eigen::Vector2d>, 2> observed;
  for (int v = 0; v < 2; ++v) {
    observed[v].reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Pixel2H p = add_pixel_noise(Pixel2H(s.fiducial_px[v][i].x(), s.fiducial_px[v][i].y()), noise, rng);
      observed[v].emplace_back(p.u(), p.v());
    }
  }
  std::array<Pixel2H, 2> target_obs;
  for (int v = 0; v < 2; ++v) {
    target_obs[v] = add_pixel_noise(Pixel2H(s.target_px[v].x(), s.target_px[v].y()), noise, rng);
  }
  std::vector<Vector3> solver_points = s.nominal;
  if (c.sigma_fiducial_mm > 0.0) {
    for (auto& p : solver_points) {
      for (int k = 0; k < 3; ++k) p(k) += c.sigma_fiducial_mm * rng.next();
    }
  }
  if (hook) hook(trial_index, solver_points);

  TrialOutcome out;
  out.trial_index = trial_index;
  try {
    std::array<ProjectionMatrix, 2> est;
    double reproj = 0.0;
    for (int v = 0; v < 2; ++v) {
      const auto corr = make_correspondences(solver_points, observed[v]);
      est[v] = estimate_projection(corr, c.dlt_normalize);
      reproj += reprojection_error(est[v], corr);
    }
    const TriangulationResult tri = triangulate({target_obs[0], target_obs[1], est[0], est[1]});
    out.q_hat = tri.q_aim.euclidean();
    out.q_tcp_hat = map_to_tcp(Point3H(out.q_hat), s.chain, s.bias).euclidean();
    out.e_3d = (out.q_hat - s.target_truth).norm();
    out.e_tcp = (out.q_tcp_hat - s.tcp_truth).norm();
    out.e_reproj = reproj / 2.0;
  } catch (const Error& e) {
    if (!detail::is_geometric(e.kind())) throw;
    out.failure = e.kind();
  }
  return out;
}

[[nodiscard]] inline TrialOutcome run_trial(const ScenarioConfig& config, std::size_t trial_index) {
  validate(config);
  return run_trial(prepare(config), trial_index);
}

/// Trials fan out over `workers` threads; every trial owns its RNG stream,
/// so the result does not depend on the worker count or scheduling.
[[nodiscard]] inline BatchResult run_batch(const ScenarioConfig& config, const RunOptions& options = {}) {
  try {
    validate(config);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigInvalid, e.what());
  }
  const PreparedScenario s = prepare(config);
  const std::size_t n = config.trials;
  std::vector<TrialOutcome> all(n);

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) all[i] = run_trial(s, i, options.hook);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            all[i] = run_trial(s, i, options.hook);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  BatchResult r;
  r.config = config;
  r.seed = config.seed;
  r.outcomes.reserve(n);
  for (auto& o : all) {
    if (o.ok()) {
      r.outcomes.push_back(std::move(o));
    } else {
      r.failures.push_back({o.trial_index, *o.failure});
    }
  }
  return r;
}

struct BatchSummary {
  std::optional<ErrorStats> e_3d;
  std::optional<ErrorStats> e_tcp;
  std::optional<ErrorStats> e_reproj;
  std::size_t trials = 0;
  std::size_t failures = 0;
};

[[nodiscard]] inline std::vector<double> e3d_samples(const BatchResult& b) {
  std::vector<double> v;
  v.reserve(b.outcomes.size());
  for (const auto& o : b.outcomes) v.push_back(o.e_3d);
  return v;
}

[[nodiscard]] inline std::vector<double> etcp_samples(const BatchResult& b) {
  std::vector<double> v;
  v.reserve(b.outcomes.size());
  for (const auto& o : b.outcomes) v.push_back(o.e_tcp);
  return v;
}

[[nodiscard]] inline std::vector<double> ereproj_samples(const BatchResult& b) {
  std::vector<double> v;
  v.reserve(b.outcomes.size());
  for (const auto& o : b.outcomes) v.push_back(o.e_reproj);
  return v;
}

/// Failed trials are excluded from the statistics and counted separately.
[[nodiscard]] inline BatchSummary summarize_batch(const BatchResult& b) {
  BatchSummary s;
  s.trials = b.config.trials;
  s.failures = b.failures.size();
  if (!b.outcomes.empty()) {
    s.e_3d = summarize(e3d_samples(b));
    s.e_tcp = summarize(etcp_samples(b));
    s.e_reproj = summarize(ereproj_samples(b));
  }
  return s;
}

[[nodiscard]] inline std::vector<Vector3> reconstructed_points(const BatchResult& b) {
  std::vector<Vector3> v;
  v.reserve(b.outcomes.size());
  for (const auto& o : b.outcomes) v.push_back(o.q_hat);
  return v;
}

[[nodiscard]] inline AxisStats axis_stats(const BatchResult& b, const Vector3& truth) {
  return axis_stats(reconstructed_points(b), truth);
}

}  // namespace biplanar
