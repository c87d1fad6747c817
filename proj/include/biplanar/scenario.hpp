#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biplanar/dlt.hpp"
#include "biplanar/error.hpp"
#include "biplanar/geometry.hpp"
#include "biplanar/perturbation.hpp"

namespace biplanar {

inline constexpr int kSchemaVersion = 1;

/// A view looks along `axis` (source towards detector) at the reference origin.
struct ViewSpec {
  std::string name;
  Vector3 axis;
  bool operator==(const ViewSpec&) const = default;
};

struct RigGeometry {
  double source_object_mm = 700.0;
  double source_detector_mm = 1000.0;
  double pixel_pitch_mm = 0.2;
  int image_width_px = 2048;
  int image_height_px = 2048;
  std::array<ViewSpec, 2> views{ViewSpec{"AP", Vector3(0.0, 1.0, 0.0)}, ViewSpec{"LAT", Vector3(1.0, 0.0, 0.0)}};
  /// When set, these ground-truth matrices replace the generated ones.
  std::optional<std::array<Matrix34, 2>> projection_matrices;

  bool operator==(const RigGeometry& o) const {
    return source_object_mm == o.source_object_mm && source_detector_mm == o.source_detector_mm &&
           pixel_pitch_mm == o.pixel_pitch_mm && image_width_px == o.image_width_px &&
           image_height_px == o.image_height_px && views == o.views &&
           projection_matrices.has_value() == o.projection_matrices.has_value() &&
           (!projection_matrices || ((*projection_matrices)[0] == (*o.projection_matrices)[0] &&
                                     (*projection_matrices)[1] == (*o.projection_matrices)[1]));
  }
};

/// Configuration-side pose perturbation: degrees and mm, exactly as written
/// in config files. Converted to radians only when a transform is built.
struct PoseSpecDeg {
  double alpha_deg = 0.0;
  double beta_deg = 0.0;
  double gamma_deg = 0.0;
  double dx_mm = 0.0;
  double dy_mm = 0.0;
  double dz_mm = 0.0;

  [[nodiscard]] SmallAngleSpec radians() const {
    return {deg_to_rad(alpha_deg), deg_to_rad(beta_deg), deg_to_rad(gamma_deg), dx_mm, dy_mm, dz_mm};
  }
  [[nodiscard]] bool is_finite() const { return radians().is_finite(); }
  bool operator==(const PoseSpecDeg&) const = default;
};

struct BiasConfig {
  PoseSpecDeg reference;
  PoseSpecDeg mount;
  bool use_small_angle = false;
  BiasConvention convention = BiasConvention::forward;

  [[nodiscard]] InstallationBias build() const {
    return {reference.radians(), mount.radians(), use_small_angle, convention};
  }
  bool operator==(const BiasConfig&) const = default;
};

/// Rigid links of the execution chain (exact constructor).
struct ChainSpec {
  PoseSpecDeg l2_from_l1{0.0, 0.0, 90.0, 0.0, 0.0, 250.0};
  PoseSpecDeg tcp_from_l2{180.0, 0.0, 0.0, 0.0, 0.0, 120.0};

  [[nodiscard]] ExecutionChain build() const {
    return {exact_transform(l2_from_l1.radians()), exact_transform(tcp_from_l2.radians())};
  }
  bool operator==(const ChainSpec&) const = default;
};

/// Installation misalignment levels: rotation about the study rotation axis,
/// translation along the study translation axis.
struct LevelPreset {
  std::string_view name;
  double rotation_deg;
  double translation_mm;
};

inline constexpr std::array<LevelPreset, 3> kLevelPresets{{
    {"L0", 0.0, 0.0},
    {"L1", 1.0, 2.0},
    {"L2", 2.0, 5.0},
}};

[[nodiscard]] inline const LevelPreset& level_preset(std::string_view name) {
  for (const auto& l : kLevelPresets) {
    if (l.name == name) return l;
  }
  throw Error(ErrorKind::ValidationError, "unknown installation level '" + std::string(name) + "'");
}

struct StudySettings {
  Vector3 rotation_axis{0.0, 0.0, 1.0};
  Vector3 translation_axis{1.0, 0.0, 0.0};
  double sim1_sigma_px = 0.05;
  std::vector<double> sim1_rotation_deg{0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> sim1_translation_mm{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<std::string> sim2_levels{"L0", "L1", "L2"};
  std::vector<double> sim2_sigma_px{0.0, 2.0, 5.0};
  std::string sim3_level = "L0";
  double sim3_sigma_px = 2.0;
  bool operator==(const StudySettings&) const = default;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 1;
  std::uint32_t stream = 0;
  std::size_t trials = 2000;
  RigGeometry rig;
  FiducialSet fiducials;
  Vector3 target{100.0, 0.0, 0.0};
  BiasConfig bias;
  PixelNoiseModel noise;
  double sigma_fiducial_mm = 0.0;
  ChainSpec chain;
  /// Translation of the reference structure carries the target frame with it.
  bool compensated_chain = true;
  bool dlt_normalize = true;
  StudySettings studies;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Ten non-coplanar control points inside a 60 mm cube centred on the reference origin.
[[nodiscard]] inline FiducialSet default_fiducials() {
  return {"cube60-10",
          {
              {-30.0, -30.0, -30.0},
              {30.0, -30.0, -30.0},
              {-30.0, 30.0, -30.0},
              {30.0, 30.0, 30.0},
              {-30.0, -30.0, 30.0},
              {30.0, -30.0, 30.0},
              {-30.0, 30.0, 30.0},
              {0.0, 0.0, 0.0},
              {15.0, -20.0, 25.0},
              {-25.0, 10.0, -15.0},
          }};
}

[[nodiscard]] inline ScenarioConfig default_config() {
  ScenarioConfig c;
  c.fiducials = default_fiducials();
  return c;
}

/// Rotation of `rotation_deg` about `axis` split into Euler components, plus
/// `translation_mm` along `translation_axis`.
[[nodiscard]] inline PoseSpecDeg misalignment(double rotation_deg, double translation_mm, const Vector3& rotation_axis,
                                              const Vector3& translation_axis) {
  const Vector3 r = rotation_deg * rotation_axis.normalized();
  const Vector3 t = translation_mm * translation_axis.normalized();
  return {r.x(), r.y(), r.z(), t.x(), t.y(), t.z()};
}

[[nodiscard]] inline ScenarioConfig with_level(ScenarioConfig c, const LevelPreset& level) {
  c.bias.reference =
      misalignment(level.rotation_deg, level.translation_mm, c.studies.rotation_axis, c.studies.translation_axis);
  return c;
}

/// Pinhole matrix K [R | -R C] for a source at -source_object * axis.
[[nodiscard]] inline ProjectionMatrix generate_view(const RigGeometry& rig, const ViewSpec& view) {
  const Vector3 fwd = view.axis.normalized();
  Vector3 down(0.0, 0.0, -1.0);
  if (std::abs(fwd.dot(down)) > 0.99) down = Vector3(0.0, -1.0, 0.0);
  const Vector3 right = down.cross(fwd).normalized();
  down = fwd.cross(right);
  Matrix3 r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = fwd.transpose();
  const Vector3 centre = -rig.source_object_mm * fwd;
  const double f = rig.source_detector_mm / rig.pixel_pitch_mm;
  Matrix3 k;
  k << f, 0.0, rig.image_width_px / 2.0, 0.0, f, rig.image_height_px / 2.0, 0.0, 0.0, 1.0;
  Matrix34 rt;
  rt.leftCols<3>() = r;
  rt.col(3) = -r * centre;
  return ProjectionMatrix(Matrix34(k * rt));
}

/// Ground-truth matrices in the canonical gauge at the fiducial centroid.
[[nodiscard]] inline std::array<ProjectionMatrix, 2> build_rig(const ScenarioConfig& c) {
  const Vector3 ref = c.fiducials.centroid();
  if (c.rig.projection_matrices) {
    return {ProjectionMatrix((*c.rig.projection_matrices)[0]).canonical(ref),
            ProjectionMatrix((*c.rig.projection_matrices)[1]).canonical(ref)};
  }
  return {generate_view(c.rig, c.rig.views[0]).canonical(ref), generate_view(c.rig, c.rig.views[1]).canonical(ref)};
}

namespace detail {

inline void require(bool ok, const std::string& invariant) {
  if (!ok) throw Error(ErrorKind::ValidationError, "violated invariant: " + invariant);
}

inline bool finite(const Vector3& v) { return v.allFinite(); }

inline bool strictly_increasing(const std::vector<double>& v) {
  if (v.size() < 2) return false;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

}  // namespace detail

/// Throws ValidationError naming the first violated invariant.
inline void validate(const ScenarioConfig& c) {
  using detail::require;
  require(c.schema_version == kSchemaVersion, "schema_version == 1");
  require(c.trials >= 1, "trials >= 1");
  require(std::isfinite(c.noise.sigma_px) && c.noise.sigma_px >= 0.0, "noise.sigma_px >= 0");
  require(std::isfinite(c.sigma_fiducial_mm) && c.sigma_fiducial_mm >= 0.0, "noise.sigma_fiducial_mm >= 0");
  require(c.bias.reference.is_finite() && c.bias.mount.is_finite(), "bias specs finite");
  require(c.chain.l2_from_l1.is_finite() && c.chain.tcp_from_l2.is_finite(), "chain specs finite");
  require(c.chain.build().is_rigid(), "execution chain rigid");
  require(detail::finite(c.target), "target_mm finite");
  const auto& rig = c.rig;
  require(rig.source_object_mm > 0.0, "rig.source_object_mm > 0");
  require(rig.source_detector_mm > rig.source_object_mm, "rig.source_detector_mm > rig.source_object_mm");
  require(rig.pixel_pitch_mm > 0.0, "rig.pixel_pitch_mm > 0");
  require(rig.image_width_px > 0 && rig.image_height_px > 0, "rig.image_size_px > 0");
  for (const auto& v : rig.views) require(detail::finite(v.axis) && v.axis.norm() > 0.0, "rig view axis nonzero");
  require(rig.views[0].axis.normalized().cross(rig.views[1].axis.normalized()).norm() > 1e-6,
          "rig views not parallel");
  try {
    c.fiducials.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ValidationError, std::string("violated invariant: fiducials (") + e.what() + ")");
  }
  for (const auto& a : build_rig(c)) require(a.is_rank3(), "projection matrices rank 3");
  const auto& s = c.studies;
  require(detail::finite(s.rotation_axis) && s.rotation_axis.norm() > 0.0, "studies.rotation_axis nonzero");
  require(detail::finite(s.translation_axis) && s.translation_axis.norm() > 0.0, "studies.translation_axis nonzero");
  require(s.sim1_sigma_px >= 0.0 && s.sim3_sigma_px >= 0.0, "studies sigma_px >= 0");
  require(detail::strictly_increasing(s.sim1_rotation_deg), "studies.sim1_rotation_deg has >= 2 strictly increasing values");
  require(detail::strictly_increasing(s.sim1_translation_mm),
          "studies.sim1_translation_mm has >= 2 strictly increasing values");
  require(detail::strictly_increasing(s.sim2_sigma_px), "studies.sim2_sigma_px has >= 2 strictly increasing values");
  require(!s.sim2_levels.empty(), "studies.sim2_levels nonempty");
  for (const auto& l : s.sim2_levels) (void)level_preset(l);
  (void)level_preset(s.sim3_level);
}

}  // namespace biplanar
