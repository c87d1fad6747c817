#pragma once

#include <vector>

#include "biplanar/dlt.hpp"
#include "biplanar/geometry.hpp"
#include "biplanar/random.hpp"

namespace biplanar {

/// Which side of the nominal/physical mismatch the reference bias sits on.
///   forward: physical control points sit at T_err1 * nominal.
///   inverse: nominal coordinates are T_err1 * physical, i.e. physical = T_err1^-1 * nominal.
enum class BiasConvention { forward, inverse };

struct InstallationBias {
  SmallAngleSpec reference_bias;  // T_err1: connector <-> reference structure
  SmallAngleSpec mount_bias;      // T_err2: connector <-> end effector
  bool use_small_angle = false;
  BiasConvention convention = BiasConvention::forward;

  [[nodiscard]] bool is_finite() const noexcept { return reference_bias.is_finite() && mount_bias.is_finite(); }
  bool operator==(const InstallationBias&) const = default;
};

struct PixelNoiseModel {
  double sigma_px = 0.0;
  bool operator==(const PixelNoiseModel&) const = default;
};

struct ExecutionChain {
  RigidTransform l2_from_l1;   // T_L2^L1
  RigidTransform tcp_from_l2;  // T_tcp^L2

  [[nodiscard]] bool is_rigid() const { return l2_from_l1.is_rigid() && tcp_from_l2.is_rigid(); }
  [[nodiscard]] RigidTransform composed() const { return tcp_from_l2 * l2_from_l1; }
};

[[nodiscard]] inline RigidTransform build_transform(const SmallAngleSpec& spec, bool use_small_angle) {
  return use_small_angle ? small_angle_transform(spec) : exact_transform(spec);
}

/// T_err1 from the reference spec.
[[nodiscard]] inline RigidTransform reference_transform(const InstallationBias& bias) {
  return build_transform(bias.reference_bias, bias.use_small_angle);
}

/// T_err2 from the mount spec.
[[nodiscard]] inline RigidTransform mount_transform(const InstallationBias& bias) {
  return build_transform(bias.mount_bias, bias.use_small_angle);
}

/// Map from nominal control-point coordinates to their physical location.
[[nodiscard]] inline RigidTransform physical_transform(const InstallationBias& bias) {
  const RigidTransform t = reference_transform(bias);
  return bias.convention == BiasConvention::forward ? t : t.inverse();
}

[[nodiscard]] inline FiducialSet bias_control_points(const FiducialSet& fiducials, const InstallationBias& bias) {
  const RigidTransform t = physical_transform(bias);
  std::vector<Vector3> out;
  out.reserve(fiducials.size());
  for (const auto& p : fiducials.points()) out.push_back(apply(t, p));
  return {fiducials.name(), std::move(out)};
}

[[nodiscard]] inline Pixel2H add_pixel_noise(const Pixel2H& p, const PixelNoiseModel& model, NormalStream& stream) {
  const Pixel2H n = p.normalized();
  const double du = stream.next();
  const double dv = stream.next();
  return {n.u() + model.sigma_px * du, n.v() + model.sigma_px * dv, n.w()};
}

/// T_tcp^L2 * T_L2^L1 * T_err2 * q_L1.
[[nodiscard]] inline Point3H map_to_tcp(const Point3H& q_l1, const ExecutionChain& chain, const InstallationBias& bias) {
  return apply(chain.composed() * mount_transform(bias), q_l1);
}

}  // namespace biplanar
