#pragma once

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"

#include "biplanar/error.hpp"
#include "biplanar/scenario.hpp"

namespace biplanar {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json vec_json(const Vector3& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Json pose_json(const PoseSpecDeg& p) {
  return Json{{"alpha_deg", p.alpha_deg}, {"beta_deg", p.beta_deg}, {"gamma_deg", p.gamma_deg},
              {"dx_mm", p.dx_mm},         {"dy_mm", p.dy_mm},       {"dz_mm", p.dz_mm}};
}

inline std::string_view convention_name(BiasConvention c) { return c == BiasConvention::forward ? "forward" : "inverse"; }

/// Typed field access with the dotted path in every error message.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, _] : j_.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        throw Error(ErrorKind::ParseError, "unknown key '" + field(k) + "'");
      }
    }
  }

  [[nodiscard]] bool has(std::string_view k) const { return j_.contains(k); }

  [[nodiscard]] Reader object(std::string_view k) const { return {at(k), field(k)}; }

  void number(std::string_view k, double& out) const {
    if (!has(k)) return;
    const Json& v = at(k);
    if (!v.is_number()) fail_field(k, "expected a number");
    out = v.get<double>();
  }

  template <class Int>
  void integer(std::string_view k, Int& out) const {
    if (!has(k)) return;
    const Json& v = at(k);
    if (!v.is_number_integer()) fail_field(k, "expected an integer");
    if (v.is_number_unsigned()) {
      out = static_cast<Int>(v.get<std::uint64_t>());
    } else {
      const auto x = v.get<std::int64_t>();
      if (x < 0 && std::is_unsigned_v<Int>) {
        throw Error(ErrorKind::ValidationError, "violated invariant: " + field(k) + " >= 0");
      }
      out = static_cast<Int>(x);
    }
  }

  void boolean(std::string_view k, bool& out) const {
    if (!has(k)) return;
    const Json& v = at(k);
    if (!v.is_boolean()) fail_field(k, "expected true or false");
    out = v.get<bool>();
  }

  void string(std::string_view k, std::string& out) const {
    if (!has(k)) return;
    const Json& v = at(k);
    if (!v.is_string()) fail_field(k, "expected a string");
    out = v.get<std::string>();
  }

  void vector3(std::string_view k, Vector3& out) const {
    if (!has(k)) return;
    out = to_vector3(at(k), field(k));
  }

  void numbers(std::string_view k, std::vector<double>& out) const {
    if (!has(k)) return;
    const Json& v = at(k);
    if (!v.is_array()) fail_field(k, "expected an array of numbers");
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number()) fail_field(k, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
  }

  void strings(std::string_view k, std::vector<std::string>& out) const {
    if (!has(k)) return;
    const Json& v = at(k);
    if (!v.is_array()) fail_field(k, "expected an array of strings");
    out.clear();
    for (const auto& x : v) {
      if (!x.is_string()) fail_field(k, "expected an array of strings");
      out.push_back(x.get<std::string>());
    }
  }

  void pose(std::string_view k, PoseSpecDeg& out) const {
    if (!has(k)) return;
    const Reader r = object(k);
    r.allow({"alpha_deg", "beta_deg", "gamma_deg", "dx_mm", "dy_mm", "dz_mm"});
    r.number("alpha_deg", out.alpha_deg);
    r.number("beta_deg", out.beta_deg);
    r.number("gamma_deg", out.gamma_deg);
    r.number("dx_mm", out.dx_mm);
    r.number("dy_mm", out.dy_mm);
    r.number("dz_mm", out.dz_mm);
  }

  [[nodiscard]] const Json& at(std::string_view k) const { return j_.at(std::string(k)); }
  [[nodiscard]] std::string field(std::string_view k) const { return path_.empty() ? std::string(k) : path_ + "." + std::string(k); }

  [[noreturn]] void fail(const std::string& msg) const { throw Error(ErrorKind::ParseError, "field '" + path_ + "': " + msg); }
  [[noreturn]] void fail_field(std::string_view k, const std::string& msg) const {
    throw Error(ErrorKind::ParseError, "field '" + field(k) + "': " + msg);
  }

  [[nodiscard]] static Vector3 to_vector3(const Json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
      throw Error(ErrorKind::ParseError, "field '" + where + "': expected [x, y, z]");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }

 private:
  const Json& j_;
  std::string path_;
};

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace detail

/// Full configuration, every field explicit; the inverse of config_from_json.
[[nodiscard]] inline Json config_to_json(const ScenarioConfig& c) {
  using detail::pose_json;
  using detail::vec_json;
  Json rig{{"source_object_mm", c.rig.source_object_mm},
           {"source_detector_mm", c.rig.source_detector_mm},
           {"pixel_pitch_mm", c.rig.pixel_pitch_mm},
           {"image_size_px", Json::array({c.rig.image_width_px, c.rig.image_height_px})},
           {"views", Json::array()}};
  for (const auto& v : c.rig.views) rig["views"].push_back(Json{{"name", v.name}, {"axis", vec_json(v.axis)}});
  if (c.rig.projection_matrices) {
    Json mats = Json::array();
    for (const auto& m : *c.rig.projection_matrices) {
      Json row = Json::array();
      for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 4; ++k) row.push_back(m(r, k));
      mats.push_back(row);
    }
    rig["projection_matrices"] = mats;
  }
  Json pts = Json::array();
  for (const auto& p : c.fiducials.points()) pts.push_back(vec_json(p));
  const auto& s = c.studies;
  return Json{
      {"schema_version", c.schema_version},
      {"seed", c.seed},
      {"stream", c.stream},
      {"trials", c.trials},
      {"rig", rig},
      {"fiducials", Json{{"name", c.fiducials.name()}, {"points_mm", pts}}},
      {"target_mm", vec_json(c.target)},
      {"bias", Json{{"reference", pose_json(c.bias.reference)},
                    {"mount", pose_json(c.bias.mount)},
                    {"use_small_angle", c.bias.use_small_angle},
                    {"convention", detail::convention_name(c.bias.convention)}}},
      {"noise", Json{{"sigma_px", c.noise.sigma_px}, {"sigma_fiducial_mm", c.sigma_fiducial_mm}}},
      {"chain", Json{{"l2_from_l1", pose_json(c.chain.l2_from_l1)}, {"tcp_from_l2", pose_json(c.chain.tcp_from_l2)}}},
      {"compensated_chain", c.compensated_chain},
      {"dlt_normalize", c.dlt_normalize},
      {"studies", Json{{"rotation_axis", vec_json(s.rotation_axis)},
                       {"translation_axis", vec_json(s.translation_axis)},
                       {"sim1_sigma_px", s.sim1_sigma_px},
                       {"sim1_rotation_deg", s.sim1_rotation_deg},
                       {"sim1_translation_mm", s.sim1_translation_mm},
                       {"sim2_levels", s.sim2_levels},
                       {"sim2_sigma_px", s.sim2_sigma_px},
                       {"sim3_level", s.sim3_level},
                       {"sim3_sigma_px", s.sim3_sigma_px}}},
  };
}

/// Strict reader: unknown keys are rejected, missing keys keep their defaults,
/// and the result is validated.
[[nodiscard]] inline ScenarioConfig config_from_json(const Json& j) {
  ScenarioConfig c = default_config();
  const detail::Reader r(j, "");
  r.allow({"schema_version", "seed", "stream", "trials", "rig", "fiducials", "target_mm", "bias", "noise", "chain",
           "compensated_chain", "dlt_normalize", "studies"});
  if (r.has("schema_version")) {
    int version = 0;
    r.integer("schema_version", version);
    if (version != kSchemaVersion) {
      throw Error(ErrorKind::SchemaVersionMismatch,
                  "schema_version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kSchemaVersion) + ")");
    }
  }
  r.integer("seed", c.seed);
  r.integer("stream", c.stream);
  r.integer("trials", c.trials);
  if (r.has("rig")) {
    const auto g = r.object("rig");
    g.allow({"source_object_mm", "source_detector_mm", "pixel_pitch_mm", "image_size_px", "views", "projection_matrices"});
    g.number("source_object_mm", c.rig.source_object_mm);
    g.number("source_detector_mm", c.rig.source_detector_mm);
    g.number("pixel_pitch_mm", c.rig.pixel_pitch_mm);
    if (g.has("image_size_px")) {
      const Json& v = g.at("image_size_px");
      if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
        g.fail_field("image_size_px", "expected [width, height]");
      }
      c.rig.image_width_px = v[0].get<int>();
      c.rig.image_height_px = v[1].get<int>();
    }
    if (g.has("views")) {
      const Json& v = g.at("views");
      if (!v.is_array() || v.size() != 2) g.fail_field("views", "expected exactly two views");
      for (std::size_t i = 0; i < 2; ++i) {
        const detail::Reader vr(v[i], g.field("views") + "[" + std::to_string(i) + "]");
        vr.allow({"name", "axis"});
        vr.string("name", c.rig.views[i].name);
        vr.vector3("axis", c.rig.views[i].axis);
      }
    }
    if (g.has("projection_matrices")) {
      const Json& v = g.at("projection_matrices");
      if (!v.is_array() || v.size() != 2) g.fail_field("projection_matrices", "expected two 12-element arrays");
      std::array<Matrix34, 2> mats;
      for (std::size_t i = 0; i < 2; ++i) {
        if (!v[i].is_array() || v[i].size() != 12) g.fail_field("projection_matrices", "expected two 12-element arrays");
        for (int k = 0; k < 12; ++k) {
          if (!v[i][k].is_number()) g.fail_field("projection_matrices", "expected numbers");
          mats[i](k / 4, k % 4) = v[i][k].get<double>();
        }
      }
      c.rig.projection_matrices = mats;
    }
  }
  if (r.has("fiducials")) {
    const auto f = r.object("fiducials");
    f.allow({"name", "points_mm"});
    std::string name = c.fiducials.name();
    f.string("name", name);
    std::vector<Vector3> pts = c.fiducials.points();
    if (f.has("points_mm")) {
      const Json& v = f.at("points_mm");
      if (!v.is_array()) f.fail_field("points_mm", "expected an array of [x, y, z]");
      pts.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        pts.push_back(detail::Reader::to_vector3(v[i], f.field("points_mm") + "[" + std::to_string(i) + "]"));
      }
    }
    c.fiducials = FiducialSet(name, std::move(pts));
  }
  r.vector3("target_mm", c.target);
  if (r.has("bias")) {
    const auto b = r.object("bias");
    b.allow({"reference", "mount", "use_small_angle", "convention"});
    b.pose("reference", c.bias.reference);
    b.pose("mount", c.bias.mount);
    b.boolean("use_small_angle", c.bias.use_small_angle);
    std::string conv(detail::convention_name(c.bias.convention));
    b.string("convention", conv);
    if (conv == "forward") {
      c.bias.convention = BiasConvention::forward;
    } else if (conv == "inverse") {
      c.bias.convention = BiasConvention::inverse;
    } else {
      b.fail_field("convention", "expected 'forward' or 'inverse'");
    }
  }
  if (r.has("noise")) {
    const auto n = r.object("noise");
    n.allow({"sigma_px", "sigma_fiducial_mm"});
    n.number("sigma_px", c.noise.sigma_px);
    n.number("sigma_fiducial_mm", c.sigma_fiducial_mm);
  }
  if (r.has("chain")) {
    const auto ch = r.object("chain");
    ch.allow({"l2_from_l1", "tcp_from_l2"});
    ch.pose("l2_from_l1", c.chain.l2_from_l1);
    ch.pose("tcp_from_l2", c.chain.tcp_from_l2);
  }
  r.boolean("compensated_chain", c.compensated_chain);
  r.boolean("dlt_normalize", c.dlt_normalize);
  if (r.has("studies")) {
    const auto s = r.object("studies");
    s.allow({"rotation_axis", "translation_axis", "sim1_sigma_px", "sim1_rotation_deg", "sim1_translation_mm",
             "sim2_levels", "sim2_sigma_px", "sim3_level", "sim3_sigma_px"});
    s.vector3("rotation_axis", c.studies.rotation_axis);
    s.vector3("translation_axis", c.studies.translation_axis);
    s.number("sim1_sigma_px", c.studies.sim1_sigma_px);
    s.numbers("sim1_rotation_deg", c.studies.sim1_rotation_deg);
    s.numbers("sim1_translation_mm", c.studies.sim1_translation_mm);
    s.strings("sim2_levels", c.studies.sim2_levels);
    s.numbers("sim2_sigma_px", c.studies.sim2_sigma_px);
    s.string("sim3_level", c.studies.sim3_level);
    s.number("sim3_sigma_px", c.studies.sim3_sigma_px);
  }
  validate(c);
  return c;
}

/// A config file, or a results sidecar whose embedded config (and study name)
/// reproduce the recorded run.
struct LoadedDocument {
  ScenarioConfig config;
  std::optional<std::string> study;
};

[[nodiscard]] inline LoadedDocument parse_document(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("results")) {
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
        j["schema_version"].get<int>() != kSchemaVersion) {
      throw Error(ErrorKind::SchemaVersionMismatch, "sidecar schema_version is not supported");
    }
    LoadedDocument d{config_from_json(j["config"]), std::nullopt};
    if (j.contains("study") && j["study"].is_string()) d.study = j["study"].get<std::string>();
    return d;
  }
  return {config_from_json(j), std::nullopt};
}

[[nodiscard]] inline LoadedDocument load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str());
}

[[nodiscard]] inline ScenarioConfig parse_config(const std::string& path) { return load_document(path).config; }

}  // namespace biplanar
