#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "biplanar/config_io.hpp"
#include "biplanar/studies.hpp"

namespace biplanar {

using Cell = std::variant<std::string, double>;

/// A rectangular result table with a fixed column order.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Shortest representation that round-trips, '.' decimal separator.
[[nodiscard]] inline std::string format_number(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, r.ptr};
}

[[nodiscard]] inline std::string format_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return format_number(std::get<double>(c));
}

[[nodiscard]] inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
    out += '\n';
  }
  return out;
}

/// Long ("tidy") layout: one line per non-key cell, keyed by the first column.
[[nodiscard]] inline std::string to_long_csv(const Table& t) {
  std::string out = "study," + t.columns.at(0) + ",variable,value\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 1; i < row.size(); ++i) {
      out += t.name + "," + format_cell(row[0]) + "," + t.columns[i] + "," + format_cell(row[i]) + "\n";
    }
  }
  return out;
}

[[nodiscard]] inline Json table_json(const Table& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json r = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (const auto* s = std::get_if<std::string>(&row[i])) {
        r[t.columns[i]] = *s;
      } else {
        r[t.columns[i]] = std::get<double>(row[i]);
      }
    }
    rows.push_back(r);
  }
  return rows;
}

inline Json stats_json(const std::optional<ErrorStats>& s) {
  if (!s) return nullptr;
  return Json{{"mean", s->mean}, {"std", s->std}, {"p95", s->p95}, {"worst", s->worst}, {"count", s->count}};
}

inline Json summary_json(const BatchSummary& s) {
  return Json{{"trials", s.trials},
              {"failures", s.failures},
              {"e_3d_mm", stats_json(s.e_3d)},
              {"e_tcp_mm", stats_json(s.e_tcp)},
              {"e_reproj_px", stats_json(s.e_reproj)}};
}

inline Json matrix_json(const Matrix3& m) {
  Json a = Json::array();
  for (int r = 0; r < 3; ++r) a.push_back(Json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return a;
}

/// A finished study: its table plus the per-condition raw statistics.
struct StudyOutput {
  std::string study;
  Table table;
  Json results;
};

[[nodiscard]] inline StudyOutput sweep_output(const SweepResult& r, std::string study) {
  const std::string key = r.spec.parameter == "rotation_deg" ? "angle_deg" : r.spec.parameter;
  StudyOutput o{study, {study, {key, "mean_e3d_mm", "mean_etcp_mm", "p95_etcp_mm"}, {}}, Json::array()};
  for (const auto& row : r.rows) {
    o.table.rows.push_back({row.value, row.summary.e_3d->mean, row.summary.e_tcp->mean, row.summary.e_tcp->p95});
    Json j = summary_json(row.summary);
    j[key] = row.value;
    o.results.push_back(j);
  }
  return o;
}

[[nodiscard]] inline StudyOutput grid_output(const GridResult& g) {
  StudyOutput o{"sim2", {"sim2", {"level"}, {}}, Json::array()};
  for (double s : g.sigma_px) o.table.columns.push_back("p95_etcp_mm_sigma_" + format_number(s) + "px");
  for (std::size_t i = 0; i < g.levels.size(); ++i) {
    std::vector<Cell> row{g.levels[i]};
    for (std::size_t k = 0; k < g.sigma_px.size(); ++k) {
      row.emplace_back(g.cells[i][k].e_tcp->p95);
      Json j = summary_json(g.cells[i][k]);
      j["level"] = g.levels[i];
      j["sigma_px"] = g.sigma_px[k];
      o.results.push_back(j);
    }
    o.table.rows.push_back(std::move(row));
  }
  return o;
}

[[nodiscard]] inline StudyOutput sim3_output(const Sim3Result& r) {
  static constexpr const char* kAxes[3] = {"x", "y", "z"};
  StudyOutput o{"sim3", {"sim3", {"axis", "mc_mean_mm", "ana_mean_mm", "mc_std_mm", "ana_std_mm", "std_ratio"}, {}}, {}};
  const Vector3 ana_std = r.analytic.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  for (int k = 0; k < 3; ++k) {
    o.table.rows.push_back({std::string(kAxes[k]), r.mc.mean(k), r.analytic.mean(k), r.mc.std(k), ana_std(k),
                            r.comparison.std_ratio(k)});
  }
  o.results = Json{{"level", r.level},
                   {"sigma_px", r.sigma_px},
                   {"truth_mm", detail::vec_json(r.truth)},
                   {"failures", r.failures},
                   {"mc", Json{{"count", r.mc.count},
                               {"mean_mm", detail::vec_json(r.mc.mean)},
                               {"std_mm", detail::vec_json(r.mc.std)},
                               {"covariance_mm2", matrix_json(r.mc.covariance)}}},
                   {"analytic", Json{{"mean_mm", detail::vec_json(r.analytic.mean)},
                                     {"std_mm", detail::vec_json(ana_std)},
                                     {"covariance_mm2", matrix_json(r.analytic.covariance)}}},
                   {"std_ratio", detail::vec_json(r.comparison.std_ratio)},
                   {"alignment_deg", r.comparison.alignment_deg},
                   {"analytic_underestimates", r.comparison.analytic_underestimates},
                   {"depth_axis", kAxes[r.depth_axis]},
                   {"table", table_json(o.table)}};
  return o;
}

[[nodiscard]] inline Json sidecar_json(const StudyOutput& o, const ScenarioConfig& config) {
  return Json{{"schema_version", kSchemaVersion},
              {"study", o.study},
              {"seed", config.seed},
              {"percentile", kPercentileConvention},
              {"config", config_to_json(config)},
              {"results", o.results}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path.string() + "'");
}

enum class OutputFormat { csv, json };

/// Writes <study>.csv, <study>_long.csv and <study>.json (CSV format) or only
/// the sidecar (JSON format). Returns the written paths.
inline std::vector<std::filesystem::path> emit_results(const StudyOutput& o, const ScenarioConfig& config,
                                                       OutputFormat format, const std::filesystem::path& dir) {
  if (o.table.rows.empty()) throw Error(ErrorKind::ValidationError, "violated invariant: result table is nonempty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  if (format == OutputFormat::csv) {
    written.push_back(dir / (o.study + ".csv"));
    write_text(written.back(), to_csv(o.table));
    written.push_back(dir / (o.study + "_long.csv"));
    write_text(written.back(), to_long_csv(o.table));
  }
  written.push_back(dir / (o.study + ".json"));
  write_text(written.back(), sidecar_json(o, config).dump(2) + "\n");
  return written;
}

}  // namespace biplanar
