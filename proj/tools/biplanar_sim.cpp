// Batch runner for the canned simulation studies.
//
//   biplanar_sim sim1-rot --trials 500 --out-dir out
//   biplanar_sim run out/sim2.json          # replay a recorded run
//   biplanar_sim defaults > my.json
//
// Exit codes: 0 success, 2 configuration error, 3 every trial of a batch
// failed on degenerate geometry, 1 anything else.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "biplanar.hpp"

namespace {

using namespace biplanar;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> config_path;
  std::string out_dir;
  std::string format = "csv";
  unsigned workers = 1;
};

ScenarioConfig load_base(const Globals& g, const std::optional<std::string>& path) {
  ScenarioConfig c = path ? parse_config(*path) : default_config();
  if (g.seed) c.seed = *g.seed;
  if (g.trials) c.trials = *g.trials;
  validate(c);
  return c;
}

StudyOutput batch_output(const ScenarioConfig& c, const RunOptions& opt) {
  const BatchResult b = run_batch(c, opt);
  const BatchSummary s = summarize_batch(b);
  if (!s.e_3d) throw Error(ErrorKind::DegenerateConfiguration, "all " + std::to_string(c.trials) + " trials failed");
  StudyOutput o{"batch", {"batch", {"metric", "mean", "std", "p95", "worst", "count"}, {}}, summary_json(s)};
  auto row = [&](const char* name, const ErrorStats& e) {
    o.table.rows.push_back({std::string(name), e.mean, e.std, e.p95, e.worst, static_cast<double>(e.count)});
  };
  row("e_3d_mm", *s.e_3d);
  row("e_tcp_mm", *s.e_tcp);
  row("e_reproj_px", *s.e_reproj);
  return o;
}

StudyOutput run_study(const std::string& study, const ScenarioConfig& c, const RunOptions& opt) {
  if (study == "sim1_rotation") return sweep_output(sim1_rotation(c, opt), study);
  if (study == "sim1_translation") return sweep_output(sim1_translation(c, opt), study);
  if (study == "sim2") return grid_output(sim2_coupled_grid(c, opt));
  if (study == "sim3") return sim3_output(sim3_analytic_vs_mc(c, opt));
  if (study == "batch") return batch_output(c, opt);
  throw Error(ErrorKind::ValidationError, "unknown study '" + study + "'");
}

void emit(const StudyOutput& o, const ScenarioConfig& c, const Globals& g) {
  const OutputFormat fmt = g.format == "json" ? OutputFormat::json : OutputFormat::csv;
  if (g.out_dir.empty()) {
    std::cout << (fmt == OutputFormat::csv ? to_csv(o.table) : sidecar_json(o, c).dump(2) + "\n");
    return;
  }
  for (const auto& p : emit_results(o, c, fmt, g.out_dir)) std::cerr << "wrote " << p.string() << "\n";
}

int exit_code(const Error& e) {
  if (e.is_config_error()) return 2;
  if (e.kind() == ErrorKind::DegenerateConfiguration) return 3;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and first-order error studies for biplanar DLT navigation"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Globals g;
  app.add_option("--seed", g.seed, "override the configured seed");
  app.add_option("--trials", g.trials, "override trials per configuration");
  app.add_option("--out-dir", g.out_dir, "write CSV/JSON files here instead of printing");
  app.add_option("--format", g.format, "csv (table + long table + sidecar) or json (sidecar only)")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", g.workers, "worker threads per batch")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config_path, "scenario file (defaults are used otherwise)");

  struct Canned {
    const char* command;
    const char* study;
    const char* help;
  };
  static constexpr Canned kCanned[] = {
      {"sim1-rot", "sim1_rotation", "rotation sweep at the low noise floor"},
      {"sim1-trans", "sim1_translation", "translation sweep at the low noise floor"},
      {"sim2", "sim2", "installation level x pixel noise grid (P95 of e_tcp)"},
      {"sim3", "sim3", "first-order prediction vs Monte Carlo, per axis"},
  };
  std::string selected_study;
  for (const auto& c : kCanned) {
    app.add_subcommand(c.command, c.help)->callback([&selected_study, study = c.study] { selected_study = study; });
  }

  std::string run_path;
  std::optional<std::string> run_study_name;
  auto* run = app.add_subcommand("run", "run a scenario file or replay a results sidecar");
  run->add_option("config", run_path, "config or sidecar JSON")->required();
  run->add_option("--study", run_study_name, "sim1_rotation | sim1_translation | sim2 | sim3 | batch");

  auto* defaults = app.add_subcommand("defaults", "print the full default configuration");
  auto* verify = app.add_subcommand("verify", "run the invariant self-check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const RunOptions opt{g.workers, {}};
    if (defaults->parsed()) {
      std::cout << config_to_json(default_config()).dump(2) << "\n";
      return 0;
    }
    if (verify->parsed()) {
      bool all = true;
      for (const auto& r : verify_invariants(g.seed.value_or(1))) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
        all = all && r.passed;
      }
      return all ? 0 : 1;
    }
    if (run->parsed()) {
      const LoadedDocument doc = load_document(run_path);
      ScenarioConfig c = doc.config;
      if (g.seed) c.seed = *g.seed;
      if (g.trials) c.trials = *g.trials;
      validate(c);
      const std::string study = run_study_name.value_or(doc.study.value_or("batch"));
      emit(run_study(study, c, opt), c, g);
      return 0;
    }
    const ScenarioConfig c = load_base(g, g.config_path);
    emit(run_study(selected_study, c, opt), c, g);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
