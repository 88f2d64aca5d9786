// Command-line front end: eigenvalue tables, density evolution, measure
// series, fitted forms, and run comparison for the square-well systems.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qwell/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string system;
  std::string pair;
  std::string side;
  int times = 0;
  int grid = 0;
  std::string out;
  bool scaled = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "configuration file (key = value lines)");
  cmd->add_option("--system", f.system, "dswp or iswp")
      ->check(CLI::IsMember({"dswp", "iswp"}));
  cmd->add_option("--pair", f.pair, "ground or excited (dswp only)")
      ->check(CLI::IsMember({"ground", "excited"}));
  cmd->add_option("--side", f.side, "initial side, left or right")
      ->check(CLI::IsMember({"left", "right"}));
  cmd->add_option("--times", f.times, "number of time samples over one period");
  cmd->add_option("--grid", f.grid, "number of grid points for density output");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--scaled", f.scaled, "emit display-scaled density columns");
}

qwell::RunConfig build_config(const CommonFlags& f) {
  qwell::RunConfig cfg;
  if (!f.config_path.empty()) cfg = qwell::load_config(f.config_path);
  if (!f.system.empty())
    cfg.system = f.system == "dswp" ? qwell::SystemKind::dswp : qwell::SystemKind::iswp;
  if (!f.pair.empty())
    cfg.pair = f.pair == "ground" ? qwell::PairChoice::ground : qwell::PairChoice::excited;
  if (!f.side.empty())
    cfg.initial_side = f.side == "left" ? qwell::Side::left : qwell::Side::right;
  if (f.times > 0) cfg.n_times = f.times;
  if (f.grid > 0) cfg.n_grid = f.grid;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.scaled) cfg.display_scaled = true;
  cfg.validate();
  return cfg;
}

qwell::SuperpositionState build_state(const qwell::RunConfig& cfg) {
  return cfg.system == qwell::SystemKind::dswp
             ? qwell::make_superposition(cfg.dswp, cfg.constants, cfg.pair, cfg.initial_side)
             : qwell::make_superposition(cfg.iswp, cfg.constants, cfg.initial_side);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bound states, tunneling dynamics, and information measures "
               "in 1-D square wells"};
  app.require_subcommand(1);

  CommonFlags f;
  CLI::App* c_eigen = app.add_subcommand("eigen", "solve the bound-state spectrum");
  CLI::App* c_evolve = app.add_subcommand("evolve", "tabulate density evolution");
  CLI::App* c_measures = app.add_subcommand("measures", "time series of all measures");
  CLI::App* c_fit = app.add_subcommand("fit", "fitted quartic forms of S_T and I_T");
  CLI::App* c_run = app.add_subcommand("run", "full scenario with manifest");
  for (CLI::App* c : {c_eigen, c_evolve, c_measures, c_fit, c_run}) add_common(c, f);

  CLI::App* c_compare = app.add_subcommand("compare", "compare two completed runs");
  std::string dir_a, dir_b, cmp_out = "out";
  c_compare->add_option("--a", dir_a, "first run directory")->required();
  c_compare->add_option("--b", dir_b, "second run directory")->required();
  c_compare->add_option("--out", cmp_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  namespace fs = std::filesystem;
  try {
    if (c_compare->parsed()) {
      qwell::CompareReport rep = qwell::compare_systems(dir_a, dir_b);
      qwell::write_compare_csv(rep, cmp_out);
      std::printf("%s: tunneling signature %s\n", rep.a.label.c_str(),
                  rep.a.tunneling_signature ? "present" : "absent");
      std::printf("%s: tunneling signature %s\n", rep.b.label.c_str(),
                  rep.b.tunneling_signature ? "present" : "absent");
      std::printf("verdict: %s\n", rep.verdict.c_str());
      return 0;
    }

    qwell::RunConfig cfg = build_config(f);
    fs::create_directories(cfg.output_dir);

    if (c_run->parsed()) {
      qwell::RunManifest m = qwell::run_scenario(cfg);
      std::printf("run complete in %.2f s; %zu files in %s\n", m.wall_clock_s,
                  m.files.size(), cfg.output_dir.c_str());
      return 0;
    }
    if (c_eigen->parsed()) {
      qwell::pipedetail::write_eigen_csv(fs::path(cfg.output_dir) / "eigen.csv", cfg);
      std::printf("wrote %s/eigen.csv\n", cfg.output_dir.c_str());
      return 0;
    }

    qwell::SuperpositionState s = build_state(cfg);
    if (c_evolve->parsed()) {
      qwell::pipedetail::write_density_csv(fs::path(cfg.output_dir) / "densities_position.csv",
                                           s, qwell::Space::position, cfg);
      qwell::pipedetail::write_density_csv(fs::path(cfg.output_dir) / "densities_momentum.csv",
                                           s, qwell::Space::momentum, cfg);
      std::printf("wrote density tables to %s\n", cfg.output_dir.c_str());
      return 0;
    }

    qwell::SeriesOptions sopt;
    sopt.renyi_orders = cfg.renyi_orders;
    std::vector<qwell::MeasureRecord> series = qwell::measure_series(s, cfg.n_times, sopt);
    if (c_measures->parsed()) {
      qwell::pipedetail::write_measures_csv(fs::path(cfg.output_dir) / "measures.csv", series,
                                            cfg);
      std::printf("wrote %s/measures.csv\n", cfg.output_dir.c_str());
      return 0;
    }
    if (c_fit->parsed()) {
      qwell::MeasureFits fits = qwell::fit_measures(series);
      qwell::pipedetail::write_fit_csv(fs::path(cfg.output_dir) / "fit.csv", fits);
      std::printf("wrote %s/fit.csv\n", cfg.output_dir.c_str());
      return 0;
    }
  } catch (const qwell::BoundViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return 4;
  } catch (const qwell::ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qwell::ValidationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qwell::UnknownUnit& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qwell::IncompatibleSampling& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
