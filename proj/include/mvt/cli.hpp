#pragma once

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mvt/errors.hpp"
#include "mvt/io.hpp"
#include "mvt/scenario.hpp"

namespace mvt {

inline constexpr const char* kToolName = "mvtsim";
inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

namespace detail {

inline nlohmann::json function_spec_to_json(const FunctionSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind;
  j["params"] = spec.params;
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [x, y] : spec.nodes) nodes.push_back({x, y});
  j["nodes"] = nodes;
  return j;
}

inline nlohmann::json config_to_json(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["name"] = cfg.name;
  if (cfg.initial.explicit_atoms) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& [x, w] : cfg.initial.atoms) atoms.push_back({x, w});
    j["initial"] = {{"atoms", atoms}};
  } else {
    j["initial"] = {{"density", cfg.initial.density}, {"atom_count", cfg.initial.atom_count}};
  }
  j["velocity"] = {{"is_kernel", cfg.velocity.is_kernel},
                   {"fn", function_spec_to_json(cfg.velocity.fn)}};
  j["gating"] = function_spec_to_json(cfg.gating);
  j["horizon"] = cfg.horizon;
  j["k_max"] = cfg.k_max;
  j["substep"] = cfg.substep;
  j["boundary_bisect_tol"] = cfg.boundary_bisect_tol;
  j["max_mode"] = cfg.max_mode;
  j["samples_per_interval"] = cfg.samples_per_interval;
  j["boundary_layer_ns"] = cfg.boundary_layer_ns;
  j["out_dir"] = cfg.out_dir;
  return j;
}

inline void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                           const nlohmann::json& payload) {
  nlohmann::json manifest;
  manifest["tool"] = kToolName;
  manifest["version"] = kToolVersion;
  manifest["command"] = command;
  manifest["config"] = payload;
  std::ofstream out = open_for_write(out_dir / "manifest.json");
  out << manifest.dump(2) << "\n";
}

inline ScenarioConfig load_scenario(const std::string& config_path, const std::string& builtin,
                                    const std::string& out_dir_override) {
  ScenarioConfig cfg;
  if (!builtin.empty()) {
    std::optional<ScenarioConfig> found = find_builtin_scenario(builtin);
    if (!found.has_value()) throw BadSpec("unknown builtin scenario '" + builtin + "'");
    cfg = *found;
  } else if (!config_path.empty()) {
    cfg = parse_config_file(config_path);
  } else {
    throw BadSpec("provide --config FILE or --scenario NAME");
  }
  if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
  return cfg;
}

}  // namespace detail

// Command-line driver. Exit codes: 0 success, 2 configuration error,
// 3 numerical failure.
inline int cli_dispatch(int argc, const char* const* argv) {
  CLI::App app{"particle simulator for transported and gated measures on [0,1]"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  std::string config_path;
  std::string builtin_name;
  std::string out_dir;

  auto add_scenario_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario config file");
    cmd->add_option("--scenario", builtin_name, "builtin scenario name");
    cmd->add_option("--out", out_dir, "output directory (overrides config out_dir)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run the Euler scheme, write trajectory CSV");
  add_scenario_options(simulate);

  CLI::App* converge = app.add_subcommand("converge", "dyadic refinement convergence table");
  add_scenario_options(converge);

  CLI::App* residual = app.add_subcommand("residual", "weak-formulation defect sweep per level");
  add_scenario_options(residual);

  CLI::App* boundary = app.add_subcommand("boundary-layer", "shrinking boundary-layer study");
  add_scenario_options(boundary);

  std::string measure_a;
  std::string measure_b;
  std::string flat_out;
  CLI::App* flat = app.add_subcommand("flat-metric", "flat distance between two measure CSVs");
  flat->add_option("file_a", measure_a, "first measure CSV")->required();
  flat->add_option("file_b", measure_b, "second measure CSV")->required();
  flat->add_option("--out", flat_out, "output directory for the manifest")->default_val("out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help() << "\n";
    return kExitConfigError;
  }

  try {
    if (simulate->parsed()) {
      ScenarioConfig cfg = detail::load_scenario(config_path, builtin_name, out_dir);
      ParticleMeasure nu0 = ingest_initial_measure(cfg.initial);
      VelocityModel model = build_velocity(cfg.velocity);
      GatingFunction f = build_gating(cfg.gating);
      Partition alpha = Partition::uniform(cfg.horizon, 1 << cfg.k_max);
      Trajectory traj =
          euler_solve(nu0, model, f, alpha, cfg.integrator(), cfg.samples_per_interval);
      std::filesystem::path dir = cfg.out_dir;
      write_trajectory_csv(dir / "trajectory.csv", traj);
      write_summary_csv(dir / "summary.csv", traj);
      detail::write_manifest(dir, "simulate", detail::config_to_json(cfg));
      std::cout << "wrote " << (dir / "trajectory.csv").string() << " ("
                << traj.times.size() << " slices, " << nu0.size() << " atoms)\n";
      std::cout << "end mass " << format_double(total_mass(traj.final())) << ", end tv "
                << format_double(tv_norm(traj.final())) << "\n";
    } else if (converge->parsed()) {
      ScenarioConfig cfg = detail::load_scenario(config_path, builtin_name, out_dir);
      if (cfg.k_max < 2) throw BadSpec("converge needs k_max >= 2");
      ParticleMeasure nu0 = ingest_initial_measure(cfg.initial);
      VelocityModel model = build_velocity(cfg.velocity);
      GatingFunction f = build_gating(cfg.gating);
      std::vector<ConvergenceRow> rows = convergence_table(
          nu0, model, f, cfg.horizon, cfg.k_max, cfg.integrator(), cfg.samples_per_interval);
      std::filesystem::path dir = cfg.out_dir;
      write_convergence_csv(dir / "convergence.csv", rows);
      detail::write_manifest(dir, "converge", detail::config_to_json(cfg));
      std::cout << "k,N_k,mesh,sup_flat_gap,ratio\n";
      for (const ConvergenceRow& r : rows) {
        std::cout << r.k << "," << r.n_intervals << "," << format_double(r.mesh) << ","
                  << format_double(r.sup_flat_gap) << "," << format_double(r.ratio) << "\n";
      }
    } else if (residual->parsed()) {
      ScenarioConfig cfg = detail::load_scenario(config_path, builtin_name, out_dir);
      ParticleMeasure nu0 = ingest_initial_measure(cfg.initial);
      VelocityModel model = build_velocity(cfg.velocity);
      GatingFunction f = build_gating(cfg.gating);
      std::vector<TestFunction> catalog = test_function_catalog(cfg.horizon, cfg.max_mode);
      std::vector<std::pair<std::string, std::vector<DefectRow>>> sweeps;
      for (int k = 1; k <= cfg.k_max; ++k) {
        Partition alpha = Partition::uniform(cfg.horizon, 1 << k);
        Trajectory traj =
            euler_solve(nu0, model, f, alpha, cfg.integrator(), cfg.samples_per_interval);
        sweeps.emplace_back(std::to_string(k), defect_sweep(traj, model, f, catalog));
      }
      std::filesystem::path dir = cfg.out_dir;
      write_residual_csv(dir / "residual.csv", sweeps);
      detail::write_manifest(dir, "residual", detail::config_to_json(cfg));
      for (const auto& [level, rows] : sweeps) {
        std::cout << "k=" << level << " max defect " << format_double(max_defect(rows)) << "\n";
      }
    } else if (boundary->parsed()) {
      ScenarioConfig cfg = detail::load_scenario(config_path, builtin_name, out_dir);
      BoundaryLayerReport report = run_boundary_layer_program(cfg);
      std::filesystem::path dir = cfg.out_dir;
      {
        std::ofstream levels = detail::open_for_write(dir / "boundary_layer_levels.csv");
        levels << "n,k,mesh,sup_flat_gap,end_mass\n";
        for (const BoundaryLayerEntry& e : report.entries) {
          for (const BoundaryLayerLevel& l : e.levels) {
            levels << e.n << "," << l.k << "," << format_double(l.mesh) << ","
                   << format_double(l.sup_flat_gap) << "," << format_double(l.end_mass) << "\n";
          }
        }
      }
      {
        std::ofstream summary = detail::open_for_write(dir / "boundary_layer_summary.csv");
        summary << "n,end_mass_finest,end_mass_extrapolated,max_defect_finest,gap_to_previous_n\n";
        for (const BoundaryLayerEntry& e : report.entries) {
          summary << e.n << "," << format_double(e.end_mass_finest) << ","
                  << format_double(e.end_mass_extrapolated) << ","
                  << format_double(e.max_defect_finest) << ","
                  << format_double(e.gap_to_previous_n) << "\n";
        }
      }
      detail::write_manifest(dir, "boundary-layer", detail::config_to_json(cfg));
      std::cout << "boundary-layer study (exploratory; gaps reported, no limit claimed)\n";
      std::cout << "n,end_mass_finest,end_mass_extrapolated,gap_to_previous_n\n";
      for (const BoundaryLayerEntry& e : report.entries) {
        std::cout << e.n << "," << format_double(e.end_mass_finest) << ","
                  << format_double(e.end_mass_extrapolated) << ","
                  << format_double(e.gap_to_previous_n) << "\n";
      }
    } else if (flat->parsed()) {
      ParticleMeasure a = read_measure_csv(measure_a);
      ParticleMeasure b = read_measure_csv(measure_b);
      ParticleMeasure diff = linear_combine(1.0, a, -1.0, b);
      FlatNormCertificate cert = flat_norm(diff);
      nlohmann::json out;
      out["value"] = cert.value;
      out["sup_part"] = cert.sup_part;
      out["lip_part"] = cert.lip_part;
      nlohmann::json witness = nlohmann::json::array();
      ParticleMeasure merged = diff.coalesced();
      for (std::size_t i = 0; i < cert.optimal_phi.size(); ++i) {
        witness.push_back({{"position", merged.atoms()[i].position}, {"phi", cert.optimal_phi[i]}});
      }
      out["optimal_phi"] = witness;
      std::cout << out.dump(2) << "\n";
      nlohmann::json manifest_cfg;
      manifest_cfg["file_a"] = measure_a;
      manifest_cfg["file_b"] = measure_b;
      manifest_cfg["measure_a"] = measure_to_json(a);
      manifest_cfg["measure_b"] = measure_to_json(b);
      detail::write_manifest(flat_out, "flat-metric", manifest_cfg);
    }
  } catch (const BadSpec& e) {
    std::cerr << kToolName << ": config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const InvalidParameter& e) {
    std::cerr << kToolName << ": config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    std::cerr << kToolName << ": numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  }
  return kExitOk;
}

}  // namespace mvt
