#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlkelvin/cli_io.hpp"
#include "nlkelvin/errors.hpp"
#include "nlkelvin/experiments.hpp"
#include "nlkelvin/local_ref.hpp"
#include "nlkelvin/operators.hpp"
#include "nlkelvin/pair_kernels.hpp"
#include "nlkelvin/state_solvers.hpp"

namespace nlkelvin {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Invocation {
  std::string command;
  RunConfig cfg;
  fs::path out_dir;
  bool dual = false;
  std::ostream* out = nullptr;
};

void write_json(const fs::path& path, const json& doc) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << doc.dump(2) << '\n';
}

void echo_config(const Invocation& inv) {
  std::ofstream f(inv.out_dir / "config.ini", std::ios::binary);
  if (!f) throw Error("cannot write the resolved config");
  f << inv.cfg.to_ini();
}

Discretization discretize(const RunConfig& cfg, double delta) {
  return Discretization::build(cfg.domain, cfg.mesh_width(delta), KernelSpec(cfg.family, delta, cfg.domain.dim));
}

json nullable(double v, bool present) { return present ? json(v) : json(nullptr); }

int run_solve(const Invocation& inv) {
  const RunConfig& cfg = inv.cfg;
  const Discretization disc = discretize(cfg, cfg.deltas().front());
  const SourceField f = make_source(disc.mesh, cfg.source);
  const DesignField kappa = make_design(cfg, disc.mesh);
  const StateSolution sol = inv.dual ? solve_kelvin(disc, kappa, f, cfg.scheme, cfg.solver)
                                     : solve_primal(disc, kappa, f, cfg.scheme, cfg.solver);
  const InfSupReport infsup = infsup_constant(disc.mesh, disc.pairs, cfg.solver);

  write_field_csv(sol.u, disc.mesh, inv.out_dir / "u.csv");
  double stability = 0.0;
  if (inv.dual) {
    VectorCellField flux = flux_recovery(*sol.q, disc.pairs, disc.mesh);
    flux.support = Support::Interior;
    write_field_csv(flux, disc.mesh, inv.out_dir / "flux.csv");
    stability = stability_check(sol, f, disc);
  }
  json doc;
  doc["command"] = inv.command;
  doc["delta"] = disc.kernel.delta();
  doc["h"] = disc.mesh.h();
  doc["I_primal"] = sol.energy_primal;
  doc["I_dual"] = nullable(sol.energy_dual, inv.dual);
  doc["gap"] = nullable(std::abs(sol.energy_dual + sol.energy_primal) / std::max(1.0, std::abs(sol.energy_primal)),
                        inv.dual);
  doc["residuals"] = {{"linear_solve", sol.residuals.linear_solve},
                      {"constraint", nullable(sol.residuals.constraint, inv.dual)}};
  doc["infsup"] = infsup.beta;
  doc["stability_ratio"] = nullable(stability, inv.dual);
  doc["iterations"] = sol.iterations;
  write_json(inv.out_dir / "summary.json", doc);
  *inv.out << "I_primal = " << sol.energy_primal << '\n';
  return 0;
}

int run_solve_local(const Invocation& inv) {
  const RunConfig& cfg = inv.cfg;
  const Discretization disc = discretize(cfg, cfg.deltas().front());
  const SourceField f = make_source(disc.mesh, cfg.source);
  const DesignField kappa = make_design(cfg, disc.mesh);
  LocalSolution sol = solve_local(disc.mesh, kappa, f, cfg.solver);
  write_field_csv(sol.u, disc.mesh, inv.out_dir / "u.csv");
  const double div_res = divergence_residual(sol.flux, f, disc.mesh);
  sol.flux.support = Support::Interior;
  write_field_csv(sol.flux, disc.mesh, inv.out_dir / "flux.csv");
  json doc;
  doc["command"] = inv.command;
  doc["h"] = disc.mesh.h();
  doc["I_loc_primal"] = sol.I_loc_primal;
  doc["I_loc_dual"] = sol.I_loc_dual;
  doc["residual"] = sol.residual;
  doc["divergence_residual"] = div_res;
  doc["iterations"] = sol.iterations;
  write_json(inv.out_dir / "summary.json", doc);
  *inv.out << "I_loc_primal = " << sol.I_loc_primal << '\n';
  return 0;
}

DesignField optimizer_start(const RunConfig& cfg, const Mesh& mesh) {
  if (cfg.init == "random") return DesignField::random(mesh, cfg.bounds, cfg.seed);
  return DesignField::uniform(mesh, cfg.bounds, cfg.bounds.gamma);
}

json history_json(const std::vector<double>& h) { return json(h); }

int run_optimize(const Invocation& inv) {
  const RunConfig& cfg = inv.cfg;
  if (cfg.scheme != AveragingScheme::Harmonic) throw ConfigError("material.scheme: design optimization needs harmonic");
  const Discretization disc = discretize(cfg, cfg.deltas().front());
  const SourceField f = make_source(disc.mesh, cfg.source);
  const DesignField start = optimizer_start(cfg, disc.mesh);
  const DesignResult r = optimize_design(disc, f, cfg.bounds, cfg.optimizer, &start);
  write_field_csv(r.kappa_opt, disc.mesh, inv.out_dir / "kappa.csv");
  VectorCellField flux = flux_recovery(r.flux_opt, disc.pairs, disc.mesh);
  flux.support = Support::Interior;
  write_field_csv(flux, disc.mesh, inv.out_dir / "flux.csv");
  json doc;
  doc["command"] = inv.command;
  doc["delta"] = disc.kernel.delta();
  doc["h"] = disc.mesh.h();
  doc["d_delta"] = r.d_value;
  doc["p_delta"] = r.p_value;
  doc["iters"] = r.iterations;
  doc["converged"] = r.converged;
  doc["volume_slack"] = r.volume_slack;
  doc["descent_history"] = history_json(r.descent_history);
  write_json(inv.out_dir / "summary.json", doc);
  *inv.out << "d_delta = " << r.d_value << (r.converged ? "" : " (not converged)") << '\n';
  return 0;
}

int run_optimize_local(const Invocation& inv) {
  const RunConfig& cfg = inv.cfg;
  const Discretization disc = discretize(cfg, cfg.deltas().front());
  const SourceField f = make_source(disc.mesh, cfg.source);
  const DesignField start = optimizer_start(cfg, disc.mesh);
  LocalDesignResult r = optimize_local_design(disc.mesh, f, cfg.bounds, cfg.optimizer, &start);
  write_field_csv(r.kappa, disc.mesh, inv.out_dir / "kappa.csv");
  r.solution.flux.support = Support::Interior;
  write_field_csv(r.solution.flux, disc.mesh, inv.out_dir / "flux.csv");
  json doc;
  doc["command"] = inv.command;
  doc["h"] = disc.mesh.h();
  doc["d_star"] = r.d_star;
  doc["iters"] = r.iterations;
  doc["converged"] = r.converged;
  doc["volume_slack"] = check_admissible(r.kappa, disc.mesh).volume_slack;
  doc["descent_history"] = history_json(r.descent_history);
  write_json(inv.out_dir / "summary.json", doc);
  *inv.out << "d_star = " << r.d_star << '\n';
  return 0;
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run_sweep(const Invocation& inv) {
  const RunConfig& cfg = inv.cfg;
  SweepConfig sc;
  sc.domain = cfg.domain;
  sc.deltas = cfg.deltas();
  if (cfg.h > 0.0) throw ConfigError("mesh.h: sweeps set h = delta / ratio; use mesh.ratio");
  sc.ratio = cfg.ratio;
  sc.family = cfg.family;
  sc.bounds = cfg.bounds;
  sc.source = cfg.source;
  sc.optimizer = cfg.optimizer;
  sc.solver = cfg.solver;
  validate_sweep(sc);
  const SweepResult result = delta_sweep(sc);

  std::ofstream csv(inv.out_dir / "sweep.csv", std::ios::binary);
  csv << "delta,h,d_delta,p_delta,d_star_local,infsup,stability_ratio,recovery_div_err,recovery_energy_err,"
         "poincare_const\n";
  std::vector<double> deltas, value_err, div_err, energy_err;
  for (const SweepRecord& r : result.records) {
    csv << csv_number(r.delta) << ',' << csv_number(r.h) << ',' << csv_number(r.d_delta) << ','
        << csv_number(r.p_delta) << ',' << csv_number(r.d_star_local) << ',' << csv_number(r.infsup) << ','
        << csv_number(r.stability_ratio) << ',' << csv_number(r.recovery_div_err) << ','
        << csv_number(r.recovery_energy_err) << ',' << csv_number(r.poincare_const) << '\n';
    deltas.push_back(r.delta);
    value_err.push_back(std::abs(r.d_delta - r.d_star_local) / std::abs(r.d_star_local));
    div_err.push_back(r.recovery_div_err);
    energy_err.push_back(r.recovery_energy_err);
  }
  csv.close();

  json doc;
  doc["command"] = inv.command;
  doc["records"] = result.records.size();
  doc["complete"] = result.complete;
  doc["failure"] = result.failure.empty() ? json(nullptr) : json(result.failure);
  doc["relative_value_error"] = value_err;
  doc["rates"] = {{"value_error", fitted_rate(deltas, value_err)},
                  {"recovery_div_err", fitted_rate(deltas, div_err)},
                  {"recovery_energy_err", fitted_rate(deltas, energy_err)}};
  write_json(inv.out_dir / "summary.json", doc);
  if (!result.complete) {
    *inv.out << "sweep aborted: " << result.failure << '\n';
    return static_cast<int>(ExitCode::SolverFailure);
  }
  *inv.out << "sweep: " << result.records.size() << " records\n";
  return 0;
}

int run_infsup(const Invocation& inv) {
  json rows = json::array();
  for (double delta : inv.cfg.deltas()) {
    const Discretization disc = discretize(inv.cfg, delta);
    const InfSupReport r = infsup_constant(disc.mesh, disc.pairs, inv.cfg.solver);
    rows.push_back({{"delta", delta},
                    {"h", disc.mesh.h()},
                    {"infsup", r.beta},
                    {"lambda_min", r.lambda_min},
                    {"poincare_const", r.poincare}});
    *inv.out << "delta = " << delta << " infsup = " << r.beta << '\n';
  }
  json doc;
  doc["command"] = inv.command;
  doc["results"] = rows;
  write_json(inv.out_dir / "summary.json", doc);
  return 0;
}

int run_validate(const Invocation& inv) {
  const RunConfig& cfg = inv.cfg;
  for (double delta : cfg.deltas()) {
    const Discretization disc = discretize(cfg, delta);
    require_admissible(make_design(cfg, disc.mesh), disc.mesh);
    if (check_normalization(disc.kernel) > 1e-6) throw ConfigError("kernel: normalization check failed");
  }
  *inv.out << "config ok\n";
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  kernels::configure_threads_from_env();

  CLI::App app{"Nonlocal optimal design for scalar diffusion", "nlkelvin"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  bool dual = false;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "Solve the nonlocal state problem at a fixed design"},
      {"solve-dual", "Solve the nonlocal flux (Kelvin) problem at a fixed design"},
      {"solve-local", "Solve the classical finite-difference problem"},
      {"optimize", "Optimize the nonlocal design"},
      {"optimize-local", "Optimize the classical design"},
      {"sweep", "Run a horizon sweep"},
      {"infsup", "Compute discrete inf-sup constants"},
      {"validate", "Check a configuration"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Configuration file");
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    if (name == "solve") sub->add_flag("--dual", dual, "Also solve for the optimal flux");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return static_cast<int>(ExitCode::Usage);
  }

  Invocation inv;
  inv.command = app.get_subcommands().front()->get_name();
  inv.dual = dual || inv.command == "solve-dual";
  inv.out = &out;
  if (config_path.empty()) {
    err << "error: " << inv.command << " needs --config <file>\n" << app.get_subcommands().front()->help();
    return static_cast<int>(ExitCode::Usage);
  }
  if (!fs::exists(config_path)) {
    err << "error: config file " << config_path << " not found\n";
    return static_cast<int>(ExitCode::Usage);
  }

  try {
    inv.cfg = load_config(config_path);
    if (!out_dir.empty()) inv.cfg.output_dir = out_dir;
    if (inv.command == "validate") return run_validate(inv);

    inv.out_dir = inv.cfg.output_dir;
    fs::create_directories(inv.out_dir);
    echo_config(inv);
    if (inv.command == "solve" || inv.command == "solve-dual") return run_solve(inv);
    if (inv.command == "solve-local") return run_solve_local(inv);
    if (inv.command == "optimize") return run_optimize(inv);
    if (inv.command == "optimize-local") return run_optimize_local(inv);
    if (inv.command == "sweep") return run_sweep(inv);
    return run_infsup(inv);
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return static_cast<int>(ExitCode::ValidationFailure);
  } catch (const StructuralError& e) {
    err << "structural error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::ValidationFailure);
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return static_cast<int>(ExitCode::SolverFailure);
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::SolverFailure);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::SolverFailure);
  }
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace nlkelvin
