#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fvgp/config.hpp"
#include "fvgp/harness.hpp"
#include "fvgp/io.hpp"
#include "fvgp/vorticity.hpp"

namespace fs = std::filesystem;
using namespace fvgp;

namespace {

enum Exit { Ok = 0, BadInput = 1, Numerical = 2 };

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw InputError("cannot open " + p.string() + " for writing");
  return os;
}

std::string step_tag(std::size_t n) {
  std::ostringstream os;
  os << std::setw(6) << std::setfill('0') << n;
  return os.str();
}

int cmd_run(const std::string& config_path, const std::string& output_override) {
  const auto cfg = load_run_config(config_path);
  const auto base = fs::path(config_path).parent_path().string();
  const auto mesh = resolve_mesh(cfg.mesh, base);
  const auto scenario = scenario_from_config(cfg, mesh);
  const fs::path out = output_override.empty() ? fs::path(cfg.output_dir) : fs::path(output_override);
  fs::create_directories(out);

  auto diag = open_out(out / "diagnostics.csv");
  write_diagnostics_header(diag);
  RunObserver observer;
  observer.on_record = [&](const DiagnosticRecord& r) { write_diagnostics_row(diag, r); };
  observer.on_snapshot = [&](const Snapshot& s) {
    export_vtk(*mesh, {{"U", s.state}, {"omega", pseudo_vorticity(s.state)}},
               (out / ("snapshot_" + step_tag(s.n) + ".vtk")).string());
  };

  const SplittingIntegrator integrator(mesh, make_potential(scenario.potential), scenario.config);
  const auto result = run_simulation(integrator, initial_state(scenario), observer);
  diag.close();

  const auto& u = result.final_state;
  const auto omega = pseudo_vorticity(u);
  export_vtk(*mesh, {{"U", u}, {"omega", omega}}, (out / "final.vtk").string());
  auto state = open_out(out / "final_state.csv");
  write_grid_function_csv(u, state);
  const auto marks = detect_vortices(omega, cfg.vortex_threshold);
  auto vort = open_out(out / "vortices.csv");
  write_vortex_csv(marks, vort);

  const auto& last = result.diagnostics.records.back();
  std::cout << "steps " << last.n << " t " << to_exact_string(last.t) << " mass " << to_exact_string(last.mass)
            << " vortices " << marks.size() << " -> " << out.string() << '\n';
  return Ok;
}

Scenario named_scenario(const std::string& name, const std::string& mesh_spec, double omega) {
  if (name == "stirred-disk" || name == "paper-disk") return stirred_disk_scenario(resolve_mesh(mesh_spec.empty() ? "builtin:disk" : mesh_spec), omega);
  if (name == "square-eigenmode") {
    const auto mesh = resolve_mesh(mesh_spec.empty() ? "builtin:square:32" : mesh_spec);
    double side = 0.0;
    for (const auto& p : mesh->nodes()) side = std::max({side, p.x, p.y});
    return square_eigenmode_scenario(mesh, side);
  }
  throw InputError("unknown scenario '" + name + "'");
}

Scheme parse_scheme(const std::string& s) {
  if (s == "lie") return Scheme::Lie;
  if (s == "strang") return Scheme::Strang;
  throw InputError("unknown scheme '" + s + "'");
}

int cmd_order(const std::string& scenario_name, const std::string& mesh_spec, double dt, double T,
              const std::string& scheme, double omega, const std::string& output) {
  auto s = named_scenario(scenario_name, mesh_spec, omega);
  s.config.scheme = parse_scheme(scheme);
  s.config.cfl = CflPolicy::Off;
  const auto r = time_order_estimate(s, dt, T);
  write_order_header(std::cout);
  write_order_row(std::cout, r);
  if (!output.empty()) {
    auto os = open_out(output);
    write_order_header(os);
    write_order_row(os, r);
  }
  return Ok;
}

int cmd_space_order(const std::string& scenario_name, const std::vector<std::size_t>& ns, double side, double tau,
                    double T, bool fixed_tau) {
  if (scenario_name != "square-eigenmode")
    throw InputError("scenario '" + scenario_name + "' has no closed-form reference");
  std::vector<MeshPtr> family;
  for (auto n : ns) family.push_back(generate_uniform_rectangle_mesh(n, n, side, side));
  if (family.empty()) throw InputError("need >= 2 resolutions");
  auto s = square_eigenmode_scenario(family.front(), side);
  s.config.cfl = CflPolicy::Off;
  const auto report = space_error_vs_reference(s, family, {tau, T, !fixed_tau});
  std::cout << "h,tau,err\n";
  for (const auto& r : report.rows)
    std::cout << to_exact_string(r.h) << ',' << to_exact_string(r.tau) << ',' << to_exact_string(r.err) << '\n';
  std::cout << "slope " << report.fit.slope << " r2 " << report.fit.r2 << '\n';
  return Ok;
}

int cmd_validate(const std::string& input, double tol) {
  MeshPtr mesh;
  try {
    mesh = load_gmsh_mesh(input, tol);
  } catch (const InputError& e) {
    std::cout << "admissible no\nreason " << e.what() << '\n';
    return BadInput;
  }
  const auto r = validate_admissibility(*mesh, tol);
  std::cout << "cells " << mesh->n_cells() << "\nh " << mesh->h() << '\n' << r;
  std::cout << "admissible " << (r.admissible() ? "yes" : "no") << '\n';
  return r.orthogonality_defect > tol ? BadInput : Ok;
}

int cmd_vortices(const std::string& mesh_spec, const std::string& state_path, double threshold,
                 const std::string& output) {
  const auto mesh = resolve_mesh(mesh_spec);
  std::ifstream is(state_path);
  if (!is) throw InputError("cannot open " + state_path);
  const auto u = read_grid_function_csv(mesh, is);
  const auto marks = detect_vortices(pseudo_vorticity(u), threshold);
  if (output.empty()) {
    write_vortex_csv(marks, std::cout);
  } else {
    auto os = open_out(output);
    write_vortex_csv(marks, os);
    std::cout << marks.size() << " vortices -> " << output << '\n';
  }
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume Gross-Pitaevskii solver"};
  app.require_subcommand(1);

  std::string config_path, output;
  auto* run = app.add_subcommand("run", "run a simulation described by a JSON config");
  run->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--output", output, "output directory (overrides the config)");

  std::string scenario = "stirred-disk", mesh_spec, scheme = "lie";
  double dt = 0.0, T = 0.1, omega = 1.0;
  auto* order = app.add_subcommand("order", "estimate the time order from runs at 2dt, dt, dt/2");
  order->add_option("--scenario", scenario, "stirred-disk | square-eigenmode")->capture_default_str();
  order->add_option("--mesh", mesh_spec, "gmsh file or builtin:... (default: scenario mesh)");
  order->add_option("--dt", dt, "middle time step")->required();
  order->add_option("--T", T, "final time")->capture_default_str();
  order->add_option("--scheme", scheme, "lie | strang")->capture_default_str();
  order->add_option("--omega", omega, "stirrer frequency")->capture_default_str();
  order->add_option("--output", output, "also write the report CSV here");

  std::vector<std::size_t> ns{8, 16, 32, 64};
  double side = 1.0, tau = 1e-3;
  bool fixed_tau = false;
  std::string space_scenario = "square-eigenmode";
  auto* space = app.add_subcommand("space-order", "H1 error against a closed form over a mesh family");
  space->add_option("--scenario", space_scenario, "square-eigenmode")->capture_default_str();
  space->add_option("--n", ns, "cells per side of each square mesh")->delimiter(',')->capture_default_str();
  space->add_option("--side", side, "square side length")->capture_default_str();
  space->add_option("--tau", tau, "time step on the coarsest mesh")->capture_default_str();
  space->add_option("--T", T, "final time")->capture_default_str();
  space->add_flag("--fixed-tau", fixed_tau, "keep tau fixed instead of proportional to h");

  std::string input;
  double tol = 1e-8;
  auto* validate = app.add_subcommand("validate-mesh", "admissibility report of a gmsh mesh");
  validate->add_option("--input", input, "gmsh file")->required();
  validate->add_option("--tol", tol, "tolerance")->capture_default_str();

  std::string state_path;
  double threshold = 0.3;
  auto* vortices = app.add_subcommand("vortices", "detect vortices in a stored state");
  vortices->add_option("--mesh", mesh_spec, "gmsh file or builtin:...")->required();
  vortices->add_option("--state", state_path, "grid function CSV")->required();
  vortices->add_option("--threshold", threshold, "relative threshold on |omega|")->capture_default_str();
  vortices->add_option("--output", output, "vortex CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return BadInput;
  }

  try {
    if (*run) return cmd_run(config_path, output);
    if (*order) return cmd_order(scenario, mesh_spec, dt, T, scheme, omega, output);
    if (*space) return cmd_space_order(space_scenario, ns, side, tau, T, fixed_tau);
    if (*validate) return cmd_validate(input, tol);
    if (*vortices) return cmd_vortices(mesh_spec, state_path, threshold, output);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return BadInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return Numerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return BadInput;
  }
  return BadInput;
}
