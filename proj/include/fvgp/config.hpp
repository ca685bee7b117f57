#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fvgp/error.hpp"
#include "fvgp/harness.hpp"
#include "fvgp/mesh.hpp"
#include "fvgp/solver.hpp"

namespace fvgp {

/// A `run` job as described by its JSON document:
///
///   { "mesh": "path.msh" | "builtin:disk" | "builtin:square:N[:L]",
///     "potential": {"type": "stirrer", "V0": 100, "eps": 0.2, "omega": 30},
///     "initial": "gaussian" | "eigenmode",
///     "lambda": 100, "tau": 0.001, "T": 5,
///     "scheme": "lie" | "strang", "bc_mode": "dirichlet" | "interior",
///     "solver": "lu" | "cg" | {"type": "cg", "tol": 1e-12, "maxit": 1000},
///     "cfl": "warn" | "error" | "off", "diagnostics_stride": 1,
///     "snapshots": [1.0, 2.5], "vortex_threshold": 0.3, "outputs": "out" }
struct RunConfig {
  std::string mesh = "builtin:disk";
  PotentialSpec potential;
  std::string initial = "gaussian";
  SolverConfig solver;
  std::string output_dir = "out";
  double vortex_threshold = 0.3;
};

/// Resolves a mesh spec; relative file paths are taken relative to `base_dir`.
inline MeshPtr resolve_mesh(const std::string& spec, const std::string& base_dir = {}) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    const auto name = spec.substr(prefix.size());
    if (name == "disk") return load_gmsh_mesh(default_disk_mesh_path());
    if (name.rfind("square:", 0) == 0) {
      const auto rest = name.substr(7);
      const auto colon = rest.find(':');
      std::size_t n = 0;
      double side = 1.0;
      try {
        n = std::stoul(rest.substr(0, colon));
        if (colon != std::string::npos) side = parse_double(rest.substr(colon + 1));
      } catch (const std::logic_error&) {
        throw InputError("malformed builtin mesh '" + spec + "'");
      }
      return generate_uniform_rectangle_mesh(n, n, side, side);
    }
    throw InputError("unknown builtin mesh '" + spec + "'");
  }
  if (!base_dir.empty() && !spec.empty() && spec.front() != '/') return load_gmsh_mesh(base_dir + "/" + spec);
  return load_gmsh_mesh(spec);
}

namespace detail {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  using detail::get_or;
  if (!j.is_object()) throw InputError("run config must be a JSON object");
  static const std::vector<std::string> known = {"mesh",   "potential", "initial", "lambda",      "tau",
                                                 "T",      "scheme",    "bc_mode", "solver",      "cfl",
                                                 "diagnostics_stride",  "snapshots", "vortex_threshold", "outputs"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw InputError("unknown config key '" + key + "'");

  RunConfig c;
  c.mesh = get_or<std::string>(j, "mesh", c.mesh);
  if (j.contains("potential")) {
    const auto& p = j.at("potential");
    if (!p.is_object()) throw InputError("config key 'potential' must be an object");
    c.potential.type = get_or<std::string>(p, "type", c.potential.type);
    c.potential.V0 = get_or<double>(p, "V0", c.potential.V0);
    c.potential.eps = get_or<double>(p, "eps", c.potential.eps);
    c.potential.omega = get_or<double>(p, "omega", 30.0);
  } else {
    c.potential.omega = 30.0;
  }
  c.initial = get_or<std::string>(j, "initial", c.initial);
  if (c.initial != "gaussian" && c.initial != "eigenmode") throw InputError("unknown initial state '" + c.initial + "'");

  auto& s = c.solver;
  s.lambda = get_or<double>(j, "lambda", 1.0);
  s.tau = get_or<double>(j, "tau", 1e-3);
  s.T = get_or<double>(j, "T", s.tau);
  const auto scheme = get_or<std::string>(j, "scheme", "lie");
  if (scheme == "lie")
    s.scheme = Scheme::Lie;
  else if (scheme == "strang")
    s.scheme = Scheme::Strang;
  else
    throw InputError("unknown scheme '" + scheme + "'");
  const auto bc = get_or<std::string>(j, "bc_mode", "dirichlet");
  if (bc == "dirichlet")
    s.bc_mode = BcMode::DirichletFlux;
  else if (bc == "interior")
    s.bc_mode = BcMode::InteriorOnly;
  else
    throw InputError("unknown bc_mode '" + bc + "'");
  if (j.contains("solver")) {
    const auto& sv = j.at("solver");
    const auto type = sv.is_string() ? sv.get<std::string>() : get_or<std::string>(sv, "type", "lu");
    if (type == "lu") {
      s.linear_solver.kind = LinearSolverOptions::Kind::DirectLU;
    } else if (type == "cg") {
      s.linear_solver.kind = LinearSolverOptions::Kind::CG;
      if (sv.is_object()) {
        s.linear_solver.tol = get_or<double>(sv, "tol", s.linear_solver.tol);
        s.linear_solver.max_iterations = get_or<int>(sv, "maxit", s.linear_solver.max_iterations);
      }
    } else {
      throw InputError("unknown solver '" + type + "'");
    }
  }
  const auto cfl = get_or<std::string>(j, "cfl", "warn");
  if (cfl == "warn")
    s.cfl = CflPolicy::Warn;
  else if (cfl == "error")
    s.cfl = CflPolicy::Error;
  else if (cfl == "off")
    s.cfl = CflPolicy::Off;
  else
    throw InputError("unknown cfl policy '" + cfl + "'");
  s.diagnostics_stride = get_or<std::size_t>(j, "diagnostics_stride", 1);
  s.snapshot_times = get_or<std::vector<double>>(j, "snapshots", {});
  c.vortex_threshold = get_or<double>(j, "vortex_threshold", c.vortex_threshold);
  c.output_dir = get_or<std::string>(j, "outputs", c.output_dir);
  step_count(s);
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid JSON in ") + path + ": " + e.what());
  }
  return parse_run_config(j);
}

/// Scenario for a run job on an already resolved mesh.
inline Scenario scenario_from_config(const RunConfig& c, MeshPtr mesh) {
  Scenario s;
  if (c.initial == "eigenmode") {
    double side = 0.0;
    for (const auto& p : mesh->nodes()) side = std::max({side, p.x, p.y});
    s = square_eigenmode_scenario(mesh, side);
  } else {
    s = stirred_disk_scenario(mesh, c.potential.omega);
    s.name = "run";
  }
  s.potential = c.potential;
  s.config = c.solver;
  return s;
}

}  // namespace fvgp
