#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <future>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fvgp/discrete_ops.hpp"
#include "fvgp/error.hpp"
#include "fvgp/format.hpp"
#include "fvgp/gmsh.hpp"
#include "fvgp/mesh.hpp"
#include "fvgp/potential.hpp"
#include "fvgp/solver.hpp"

#ifndef FVGP_DATA_DIR
#define FVGP_DATA_DIR "data"
#endif

namespace fvgp {

inline std::string default_disk_mesh_path() { return std::string(FVGP_DATA_DIR) + "/disk_r2_h0.098.msh"; }

inline MeshPtr load_gmsh_mesh(const std::string& path, double tol = 1e-8) {
  return build_fv_mesh_from_triangulation(read_gmsh_file(path), tol);
}

struct PotentialSpec {
  std::string type = "stirrer";  // stirrer | harmonic | none
  double V0 = 100.0;
  double eps = 0.2;
  double omega = 1.0;
};

inline Potential make_potential(const PotentialSpec& spec) {
  if (spec.type == "stirrer") return stirrer_potential(spec.V0, spec.eps, spec.omega);
  if (spec.type == "harmonic") return stirrer_potential(spec.V0, 0.0, 0.0);
  if (spec.type == "none") return zero_potential();
  throw InputError("unknown potential type '" + spec.type + "'");
}

/// Mesh, physics, initial state and solver settings of one experiment.
struct Scenario {
  std::string name;
  MeshPtr mesh;
  PotentialSpec potential;
  std::function<Complex(Point2)> initial;
  SolverConfig config;
  /// Closed-form solution psi(t, x), when one is known.
  std::function<Complex(double, Point2)> exact;
};

/// Disk of radius 2, psi0 = exp(-2 |x|^2), V0 = 100, eps = 0.2, lambda = 100.
inline Scenario stirred_disk_scenario(MeshPtr mesh, double omega = 1.0) {
  Scenario s;
  s.name = "stirred-disk";
  s.mesh = std::move(mesh);
  s.potential = {"stirrer", 100.0, 0.2, omega};
  s.initial = [](Point2 x) { return Complex(std::exp(-2.0 * dot(x, x))); };
  s.config.lambda = 100.0;
  s.config.scheme = Scheme::Lie;
  s.config.bc_mode = BcMode::DirichletFlux;
  return s;
}

/// Free linear problem on [0, L]^2 with the Dirichlet ground mode
/// psi = exp(-2 i pi^2 t / L^2) sin(pi x / L) sin(pi y / L).
inline Scenario square_eigenmode_scenario(MeshPtr mesh, double side = 1.0) {
  Scenario s;
  s.name = "square-eigenmode";
  s.mesh = std::move(mesh);
  s.potential = {"none", 0.0, 0.0, 0.0};
  const double k = std::numbers::pi / side;
  s.initial = [k](Point2 x) { return Complex(std::sin(k * x.x) * std::sin(k * x.y)); };
  s.exact = [k](double t, Point2 x) {
    return std::polar(1.0, -2.0 * k * k * t) * std::sin(k * x.x) * std::sin(k * x.y);
  };
  s.config.lambda = 0.0;
  s.config.bc_mode = BcMode::DirichletFlux;
  return s;
}

inline ComplexField initial_state(const Scenario& s) { return pointwise_interpolant(s.initial, s.mesh); }

/// Runs the scenario with time step tau up to T and returns U^N.
inline ComplexField run_to(const Scenario& s, const MeshPtr& mesh, double tau, double T) {
  SolverConfig config = s.config;
  config.tau = tau;
  config.T = T;
  config.snapshot_times.clear();
  config.diagnostics_stride = step_count(config);
  const SplittingIntegrator integrator(mesh, make_potential(s.potential), config);
  return run_simulation(integrator, pointwise_interpolant(s.initial, mesh)).final_state;
}

// ---------------------------------------------------------------------------
// Time order by extrapolation

struct OrderReport {
  double delta_t = 0.0;
  double err_coarse = 0.0;  // ||U_{2 dt} - U_{dt}||_{H^1_h} at T
  double err_fine = 0.0;    // ||U_{dt} - U_{dt/2}||_{H^1_h} at T
  double m = 0.0;           // log(err_coarse / err_fine) / log 2
};

inline double order_from_errors(double err_coarse, double err_fine) {
  return std::log(err_coarse / err_fine) / std::log(2.0);
}

inline OrderReport time_order_estimate(const Scenario& s, double delta_t, double T) {
  if (!(delta_t > 0.0)) throw InputError("time step must be positive");
  const double ratio = T / delta_t;
  const double n = std::round(ratio);
  if (n < 2.0 || std::abs(ratio - n) > 1e-9 * n || std::fmod(n, 2.0) != 0.0)
    throw InputError("T / dt must be an even integer >= 2");

  auto run = [&](double tau) { return run_to(s, s.mesh, tau, T); };
  auto coarse = std::async(std::launch::async, run, 2.0 * delta_t);
  auto fine = std::async(std::launch::async, run, 0.5 * delta_t);
  const auto mid = run(delta_t);

  OrderReport r;
  r.delta_t = delta_t;
  r.err_coarse = h1_seminorm(coarse.get() - mid);
  r.err_fine = h1_seminorm(mid - fine.get());
  if (!(r.err_coarse > 0.0) || !(r.err_fine > 0.0))
    throw NumericalError("runs at different time steps coincide; the order is undefined");
  r.m = order_from_errors(r.err_coarse, r.err_fine);
  return r;
}

inline void write_order_header(std::ostream& os) { os << "dt,err_coarse,err_fine,m\n"; }

inline void write_order_row(std::ostream& os, const OrderReport& r) {
  os << to_exact_string(r.delta_t) << ',' << to_exact_string(r.err_coarse) << ',' << to_exact_string(r.err_fine)
     << ',' << to_exact_string(r.m) << '\n';
}

// ---------------------------------------------------------------------------
// Error against a closed-form solution over a mesh family

struct SpaceErrorRow {
  double h = 0.0;
  double tau = 0.0;
  double err = 0.0;  // ||P_h psi(T) - U^N||_{H^1_h}
};

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct SpaceOrderReport {
  std::vector<SpaceErrorRow> rows;
  LogLogFit fit;
};

/// Least-squares line through (log x, log y).
inline LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("need >= 2 resolutions");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
  LogLogFit f;
  f.slope = cxy / cxx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r2 = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
  return f;
}

struct SpaceStudyOptions {
  double tau = 1e-3;  // time step on the first mesh of the family
  double T = 0.1;
  bool tau_proportional_to_h = true;
};

/// Runs the scenario physics on every mesh of the family and measures the
/// H^1_h error at T against the scenario's closed-form solution.
inline SpaceOrderReport space_error_vs_reference(const Scenario& s, const std::vector<MeshPtr>& family,
                                                 const SpaceStudyOptions& opt) {
  if (family.size() < 2) throw InputError("need >= 2 resolutions");
  if (!s.exact) throw InputError("scenario '" + s.name + "' has no closed-form reference");
  SpaceOrderReport report;
  const double h0 = family.front()->h();
  std::vector<double> hs, errs;
  for (const auto& mesh : family) {
    double tau = opt.tau_proportional_to_h ? opt.tau * mesh->h() / h0 : opt.tau;
    const double steps = std::max(1.0, std::round(opt.T / tau));
    tau = opt.T / steps;
    const auto u = run_to(s, mesh, tau, opt.T);
    const auto exact = pointwise_interpolant([&](Point2 x) { return s.exact(opt.T, x); }, mesh);
    const double err = h1_seminorm(exact - u);
    report.rows.push_back({mesh->h(), tau, err});
    hs.push_back(mesh->h());
    errs.push_back(err);
  }
  report.fit = fit_loglog(hs, errs);
  return report;
}

}  // namespace fvgp
