#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "fvgp/discrete_ops.hpp"
#include "fvgp/error.hpp"
#include "fvgp/grid_function.hpp"
#include "fvgp/mesh.hpp"
#include "fvgp/potential.hpp"

namespace fvgp {

enum class Scheme { Lie, Strang };
enum class CflPolicy { Warn, Error, Off };

struct LinearSolverOptions {
  enum class Kind { DirectLU, CG };
  Kind kind = Kind::DirectLU;
  double tol = 1e-12;          // CG: relative residual
  int max_iterations = 1000;   // CG only
};

struct SolverConfig {
  double tau = 1e-3;
  double T = 1e-3;
  double lambda = 1.0;  // coefficient of the cubic nonlinearity
  Scheme scheme = Scheme::Lie;
  BcMode bc_mode = BcMode::DirichletFlux;
  LinearSolverOptions linear_solver;
  CflPolicy cfl = CflPolicy::Warn;
  int dimension = 2;  // only enters the CFL condition
  std::size_t diagnostics_stride = 1;
  std::vector<double> snapshot_times;
};

/// N = T / tau, which must be a positive integer up to rounding.
inline std::size_t step_count(const SolverConfig& c) {
  if (!(c.tau > 0.0)) throw InputError("time step must be positive");
  if (!(c.T >= c.tau * (1.0 - 1e-12))) throw InputError("final time must be at least one time step");
  const double ratio = c.T / c.tau;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * n) throw InputError("final time is not an integer multiple of the time step");
  return static_cast<std::size_t>(n);
}

/// tau |log h|^2 <= 1 in 2D, tau <= h in 3D.
inline bool cfl_satisfied(double tau, double h, int dimension) {
  if (dimension == 3) return tau <= h;
  const double l = std::log(h);
  return tau * l * l <= 1.0;
}

// ---------------------------------------------------------------------------
// Sub-flows

/// exp(-i tau lambda |U_K|^2) U_K.
inline ComplexField nonlinear_flow(const ComplexField& u, double tau, double lambda) {
  ComplexField out(u.mesh_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = std::polar(1.0, -tau * lambda * std::norm(u[k])) * u[k];
  return out;
}

/// exp(-i G_K) U_K.
inline ComplexField potential_flow(const ComplexField& u, const RealField& phase) {
  require_same_mesh(u, phase);
  ComplexField out(u.mesh_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = std::polar(1.0, -phase[k]) * u[k];
  return out;
}

inline ComplexField potential_flow(const ComplexField& u, const ComplexField& phase) {
  RealField real_phase(phase.mesh_ptr());
  for (std::size_t k = 0; k < phase.size(); ++k) {
    if (phase[k].imag() != 0.0) throw InputError("potential phase must be real");
    real_phase[k] = phase[k].real();
  }
  return potential_flow(u, real_phase);
}

/// (P_h G_n(tau, .))_K.
inline RealField potential_phase(const Potential& v, const MeshPtr& mesh, double t_n, double tau) {
  RealField g(mesh);
  for (std::size_t k = 0; k < mesh->n_cells(); ++k) g[k] = v.antiderivative(t_n, tau, mesh->cell(k).center);
  return g;
}

/// Pade(1,1) approximation of exp(i tau A):
/// (Id - i tau/2 A)^{-1} (Id + i tau/2 A), solved in the |K|-weighted form
/// (M - i tau/2 S) X = (M + i tau/2 S) U with S = M A complex symmetric.
class CayleyPropagator {
 public:
  using CMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;
  using RowMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

  CayleyPropagator(const SparseOperator& a, double tau, LinearSolverOptions options = {})
      : mesh_(a.mesh_ptr()), tau_(tau), options_(options) {
    const auto n = static_cast<Eigen::Index>(a.dimension());
    const SparseOperator::Matrix s = a.stiffness();
    CMatrix mass(n, n);
    std::vector<Eigen::Triplet<Complex>> diag;
    for (Eigen::Index k = 0; k < n; ++k) diag.emplace_back(k, k, mesh_->cell(static_cast<std::size_t>(k)).area);
    mass.setFromTriplets(diag.begin(), diag.end());
    const Complex half(0.0, 0.5 * tau);
    const CMatrix sc = s.cast<Complex>();
    lhs_ = mass - half * sc;
    rhs_ = mass + half * sc;
    lhs_.makeCompressed();
    rhs_.makeCompressed();
    if (options_.kind == LinearSolverOptions::Kind::DirectLU) {
      lu_ = std::make_shared<Eigen::SparseLU<CMatrix, Eigen::COLAMDOrdering<int>>>();
      lu_->analyzePattern(lhs_);
      lu_->factorize(lhs_);
      if (lu_->info() != Eigen::Success) throw NumericalError("sparse LU factorization failed: " + lu_->lastErrorMessage());
    } else {
      diag_ = Eigen::VectorXcd(n);
      for (Eigen::Index k = 0; k < n; ++k) diag_[k] = lhs_.coeff(k, k);
    }
  }

  double tau() const { return tau_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }

  ComplexField apply(const ComplexField& u) const {
    if (u.mesh_ptr().get() != mesh_.get()) throw InputError("propagator and state live on different meshes");
    const auto n = static_cast<Eigen::Index>(u.size());
    Eigen::Map<const Eigen::VectorXcd> uv(u.values().data(), n);
    const Eigen::VectorXcd b = rhs_ * uv;
    Eigen::VectorXcd x;
    if (lu_) {
      x = lu_->solve(b);
      if (lu_->info() != Eigen::Success) throw NumericalError("sparse LU solve failed");
    } else {
      x = cocg(b, uv);
    }
    ComplexField out(mesh_);
    for (Eigen::Index k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = x[k];
    return out;
  }

 private:
  // Conjugate orthogonal CG for complex symmetric systems, Jacobi preconditioned.
  Eigen::VectorXcd cocg(const Eigen::VectorXcd& b, const Eigen::VectorXcd& guess) const {
    Eigen::VectorXcd x = guess;
    Eigen::VectorXcd r = b - lhs_ * x;
    const double bnorm = b.norm();
    if (bnorm == 0.0) return Eigen::VectorXcd::Zero(b.size());
    if (r.norm() <= options_.tol * bnorm) return x;
    Eigen::VectorXcd z = r.cwiseQuotient(diag_);
    Eigen::VectorXcd p = z;
    Complex rho = r.transpose() * z;
    for (int it = 0; it < options_.max_iterations; ++it) {
      const Eigen::VectorXcd q = lhs_ * p;
      const Complex pq = p.transpose() * q;
      if (pq == Complex(0.0)) break;
      const Complex alpha = rho / pq;
      x += alpha * p;
      r -= alpha * q;
      if (r.norm() <= options_.tol * bnorm) return x;
      z = r.cwiseQuotient(diag_);
      const Complex rho_next = r.transpose() * z;
      p = z + (rho_next / rho) * p;
      rho = rho_next;
    }
    throw NumericalError("COCG did not converge in " + std::to_string(options_.max_iterations) + " iterations");
  }

  MeshPtr mesh_;
  double tau_;
  LinearSolverOptions options_;
  RowMatrix rhs_;
  CMatrix lhs_;
  std::shared_ptr<Eigen::SparseLU<CMatrix, Eigen::COLAMDOrdering<int>>> lu_;
  Eigen::VectorXcd diag_;
};

inline ComplexField linear_flow(const ComplexField& u, double tau, const SparseOperator& a,
                                LinearSolverOptions options = {}) {
  if (tau == 0.0) return u;
  return CayleyPropagator(a, tau, options).apply(u);
}

// ---------------------------------------------------------------------------
// Splitting integrator

/// Lie-Trotter / Strang time stepping with a cached Cayley propagator.
class SplittingIntegrator {
 public:
  SplittingIntegrator(MeshPtr mesh, Potential potential, SolverConfig config)
      : mesh_(std::move(mesh)),
        potential_(std::move(potential)),
        config_(std::move(config)),
        laplacian_(assemble_laplacian(mesh_, config_.bc_mode)),
        propagator_(laplacian_, config_.tau, config_.linear_solver) {
    if (!(config_.tau > 0.0)) throw InputError("time step must be positive");
    if (config_.dimension != 2 && config_.dimension != 3) throw InputError("dimension must be 2 or 3");
    if (config_.cfl != CflPolicy::Off && !cfl_satisfied(config_.tau, mesh_->h(), config_.dimension)) {
      const std::string msg = "CFL condition violated: tau = " + std::to_string(config_.tau) +
                              ", h = " + std::to_string(mesh_->h());
      if (config_.cfl == CflPolicy::Error) throw InputError(msg);
      warnings_.push_back(msg);
    }
    if (potential_.quadrature_antiderivative)
      warnings_.push_back("potential antiderivative evaluated by numerical quadrature");
  }

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  const SolverConfig& config() const { return config_; }
  const Potential& potential() const { return potential_; }
  const SparseOperator& laplacian() const { return laplacian_; }
  const CayleyPropagator& propagator() const { return propagator_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// exp(i tau A) exp(-i P_h G_n(tau)) exp(-i tau lambda |.|^2), rightmost first.
  ComplexField lie_step(const ComplexField& u, double t_n) const {
    const double tau = config_.tau;
    auto v = nonlinear_flow(u, tau, config_.lambda);
    v = potential_flow(v, potential_phase(potential_, mesh_, t_n, tau));
    return propagator_.apply(v);
  }

  /// Half nonlinear, half potential, full linear, half potential at t_n + tau/2, half nonlinear.
  ComplexField strang_step(const ComplexField& u, double t_n) const {
    const double tau = config_.tau;
    auto v = nonlinear_flow(u, 0.5 * tau, config_.lambda);
    v = potential_flow(v, potential_phase(potential_, mesh_, t_n, 0.5 * tau));
    v = propagator_.apply(v);
    v = potential_flow(v, potential_phase(potential_, mesh_, t_n + 0.5 * tau, 0.5 * tau));
    return nonlinear_flow(v, 0.5 * tau, config_.lambda);
  }

  ComplexField step(const ComplexField& u, double t_n) const {
    return config_.scheme == Scheme::Lie ? lie_step(u, t_n) : strang_step(u, t_n);
  }

 private:
  MeshPtr mesh_;
  Potential potential_;
  SolverConfig config_;
  SparseOperator laplacian_;
  CayleyPropagator propagator_;
  std::vector<std::string> warnings_;
};

/// One Lie step with the operator `a` (its boundary mode overrides config.bc_mode).
inline ComplexField lie_step(const ComplexField& u, double t_n, const SolverConfig& config, const SparseOperator& a,
                             const Potential& potential) {
  auto v = nonlinear_flow(u, config.tau, config.lambda);
  v = potential_flow(v, potential_phase(potential, u.mesh_ptr(), t_n, config.tau));
  return linear_flow(v, config.tau, a, config.linear_solver);
}

inline ComplexField strang_step(const ComplexField& u, double t_n, const SolverConfig& config,
                                const SparseOperator& a, const Potential& potential) {
  const double half = 0.5 * config.tau;
  auto v = nonlinear_flow(u, half, config.lambda);
  v = potential_flow(v, potential_phase(potential, u.mesh_ptr(), t_n, half));
  v = linear_flow(v, config.tau, a, config.linear_solver);
  v = potential_flow(v, potential_phase(potential, u.mesh_ptr(), t_n + half, half));
  return nonlinear_flow(v, half, config.lambda);
}

// ---------------------------------------------------------------------------
// Diagnostics and the time loop

/// E_h = 1/2 <-A U, U>_T + lambda/4 sum |K| |U_K|^4 + 1/2 sum |K| V(t, x_K) |U_K|^2,
/// the invariant of U' = i (A U - lambda |U|^2 U - V U) for static V.
///
/// In InteriorOnly mode the first term is 1/2 ||U||^2_{H^1_h}.
inline double discrete_energy(const ComplexField& u, double t, const SparseOperator& a, const Potential& potential,
                              double lambda) {
  const auto& mesh = u.mesh();
  const double kinetic = -inner_product(a.apply(u), u).real();
  double quartic = 0.0, trap = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const auto& c = mesh.cell(k);
    const double rho = std::norm(u[k]);
    quartic += c.area * rho * rho;
    trap += c.area * potential.value(t, c.center) * rho;
  }
  return 0.5 * kinetic + 0.25 * lambda * quartic + 0.5 * trap;
}

struct DiagnosticRecord {
  std::size_t n = 0;
  double t = 0.0;
  double mass = 0.0;  // ||U^n||_{L^2_h}
  double h1 = 0.0;    // ||U^n||_{H^1_h}
  double energy = 0.0;
  double linf = 0.0;
};

struct Diagnostics {
  std::vector<DiagnosticRecord> records;
  std::vector<std::string> warnings;
};

inline DiagnosticRecord measure_state(const ComplexField& u, std::size_t n, double t, const SparseOperator& a,
                                      const Potential& potential, double lambda) {
  return {n, t, lp_norm(u, 2.0), h1_seminorm(u), discrete_energy(u, t, a, potential, lambda),
          lp_norm(u, std::numeric_limits<double>::infinity())};
}

inline void write_diagnostics_header(std::ostream& os) { os << "n,t,mass,h1,energy,linf\n"; }

inline void write_diagnostics_row(std::ostream& os, const DiagnosticRecord& r) {
  os << r.n << ',' << to_exact_string(r.t) << ',' << to_exact_string(r.mass) << ',' << to_exact_string(r.h1) << ','
     << to_exact_string(r.energy) << ',' << to_exact_string(r.linf) << '\n';
}

inline void write_diagnostics_csv(const Diagnostics& d, std::ostream& os) {
  write_diagnostics_header(os);
  for (const auto& r : d.records) write_diagnostics_row(os, r);
}

struct Snapshot {
  std::size_t n = 0;
  double t = 0.0;
  ComplexField state;
};

struct SimulationResult {
  ComplexField final_state;
  Diagnostics diagnostics;
  std::vector<Snapshot> snapshots;
};

struct RunObserver {
  std::function<void(const DiagnosticRecord&)> on_record;
  std::function<void(const Snapshot&)> on_snapshot;
};

/// Runs N = T / tau steps from U0. Diagnostics are recorded at n = 0, every
/// `diagnostics_stride` steps, and at n = N. Snapshots are taken at the steps
/// nearest to the requested times.
inline SimulationResult run_simulation(const SplittingIntegrator& integrator, const ComplexField& u0,
                                       const RunObserver& observer = {}) {
  const auto& config = integrator.config();
  const auto steps = step_count(config);
  if (u0.mesh_ptr().get() != integrator.mesh_ptr().get()) throw InputError("initial state lives on another mesh");
  if (!u0.all_finite()) throw InputError("initial state is not finite");
  const std::size_t stride = std::max<std::size_t>(1, config.diagnostics_stride);

  std::vector<std::size_t> snapshot_steps;
  for (double t : config.snapshot_times) {
    const double n = std::round(t / config.tau);
    snapshot_steps.push_back(static_cast<std::size_t>(std::clamp(n, 0.0, static_cast<double>(steps))));
  }

  SimulationResult result{u0, {}, {}};
  result.diagnostics.warnings = integrator.warnings();
  for (const auto& w : integrator.warnings()) std::clog << "warning: " << w << '\n';

  auto record = [&](const ComplexField& u, std::size_t n) {
    const double t = static_cast<double>(n) * config.tau;
    const auto r = measure_state(u, n, t, integrator.laplacian(), integrator.potential(), config.lambda);
    result.diagnostics.records.push_back(r);
    if (observer.on_record) observer.on_record(r);
  };
  auto snapshot = [&](const ComplexField& u, std::size_t n) {
    for (auto s : snapshot_steps) {
      if (s != n) continue;
      result.snapshots.push_back({n, static_cast<double>(n) * config.tau, u});
      if (observer.on_snapshot) observer.on_snapshot(result.snapshots.back());
      break;
    }
  };

  ComplexField u = u0;
  record(u, 0);
  snapshot(u, 0);
  for (std::size_t n = 1; n <= steps; ++n) {
    u = integrator.step(u, static_cast<double>(n - 1) * config.tau);
    if (!u.all_finite()) throw NonFiniteState(n);
    if (n % stride == 0 || n == steps) record(u, n);
    snapshot(u, n);
  }
  result.final_state = std::move(u);
  return result;
}

inline SimulationResult run_simulation(const MeshPtr& mesh, const Potential& potential, const ComplexField& u0,
                                       const SolverConfig& config, const RunObserver& observer = {}) {
  return run_simulation(SplittingIntegrator(mesh, potential, config), u0, observer);
}

}  // namespace fvgp
