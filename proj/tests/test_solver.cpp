#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fvgp/harness.hpp"
#include "fvgp/solver.hpp"
#include "test_support.hpp"

using namespace fvgp;
using testsupport::random_field;

namespace {

constexpr double pi = std::numbers::pi;

MeshPtr disk() {
  static const MeshPtr m = load_gmsh_mesh(std::string(FVGP_DATA_DIR) + "/disk_r2_h0.22.msh");
  return m;
}

SolverConfig config_with(double tau, double T, double lambda) {
  SolverConfig c;
  c.tau = tau;
  c.T = T;
  c.lambda = lambda;
  c.cfl = CflPolicy::Off;
  return c;
}

double max_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// Dense right-hand side of U' = i (A U - lambda |U|^2 U - V(t) U)
std::vector<Complex> rhs(const std::vector<Complex>& u, double t, const SparseOperator& a, const Potential& v,
                         double lambda) {
  const auto& m = a.mesh();
  const std::size_t n = u.size();
  std::vector<Complex> out(n);
  const Complex i(0.0, 1.0);
  for (std::size_t r = 0; r < n; ++r) {
    Complex au = 0.0;
    for (std::size_t c = 0; c < n; ++c) au += a.coeff(r, c) * u[c];
    out[r] = i * (au - lambda * std::norm(u[r]) * u[r] - v.value(t, m.cell(r).center) * u[r]);
  }
  return out;
}

ComplexField rk4_reference(const ComplexField& u0, double t0, double tau, const SparseOperator& a,
                           const Potential& v, double lambda, int substeps) {
  std::vector<Complex> u(u0.begin(), u0.end());
  const double h = tau / substeps;
  auto axpy = [](const std::vector<Complex>& x, double s, const std::vector<Complex>& y) {
    std::vector<Complex> out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] + s * y[k];
    return out;
  };
  for (int j = 0; j < substeps; ++j) {
    const double t = t0 + j * h;
    const auto k1 = rhs(u, t, a, v, lambda);
    const auto k2 = rhs(axpy(u, h / 2, k1), t + h / 2, a, v, lambda);
    const auto k3 = rhs(axpy(u, h / 2, k2), t + h / 2, a, v, lambda);
    const auto k4 = rhs(axpy(u, h, k3), t + h, a, v, lambda);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += h / 6 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  }
  return ComplexField(u0.mesh_ptr(), u);
}

// Composite Simpson rule
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int j = 1; j < n; ++j) s += (j % 2 ? 4.0 : 2.0) * f(a + j * h);
  return s * h / 3.0;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(NonlinearFlow, Examples) {
  const auto m = generate_uniform_rectangle_mesh(2, 1, 2, 1);
  const auto zero = nonlinear_flow(ComplexField(m), 0.3, 1.0);
  for (auto v : zero) EXPECT_EQ(v, Complex(0.0));
  const auto flipped = nonlinear_flow(ComplexField(m, Complex(1.0)), pi, 1.0);
  for (auto v : flipped) EXPECT_NEAR(std::abs(v - Complex(-1.0)), 0.0, 1e-15);
}

TEST(NonlinearFlow, PreservesModulus) {
  std::mt19937_64 rng(1);
  const auto u = random_field(disk(), rng);
  const auto v = nonlinear_flow(u, 0.01, 100.0);
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(std::abs(v[k]), std::abs(u[k]), 1e-15 * (1 + std::abs(u[k])));
  EXPECT_NEAR(lp_norm(v, 2.0), lp_norm(u, 2.0), 1e-14 * lp_norm(u, 2.0));
}

TEST(PotentialFlow, Examples) {
  std::mt19937_64 rng(2);
  const auto u = random_field(disk(), rng);
  const auto same = potential_flow(u, RealField(disk(), 0.0));
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_EQ(same[k], u[k]);
  const auto turned = potential_flow(u, RealField(disk(), 2.0 * pi));
  EXPECT_LE(max_diff(turned, u), 1e-14 * lp_norm(u, std::numeric_limits<double>::infinity()));

  RealField g1(disk()), g2(disk());
  std::uniform_real_distribution<double> d(-5, 5);
  for (auto& v : g1) v = d(rng);
  for (auto& v : g2) v = d(rng);
  const auto chained = potential_flow(potential_flow(u, g1), g2);
  const auto once = potential_flow(u, g1 + g2);
  EXPECT_LE(max_diff(chained, once), 1e-13 * lp_norm(u, std::numeric_limits<double>::infinity()));
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(std::abs(chained[k]), std::abs(u[k]), 1e-14);
}

TEST(PotentialFlow, RejectsComplexPhase) {
  const auto m = generate_uniform_rectangle_mesh(2, 1, 2, 1);
  EXPECT_THROW(potential_flow(ComplexField(m, 1.0), ComplexField(m, {Complex(0.1), Complex(0.0, 1e-3)})),
               InputError);
  const auto ok = potential_flow(ComplexField(m, 1.0), ComplexField(m, {Complex(pi), Complex(0.0)}));
  EXPECT_NEAR(ok[0].real(), -1.0, 1e-15);
  EXPECT_THROW(potential_flow(ComplexField(m, 1.0), RealField(generate_uniform_rectangle_mesh(2, 1, 2, 1))),
               InputError);
}

// ---------------------------------------------------------------------------

TEST(LinearFlow, ZeroStepIsIdentity) {
  std::mt19937_64 rng(3);
  const auto u = random_field(disk(), rng);
  const auto a = assemble_laplacian(disk(), BcMode::DirichletFlux);
  const auto v = linear_flow(u, 0.0, a);
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_EQ(v[k], u[k]);
}

TEST(LinearFlow, PadeAccuracyOnTwoCells) {
  // A = [[-1, 1], [1, -1]]: eigenpairs (0, (1,1)/sqrt2), (-2, (1,-1)/sqrt2)
  const auto m = generate_uniform_rectangle_mesh(2, 1, 2, 1);
  const auto a = assemble_laplacian(m, BcMode::InteriorOnly);
  const ComplexField u(m, {Complex(0.3, 0.1), Complex(-1.2, 0.7)});
  auto exact = [&](double tau) {
    const Complex p = (u[0] + u[1]) / 2.0, q = (u[0] - u[1]) / 2.0;
    const Complex e = std::polar(1.0, -2.0 * tau);
    return ComplexField(m, {p + e * q, p - e * q});
  };
  std::vector<double> taus, errs;
  for (double tau = 0.2; tau > 0.2 / 16; tau /= 2) {
    taus.push_back(tau);
    errs.push_back(max_diff(linear_flow(u, tau, a), exact(tau)));
  }
  for (double order : testsupport::observed_orders(taus, errs)) EXPECT_GE(order, 2.7);
}

TEST(LinearFlow, MassAndH1Isometry) {
  std::mt19937_64 rng(4);
  for (auto mode : {BcMode::InteriorOnly, BcMode::DirichletFlux}) {
    const auto a = assemble_laplacian(disk(), mode);
    for (int trial = 0; trial < 5; ++trial) {
      const auto u = random_field(disk(), rng);
      const auto v = linear_flow(u, 0.01, a);
      EXPECT_LE(std::abs(lp_norm(v, 2.0) - lp_norm(u, 2.0)), 1e-12 * lp_norm(u, 2.0));
      if (mode == BcMode::InteriorOnly) {
        EXPECT_LE(std::abs(h1_seminorm(v) - h1_seminorm(u)), 1e-12 * h1_seminorm(u));
      }
    }
  }
}

TEST(LinearFlow, Reversible) {
  std::mt19937_64 rng(5);
  const auto u = random_field(disk(), rng);
  const auto a = assemble_laplacian(disk(), BcMode::DirichletFlux);
  const auto back = linear_flow(linear_flow(u, 0.01, a), -0.01, a);
  EXPECT_LE(max_diff(back, u), 1e-12 * lp_norm(u, std::numeric_limits<double>::infinity()));
}

TEST(LinearFlow, CocgMatchesLu) {
  std::mt19937_64 rng(6);
  const auto u = random_field(disk(), rng);
  const auto a = assemble_laplacian(disk(), BcMode::DirichletFlux);
  LinearSolverOptions cg;
  cg.kind = LinearSolverOptions::Kind::CG;
  cg.tol = 1e-13;
  const auto x_lu = linear_flow(u, 0.01, a);
  const auto x_cg = linear_flow(u, 0.01, a, cg);
  EXPECT_LE(max_diff(x_lu, x_cg), 1e-10 * lp_norm(u, std::numeric_limits<double>::infinity()));
  EXPECT_LE(std::abs(lp_norm(x_cg, 2.0) - lp_norm(u, 2.0)), 1e-10 * lp_norm(u, 2.0));
}

TEST(LinearFlow, CocgReportsNonConvergence) {
  std::mt19937_64 rng(7);
  const auto u = random_field(disk(), rng);
  const auto a = assemble_laplacian(disk(), BcMode::DirichletFlux);
  LinearSolverOptions cg;
  cg.kind = LinearSolverOptions::Kind::CG;
  cg.max_iterations = 2;
  EXPECT_THROW(linear_flow(u, 1.0, a, cg), NumericalError);
}

// ---------------------------------------------------------------------------

TEST(LieStep, DegeneratesToLinearFlow) {
  std::mt19937_64 rng(8);
  const auto u = random_field(disk(), rng);
  const auto a = assemble_laplacian(disk(), BcMode::DirichletFlux);
  const auto cfg = config_with(0.01, 0.01, 0.0);
  const auto lie = lie_step(u, 0.0, cfg, a, zero_potential());
  const auto lin = linear_flow(u, 0.01, a);
  const auto strang = strang_step(u, 0.0, cfg, a, zero_potential());
  for (std::size_t k = 0; k < u.size(); ++k) {
    EXPECT_EQ(lie[k], lin[k]);
    EXPECT_EQ(strang[k], lin[k]);
  }
}

TEST(LieStep, MassPreserved) {
  std::mt19937_64 rng(9);
  const auto u = random_field(disk(), rng);
  const auto a = assemble_laplacian(disk(), BcMode::DirichletFlux);
  const auto cfg = config_with(0.001, 0.001, 100.0);
  const auto pot = stirrer_potential(100, 0.2, 30);
  const double m0 = lp_norm(u, 2.0);
  EXPECT_LE(std::abs(lp_norm(lie_step(u, 0.2, cfg, a, pot), 2.0) - m0), 1e-12 * m0);
  EXPECT_LE(std::abs(lp_norm(strang_step(u, 0.2, cfg, a, pot), 2.0) - m0), 1e-12 * m0);
}

TEST(LieStep, IntegratorMatchesFreeFunction) {
  std::mt19937_64 rng(10);
  const auto u = random_field(disk(), rng);
  const auto pot = stirrer_potential(100, 0.2, 1);
  auto cfg = config_with(0.002, 0.002, 100.0);
  const SplittingIntegrator integ(disk(), pot, cfg);
  EXPECT_LE(max_diff(integ.lie_step(u, 0.1), lie_step(u, 0.1, cfg, integ.laplacian(), pot)), 1e-13);
  EXPECT_LE(max_diff(integ.strang_step(u, 0.1), strang_step(u, 0.1, cfg, integ.laplacian(), pot)), 1e-13);
}

TEST(LieStep, LocalErrorAgainstReferenceOde) {
  const auto m = generate_uniform_rectangle_mesh(3, 3, 3, 3);
  const auto a = assemble_laplacian(m, BcMode::DirichletFlux);
  const auto pot = stirrer_potential(2.0, 0.3, 5.0);
  std::mt19937_64 rng(11);
  const auto u = random_field(m, rng, 0.7);
  for (auto scheme : {Scheme::Lie, Scheme::Strang}) {
    std::vector<double> taus, errs;
    for (double tau = 0.01; tau > 0.01 / 16; tau /= 2) {
      auto cfg = config_with(tau, tau, 1.5);
      const auto step = scheme == Scheme::Lie ? lie_step(u, 0.3, cfg, a, pot) : strang_step(u, 0.3, cfg, a, pot);
      taus.push_back(tau);
      errs.push_back(max_diff(step, rk4_reference(u, 0.3, tau, a, pot, 1.5, 400)));
    }
    const double expected = scheme == Scheme::Lie ? 2.0 : 3.0;
    for (double order : testsupport::observed_orders(taus, errs)) EXPECT_NEAR(order, expected, 0.2);
  }
}

// ---------------------------------------------------------------------------

TEST(Config, StepCount) {
  EXPECT_EQ(step_count(config_with(0.001, 5.0, 1.0)), 5000u);
  EXPECT_EQ(step_count(config_with(0.1, 0.1, 1.0)), 1u);
  EXPECT_THROW(step_count(config_with(0.0, 1.0, 1.0)), InputError);
  EXPECT_THROW(step_count(config_with(0.1, 0.05, 1.0)), InputError);
  EXPECT_THROW(step_count(config_with(0.3, 1.0, 1.0)), InputError);
}

TEST(Config, Cfl) {
  EXPECT_TRUE(cfl_satisfied(0.01, 0.1, 2));                      // 0.01 * 5.30 < 1
  EXPECT_FALSE(cfl_satisfied(0.2, 0.1, 2));                      // 0.2 * 5.30 > 1
  EXPECT_TRUE(cfl_satisfied(0.1, 0.1, 3));
  EXPECT_FALSE(cfl_satisfied(0.11, 0.1, 3));
  // h = 0.29 on the coarse disk: |log h|^2 = 1.5
  auto cfg = config_with(1.0, 1.0, 1.0);
  cfg.cfl = CflPolicy::Error;
  EXPECT_THROW(SplittingIntegrator(disk(), zero_potential(), cfg), InputError);
  cfg.cfl = CflPolicy::Warn;
  const SplittingIntegrator warned(disk(), zero_potential(), cfg);
  ASSERT_EQ(warned.warnings().size(), 1u);
  EXPECT_NE(warned.warnings()[0].find("CFL"), std::string::npos);
  cfg.cfl = CflPolicy::Off;
  EXPECT_TRUE(SplittingIntegrator(disk(), zero_potential(), cfg).warnings().empty());
}

// ---------------------------------------------------------------------------

TEST(RunSimulation, OneStepEqualsLieStep) {
  std::mt19937_64 rng(12);
  const auto u = random_field(disk(), rng);
  const auto pot = stirrer_potential(100, 0.2, 30);
  const auto cfg = config_with(0.001, 0.001, 100.0);
  const auto res = run_simulation(disk(), pot, u, cfg);
  const auto a = assemble_laplacian(disk(), cfg.bc_mode);
  EXPECT_LE(max_diff(res.final_state, lie_step(u, 0.0, cfg, a, pot)), 1e-14);
  ASSERT_EQ(res.diagnostics.records.size(), 2u);
  EXPECT_EQ(res.diagnostics.records[1].n, 1u);
}

TEST(RunSimulation, EigenvectorPhase) {
  // 1D Neumann mode cos(pi (i + 1/2) / 3) on a 3 x 3 unit-spacing grid: mu = -(2 - 2 cos(pi / 3)) = -1
  const auto m = generate_uniform_rectangle_mesh(3, 3, 3, 3);
  auto cfg = config_with(0.05, 2.0, 0.0);
  cfg.bc_mode = BcMode::InteriorOnly;
  const auto u0 = pointwise_interpolant([](Point2 p) { return Complex(std::cos(pi * p.x / 3.0)); }, m);
  const auto res = run_simulation(m, zero_potential(), u0, cfg);
  const double mu = -1.0;
  const double phase = 40.0 * 2.0 * std::atan(cfg.tau * mu / 2.0);
  for (std::size_t k = 0; k < u0.size(); ++k) {
    EXPECT_NEAR(std::abs(res.final_state[k] - std::polar(1.0, phase) * u0[k]), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(res.final_state[k]), std::abs(u0[k]), 1e-12);
  }
}

TEST(RunSimulation, StrideAndSnapshots) {
  const auto m = generate_uniform_rectangle_mesh(4, 4, 1, 1);
  auto cfg = config_with(0.01, 0.1, 1.0);
  cfg.diagnostics_stride = 3;
  cfg.snapshot_times = {0.0, 0.034, 0.1};
  std::vector<std::size_t> seen;
  RunObserver obs;
  obs.on_record = [&](const DiagnosticRecord& r) { seen.push_back(r.n); };
  const auto res = run_simulation(m, zero_potential(), ComplexField(m, 1.0), cfg, obs);
  const std::vector<std::size_t> expected = {0, 3, 6, 9, 10};
  EXPECT_EQ(seen, expected);
  ASSERT_EQ(res.snapshots.size(), 3u);
  EXPECT_EQ(res.snapshots[0].n, 0u);
  EXPECT_EQ(res.snapshots[1].n, 3u);
  EXPECT_EQ(res.snapshots[2].n, 10u);
  EXPECT_DOUBLE_EQ(res.snapshots[1].t, 0.03);
}

TEST(RunSimulation, NonFiniteAbortsWithStep) {
  const auto m = generate_uniform_rectangle_mesh(4, 4, 1, 1);
  Potential bad = zero_potential();
  bad.antiderivative = [](double t_n, double, Point2) {
    return t_n > 0.015 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  };
  std::size_t last_record = 0;
  RunObserver obs;
  obs.on_record = [&](const DiagnosticRecord& r) { last_record = r.n; };
  try {
    run_simulation(m, bad, ComplexField(m, 1.0), config_with(0.01, 0.1, 1.0), obs);
    FAIL() << "expected NonFiniteState";
  } catch (const NonFiniteState& e) {
    EXPECT_EQ(e.step(), 3u);
    EXPECT_EQ(last_record, 2u);
  }
}

TEST(RunSimulation, RejectsForeignInitialState) {
  const auto m = generate_uniform_rectangle_mesh(2, 2, 1, 1);
  const auto other = generate_uniform_rectangle_mesh(2, 2, 1, 1);
  EXPECT_THROW(run_simulation(m, zero_potential(), ComplexField(other, 1.0), config_with(0.1, 0.1, 1.0)), InputError);
}

TEST(RunSimulation, BitReproducible) {
  const auto s = stirred_disk_scenario(disk(), 30.0);
  const auto a = run_to(s, disk(), 0.001, 0.02);
  const auto b = run_to(s, disk(), 0.001, 0.02);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
}

TEST(RunSimulation, MassDriftStirredDiskShortRun) {
  auto s = stirred_disk_scenario(disk(), 30.0);
  const auto u0 = initial_state(s);
  const auto u = run_to(s, disk(), 0.001, 0.2);
  EXPECT_LE(std::abs(lp_norm(u, 2.0) - lp_norm(u0, 2.0)), 1e-10 * lp_norm(u0, 2.0));
}

// ---------------------------------------------------------------------------

TEST(Energy, Examples) {
  const auto a = assemble_laplacian(disk(), BcMode::InteriorOnly);
  const auto pot = stirrer_potential(100, 0.2, 30);
  EXPECT_EQ(discrete_energy(ComplexField(disk()), 0.0, a, pot, 100.0), 0.0);
  std::mt19937_64 rng(13);
  const auto u = random_field(disk(), rng);
  const double h1 = h1_seminorm(u);
  const double e0 = discrete_energy(u, 0.0, a, zero_potential(), 0.0);
  EXPECT_NEAR(e0, 0.5 * h1 * h1, 1e-12 * h1 * h1);
  const auto v = linear_flow(u, 0.05, a);
  EXPECT_NEAR(discrete_energy(v, 0.0, a, zero_potential(), 0.0), e0, 1e-11 * e0);
}

TEST(Energy, IndependentEvaluation) {
  const auto m = generate_uniform_rectangle_mesh(2, 1, 2, 1);
  const auto a = assemble_laplacian(m, BcMode::InteriorOnly);
  const ComplexField u(m, {Complex(1.0, 0.0), Complex(0.0, 2.0)});
  // 1/2 |U_L - U_K|^2 + lambda/4 (1 + 16) + 1/2 sum V(x_K) |U_K|^2, V = r^2
  const auto pot = static_potential([](Point2 x) { return dot(x, x); });
  const double expected = 0.5 * 5.0 + 0.25 * 3.0 * 17.0 + 0.5 * ((0.5 * 0.5 + 0.5 * 0.5) * 1.0 + (1.5 * 1.5 + 0.25) * 4.0);
  EXPECT_NEAR(discrete_energy(u, 0.0, a, pot, 3.0), expected, 1e-13);
}

TEST(Energy, DriftShrinksWithTau) {
  const auto m = generate_uniform_rectangle_mesh(12, 12, 2, 2);
  auto s = stirred_disk_scenario(m);
  s.potential = {"harmonic", 10.0, 0.0, 0.0};
  s.initial = [](Point2 x) { return Complex(std::exp(-4.0 * dot(x - Point2{1, 1}, x - Point2{1, 1}))); };
  s.config.lambda = 5.0;
  const auto pot = make_potential(s.potential);
  const auto a = assemble_laplacian(m, s.config.bc_mode);
  const double e0 = discrete_energy(initial_state(s), 0.0, a, pot, s.config.lambda);
  std::vector<double> taus, drifts;
  for (double tau : {0.002, 0.001, 0.0005, 0.00025}) {
    const auto u = run_to(s, m, tau, 0.2);
    taus.push_back(tau);
    drifts.push_back(std::abs(discrete_energy(u, 0.2, a, pot, s.config.lambda) - e0));
  }
  for (double order : testsupport::observed_orders(taus, drifts)) EXPECT_GE(order, 0.8);
}

// ---------------------------------------------------------------------------

TEST(Stirrer, Examples) {
  const Point2 x{0.6, -1.1};
  EXPECT_NEAR(stirrer_antiderivative(0.4, 0.01, x, 100, 0.0, 30), 100 * dot(x, x) * 0.01, 1e-13);
  EXPECT_EQ(stirrer_antiderivative(0.4, 0.0, x, 100, 0.2, 30), 0.0);
}

TEST(Stirrer, MatchesQuadrature) {
  const auto pot = stirrer_potential(100, 0.2, 30);
  const Point2 x{1.0, 0.0};
  const double quad = simpson([&](double s) { return pot.value(0.3 + s, x); }, 0.0, 0.01, 2000);
  EXPECT_NEAR(stirrer_antiderivative(0.3, 0.01, x, 100, 0.2, 30), quad, 1e-10);
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> d(-2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const Point2 p{d(rng), d(rng)};
    const double t = std::abs(d(rng)), tau = 0.05 * std::abs(d(rng));
    const double q = simpson([&](double s) { return pot.value(t + s, p); }, 0.0, tau, 2000);
    EXPECT_NEAR(pot.antiderivative(t, tau, p), q, 1e-10 * (1 + std::abs(q)));
  }
}

TEST(Stirrer, DerivativeIsValue) {
  const auto pot = stirrer_potential(100, 0.2, 30);
  const double h = 1e-5;
  for (double tau : {0.01, 0.1, 0.7}) {
    const Point2 p{0.3, 1.2};
    const double fd = (pot.antiderivative(0.2, tau + h, p) - pot.antiderivative(0.2, tau - h, p)) / (2 * h);
    EXPECT_NEAR(fd, pot.value(0.2 + tau, p), 1e-5 * std::abs(pot.value(0.2 + tau, p)));
  }
}

TEST(Stirrer, SmallOmegaBranchIsContinuous) {
  const Point2 p{0.7, 0.4};
  const double c = std::cos(2.0 * std::atan2(p.y, p.x));
  const double limit = stirrer_antiderivative(0.5, 0.01, p, 100, 0.2, 0.0);
  EXPECT_NEAR(limit, 100 * dot(p, p) * 0.01 * (1.0 + 0.2 * c), 1e-13);
  // either side of the |omega tau| = 1e-12 switch
  const double below = stirrer_antiderivative(0.5, 0.01, p, 100, 0.2, 0.9e-10);
  const double above = stirrer_antiderivative(0.5, 0.01, p, 100, 0.2, 1.1e-10);
  EXPECT_NEAR(below, above, 2e-12);
  EXPECT_NEAR(below, limit, 100 * dot(p, p) * 0.2 * 0.01 * 1.1e-10 * 0.51);
  // |G(omega) - G(0)| <= V0 r^2 eps tau omega (t_n + tau)
  EXPECT_NEAR(stirrer_antiderivative(0.5, 0.01, p, 100, 0.2, 1e-6), limit, 100 * dot(p, p) * 0.2 * 0.01 * 1e-6 * 0.51);
}

TEST(QuadraturePotential, FallbackAndWarning) {
  const auto exact = stirrer_potential(100, 0.2, 30);
  const auto approx = Potential::from_value(exact.value);
  EXPECT_TRUE(approx.quadrature_antiderivative);
  const Point2 p{1.0, 0.5};
  EXPECT_NEAR(approx.antiderivative(0.3, 0.01, p), exact.antiderivative(0.3, 0.01, p), 1e-10);
  EXPECT_EQ(approx.antiderivative(0.3, 0.0, p), 0.0);
  const SplittingIntegrator integ(disk(), approx, config_with(0.001, 0.001, 1.0));
  ASSERT_EQ(integ.warnings().size(), 1u);
  EXPECT_NE(integ.warnings()[0].find("quadrature"), std::string::npos);
}

TEST(Diagnostics, CsvFormat) {
  Diagnostics d;
  d.records.push_back({0, 0.0, 1.0, 2.5, 3.0, 0.5});
  d.records.push_back({1, 0.001, 1.0, 2.5, 3.0, 0.5});
  std::ostringstream os;
  write_diagnostics_csv(d, os);
  EXPECT_EQ(os.str(), "n,t,mass,h1,energy,linf\n0,0,1,2.5,3,0.5\n1,0.001,1,2.5,3,0.5\n");
}
