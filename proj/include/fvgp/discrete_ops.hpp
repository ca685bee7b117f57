#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <ostream>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "fvgp/error.hpp"
#include "fvgp/format.hpp"
#include "fvgp/grid_function.hpp"
#include "fvgp/mesh.hpp"

namespace fvgp {

// ---------------------------------------------------------------------------
// Norms and inner product

/// Discrete L^p_h norm; p = infinity gives max_K |U_K|.
template <typename T>
double lp_norm(const GridFunction<T>& u, double p) {
  if (!(p >= 1.0)) throw InputError("lp_norm needs p >= 1");
  const auto& mesh = u.mesh();
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) m = std::max(m, std::abs(u[k]));
    return m;
  }
  double sum = 0.0;
  if (p == 2.0) {
    for (std::size_t k = 0; k < u.size(); ++k) sum += mesh.cell(k).area * std::norm(u[k]);
    return std::sqrt(sum);
  }
  for (std::size_t k = 0; k < u.size(); ++k) sum += mesh.cell(k).area * std::pow(std::abs(u[k]), p);
  return std::pow(sum, 1.0 / p);
}

/// Discrete H^1_h semi-norm, interior edges only.
template <typename T>
double h1_seminorm(const GridFunction<T>& u) {
  const auto& mesh = u.mesh();
  double sum = 0.0;
  for (auto e : mesh.interior_edges()) {
    const auto& s = mesh.edge(e);
    sum += s.transmissibility() * std::norm(u[s.L] - u[s.K]);
  }
  return std::sqrt(sum);
}

/// <U, W>_T = sum_K |K| U_K conj(W_K).
template <typename T>
Complex inner_product(const GridFunction<T>& u, const GridFunction<T>& w) {
  require_same_mesh(u, w);
  const auto& mesh = u.mesh();
  if (&u == &w) return lp_norm(u, 2.0) * lp_norm(u, 2.0);
  Complex sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) sum += mesh.cell(k).area * Complex(u[k]) * std::conj(Complex(w[k]));
  return sum;
}

// ---------------------------------------------------------------------------
// TPFA Laplacian

enum class BcMode {
  InteriorOnly,   // interior-edge fluxes only
  DirichletFlux,  // plus |sigma| / d_{K,sigma} (0 - U_K) on exterior edges
};

/// The discrete Laplacian A as a row-compressed real matrix.
///
/// A is self-adjoint for the |K|-weighted inner product: A = M^{-1} S with
/// M = diag(|K|) and S symmetric.
class SparseOperator {
 public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SparseOperator(MeshPtr mesh, Matrix matrix, BcMode mode)
      : mesh_(std::move(mesh)), matrix_(std::move(matrix)), mode_(mode) {
    matrix_.makeCompressed();
  }

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  const Matrix& matrix() const { return matrix_; }
  BcMode bc_mode() const { return mode_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
  /// Always true for operators built by assemble_laplacian().
  bool self_adjoint() const { return true; }

  /// S = M A, symmetric in the Euclidean sense.
  Matrix stiffness() const {
    Matrix s = matrix_;
    for (Eigen::Index r = 0; r < s.outerSize(); ++r)
      for (Matrix::InnerIterator it(s, r); it; ++it) it.valueRef() *= mesh_->cell(static_cast<std::size_t>(r)).area;
    return s;
  }

  /// Row-by-row product with a fixed summation order.
  template <typename T>
  GridFunction<T> apply(const GridFunction<T>& u) const {
    if (u.mesh_ptr().get() != mesh_.get()) throw InputError("operator and grid function live on different meshes");
    GridFunction<T> out(mesh_);
    const auto* outer = matrix_.outerIndexPtr();
    const auto* inner = matrix_.innerIndexPtr();
    const auto* vals = matrix_.valuePtr();
    for (Eigen::Index r = 0; r < matrix_.rows(); ++r) {
      T acc{};
      for (auto i = outer[r]; i < outer[r + 1]; ++i) acc += vals[i] * u[static_cast<std::size_t>(inner[i])];
      out[static_cast<std::size_t>(r)] = acc;
    }
    return out;
  }

  double coeff(std::size_t row, std::size_t col) const {
    return matrix_.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

 private:
  MeshPtr mesh_;
  Matrix matrix_;
  BcMode mode_;
};

inline SparseOperator assemble_laplacian(const MeshPtr& mesh, BcMode mode) {
  const auto n = mesh->n_cells();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(n + 2 * mesh->interior_edges().size());
  std::vector<double> diagonal(n, 0.0);
  for (auto e : mesh->interior_edges()) {
    const auto& s = mesh->edge(e);
    const double t = s.transmissibility();
    const double aK = mesh->cell(s.K).area;
    const double aL = mesh->cell(s.L).area;
    entries.emplace_back(static_cast<int>(s.K), static_cast<int>(s.L), t / aK);
    entries.emplace_back(static_cast<int>(s.L), static_cast<int>(s.K), t / aL);
    diagonal[s.K] -= t / aK;
    diagonal[s.L] -= t / aL;
  }
  if (mode == BcMode::DirichletFlux) {
    for (auto e : mesh->exterior_edges()) {
      const auto& s = mesh->edge(e);
      diagonal[s.K] -= s.measure / s.d_K / mesh->cell(s.K).area;
    }
  }
  for (std::size_t k = 0; k < n; ++k) entries.emplace_back(static_cast<int>(k), static_cast<int>(k), diagonal[k]);
  SparseOperator::Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(entries.begin(), entries.end());
  return SparseOperator(mesh, std::move(a), mode);
}

/// Coordinate text export: one `row col re im` line per stored entry.
inline void write_operator_coo(const SparseOperator& op, std::ostream& os) {
  const auto& m = op.matrix();
  for (Eigen::Index r = 0; r < m.outerSize(); ++r)
    for (SparseOperator::Matrix::InnerIterator it(m, r); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << to_exact_string(it.value()) << " 0\n";
}

// ---------------------------------------------------------------------------
// Interpolants

/// (P_h f)_K = f(x_K).
template <typename F>
auto pointwise_interpolant(F&& f, const MeshPtr& mesh) {
  using T = std::decay_t<decltype(f(Point2{}))>;
  GridFunction<T> out(mesh);
  for (std::size_t k = 0; k < mesh->n_cells(); ++k) {
    out[k] = f(mesh->cell(k).center);
    if (!is_finite(out[k])) throw InputError("function is not finite at the center of cell " + std::to_string(k));
  }
  return out;
}

namespace detail {

struct TriangleRule {
  std::vector<std::array<double, 3>> points;  // barycentric
  std::vector<double> weights;                // sum to 1
};

inline TriangleRule triangle_rule(int degree) {
  if (degree <= 1) return {{{1.0 / 3, 1.0 / 3, 1.0 / 3}}, {1.0}};
  if (degree == 2) return {{{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  // Radon's 7-point rule, exact up to degree 5
  const double r15 = std::sqrt(15.0);
  const double a = (6.0 - r15) / 21.0, b = (9.0 + 2.0 * r15) / 21.0;
  const double c = (6.0 + r15) / 21.0, d = (9.0 - 2.0 * r15) / 21.0;
  const double wa = (155.0 - r15) / 1200.0, wc = (155.0 + r15) / 1200.0;
  return {{{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a, a, b}, {a, b, a}, {b, a, a}, {c, c, d}, {c, d, c}, {d, c, c}},
          {9.0 / 40, wa, wa, wa, wc, wc, wc}};
}

}  // namespace detail

/// (pi_h f)_K = (1/|K|) int_K f, by a centroid-fan triangulation of K with a
/// rule exact for polynomials of degree `quad_order` (1 to 5).
template <typename F>
auto mean_interpolant(F&& f, const MeshPtr& mesh, int quad_order = 2) {
  if (quad_order < 1 || quad_order > 5) throw InputError("mean_interpolant supports quadrature orders 1 to 5");
  using T = std::decay_t<decltype(f(Point2{}))>;
  const auto rule = detail::triangle_rule(quad_order);
  GridFunction<T> out(mesh);
  for (std::size_t k = 0; k < mesh->n_cells(); ++k) {
    const auto& ids = mesh->cell(k).vertex_ids;
    if (ids.size() < 3) throw InputError("cell " + std::to_string(k) + " has no polygon");
    const auto& nodes = mesh->nodes();

    double area = 0.0;
    Point2 centroid{};
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const Point2 p = nodes[ids[i]], q = nodes[ids[(i + 1) % ids.size()]];
      const double w = cross(p, q);
      area += 0.5 * w;
      centroid = centroid + (w / 3.0) * (p + q);
    }
    centroid = (0.5 / area) * centroid;

    T integral{};
    double fan_area = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const Point2 p = nodes[ids[i]], q = nodes[ids[(i + 1) % ids.size()]];
      const double sub = signed_area(centroid, p, q);
      fan_area += sub;
      T acc{};
      for (std::size_t j = 0; j < rule.weights.size(); ++j) {
        const auto& l = rule.points[j];
        acc += rule.weights[j] * f(l[0] * centroid + l[1] * p + l[2] * q);
      }
      integral += sub * acc;
    }
    out[k] = integral / fan_area;
    if (!is_finite(out[k])) throw InputError("function average is not finite on cell " + std::to_string(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Discrete gradients (d = 2)

/// Diamond-cell gradient: 2 (U_L - U_K) / d_KL nu on interior edges,
/// -2 U_K / d_{K,sigma} nu on exterior edges.
template <typename T>
EdgeField<T> edge_gradient(const GridFunction<T>& u) {
  constexpr double dim = 2.0;
  const auto& mesh = u.mesh();
  EdgeField<T> g{u.mesh_ptr(), std::vector<std::array<T, 2>>(mesh.n_edges())};
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
    const auto& s = mesh.edge(e);
    const T jump = s.is_interior() ? T(u[s.L] - u[s.K]) : T(-u[s.K]);
    const T scale = dim * jump / s.d_KL;
    g.values[e] = {scale * s.normal.x, scale * s.normal.y};
  }
  return g;
}

/// Cell gradient (1/|K|) sum_{interior sigma of K} |sigma|/d_KL (U_L - U_K)(x_sigma - x_K).
template <typename T>
CellVectorField<T> cell_gradient(const GridFunction<T>& u) {
  const auto& mesh = u.mesh();
  CellVectorField<T> g{u.mesh_ptr(), std::vector<std::array<T, 2>>(mesh.n_cells())};
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    const auto& c = mesh.cell(k);
    T gx{}, gy{};
    for (auto e : c.edge_ids) {
      const auto& s = mesh.edge(e);
      if (!s.is_interior()) continue;
      const auto other = s.other(k);
      // x_sigma - x_M = d_{M,sigma} times the unit normal pointing out of M
      const double sign = (k == s.K) ? 1.0 : -1.0;
      const Point2 offset = (sign * s.distance_from(k)) * s.normal;
      const T flux = s.transmissibility() * (u[other] - u[k]);
      gx += flux * offset.x;
      gy += flux * offset.y;
    }
    g.values[k] = {gx / c.area, gy / c.area};
  }
  return g;
}

// ---------------------------------------------------------------------------
// Discrete integration by parts

struct IbpSides {
  Complex cell_sum;  // sum_K sum_{interior sigma of K} |sigma|/d_KL (U_K - U_L) conj(W_K)
  Complex edge_sum;  // sum_{interior sigma} |sigma|/d_KL (U_K - U_L) conj(W_K - W_L)
};

template <typename T>
IbpSides discrete_ibp_sides(const GridFunction<T>& u, const GridFunction<T>& w) {
  require_same_mesh(u, w);
  const auto& mesh = u.mesh();
  IbpSides r{0.0, 0.0};
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    for (auto e : mesh.cell(k).edge_ids) {
      const auto& s = mesh.edge(e);
      if (!s.is_interior()) continue;
      const auto other = s.other(k);
      r.cell_sum += s.transmissibility() * Complex(u[k] - u[other]) * std::conj(Complex(w[k]));
    }
  }
  for (auto e : mesh.interior_edges()) {
    const auto& s = mesh.edge(e);
    r.edge_sum += s.transmissibility() * Complex(u[s.K] - u[s.L]) * std::conj(Complex(w[s.K] - w[s.L]));
  }
  return r;
}

/// |cell_sum - edge_sum|; zero up to rounding.
template <typename T>
double discrete_ibp_residual(const GridFunction<T>& u, const GridFunction<T>& w) {
  const auto s = discrete_ibp_sides(u, w);
  return std::abs(s.cell_sum - s.edge_sum);
}

}  // namespace fvgp
