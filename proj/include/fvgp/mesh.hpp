#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fvgp/error.hpp"
#include "fvgp/format.hpp"
#include "fvgp/geometry.hpp"

namespace fvgp {

inline constexpr std::size_t no_cell = std::numeric_limits<std::size_t>::max();

/// A control volume K.
struct Cell {
  Point2 center;                         // x_K
  double area = 0.0;                     // |K|
  std::vector<std::size_t> edge_ids;     // E_K
  double diameter = 0.0;                 // h_K
  bool on_boundary_center = false;       // x_K lies on an exterior edge of K
  std::vector<std::size_t> vertex_ids;   // counter-clockwise polygon, indices into Mesh::nodes()
};

enum class EdgeKind { Interior, Exterior };

/// An edge sigma with the TPFA geometric quantities.
///
/// For exterior edges `L == no_cell`, `d_L == 0` and `d_KL` holds `d_K`, so that
/// the transmissibility |sigma| / d_KL reads |sigma| / d_{K,sigma} there.
struct Edge {
  EdgeKind kind = EdgeKind::Interior;
  std::size_t K = no_cell;
  std::size_t L = no_cell;
  double measure = 0.0;  // |sigma|
  double d_KL = 0.0;
  double d_K = 0.0;      // d_{K,sigma}
  double d_L = 0.0;      // d_{L,sigma}
  Point2 normal;         // nu_{K,sigma}, unit, pointing out of K
  Point2 x_sigma;        // foot of the perpendicular from x_K on sigma
  std::array<std::size_t, 2> vertex_ids{};

  bool is_interior() const { return kind == EdgeKind::Interior; }
  double transmissibility() const { return measure / d_KL; }

  /// d_{M,sigma} for one of the two cells M adjacent to the edge.
  double distance_from(std::size_t cell) const { return cell == K ? d_K : d_L; }
  std::size_t other(std::size_t cell) const { return cell == K ? L : K; }
};

/// Immutable admissible finite-volume mesh of a polygonal domain.
///
/// The constructor checks the structural invariants only (positive measures,
/// consistent cell/edge cross references). Geometric admissibility is
/// measured by validate_admissibility().
class Mesh {
 public:
  Mesh(std::vector<Point2> nodes, std::vector<Cell> cells, std::vector<Edge> edges)
      : nodes_(std::move(nodes)), cells_(std::move(cells)), edges_(std::move(edges)) {
    check_structure();
    compute_derived();
  }

  const std::vector<Point2>& nodes() const { return nodes_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Cell& cell(std::size_t k) const { return cells_[k]; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }
  const std::vector<std::size_t>& interior_edges() const { return interior_; }
  const std::vector<std::size_t>& exterior_edges() const { return exterior_; }

  std::size_t n_cells() const { return cells_.size(); }  // d_h
  std::size_t n_edges() const { return edges_.size(); }  // e_h
  double h() const { return h_; }
  double xi() const { return xi_; }
  double domain_diameter() const { return domain_diameter_; }
  /// Area enclosed by the exterior edges (independent of the cell areas).
  double domain_area() const { return domain_area_; }
  double total_cell_area() const { return total_cell_area_; }

 private:
  void check_structure() const {
    const auto n = cells_.size();
    if (n == 0) throw InputError("mesh has no cells");
    for (std::size_t k = 0; k < n; ++k) {
      const auto& c = cells_[k];
      if (!(c.area > 0.0)) throw InputError("cell " + std::to_string(k) + " has non-positive area");
      if (!(c.diameter > 0.0)) throw InputError("cell " + std::to_string(k) + " has non-positive diameter");
      if (c.edge_ids.empty()) throw InputError("cell " + std::to_string(k) + " has no edges");
      if (!is_finite(c.center)) throw InputError("cell " + std::to_string(k) + " has a non-finite center");
      for (auto e : c.edge_ids) {
        if (e >= edges_.size()) throw InputError("cell " + std::to_string(k) + " references a missing edge");
        if (edges_[e].K != k && edges_[e].L != k)
          throw InputError("edge " + std::to_string(e) + " does not reference cell " + std::to_string(k));
      }
      for (auto v : c.vertex_ids)
        if (v >= nodes_.size()) throw InputError("cell " + std::to_string(k) + " references a missing node");
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto& s = edges_[e];
      const auto id = std::to_string(e);
      if (!(s.measure > 0.0)) throw InputError("edge " + id + " has non-positive measure");
      if (s.K >= n) throw InputError("edge " + id + " references a missing cell");
      if (s.is_interior()) {
        if (s.L >= n) throw InputError("interior edge " + id + " references a missing cell");
        if (s.L == s.K) throw InputError("interior edge " + id + " joins a cell to itself");
      } else if (s.L != no_cell) {
        throw InputError("exterior edge " + id + " has a second cell");
      }
      for (auto v : s.vertex_ids)
        if (v >= nodes_.size()) throw InputError("edge " + id + " references a missing node");
      auto listed = [&](std::size_t k) {
        const auto& ids = cells_[k].edge_ids;
        return std::find(ids.begin(), ids.end(), e) != ids.end();
      };
      if (!listed(s.K) || (s.is_interior() && !listed(s.L)))
        throw InputError("edge " + id + " is missing from the edge list of an adjacent cell");
    }
  }

  void compute_derived() {
    for (std::size_t e = 0; e < edges_.size(); ++e)
      (edges_[e].is_interior() ? interior_ : exterior_).push_back(e);

    h_ = 0.0;
    total_cell_area_ = 0.0;
    xi_ = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      const auto& c = cells_[k];
      h_ = std::max(h_, c.diameter);
      total_cell_area_ += c.area;
      for (auto e : c.edge_ids) {
        const auto& s = edges_[e];
        xi_ = std::min({xi_, s.distance_from(k) / c.diameter, s.measure / c.diameter});
      }
    }

    domain_area_ = 0.0;
    std::vector<Point2> boundary;
    for (auto e : exterior_) {
      const auto& s = edges_[e];
      Point2 a = nodes_[s.vertex_ids[0]];
      Point2 b = nodes_[s.vertex_ids[1]];
      // counter-clockwise traversal keeps the outward normal on the right
      if (cross(b - a, s.normal) > 0.0) std::swap(a, b);
      domain_area_ += 0.5 * cross(a, b);
      boundary.push_back(a);
    }
    domain_diameter_ = 0.0;
    for (std::size_t i = 0; i < boundary.size(); ++i)
      for (std::size_t j = i + 1; j < boundary.size(); ++j)
        domain_diameter_ = std::max(domain_diameter_, distance(boundary[i], boundary[j]));
  }

  std::vector<Point2> nodes_;
  std::vector<Cell> cells_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> exterior_;
  double h_ = 0.0;
  double xi_ = 0.0;
  double domain_diameter_ = 0.0;
  double domain_area_ = 0.0;
  double total_cell_area_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Conforming triangulation as read from a mesh file.
struct Triangulation {
  std::vector<Point2> nodes;
  std::vector<std::array<std::size_t, 3>> triangles;
  std::vector<std::array<std::size_t, 2>> boundary_edges;
};

/// Axis-aligned nx-by-ny rectangle mesh of [0, Lx] x [0, Ly] with centers at
/// the cell midpoints.
inline MeshPtr generate_uniform_rectangle_mesh(std::size_t nx, std::size_t ny, double Lx, double Ly) {
  if (nx < 1 || ny < 1) throw InputError("rectangle mesh needs at least one cell per direction");
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw InputError("rectangle mesh needs positive side lengths");

  const double dx = Lx / static_cast<double>(nx);
  const double dy = Ly / static_cast<double>(ny);
  auto node_id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
  auto cell_id = [nx](std::size_t i, std::size_t j) { return j * nx + i; };

  std::vector<Point2> nodes;
  nodes.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j)
    for (std::size_t i = 0; i <= nx; ++i)
      nodes.push_back({static_cast<double>(i) * dx, static_cast<double>(j) * dy});

  std::vector<Cell> cells(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      auto& c = cells[cell_id(i, j)];
      c.center = {(static_cast<double>(i) + 0.5) * dx, (static_cast<double>(j) + 0.5) * dy};
      c.area = dx * dy;
      c.diameter = std::hypot(dx, dy);
      c.vertex_ids = {node_id(i, j), node_id(i + 1, j), node_id(i + 1, j + 1), node_id(i, j + 1)};
    }
  }

  std::vector<Edge> edges;
  auto add = [&](Edge s) {
    const auto e = edges.size();
    cells[s.K].edge_ids.push_back(e);
    if (s.is_interior()) cells[s.L].edge_ids.push_back(e);
    s.x_sigma = cells[s.K].center + s.d_K * s.normal;
    edges.push_back(s);
  };
  auto interior = [](std::size_t K, std::size_t L, double measure, double dist, Point2 normal,
                     std::size_t a, std::size_t b) {
    Edge s;
    s.kind = EdgeKind::Interior;
    s.K = K;
    s.L = L;
    s.measure = measure;
    s.d_KL = dist;
    s.d_K = 0.5 * dist;
    s.d_L = 0.5 * dist;
    s.normal = normal;
    s.vertex_ids = {a, b};
    return s;
  };
  auto exterior = [](std::size_t K, double measure, double dist, Point2 normal, std::size_t a, std::size_t b) {
    Edge s;
    s.kind = EdgeKind::Exterior;
    s.K = K;
    s.measure = measure;
    s.d_K = dist;
    s.d_KL = dist;
    s.normal = normal;
    s.vertex_ids = {a, b};
    return s;
  };

  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i)
      add(interior(cell_id(i, j), cell_id(i + 1, j), dy, dx, {1.0, 0.0}, node_id(i + 1, j), node_id(i + 1, j + 1)));
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      add(interior(cell_id(i, j), cell_id(i, j + 1), dx, dy, {0.0, 1.0}, node_id(i, j + 1), node_id(i + 1, j + 1)));
  for (std::size_t i = 0; i < nx; ++i) {
    add(exterior(cell_id(i, 0), dx, 0.5 * dy, {0.0, -1.0}, node_id(i, 0), node_id(i + 1, 0)));
    add(exterior(cell_id(i, ny - 1), dx, 0.5 * dy, {0.0, 1.0}, node_id(i, ny), node_id(i + 1, ny)));
  }
  for (std::size_t j = 0; j < ny; ++j) {
    add(exterior(cell_id(0, j), dy, 0.5 * dx, {-1.0, 0.0}, node_id(0, j), node_id(0, j + 1)));
    add(exterior(cell_id(nx - 1, j), dy, 0.5 * dx, {1.0, 0.0}, node_id(nx, j), node_id(nx, j + 1)));
  }

  return std::make_shared<const Mesh>(std::move(nodes), std::move(cells), std::move(edges));
}

/// Circumcentric finite-volume mesh of an acute conforming triangulation.
///
/// `tol` is relative to the triangle diameter: every d_{K,sigma} must be at
/// least tol * h_K and every area at least tol * h_K^2.
inline MeshPtr build_fv_mesh_from_triangulation(const Triangulation& tri, double tol = 1e-8) {
  const auto& nodes = tri.nodes;
  if (tri.triangles.empty()) throw InputError("triangulation has no triangles");

  std::vector<Cell> cells(tri.triangles.size());
  for (std::size_t k = 0; k < tri.triangles.size(); ++k) {
    auto ids = tri.triangles[k];
    for (auto v : ids)
      if (v >= nodes.size()) throw InputError("triangle " + std::to_string(k) + " references a missing node");
    const Point2 a = nodes[ids[0]], b = nodes[ids[1]], c = nodes[ids[2]];
    double area = signed_area(a, b, c);
    if (area < 0.0) {
      std::swap(ids[1], ids[2]);
      area = -area;
    }
    const double diam = std::max({distance(a, b), distance(b, c), distance(c, a)});
    if (!(area > tol * diam * diam)) throw InputError("degenerate triangle " + std::to_string(k));
    auto& cell = cells[k];
    cell.area = area;
    cell.diameter = diam;
    cell.center = circumcenter(nodes[ids[0]], nodes[ids[1]], nodes[ids[2]]);
    cell.vertex_ids.assign(ids.begin(), ids.end());
  }

  // (min node, max node) -> adjacent triangles
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> adjacency;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& v = cells[k].vertex_ids;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto a = v[i], b = v[(i + 1) % 3];
      adjacency[{std::min(a, b), std::max(a, b)}].push_back(k);
    }
  }

  std::vector<Edge> edges;
  edges.reserve(adjacency.size());
  for (const auto& [key, adj] : adjacency) {
    if (adj.size() > 2) throw InputError("non-conforming triangulation: an edge is shared by more than two triangles");
    const Point2 pa = nodes[key.first], pb = nodes[key.second];
    const Point2 mid = 0.5 * (pa + pb);
    const double length = distance(pa, pb);

    Edge s;
    s.K = adj[0];
    s.measure = length;
    s.vertex_ids = {key.first, key.second};
    const Cell& K = cells[s.K];
    // outward normal of K: points away from the vertex of K opposite to the edge
    Point2 n = perp(pb - pa) * (1.0 / length);
    Point2 opposite{};
    for (auto v : K.vertex_ids)
      if (v != key.first && v != key.second) opposite = nodes[v];
    if (dot(n, mid - opposite) < 0.0) n = -1.0 * n;
    s.normal = n;
    s.d_K = dot(mid - K.center, n);
    if (!(s.d_K >= tol * K.diameter))
      throw InputError("non-acute triangle " + std::to_string(s.K) + ": circumcenter not strictly inside");
    s.x_sigma = K.center + s.d_K * n;

    if (adj.size() == 2) {
      s.kind = EdgeKind::Interior;
      s.L = adj[1];
      const Cell& L = cells[s.L];
      s.d_L = dot(L.center - mid, n);
      if (!(s.d_L >= tol * L.diameter))
        throw InputError("non-acute triangle " + std::to_string(s.L) + ": circumcenter not strictly inside");
      s.d_KL = distance(K.center, L.center);
      if (!(s.d_KL >= tol * std::max(K.diameter, L.diameter)))
        throw InputError("coincident circumcenters across an edge");
    } else {
      s.kind = EdgeKind::Exterior;
      s.d_KL = s.d_K;
    }

    const auto e = edges.size();
    cells[s.K].edge_ids.push_back(e);
    if (s.is_interior()) cells[s.L].edge_ids.push_back(e);
    edges.push_back(s);
  }

  for (auto& c : cells) {
    for (auto e : c.edge_ids) {
      const auto& s = edges[e];
      if (!s.is_interior() && s.d_K <= 1e-10 * c.diameter) c.on_boundary_center = true;
    }
  }

  return std::make_shared<const Mesh>(nodes, std::move(cells), std::move(edges));
}

/// Admissibility measurements of a mesh; see validate_admissibility().
struct ValidationReport {
  double orthogonality_defect = 0.0;  // max angle (radians) between nu_{K,sigma} and x_L - x_K
  double distance_defect = 0.0;       // max |d_K + d_L - d_KL| / d_KL
  double iso_defect = 0.0;            // max |2 d_K - d_KL| / d_KL
  double xi = 0.0;                    // min over (K, sigma) of min(d_{K,sigma}, |sigma|) / h_K
  double area_residual = 0.0;         // |sum |K| - domain area| / domain area
  std::size_t max_edges_per_cell = 0;
  bool boundary_property = false;     // every boundary cell has its center on the boundary
  bool iso_property = false;
  bool reg_property = false;
  bool orthogonal = false;
  bool distance_defect_ok = false;
  bool area_ok = false;

  bool admissible() const { return orthogonal && distance_defect_ok && area_ok; }
};

inline ValidationReport validate_admissibility(const Mesh& mesh, double tol = 1e-10) {
  ValidationReport r;
  bool reg_upper = true;
  for (auto e : mesh.interior_edges()) {
    const auto& s = mesh.edge(e);
    const Point2 kl = mesh.cell(s.L).center - mesh.cell(s.K).center;
    const double angle = std::atan2(std::abs(cross(s.normal, kl)), dot(s.normal, kl));
    r.orthogonality_defect = std::max(r.orthogonality_defect, angle);
    r.distance_defect = std::max(r.distance_defect, std::abs(s.d_K + s.d_L - s.d_KL) / s.d_KL);
    r.iso_defect = std::max(r.iso_defect, std::abs(2.0 * s.d_K - s.d_KL) / s.d_KL);
  }
  r.boundary_property = true;
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    const auto& c = mesh.cell(k);
    r.max_edges_per_cell = std::max(r.max_edges_per_cell, c.edge_ids.size());
    bool touches_boundary = false;
    bool center_on_boundary = false;
    for (auto e : c.edge_ids) {
      const auto& s = mesh.edge(e);
      if (s.distance_from(k) > c.diameter || s.measure > c.diameter) reg_upper = false;
      if (!s.is_interior()) {
        touches_boundary = true;
        if (std::abs(s.d_K) <= tol * c.diameter) center_on_boundary = true;
      }
    }
    if (touches_boundary && !center_on_boundary) r.boundary_property = false;
  }
  r.xi = mesh.xi();
  r.area_residual = std::abs(mesh.total_cell_area() - mesh.domain_area()) / mesh.domain_area();
  r.orthogonal = r.orthogonality_defect <= tol;
  r.distance_defect_ok = r.distance_defect <= tol;
  r.area_ok = r.area_residual <= tol;
  r.iso_property = r.iso_defect <= tol;
  r.reg_property = r.xi > 0.0 && r.xi < 1.0 && reg_upper;
  return r;
}

inline std::ostream& operator<<(std::ostream& os, const ValidationReport& r) {
  os << "orthogonality_defect " << r.orthogonality_defect << '\n'
     << "distance_defect " << r.distance_defect << '\n'
     << "iso_defect " << r.iso_defect << '\n'
     << "xi " << r.xi << '\n'
     << "area_residual " << r.area_residual << '\n'
     << "max_edges_per_cell " << r.max_edges_per_cell << '\n'
     << "boundary " << (r.boundary_property ? "yes" : "no") << '\n'
     << "iso " << (r.iso_property ? "yes" : "no") << '\n'
     << "reg " << (r.reg_property ? "yes" : "no") << '\n'
     << "orthogonal " << (r.orthogonal ? "yes" : "no") << '\n';
  return os;
}

// ---------------------------------------------------------------------------
// Native text dump:
//   CELL id cx cy area
//   EDGE id kind K L |sigma| dKL dKsigma dLsigma nx ny
// kind is "interior" or "exterior"; L is -1 on exterior edges.

struct CellRecord {
  std::size_t id = 0;
  Point2 center;
  double area = 0.0;
};

struct EdgeRecord {
  std::size_t id = 0;
  EdgeKind kind = EdgeKind::Interior;
  std::size_t K = no_cell;
  std::size_t L = no_cell;
  double measure = 0.0;
  double d_KL = 0.0;
  double d_K = 0.0;
  double d_L = 0.0;
  Point2 normal;
};

struct MeshDump {
  std::vector<CellRecord> cells;
  std::vector<EdgeRecord> edges;
};

inline void write_mesh_dump(const Mesh& mesh, std::ostream& os) {
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    const auto& c = mesh.cell(k);
    os << "CELL " << k << ' ' << to_exact_string(c.center.x) << ' ' << to_exact_string(c.center.y) << ' '
       << to_exact_string(c.area) << '\n';
  }
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
    const auto& s = mesh.edge(e);
    os << "EDGE " << e << ' ' << (s.is_interior() ? "interior" : "exterior") << ' ' << s.K << ' ';
    if (s.is_interior())
      os << s.L;
    else
      os << -1;
    os << ' ' << to_exact_string(s.measure) << ' ' << to_exact_string(s.d_KL) << ' ' << to_exact_string(s.d_K)
       << ' ' << to_exact_string(s.d_L) << ' ' << to_exact_string(s.normal.x) << ' '
       << to_exact_string(s.normal.y) << '\n';
  }
}

inline MeshDump read_mesh_dump(std::istream& is) {
  MeshDump dump;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto fail = [&] { return InputError("mesh dump line " + std::to_string(lineno) + ": malformed record"); };
    auto index = [&](const std::string& t) {
      std::size_t pos = 0;
      const auto v = std::stoull(t, &pos);
      if (pos != t.size()) throw fail();
      return static_cast<std::size_t>(v);
    };
    try {
      if (tok[0] == "CELL" && tok.size() == 5) {
        dump.cells.push_back({index(tok[1]), {parse_double(tok[2]), parse_double(tok[3])}, parse_double(tok[4])});
      } else if (tok[0] == "EDGE" && tok.size() == 11) {
        EdgeRecord r;
        r.id = index(tok[1]);
        if (tok[2] == "interior")
          r.kind = EdgeKind::Interior;
        else if (tok[2] == "exterior")
          r.kind = EdgeKind::Exterior;
        else
          throw fail();
        r.K = index(tok[3]);
        r.L = tok[4] == "-1" ? no_cell : index(tok[4]);
        r.measure = parse_double(tok[5]);
        r.d_KL = parse_double(tok[6]);
        r.d_K = parse_double(tok[7]);
        r.d_L = parse_double(tok[8]);
        r.normal = {parse_double(tok[9]), parse_double(tok[10])};
        dump.edges.push_back(r);
      } else {
        throw fail();
      }
    } catch (const std::logic_error&) {
      throw fail();
    }
  }
  return dump;
}

}  // namespace fvgp
