#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

#include "fvgp/discrete_ops.hpp"
#include "fvgp/format.hpp"
#include "fvgp/grid_function.hpp"

namespace fvgp {

/// omega_h = Re(g) x Im(g) with g the cell gradient of U (2D cross product).
inline RealField pseudo_vorticity(const ComplexField& u) {
  const auto g = cell_gradient(u);
  RealField omega(u.mesh_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const auto& [gx, gy] = g.values[k];
    omega[k] = gx.real() * gy.imag() - gy.real() * gx.imag();
  }
  return omega;
}

struct VortexMark {
  std::size_t cell_id = 0;
  Point2 position;
  int sign = 1;  // sign of omega_h, the winding indicator
  double strength = 0.0;  // |omega_h|
};

/// Local maxima of |omega| over edge neighbours with |omega_K| >= rel_threshold * max |omega|.
///
/// Equal values are ordered by cell id (the lower id wins), and a cell must
/// strictly exceed at least one neighbour, so flat fields yield no marks.
/// Marks are sorted by decreasing strength.
inline std::vector<VortexMark> detect_vortices(const RealField& omega, double rel_threshold = 0.3) {
  if (!(rel_threshold > 0.0 && rel_threshold <= 1.0)) throw InputError("relative threshold must lie in (0, 1]");
  const auto& mesh = omega.mesh();
  if (mesh.n_cells() == 0) throw InputError("empty mesh");

  double max_abs = 0.0;
  for (double w : omega) max_abs = std::max(max_abs, std::abs(w));
  std::vector<VortexMark> marks;
  if (max_abs == 0.0) return marks;
  const double floor = rel_threshold * max_abs;

  for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
    const double a = std::abs(omega[k]);
    if (a < floor) continue;
    bool dominant = true;
    bool exceeds_some = false;
    for (auto e : mesh.cell(k).edge_ids) {
      const auto& s = mesh.edge(e);
      if (!s.is_interior()) continue;
      const auto l = s.other(k);
      const double b = std::abs(omega[l]);
      if (b > a || (b == a && l < k)) {
        dominant = false;
        break;
      }
      if (b < a) exceeds_some = true;
    }
    if (dominant && exceeds_some)
      marks.push_back({k, mesh.cell(k).center, omega[k] > 0.0 ? 1 : -1, a});
  }
  std::sort(marks.begin(), marks.end(), [](const VortexMark& x, const VortexMark& y) {
    return x.strength != y.strength ? x.strength > y.strength : x.cell_id < y.cell_id;
  });
  return marks;
}

/// CSV with header `cell_id,x,y,sign,strength`.
inline void write_vortex_csv(const std::vector<VortexMark>& marks, std::ostream& os) {
  os << "cell_id,x,y,sign,strength\n";
  for (const auto& m : marks)
    os << m.cell_id << ',' << to_exact_string(m.position.x) << ',' << to_exact_string(m.position.y) << ',' << m.sign
       << ',' << to_exact_string(m.strength) << '\n';
}

}  // namespace fvgp
