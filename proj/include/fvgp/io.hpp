#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fvgp/error.hpp"
#include "fvgp/format.hpp"
#include "fvgp/grid_function.hpp"
#include "fvgp/mesh.hpp"

namespace fvgp {

// ---------------------------------------------------------------------------
// Grid function CSV: header `cell_id,re,im`, one row per cell.

template <typename T>
void write_grid_function_csv(const GridFunction<T>& u, std::ostream& os) {
  os << "cell_id,re,im\n";
  for (std::size_t k = 0; k < u.size(); ++k) {
    const Complex v = u[k];
    os << k << ',' << to_exact_string(v.real()) << ',' << to_exact_string(v.imag()) << '\n';
  }
}

inline ComplexField read_grid_function_csv(const MeshPtr& mesh, std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("cell_id,re,im", 0) != 0)
    throw InputError("grid function CSV must start with the header cell_id,re,im");
  ComplexField u(mesh);
  std::vector<bool> seen(mesh->n_cells(), false);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id, re, im;
    if (!std::getline(ls, id, ',') || !std::getline(ls, re, ',') || !std::getline(ls, im))
      throw InputError("grid function CSV line " + std::to_string(lineno) + " is malformed");
    std::size_t pos = 0;
    std::size_t k = 0;
    try {
      k = std::stoull(id, &pos);
    } catch (const std::logic_error&) {
      pos = 0;
    }
    if (pos != id.size() || id.empty() || k >= mesh->n_cells())
      throw InputError("grid function CSV line " + std::to_string(lineno) + " has an invalid cell id");
    u[k] = {parse_double(re), parse_double(im)};
    seen[k] = true;
  }
  for (std::size_t k = 0; k < seen.size(); ++k)
    if (!seen[k]) throw InputError("grid function CSV has no value for cell " + std::to_string(k));
  return u;
}

// ---------------------------------------------------------------------------
// VTK legacy ASCII writer

struct NamedField {
  std::string name;
  std::variant<RealField, ComplexField> field;
};

/// Argument in [-pi, pi).
inline double phase_of(Complex z) {
  const double a = std::arg(z);
  return a >= std::numbers::pi ? a - 2.0 * std::numbers::pi : a;
}

/// UNSTRUCTURED_GRID of polygon cells with one CELL_DATA scalar array per real
/// field and `<name>_abs`, `<name>_arg` arrays per complex field.
inline void write_vtk(const Mesh& mesh, const std::vector<NamedField>& fields, std::ostream& os,
                      const std::string& title = "fvgp") {
  for (const auto& f : fields) {
    const auto same = std::visit([&](const auto& g) { return &g.mesh() == &mesh; }, f.field);
    if (!same) throw InputError("field " + f.name + " does not live on the exported mesh");
  }
  os << "# vtk DataFile Version 2.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.nodes().size() << " double\n";
  for (const auto& p : mesh.nodes()) os << to_exact_string(p.x) << ' ' << to_exact_string(p.y) << " 0\n";

  std::size_t total = 0;
  for (const auto& c : mesh.cells()) total += c.vertex_ids.size() + 1;
  os << "CELLS " << mesh.n_cells() << ' ' << total << '\n';
  for (const auto& c : mesh.cells()) {
    os << c.vertex_ids.size();
    for (auto v : c.vertex_ids) os << ' ' << v;
    os << '\n';
  }
  os << "CELL_TYPES " << mesh.n_cells() << '\n';
  for (std::size_t k = 0; k < mesh.n_cells(); ++k) os << "7\n";  // VTK_POLYGON

  if (fields.empty()) return;
  os << "CELL_DATA " << mesh.n_cells() << '\n';
  auto scalars = [&](const std::string& name, auto&& value) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t k = 0; k < mesh.n_cells(); ++k) os << to_exact_string(value(k)) << '\n';
  };
  for (const auto& f : fields) {
    if (const auto* r = std::get_if<RealField>(&f.field)) {
      scalars(f.name, [&](std::size_t k) { return (*r)[k]; });
    } else {
      const auto& c = std::get<ComplexField>(f.field);
      scalars(f.name + "_abs", [&](std::size_t k) { return std::abs(c[k]); });
      scalars(f.name + "_arg", [&](std::size_t k) { return phase_of(c[k]); });
    }
  }
}

inline void export_vtk(const Mesh& mesh, const std::vector<NamedField>& fields, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  write_vtk(mesh, fields, os);
  if (!os) throw InputError("failed writing " + path);
}

}  // namespace fvgp
