#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "fvgp/error.hpp"
#include "fvgp/mesh.hpp"

namespace fvgp {

using Complex = std::complex<double>;

inline bool is_finite(double v) { return std::isfinite(v); }
inline bool is_finite(Complex v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

/// One value per control volume of a mesh.
template <typename T>
class GridFunction {
 public:
  using value_type = T;

  explicit GridFunction(MeshPtr mesh, T fill = T{}) : mesh_(std::move(mesh)), values_(mesh_->n_cells(), fill) {}

  GridFunction(MeshPtr mesh, std::vector<T> values) : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (values_.size() != mesh_->n_cells()) throw InputError("grid function size does not match the mesh");
  }

  GridFunction(MeshPtr mesh, std::initializer_list<T> values) : GridFunction(std::move(mesh), std::vector<T>(values)) {}

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  std::size_t size() const { return values_.size(); }

  T& operator[](std::size_t k) { return values_[k]; }
  const T& operator[](std::size_t k) const { return values_[k]; }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  template <typename U>
  bool same_mesh(const GridFunction<U>& other) const {
    return mesh_.get() == other.mesh_ptr().get();
  }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](const T& v) { return is_finite(v); });
  }

  GridFunction& operator+=(const GridFunction& o) {
    check(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    check(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
  }
  GridFunction& operator*=(T s) {
    for (auto& v : values_) v *= s;
    return *this;
  }

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(T s, GridFunction a) { return a *= s; }
  friend GridFunction operator*(GridFunction a, T s) { return a *= s; }

 private:
  void check(const GridFunction& o) const {
    if (!same_mesh(o)) throw InputError("grid functions live on different meshes");
  }

  MeshPtr mesh_;
  std::vector<T> values_;
};

using ComplexField = GridFunction<Complex>;
using RealField = GridFunction<double>;

template <typename T, typename U>
void require_same_mesh(const GridFunction<T>& a, const GridFunction<U>& b) {
  if (!a.same_mesh(b)) throw InputError("grid functions live on different meshes");
}

/// Pointwise product (U W)_K = U_K W_K.
template <typename T>
GridFunction<T> pointwise_product(const GridFunction<T>& a, const GridFunction<T>& b) {
  require_same_mesh(a, b);
  GridFunction<T> out(a.mesh_ptr());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

inline ComplexField to_complex(const RealField& r) {
  ComplexField out(r.mesh_ptr());
  for (std::size_t k = 0; k < r.size(); ++k) out[k] = r[k];
  return out;
}

inline ComplexField conj(const ComplexField& u) {
  ComplexField out(u.mesh_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = std::conj(u[k]);
  return out;
}

/// A 2-vector of T per edge, constant on the diamond cell of the edge.
template <typename T>
struct EdgeField {
  MeshPtr mesh;
  std::vector<std::array<T, 2>> values;
};

/// A 2-vector of T per control volume.
template <typename T>
struct CellVectorField {
  MeshPtr mesh;
  std::vector<std::array<T, 2>> values;
};

}  // namespace fvgp
