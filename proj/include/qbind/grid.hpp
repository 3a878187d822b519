#pragma once
#include "qbind/vec3.hpp"
#include <cstddef>
#include <string>
#include <vector>

namespace qbind {

//! Uniform cubic grid of n^3 cells with spacing h. Samples live at cell
//! centers: x(i,j,k) = origin + h * (i + 1/2, j + 1/2, k + 1/2).
struct GridSpec {
  int n = 0;
  double h = 0.0;
  Vec3 origin{};

  Vec3 point(int i, int j, int k) const {
    return {origin.x + h * (i + 0.5), origin.y + h * (j + 0.5),
            origin.z + h * (k + 0.5)};
  }
  double extent() const { return n * h; }
  friend bool operator==(const GridSpec &a, const GridSpec &b) {
    return a.n == b.n && a.h == b.h && a.origin == b.origin;
  }
};

//! Scalar samples on a GridSpec, row-major with the z index fastest
//! (flat index (i*n + j)*n + k).
class ScalarGrid final {
public:
  ScalarGrid() = default;
  explicit ScalarGrid(const GridSpec &spec);

  const GridSpec &spec() const { return m_spec; }
  int n() const { return m_spec.n; }

  double &at(int i, int j, int k) { return m_data[index(i, j, k)]; }
  double at(int i, int j, int k) const { return m_data[index(i, j, k)]; }

  std::vector<double> &data() { return m_data; }
  const std::vector<double> &data() const { return m_data; }

  //! Largest absolute sample.
  double max_abs() const;
  //! Root-mean-square over cells at least `margin` cells from every face.
  double rms_interior(int margin) const;

private:
  GridSpec m_spec;
  std::vector<double> m_data;

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * m_spec.n + j) * m_spec.n + k;
  }
};

//! Vector samples on a GridSpec, same ordering, components interleaved.
class VectorGrid final {
public:
  VectorGrid() = default;
  explicit VectorGrid(const GridSpec &spec);

  const GridSpec &spec() const { return m_spec; }
  int n() const { return m_spec.n; }

  Vec3 &at(int i, int j, int k) { return m_data[index(i, j, k)]; }
  const Vec3 &at(int i, int j, int k) const { return m_data[index(i, j, k)]; }

  std::vector<Vec3> &data() { return m_data; }
  const std::vector<Vec3> &data() const { return m_data; }

  double max_norm() const;
  //! RMS of the Euclidean norms over the interior (margin cells excluded).
  double rms_interior(int margin) const;

private:
  GridSpec m_spec;
  std::vector<Vec3> m_data;

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * m_spec.n + j) * m_spec.n + k;
  }
};

//==============================================================================
// Serialization
//==============================================================================

//! Binary layout (native little-endian): int64 n, f64 h, f64 origin.x/y/z,
//! then the payload row-major (scalar: n^3 doubles; vector: n^3 * 3 doubles,
//! components interleaved per cell).
void write_scalar(const ScalarGrid &g, const std::string &path);
ScalarGrid read_scalar(const std::string &path);
void write_vector(const VectorGrid &g, const std::string &path);
VectorGrid read_vector(const std::string &path);

//! Text form for small grids: header line, then one "i,j,k,value" row per
//! cell with 17 significant digits (doubles round-trip exactly).
void write_scalar_csv(const ScalarGrid &g, const std::string &path);

} // namespace qbind
