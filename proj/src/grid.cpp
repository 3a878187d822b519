#include "qbind/grid.hpp"
#include "qbind/errors.hpp"
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

namespace qbind {

namespace {

void check_spec(const GridSpec &spec, const char *what) {
  if (spec.n < 1)
    throw DomainError(std::string(what) + ": grid must have at least one cell");
  if (!(spec.h > 0.0))
    throw DomainError(std::string(what) + ": spacing must be positive");
}

} // namespace

ScalarGrid::ScalarGrid(const GridSpec &spec) : m_spec(spec) {
  check_spec(spec, "ScalarGrid");
  m_data.assign(static_cast<std::size_t>(spec.n) * spec.n * spec.n, 0.0);
}

double ScalarGrid::max_abs() const {
  double m = 0.0;
  for (double v : m_data)
    m = std::max(m, std::abs(v));
  return m;
}

double ScalarGrid::rms_interior(int margin) const {
  const int n = m_spec.n;
  if (2 * margin >= n)
    throw DomainError("ScalarGrid::rms_interior: margin swallows the grid");
  double acc = 0.0;
  std::size_t count = 0;
  for (int i = margin; i < n - margin; ++i)
    for (int j = margin; j < n - margin; ++j)
      for (int k = margin; k < n - margin; ++k) {
        const double v = at(i, j, k);
        acc += v * v;
        ++count;
      }
  return std::sqrt(acc / static_cast<double>(count));
}

VectorGrid::VectorGrid(const GridSpec &spec) : m_spec(spec) {
  check_spec(spec, "VectorGrid");
  m_data.assign(static_cast<std::size_t>(spec.n) * spec.n * spec.n, Vec3{});
}

double VectorGrid::max_norm() const {
  double m = 0.0;
  for (const Vec3 &v : m_data)
    m = std::max(m, norm(v));
  return m;
}

double VectorGrid::rms_interior(int margin) const {
  const int n = m_spec.n;
  if (2 * margin >= n)
    throw DomainError("VectorGrid::rms_interior: margin swallows the grid");
  double acc = 0.0;
  std::size_t count = 0;
  for (int i = margin; i < n - margin; ++i)
    for (int j = margin; j < n - margin; ++j)
      for (int k = margin; k < n - margin; ++k) {
        acc += norm2(at(i, j, k));
        ++count;
      }
  return std::sqrt(acc / static_cast<double>(count));
}

//==============================================================================

namespace {

void write_header(std::ofstream &out, const GridSpec &spec) {
  const std::int64_t n = spec.n;
  out.write(reinterpret_cast<const char *>(&n), sizeof(n));
  out.write(reinterpret_cast<const char *>(&spec.h), sizeof(double));
  out.write(reinterpret_cast<const char *>(&spec.origin.x), sizeof(double));
  out.write(reinterpret_cast<const char *>(&spec.origin.y), sizeof(double));
  out.write(reinterpret_cast<const char *>(&spec.origin.z), sizeof(double));
}

GridSpec read_header(std::ifstream &in, const std::string &path) {
  std::int64_t n = 0;
  GridSpec spec;
  in.read(reinterpret_cast<char *>(&n), sizeof(n));
  in.read(reinterpret_cast<char *>(&spec.h), sizeof(double));
  in.read(reinterpret_cast<char *>(&spec.origin.x), sizeof(double));
  in.read(reinterpret_cast<char *>(&spec.origin.y), sizeof(double));
  in.read(reinterpret_cast<char *>(&spec.origin.z), sizeof(double));
  if (!in || n < 1)
    throw ConfigError("grid file has a malformed header: " + path);
  spec.n = static_cast<int>(n);
  return spec;
}

std::ofstream open_out(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ConfigError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open for reading: " + path);
  return in;
}

} // namespace

void write_scalar(const ScalarGrid &g, const std::string &path) {
  auto out = open_out(path);
  write_header(out, g.spec());
  out.write(reinterpret_cast<const char *>(g.data().data()),
            static_cast<std::streamsize>(g.data().size() * sizeof(double)));
  if (!out)
    throw ConfigError("short write: " + path);
}

ScalarGrid read_scalar(const std::string &path) {
  auto in = open_in(path);
  ScalarGrid g(read_header(in, path));
  in.read(reinterpret_cast<char *>(g.data().data()),
          static_cast<std::streamsize>(g.data().size() * sizeof(double)));
  if (!in)
    throw ConfigError("short read: " + path);
  return g;
}

void write_vector(const VectorGrid &g, const std::string &path) {
  auto out = open_out(path);
  write_header(out, g.spec());
  out.write(reinterpret_cast<const char *>(g.data().data()),
            static_cast<std::streamsize>(g.data().size() * sizeof(Vec3)));
  if (!out)
    throw ConfigError("short write: " + path);
}

VectorGrid read_vector(const std::string &path) {
  auto in = open_in(path);
  VectorGrid g(read_header(in, path));
  in.read(reinterpret_cast<char *>(g.data().data()),
          static_cast<std::streamsize>(g.data().size() * sizeof(Vec3)));
  if (!in)
    throw ConfigError("short read: " + path);
  return g;
}

void write_scalar_csv(const ScalarGrid &g, const std::string &path) {
  std::FILE *f = std::fopen(path.c_str(), "w");
  if (!f)
    throw ConfigError("cannot open for writing: " + path);
  std::fprintf(f, "i,j,k,value\n");
  const int n = g.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        std::fprintf(f, "%d,%d,%d,%.17g\n", i, j, k, g.at(i, j, k));
  std::fclose(f);
}

} // namespace qbind
