#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qbind/errors.hpp"
#include "qbind/fields.hpp"
#include "qbind/grid.hpp"
#include "qbind/quadrature.hpp"
#include "qbind/rng.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace qbind;

namespace {

ScalarGrid gaussian_blob(const GridSpec &spec, const Vec3 &center,
                         double width, double charge) {
  ScalarGrid out(spec);
  const double amp = charge / std::pow(2.0 * M_PI * width * width, 1.5);
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      for (int k = 0; k < spec.n; ++k) {
        const Vec3 d = spec.point(i, j, k) - center;
        out.at(i, j, k) = amp * std::exp(-norm2(d) / (2.0 * width * width));
      }
  return out;
}

std::string temp_path(const std::string &name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("grid geometry") {
  const GridSpec spec{4, 0.25, Vec3{1.0, 2.0, 3.0}};
  CHECK(spec.extent() == doctest::Approx(1.0));
  CHECK(spec.point(0, 0, 0) == Vec3{1.125, 2.125, 3.125});
  CHECK(spec.point(3, 0, 1) == Vec3{1.875, 2.125, 3.375});
  CHECK(spec == GridSpec{4, 0.25, Vec3{1.0, 2.0, 3.0}});
  CHECK_FALSE(spec == GridSpec{4, 0.5, Vec3{1.0, 2.0, 3.0}});
}

TEST_CASE("interior norms reject margins that swallow the grid") {
  ScalarGrid g(GridSpec{5, 0.2, {}});
  CHECK_NOTHROW(g.rms_interior(2));
  CHECK_THROWS_AS(g.rms_interior(3), DomainError);
}

TEST_CASE("difference operators converge at second order") {
  auto analytic = [](const Vec3 &x) {
    return std::sin(2.0 * M_PI * x.x) * std::cos(2.0 * M_PI * x.y) *
           std::sin(2.0 * M_PI * x.z);
  };
  auto analytic_grad = [](const Vec3 &x) {
    const double tp = 2.0 * M_PI;
    return Vec3{tp * std::cos(tp * x.x) * std::cos(tp * x.y) *
                    std::sin(tp * x.z),
                -tp * std::sin(tp * x.x) * std::sin(tp * x.y) *
                    std::sin(tp * x.z),
                tp * std::sin(tp * x.x) * std::cos(tp * x.y) *
                    std::cos(tp * x.z)};
  };
  double err[2];
  const int sizes[2] = {16, 32};
  for (int s = 0; s < 2; ++s) {
    const int n = sizes[s];
    const GridSpec spec{n, 1.0 / n, {}};
    ScalarGrid f(spec);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          f.at(i, j, k) = analytic(spec.point(i, j, k));
    const VectorGrid g = gradient(f);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          worst = std::max(
              worst, norm(g.at(i, j, k) - analytic_grad(spec.point(i, j, k))));
    err[s] = worst;
  }
  // Boundary rows use one-sided second-order stencils, so the global error
  // still contracts by about 4 per doubling.
  CHECK(err[0] / err[1] > 3.0);
  CHECK(err[0] / err[1] < 5.2);
}

TEST_CASE("difference operators need at least three cells") {
  ScalarGrid tiny(GridSpec{2, 0.5, {}});
  CHECK_THROWS_AS(gradient(tiny), DomainError);
}

TEST_CASE("discrete curl annihilates discrete gradients") {
  const int n = 24;
  const GridSpec spec{n, 1.0 / n, {}};
  const ScalarGrid f =
      gaussian_blob(spec, Vec3{0.5, 0.45, 0.55}, 0.15, 1.0);
  const VectorGrid g = gradient(f);
  const VectorGrid c = curl(g);
  // The two difference operators commute entrywise (including the one-sided
  // boundary rows), so this residual is pure rounding, not discretization.
  CHECK(c.max_norm() < 1e-10 * g.max_norm());
}

TEST_CASE("synthetic transverse field") {
  const GridSpec spec{16, 1.0 / 16, {}};
  const VectorGrid a = make_transverse_field(spec, 99);
  const VectorGrid b = make_transverse_field(spec, 99);
  CHECK(a.data() == b.data()); // fully deterministic per seed
  const VectorGrid c = make_transverse_field(spec, 100);
  CHECK_FALSE(a.data() == c.data());
  CHECK(a.max_norm() > 0.0);

  // The construction is divergence-free in the continuum, so the discrete
  // divergence is pure stencil error and contracts at second order.
  double resid[2];
  const int sizes[2] = {16, 32};
  for (int s = 0; s < 2; ++s) {
    const GridSpec sp{sizes[s], 1.0 / sizes[s], {}};
    const VectorGrid e = make_transverse_field(sp, 99);
    resid[s] = divergence(e).rms_interior(2) / e.rms_interior(2);
  }
  CHECK(resid[0] / resid[1] > 2.8);
  CHECK(resid[0] / resid[1] < 5.5);
}

TEST_CASE("cell self-interaction coefficient") {
  // Closed form (6 ln((1+sqrt3)/sqrt2) - pi/2) h^2 against a direct 2D
  // quadrature of the column-integrated kernel over the cell cross-section.
  CHECK(self_cell_kernel(1.0) ==
        doctest::Approx(2.380077363980).epsilon(1e-12));
  CHECK(self_cell_kernel(0.5) ==
        doctest::Approx(2.380077363980 * 0.25).epsilon(1e-12));

  const GaussLegendre g = gauss_legendre(160);
  double acc = 0.0;
  for (std::size_t ix = 0; ix < g.x.size(); ++ix) {
    const double x = 0.25 * (g.x[ix] + 1.0); // [0, 1/2]
    for (std::size_t iy = 0; iy < g.x.size(); ++iy) {
      const double y = 0.25 * (g.x[iy] + 1.0);
      acc += 0.25 * 0.25 * g.w[ix] * g.w[iy] *
             std::asinh(0.5 / std::hypot(x, y));
    }
  }
  CHECK(self_cell_kernel(1.0) == doctest::Approx(8.0 * acc).epsilon(1e-5));
}

TEST_CASE("direct and FFT Newtonian sums agree to rounding") {
  ModelParams p;
  const int n = 16;
  const GridSpec spec{n, 1.0 / n, {}};
  const ScalarGrid blob = gaussian_blob(spec, Vec3{0.5, 0.5, 0.5}, 0.08, 1.0);
  const VectorGrid direct = coulomb_correction(blob, p, PoissonMethod::direct);
  const VectorGrid fft = coulomb_correction(blob, p, PoissonMethod::fft);
  double worst = 0.0;
  for (std::size_t i = 0; i < direct.data().size(); ++i)
    worst = std::max(worst, norm(direct.data()[i] - fft.data()[i]));
  CHECK(worst < 1e-12 * direct.max_norm());
}

TEST_CASE("Coulomb solver contract") {
  ModelParams p;
  CHECK_THROWS_AS(CoulombSolver(GridSpec{4, 0.25, {}}, p), DomainError);

  const GridSpec spec{16, 1.0 / 16, {}};
  CoulombSolver solver(spec, p);

  ScalarGrid zero(spec);
  const VectorGrid none = solver.field(zero);
  CHECK(none.max_norm() == 0.0);

  // Charge hugging a face violates the free-space clearance requirement.
  const ScalarGrid edge =
      gaussian_blob(spec, Vec3{0.05, 0.5, 0.5}, 0.08, 1.0);
  CHECK_THROWS_AS(solver.field(edge), DomainError);

  // Mismatched grids are rejected.
  const ScalarGrid other =
      gaussian_blob(GridSpec{20, 0.05, {}}, Vec3{0.5, 0.5, 0.5}, 0.1, 1.0);
  CHECK_THROWS_AS(solver.field(other), DomainError);
}

TEST_CASE("Coulomb field of a compact blob") {
  ModelParams p;
  const int n = 32;
  const GridSpec spec{n, 1.0 / n, {}};
  const double width = 1.0 / 7.0;
  const Vec3 center{0.5, 0.5, 0.5};
  const ScalarGrid blob = gaussian_blob(spec, center, width, 1.0);
  const VectorGrid e = coulomb_correction(blob, p);

  // Gauss-law closure at this resolution.
  const double resid = gauss_residual(e, blob, p);
  CHECK(resid > 0.005);
  CHECK(resid < 0.05);

  // Against the closed-form solution in the window [4h, L/4]: the enclosed
  // charge is an erf profile and the field points inward for positive charge.
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 d = spec.point(i, j, k) - center;
        const double r = norm(d);
        if (r < 4.0 * spec.h || r > 0.25)
          continue;
        const double s = r / (width * std::sqrt(2.0));
        const double enclosed =
            std::erf(s) - std::sqrt(2.0 / M_PI) * (r / width) *
                              std::exp(-r * r / (2.0 * width * width));
        const Vec3 exact =
            (-p.mu0 * p.c * enclosed / (4.0 * M_PI * r * r * r)) * d;
        worst = std::max(worst, norm(e.at(i, j, k) - exact) / norm(exact));
        CHECK(dot(e.at(i, j, k), d) < 0.0);
      }
  CHECK(worst < 0.025);

  // All-zero charge has no sensible relative residual.
  ScalarGrid zeros(spec);
  CHECK_THROWS_AS(gauss_residual(e, zeros, p), DomainError);
}

TEST_CASE("induced current and continuity") {
  ModelParams p;
  const int n = 24;
  const GridSpec spec{n, 1.0 / n, {}};
  const Vec3 center{0.5, 0.5, 0.5};
  const double width = 1.0 / 8.0;

  std::vector<ScalarGrid> two(2, gaussian_blob(spec, center, width, 1.0));
  CHECK_THROWS_AS(emergent_current(two, 0.1, p), DomainError);

  std::vector<ScalarGrid> series;
  const int nt = 12;
  const double dt = 1.0 / nt;
  for (int s = 0; s <= nt; ++s) {
    const double ampl = 1.0 + 0.5 * std::sin(2.0 * M_PI * s * dt);
    series.push_back(gaussian_blob(spec, center, width, ampl));
  }
  CHECK_THROWS_AS(continuity_residual(series, 0.0, p), DomainError);

  const std::vector<VectorGrid> current =
      emergent_current(series, dt, p, PoissonMethod::fft);
  CHECK(current.size() == series.size() - 2);
  CHECK(current.front().max_norm() > 0.0);

  const double resid = continuity_residual(series, dt, p, PoissonMethod::fft);
  CHECK(resid < 0.15);

  // A static series induces no current and no residual.
  std::vector<ScalarGrid> frozen(4, gaussian_blob(spec, center, width, 1.0));
  CHECK(continuity_residual(frozen, dt, p, PoissonMethod::fft) == 0.0);
}

TEST_CASE("grid serialization round-trips bitwise") {
  SplitMix64 rng(5);
  const GridSpec spec{5, 0.2, Vec3{-0.1, 0.2, 0.3}};
  ScalarGrid s(spec);
  VectorGrid v(spec);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k < 5; ++k) {
        s.at(i, j, k) = rng.uniform(-1.0, 1.0);
        v.at(i, j, k) = Vec3{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                             rng.uniform(-1.0, 1.0)};
      }

  const std::string spath = temp_path("qbind_scalar_roundtrip.bin");
  const std::string vpath = temp_path("qbind_vector_roundtrip.bin");
  write_scalar(s, spath);
  write_vector(v, vpath);
  const ScalarGrid s2 = read_scalar(spath);
  const VectorGrid v2 = read_vector(vpath);
  CHECK(s2.spec() == spec);
  CHECK(s2.data() == s.data());
  CHECK(v2.spec() == spec);
  CHECK(v2.data() == v.data());

  const std::string garbage = temp_path("qbind_garbage.bin");
  std::ofstream(garbage) << "not a grid";
  CHECK_THROWS_AS(read_scalar(garbage), ConfigError);
  CHECK_THROWS_AS(read_vector(garbage), ConfigError);

  const std::string cpath = temp_path("qbind_scalar.csv");
  write_scalar_csv(s, cpath);
  std::ifstream in(cpath);
  std::string header;
  std::getline(in, header);
  CHECK(header == "i,j,k,value");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty())
      ++rows;
  CHECK(rows == 125);

  std::filesystem::remove(spath);
  std::filesystem::remove(vpath);
  std::filesystem::remove(garbage);
  std::filesystem::remove(cpath);
}
