#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qbind/coupling.hpp"
#include "qbind/errors.hpp"
#include "qbind/quadrature.hpp"
#include "qbind/rng.hpp"

#include <cmath>
#include <vector>

using namespace qbind;

namespace {
Vec3 random_vec(SplitMix64 &rng, double scale) {
  return Vec3{rng.uniform(-scale, scale), rng.uniform(-scale, scale),
              rng.uniform(-scale, scale)};
}
} // namespace

TEST_CASE("bilinear closed-form values") {
  ModelParams p;
  // At k = (1,0,0), k_ph = 0 the x component reduces to -2/sqrt(2).
  CHECK(bilinear(Vec3{1.0, 0.0, 0.0}, Vec3{}, 0, p) ==
        doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
  CHECK(bilinear(Vec3{1.0, 0.0, 0.0}, Vec3{}, 1, p) == 0.0);
  CHECK(bilinear(Vec3{1.0, 0.0, 0.0}, Vec3{}, 2, p) == 0.0);
  // Both momenta zero: every component vanishes.
  for (int axis = 0; axis < 3; ++axis)
    CHECK(bilinear(Vec3{}, Vec3{}, axis, p) == 0.0);
}

TEST_CASE("coefficient limits at zero momentum") {
  ModelParams p;
  CHECK(coeff_A(Vec3{}, Vec3{}, p) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(coeff_B(Vec3{}, Vec3{}, p) == doctest::Approx(1.0).epsilon(1e-14));

  // A(0,0) = 2/kappa regardless of c; B(0,0) = 1/kappa.
  ModelParams q;
  q.c = 3.0;
  q.kappa = 2.0;
  CHECK(coeff_A(Vec3{}, Vec3{}, q) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(coeff_B(Vec3{}, Vec3{}, q) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("coefficient structure on random momenta") {
  ModelParams p;
  SplitMix64 rng(21);
  for (int i = 0; i < 400; ++i) {
    const Vec3 k = random_vec(rng, 2.0);
    const Vec3 k_ph = random_vec(rng, 2.0);
    const double a = coeff_A(k, k_ph, p);
    const double b = coeff_B(k, k_ph, p);
    CHECK(a > 0.0);
    CHECK(b > 0.0);
    CHECK(b < a);
    // A is symmetric in its two electron momenta k and k + k_ph.
    const double swapped = coeff_A(k + k_ph, -k_ph, p);
    CHECK(a == doctest::Approx(swapped).epsilon(1e-12));
    // B counts only the first momentum; the swap picks the partner value.
    const double b_other = coeff_B(k + k_ph, -k_ph, p);
    CHECK(b + b_other == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("coupling amplitude factorization") {
  ModelParams p;
  const Vec3 k_ph{0.2, -0.4, 0.7};
  const Vec3 k{0.5, 0.3, -0.6};
  const PolarizationBasis basis = polarization_basis(k_ph);
  const double expected = -0.5 * p.coupling * p.c *
                          std::sqrt(rho_el(k, p) * rho_el(k + k_ph, p)) *
                          coeff_A(k, k_ph, p) * dot(basis.eps_h, k);
  CHECK(u_coupling(Polarization::horizontal, k_ph, k, p) ==
        doctest::Approx(expected).epsilon(1e-14));

  const double expected_v = -0.5 * p.coupling * p.c *
                            std::sqrt(rho_el(k, p) * rho_el(k + k_ph, p)) *
                            coeff_A(k, k_ph, p) * dot(basis.eps_v, k);
  CHECK(u_coupling(Polarization::vertical, k_ph, k, p) ==
        doctest::Approx(expected_v).epsilon(1e-14));

  CHECK_THROWS_AS(u_coupling(Polarization::horizontal, Vec3{}, k, p),
                  DomainError);
}

TEST_CASE("coupling symmetry identities") {
  ModelParams p;
  SplitMix64 rng(22);
  using P = Polarization;
  for (int i = 0; i < 400; ++i) {
    Vec3 k_ph = random_vec(rng, 2.0);
    if (norm(k_ph) < 1e-6)
      k_ph = Vec3{0.0, 0.0, 1.0};
    const Vec3 k = random_vec(rng, 2.0);
    const double uh = u_coupling(P::horizontal, k_ph, k, p);
    const double uv = u_coupling(P::vertical, k_ph, k, p);
    // Joint inversion of both momenta: odd for H, even for V.
    CHECK(std::abs(u_coupling(P::horizontal, -k_ph, -k, p) + uh) < 1e-12);
    CHECK(std::abs(u_coupling(P::vertical, -k_ph, -k, p) - uv) < 1e-12);
    // Photon inversion with the electron momentum shifted down: even for H,
    // odd for V.
    CHECK(std::abs(u_coupling(P::horizontal, -k_ph, k, p) -
                   u_coupling(P::horizontal, k_ph, k - k_ph, p)) < 1e-12);
    CHECK(std::abs(u_coupling(P::vertical, -k_ph, k, p) +
                   u_coupling(P::vertical, k_ph, k - k_ph, p)) < 1e-12);
  }
}

TEST_CASE("coupling sign is locked to the polarization projection") {
  ModelParams p;
  SplitMix64 rng(23);
  for (int i = 0; i < 400; ++i) {
    Vec3 k_ph = random_vec(rng, 2.0);
    if (norm(k_ph) < 1e-6)
      k_ph = Vec3{0.0, 0.0, 1.0};
    const Vec3 k = random_vec(rng, 2.0);
    for (auto pol : {Polarization::horizontal, Polarization::vertical}) {
      const PolarizationBasis b = polarization_basis(k_ph);
      const Vec3 &eps = pol == Polarization::horizontal ? b.eps_h : b.eps_v;
      const double proj = dot(eps, k);
      const double u = u_coupling(pol, k_ph, k, p);
      if (proj > 0.0)
        CHECK(u < 0.0);
      else if (proj < 0.0)
        CHECK(u > 0.0);
      else
        CHECK(u == 0.0);
    }
  }
  // Constructed exact zero: along-axis photon, electron momentum in the
  // (y,z) plane is exactly orthogonal to eps_h = x.
  CHECK(u_coupling(Polarization::horizontal, Vec3{0.0, 0.0, 1.3},
                   Vec3{0.0, 0.7, -0.2}, p) == 0.0);
}

TEST_CASE("long-wavelength forms converge at second order") {
  ModelParams p;
  CHECK(a_long_wavelength(Vec3{0.4, -0.1, 0.2}, Vec3{}, p) ==
        doctest::Approx(2.0 * p.c / omega(Vec3{0.4, -0.1, 0.2}, p))
            .epsilon(1e-14));
  CHECK(rho_ratio_long_wavelength(Vec3{0.5, 0.0, 0.0}, Vec3{0.1, 0.0, 0.0},
                                  p) == doctest::Approx(0.95).epsilon(1e-14));

  const Vec3 k{0.3, 0.2, -0.4};
  Vec3 dir{0.2, -0.5, 0.8};
  dir = dir / norm(dir);
  const std::vector<double> radii{1e-1, 3e-2, 1e-2, 3e-3};
  std::vector<double> err_a, err_rho;
  for (double r : radii) {
    const Vec3 k_ph = r * dir;
    err_a.push_back(std::abs(coeff_A(k, k_ph, p) -
                             a_long_wavelength(k, k_ph, p)));
    const double exact = rho_el(k + k_ph, p) / rho_el(k, p);
    err_rho.push_back(
        std::abs(exact - rho_ratio_long_wavelength(k, k_ph, p)));
  }
  const double slope_a = convergence_slope(radii, err_a);
  const double slope_rho = convergence_slope(radii, err_rho);
  CHECK(slope_a > 1.9);
  CHECK(slope_a < 2.1);
  CHECK(slope_rho > 1.9);
  CHECK(slope_rho < 2.1);
}
