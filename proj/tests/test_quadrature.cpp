#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qbind/errors.hpp"
#include "qbind/quadrature.hpp"

#include <cmath>

using namespace qbind;

namespace {
constexpr double two_pi_32 = 15.749609945722419; // (2 pi)^(3/2)
}

TEST_CASE("quadrature spec validation") {
  QuadratureSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.radial_order = 1;
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec = QuadratureSpec{};
  spec.angular_order = 0;
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec = QuadratureSpec{};
  spec.rel_tol = 0.0;
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec = QuadratureSpec{};
  spec.abs_tol = -1e-12;
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec = QuadratureSpec{};
  spec.max_refinements = 0;
  CHECK_THROWS_AS(spec.validate(), DomainError);
}

TEST_CASE("Gauss-Legendre nodes and weights") {
  const GaussLegendre g2 = gauss_legendre(2);
  REQUIRE(g2.x.size() == 2);
  CHECK(g2.x[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(g2.x[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(g2.w[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g2.w[1] == doctest::Approx(1.0).epsilon(1e-14));

  const GaussLegendre g5 = gauss_legendre(5);
  CHECK(std::abs(g5.x[2]) < 1e-15); // odd rule has a node at the origin
  double wsum = 0.0;
  for (double w : g5.w)
    wsum += w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));

  // Nodes come in symmetric pairs and the rule integrates polynomials up to
  // degree 2n-1: with n = 8, x^14 over [-1,1] gives 2/15.
  const GaussLegendre g8 = gauss_legendre(8);
  for (int i = 0; i < 8; ++i)
    CHECK(std::abs(g8.x[i] + g8.x[7 - i]) < 1e-14);
  double moment = 0.0;
  for (int i = 0; i < 8; ++i)
    moment += g8.w[i] * std::pow(g8.x[i], 14);
  CHECK(moment == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("half-space Gaussian moments") {
  const QuadratureSpec spec;
  for (double sigma : {1.0, 0.7}) {
    const double s2 = 2.0 * sigma * sigma;
    auto gauss = [&](const Vec3 &k) { return std::exp(-norm2(k) / s2); };
    const double got = integrate_halfspace_gaussian(
        gauss, Vec3{0.0, 0.0, 1.0}, sigma, spec);
    const double want = 0.5 * two_pi_32 * sigma * sigma * sigma;
    CHECK(got == doctest::Approx(want).epsilon(1e-10));

    // The half space is rotation-covariant: any normal gives the same value
    // for an isotropic integrand.
    const double tilted = integrate_halfspace_gaussian(
        gauss, Vec3{1.0, -2.0, 0.5}, sigma, spec);
    CHECK(tilted == doctest::Approx(got).epsilon(1e-10));
  }
}

TEST_CASE("full-space moments and odd-integrand cancellation") {
  const QuadratureSpec spec;
  auto second_moment = [](const Vec3 &k) {
    return k.z * k.z * std::exp(-0.5 * norm2(k));
  };
  const double got = integrate_fullspace_gaussian(
      second_moment, Vec3{0.0, 0.0, 1.0}, 1.0, spec);
  CHECK(got == doctest::Approx(two_pi_32).epsilon(1e-10));

  // The node set is closed under exact negation, so odd integrands cancel
  // to rounding noise rather than to quadrature accuracy.
  auto odd = [](const Vec3 &k) {
    return (k.x + 0.3 * k.y * k.z * k.z) * std::exp(-0.5 * norm2(k));
  };
  const double zero =
      integrate_fullspace_gaussian(odd, Vec3{0.0, 0.0, 1.0}, 1.0, spec);
  CHECK(std::abs(zero) < 1e-12);
}

TEST_CASE("ball integrals") {
  const QuadratureSpec spec;
  const double r = 0.8;
  const double volume =
      integrate_ball([](const Vec3 &) { return 1.0; }, r, spec);
  CHECK(volume ==
        doctest::Approx(4.0 / 3.0 * M_PI * r * r * r).epsilon(1e-12));

  // f = |k| integrates to pi R^4 (4 pi times r^3 dr).
  const double first =
      integrate_ball([](const Vec3 &k) { return norm(k); }, r, spec);
  CHECK(first == doctest::Approx(M_PI * r * r * r * r).epsilon(1e-12));

  // Spherically symmetric integrand against a dense 1D radial reference.
  auto f = [](double rr) { return std::exp(-rr * rr); };
  const double got =
      integrate_ball([&](const Vec3 &k) { return f(norm(k)); }, 2.0, spec);
  const GaussLegendre g = gauss_legendre(200);
  double ref = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double rr = 0.5 * 2.0 * (g.x[i] + 1.0);
    ref += 0.5 * 2.0 * g.w[i] * rr * rr * f(rr);
  }
  ref *= 4.0 * M_PI;
  CHECK(got == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("refinement terminates or reports its last two estimates") {
  QuadratureSpec spec;
  spec.radial_order = 8;
  spec.angular_order = 8;
  spec.rel_tol = 1e-6;

  // Smooth integrand: one doubling settles well inside the tolerance.
  auto smooth = [](const Vec3 &k) {
    return (1.0 + norm2(k)) * std::exp(-0.5 * norm2(k));
  };
  CHECK_NOTHROW(
      integrate_fullspace_gaussian(smooth, Vec3{0.0, 0.0, 1.0}, 1.0, spec));

  // Rapidly oscillating integrand at starved orders: refinement gives up and
  // the exception carries the two final estimates.
  QuadratureSpec starved;
  starved.radial_order = 2;
  starved.angular_order = 2;
  starved.rel_tol = 1e-14;
  starved.abs_tol = 1e-300;
  starved.max_refinements = 1;
  auto nasty = [](const Vec3 &k) {
    return std::cos(40.0 * norm2(k)) * std::exp(-0.5 * norm2(k));
  };
  try {
    integrate_fullspace_gaussian(nasty, Vec3{0.0, 0.0, 1.0}, 1.0, starved);
    FAIL("expected a convergence failure");
  } catch (const ConvergenceError &e) {
    CHECK(e.previous_estimate() != e.last_estimate());
    CHECK(std::string(e.what()).find("did not stabilize") !=
          std::string::npos);
  }
}

TEST_CASE("convergence slope fitting") {
  const std::vector<double> h{0.1, 0.05, 0.025};
  std::vector<double> quadratic, linear;
  for (double x : h) {
    quadratic.push_back(x * x);
    linear.push_back(3.0 * x);
  }
  CHECK(convergence_slope(h, quadratic) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(convergence_slope(h, linear) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(convergence_slope({0.1}, {0.01}), DomainError);
  CHECK_THROWS_AS(convergence_slope({0.1, 0.05}, {0.01}), DomainError);
  CHECK_THROWS_AS(convergence_slope({0.1, 0.05}, {0.01, -1.0}), DomainError);
  CHECK_THROWS_AS(convergence_slope({0.1, 0.1}, {0.01, 0.01}), DomainError);
}
