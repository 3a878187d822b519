#include "qbind/quadrature.hpp"
#include "qbind/kinematics.hpp"
#include <cassert>
#include <cmath>

namespace qbind {

void QuadratureSpec::validate() const {
  if (radial_order < 2 || angular_order < 2)
    throw DomainError("QuadratureSpec: orders must be at least 2");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw DomainError("QuadratureSpec: tolerances must be positive");
  if (max_refinements < 1)
    throw DomainError("QuadratureSpec: max_refinements must be at least 1");
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1)
    throw DomainError("gauss_legendre: need at least one node");
  GaussLegendre rule;
  rule.x.resize(n);
  rule.w.resize(n);
  // Newton iteration from the Chebyshev-angle initial guess; only the lower
  // half is computed, the rest follows by symmetry.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence for P_n(x) and P'_n(x).
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15)
        break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  return rule;
}

namespace {

//! Orthonormal frame with n3 along `axis`; reuses the deterministic
//! polarization construction so the frame is reproducible bit-for-bit.
struct Frame {
  Vec3 e1, e2, n3;
};

Frame frame_about(const Vec3 &axis) {
  const PolarizationBasis b = polarization_basis(axis);
  return {b.eps_h, b.eps_v, b.khat};
}

//! Upper-hemisphere product rule about `axis`: Gauss-Legendre in radius on
//! (0, r_max], Gauss-Legendre in the polar cosine on (0, 1], uniform
//! midpoint grid in azimuth (spectrally accurate for periodic integrands).
std::vector<QuadNode> hemisphere_nodes(const Frame &f, double r_max,
                                       int radial_order, int angular_order) {
  const GaussLegendre rad = gauss_legendre(radial_order);
  const GaussLegendre pol = gauss_legendre(angular_order);
  const int n_phi = 2 * angular_order;
  const double w_phi = 2.0 * M_PI / n_phi;

  std::vector<QuadNode> nodes;
  nodes.reserve(static_cast<std::size_t>(radial_order) * angular_order * n_phi);
  for (int ir = 0; ir < radial_order; ++ir) {
    const double r = 0.5 * r_max * (rad.x[ir] + 1.0);
    const double wr = 0.5 * r_max * rad.w[ir] * r * r;
    for (int iu = 0; iu < angular_order; ++iu) {
      const double u = 0.5 * (pol.x[iu] + 1.0); // cos(theta) in (0,1)
      const double wu = 0.5 * pol.w[iu];
      const double st = std::sqrt(1.0 - u * u);
      for (int ip = 0; ip < n_phi; ++ip) {
        const double phi = w_phi * (ip + 0.5);
        const Vec3 dir = u * f.n3 + (st * std::cos(phi)) * f.e1 +
                         (st * std::sin(phi)) * f.e2;
        nodes.push_back({r * dir, wr * wu * w_phi});
      }
    }
  }
  return nodes;
}

} // namespace

std::vector<QuadNode> halfspace_nodes(const Vec3 &normal, double r_max,
                                      int radial_order, int angular_order) {
  if (normal == Vec3{})
    throw DomainError("halfspace_nodes: zero normal");
  return hemisphere_nodes(frame_about(normal), r_max, radial_order,
                          angular_order);
}

std::vector<QuadNode> fullspace_nodes(const Vec3 &axis, double r_max,
                                      int radial_order, int angular_order) {
  if (axis == Vec3{})
    throw DomainError("fullspace_nodes: zero axis");
  std::vector<QuadNode> upper =
      hemisphere_nodes(frame_about(axis), r_max, radial_order, angular_order);
  std::vector<QuadNode> nodes;
  nodes.reserve(2 * upper.size());
  for (const auto &n : upper) {
    nodes.push_back(n);
    nodes.push_back({-n.k, n.weight}); // exact negation: bitwise k -> -k pair
  }
  return nodes;
}

std::vector<QuadNode> ball_nodes(double radius, int radial_order,
                                 int angular_order) {
  const GaussLegendre rad = gauss_legendre(radial_order);
  const GaussLegendre pol = gauss_legendre(angular_order);
  const int n_phi = 2 * angular_order;
  const double w_phi = 2.0 * M_PI / n_phi;

  std::vector<QuadNode> nodes;
  nodes.reserve(static_cast<std::size_t>(radial_order) * angular_order * n_phi);
  for (int ir = 0; ir < radial_order; ++ir) {
    const double r = 0.5 * radius * (rad.x[ir] + 1.0);
    const double wr = 0.5 * radius * rad.w[ir] * r * r;
    for (int iu = 0; iu < angular_order; ++iu) {
      const double u = pol.x[iu]; // cos(theta) over the full sphere
      const double wu = pol.w[iu];
      const double st = std::sqrt(1.0 - u * u);
      for (int ip = 0; ip < n_phi; ++ip) {
        const double phi = w_phi * (ip + 0.5);
        const Vec3 dir = {st * std::cos(phi), st * std::sin(phi), u};
        nodes.push_back({r * dir, wr * wu * w_phi});
      }
    }
  }
  return nodes;
}

double convergence_slope(const std::vector<double> &h,
                         const std::vector<double> &err) {
  if (h.size() != err.size())
    throw DomainError("convergence_slope: size mismatch");
  if (h.size() < 2)
    throw DomainError("convergence_slope: need at least two samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(err[i] > 0.0))
      throw DomainError("convergence_slope: h and errors must be positive");
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0)
    throw DomainError("convergence_slope: degenerate h values");
  return (n * sxy - sx * sy) / denom;
}

} // namespace qbind
