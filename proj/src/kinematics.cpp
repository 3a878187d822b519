#include "qbind/kinematics.hpp"
#include "qbind/errors.hpp"
#include <cmath>

namespace qbind {

void ModelParams::validate() const {
  auto require_positive = [](double v, const char *name) {
    if (!(v > 0.0))
      throw DomainError(std::string("ModelParams: ") + name +
                        " must be positive");
  };
  require_positive(kappa, "kappa");
  require_positive(sigma, "sigma");
  require_positive(rho_el0, "rho_el0");
  require_positive(ell, "ell");
  require_positive(c, "c");
  require_positive(hbar, "hbar");
  require_positive(mu0, "mu0");
  // coupling may take either sign (charge sign); zero is allowed and simply
  // switches the interaction off.
}

double omega(double abs_k, const ModelParams &p) {
  return p.c * std::sqrt(p.kappa * p.kappa + abs_k * abs_k);
}

double omega(const Vec3 &k, const ModelParams &p) {
  return p.c * std::sqrt(p.kappa * p.kappa + norm2(k));
}

double rho_el(double abs_k, const ModelParams &p) {
  const double s2 = p.sigma * p.sigma;
  return p.rho_el0 * std::exp(-abs_k * abs_k / (2.0 * s2));
}

double rho_el(const Vec3 &k, const ModelParams &p) {
  const double s2 = p.sigma * p.sigma;
  return p.rho_el0 * std::exp(-norm2(k) / (2.0 * s2));
}

PolarizationBasis polarization_basis(const Vec3 &k_ph) {
  if (k_ph.x == 0.0 && k_ph.y == 0.0 && k_ph.z == 0.0)
    throw DomainError("polarization_basis: k_ph = 0 has no transverse plane");

  // Canonical sign representative: flip k_ph if its first nonzero component,
  // checked in the order (z, y, x), is negative. Both signs of k_ph then share
  // one construction, which is what makes the parity statements bitwise exact.
  bool flip = false;
  if (k_ph.z != 0.0)
    flip = (k_ph.z < 0.0);
  else if (k_ph.y != 0.0)
    flip = (k_ph.y < 0.0);
  else
    flip = (k_ph.x < 0.0);
  const Vec3 q = flip ? -k_ph : k_ph;

  PolarizationBasis b;
  const double rho = std::hypot(q.x, q.y);
  if (rho == 0.0) {
    // q points along +z: pick the x axis as the horizontal direction.
    b.eps_h = {1.0, 0.0, 0.0};
    b.eps_v = {0.0, 1.0, 0.0};
    b.khat = {0.0, 0.0, 1.0};
  } else {
    b.khat = q / norm(q);
    b.eps_h = {-q.y / rho, q.x / rho, 0.0}; // azimuthal unit vector
    b.eps_v = cross(b.khat, b.eps_h);       // completes right-handed triad
  }
  if (flip) {
    // Map back to the requested sign: eps_h is even, the other two are odd.
    b.eps_v = -b.eps_v;
    b.khat = -b.khat;
  }
  return b;
}

} // namespace qbind
