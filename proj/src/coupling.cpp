#include "qbind/coupling.hpp"
#include "qbind/errors.hpp"
#include <cmath>

namespace qbind {

namespace {

//! 1 / [ sqrt(omega(k')(omega(k')+c kappa)) * sqrt(omega(k)(omega(k)+c kappa)) ]
//! shared by the bilinear and both coefficients.
double inverse_denominator(const Vec3 &k, const Vec3 &kp,
                           const ModelParams &p) {
  const double ck = p.c * p.kappa;
  const double w1 = omega(k, p);
  const double w2 = omega(kp, p);
  return 1.0 / (std::sqrt(w2 * (w2 + ck)) * std::sqrt(w1 * (w1 + ck)));
}

} // namespace

double bilinear(const Vec3 &k, const Vec3 &k_ph, int axis,
                const ModelParams &p) {
  if (axis < 0 || axis > 2)
    throw DomainError("bilinear: axis must be 0, 1 or 2");
  const Vec3 kp = k + k_ph;
  const double ck = p.c * p.kappa;
  const double ka = (axis == 0) ? k.x : (axis == 1) ? k.y : k.z;
  const double kpa = (axis == 0) ? kp.x : (axis == 1) ? kp.y : kp.z;
  const double numer = ka * (omega(kp, p) + ck) + kpa * (omega(k, p) + ck);
  return -p.c * numer * inverse_denominator(k, kp, p);
}

double coeff_A(const Vec3 &k, const Vec3 &k_ph, const ModelParams &p) {
  const Vec3 kp = k + k_ph;
  const double ck = p.c * p.kappa;
  return p.c * (omega(k, p) + omega(kp, p) + 2.0 * ck) *
         inverse_denominator(k, kp, p);
}

double coeff_B(const Vec3 &k, const Vec3 &k_ph, const ModelParams &p) {
  const Vec3 kp = k + k_ph;
  const double ck = p.c * p.kappa;
  return p.c * (omega(k, p) + ck) * inverse_denominator(k, kp, p);
}

double u_coupling(Polarization pol, const Vec3 &k_ph, const Vec3 &k,
                  const ModelParams &p) {
  const PolarizationBasis basis = polarization_basis(k_ph); // throws on 0
  const Vec3 &eps =
      (pol == Polarization::horizontal) ? basis.eps_h : basis.eps_v;
  const double projection = dot(eps, k);
  const double envelope = std::sqrt(rho_el(k, p) * rho_el(k + k_ph, p));
  return -0.5 * p.coupling * p.c * envelope * coeff_A(k, k_ph, p) * projection;
}

double a_long_wavelength(const Vec3 &k, const Vec3 &k_ph,
                         const ModelParams &p) {
  const double base = 2.0 * p.c / omega(k, p);
  return base * (1.0 - 0.5 * dot(k, k_ph) / (p.kappa * p.kappa + norm2(k)));
}

double rho_ratio_long_wavelength(const Vec3 &k, const Vec3 &k_ph,
                                 const ModelParams &p) {
  return 1.0 - dot(k, k_ph) / (p.sigma * p.sigma);
}

} // namespace qbind
