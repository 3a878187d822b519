#pragma once
#include "qbind/vec3.hpp"

namespace qbind {

//! Physical parameters of the model. All defaults give the dimensionless
//! reference setup (inverse-length scale kappa, momentum-space width sigma and
//! the three unit constants equal to one).
struct ModelParams {
  double kappa = 1.0;    //!< rest mass scale, omega(0) = c*kappa; must be > 0
  double sigma = 1.0;    //!< width of the Gaussian electron profile; > 0
  double coupling = 1.0; //!< product of charge and coupling constant (lambda*q)
  double rho_el0 = 0.1;  //!< electron profile peak density; > 0
  double ell = 1.0;      //!< normalization length (cubed in all integrals); > 0
  double c = 1.0;        //!< speed of light; > 0
  double hbar = 1.0;     //!< reduced Planck constant; > 0
  double mu0 = 1.0;      //!< vacuum permeability; > 0

  //! Throws DomainError unless every scale that must be positive is.
  void validate() const;
};

//! Relativistic dispersion omega(k) = c*sqrt(kappa^2 + |k|^2).
double omega(double abs_k, const ModelParams &p);
double omega(const Vec3 &k, const ModelParams &p);

//! Gaussian electron momentum profile rho_el(k) = rho_el0 * exp(-|k|^2/2sigma^2).
double rho_el(double abs_k, const ModelParams &p);
double rho_el(const Vec3 &k, const ModelParams &p);

//! Transverse polarization pair for photon momentum k_ph, plus the unit
//! momentum direction. eps_h is the azimuthal unit vector, eps_v completes a
//! right-handed orthonormal triad (eps_h, eps_v, khat).
struct PolarizationBasis {
  Vec3 eps_h; //!< horizontal polarization; exactly even under k_ph -> -k_ph
  Vec3 eps_v; //!< vertical polarization; exactly odd under k_ph -> -k_ph
  Vec3 khat;  //!< k_ph/|k_ph|
};

//! Deterministic polarization construction.
/*! The basis is built for a canonical sign representative of k_ph (first
 *  nonzero of (z, y, x) made positive) and then parity-mapped back, so the
 *  evenness of eps_h and oddness of eps_v hold bitwise, not just to rounding.
 *  For k_ph along +/-z the horizontal direction is x-hat. Throws DomainError
 *  for k_ph = 0 (no transverse plane).
 */
PolarizationBasis polarization_basis(const Vec3 &k_ph);

} // namespace qbind
