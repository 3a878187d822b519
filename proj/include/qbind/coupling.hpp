#pragma once
#include "qbind/kinematics.hpp"

namespace qbind {

//! Which transverse polarization a coupling amplitude refers to.
enum class Polarization { horizontal, vertical };

//! Spatial component (axis: 0=x, 1=y, 2=z) of the positive-energy spinor
//! bilinear between momenta k and k + k_ph,
//!   -c [ k_a (omega(k+k_ph) + c kappa) + (k+k_ph)_a (omega(k) + c kappa) ]
//!     / sqrt(omega(k+k_ph)(omega(k+k_ph)+c kappa))
//!     / sqrt(omega(k)(omega(k)+c kappa)).
double bilinear(const Vec3 &k, const Vec3 &k_ph, int axis,
                const ModelParams &p);

//! Symmetric coefficient A(k, k_ph) of the bilinear contracted with a vector
//! orthogonal to k_ph:
//!   A = c (omega(k) + omega(k+k_ph) + 2 c kappa) / (same denominator).
//! Strictly positive and invariant under exchanging k with k + k_ph.
double coeff_A(const Vec3 &k, const Vec3 &k_ph, const ModelParams &p);

//! Companion coefficient B = c (omega(k) + c kappa) / (same denominator);
//! satisfies 0 < B < A.
double coeff_B(const Vec3 &k, const Vec3 &k_ph, const ModelParams &p);

//! Photon-electron coupling amplitude
//!   U(k_ph, k) = -(1/2) * coupling * c * sqrt(rho_el(k) rho_el(k+k_ph))
//!                * A(k, k_ph) * dot(eps, k),
//! with eps the horizontal or vertical polarization of k_ph. The sign of U is
//! exactly opposite to the sign of dot(eps, k), and U vanishes exactly when
//! that projection does. Throws DomainError for k_ph = 0.
double u_coupling(Polarization pol, const Vec3 &k_ph, const Vec3 &k,
                  const ModelParams &p);

//! First-order small-|k_ph| approximation of coeff_A:
//!   (2c/omega(k)) * (1 - (1/2) dot(k, k_ph) / (kappa^2 + |k|^2)).
//! The deviation from the exact A is second order in |k_ph|; the sign of the
//! first-order term follows from omega(k+k_ph)^2 = omega(k)^2
//! + c^2 (2 k.k_ph + |k_ph|^2) and is required for that second-order decay.
double a_long_wavelength(const Vec3 &k, const Vec3 &k_ph,
                         const ModelParams &p);

//! First-order small-|k_ph| approximation of the Gaussian density ratio
//! rho_el(k + k_ph) / rho_el(k), namely 1 - dot(k, k_ph) / sigma^2; the
//! deviation from the exact ratio is second order in |k_ph|.
double rho_ratio_long_wavelength(const Vec3 &k, const Vec3 &k_ph,
                                 const ModelParams &p);

} // namespace qbind
