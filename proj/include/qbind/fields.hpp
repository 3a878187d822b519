#pragma once
#include "qbind/grid.hpp"
#include "qbind/kinematics.hpp"
#include <cstdint>
#include <memory>
#include <vector>

namespace qbind {

//==============================================================================
// Finite-difference calculus (2nd order: central interior, one-sided on faces)
//==============================================================================

VectorGrid gradient(const ScalarGrid &f);
ScalarGrid divergence(const VectorGrid &v);
VectorGrid curl(const VectorGrid &v);

//! Divergence-free sample field: the analytic curl of a small sum of random
//! sine modes (mode vectors, amplitudes and phases drawn deterministically
//! from `seed`), evaluated at cell centers. Wavelengths are kept at a few
//! cells of the box so derivatives are well resolved.
VectorGrid make_transverse_field(const GridSpec &spec, std::uint64_t seed,
                                 int n_modes = 4);

//==============================================================================
// Free-space Coulomb correction
//==============================================================================

//! How the discrete Newtonian sum is evaluated.
enum class PoissonMethod {
  automatic, //!< direct for small grids, FFT otherwise
  direct,    //!< O(N^2) kernel sum (reference path)
  fft        //!< zero-padded FFT convolution of the same sum
};

//! Diagonal entry of the open-boundary Newtonian kernel: the exact average of
//! h^3/|x - y| over a cube cell of side h centered on the target point,
//!   (6 ln((1+sqrt3)/sqrt2) - pi/2) h^2.
double self_cell_kernel(double h);

//! Evaluates the gradient-type Coulomb correction of a charge grid:
//!   E_c = (mu0 c / 4 pi) * grad phi,   phi_i = sum_j G_ij q_j,
//! with G_ij = h^3/|x_i - x_j| off the diagonal and the exact cell
//! self-interaction G_ii = (6 ln((1+sqrt3)/sqrt2) - pi/2) h^2. The discrete
//! Gauss law div E_c = -mu0 c j0 then holds to O(h^2), and the field is
//! curl-free.
/*! Reusable across charge grids with the same GridSpec (plans and the kernel
 *  transform are cached). The FFT path evaluates the identical sum via
 *  zero-padding to (2n)^3, so the two paths agree to rounding.
 */
class CoulombSolver final {
public:
  CoulombSolver(const GridSpec &spec, const ModelParams &p,
                PoissonMethod method = PoissonMethod::automatic);
  ~CoulombSolver();
  CoulombSolver(const CoulombSolver &) = delete;
  CoulombSolver &operator=(const CoulombSolver &) = delete;

  //! Throws DomainError when charge sits too close to the boundary: cells
  //! above 5% of the peak magnitude must be at least 4 cells from every
  //! face (free-space evaluation needs clearance).
  VectorGrid field(const ScalarGrid &j0) const;

  PoissonMethod method() const { return m_method; }

private:
  struct Impl;
  std::unique_ptr<Impl> m_impl;
  PoissonMethod m_method;
};

//! One-shot convenience wrapper around CoulombSolver.
VectorGrid coulomb_correction(const ScalarGrid &j0, const ModelParams &p,
                              PoissonMethod method = PoissonMethod::automatic);

//! Relative Gauss-law residual of a total field against a charge grid:
//!   ||div e + mu0 c j0||_rms / ||mu0 c j0||_rms
//! over the interior (2-cell margin excluded).
double gauss_residual(const VectorGrid &e, const ScalarGrid &j0,
                      const ModelParams &p);

//==============================================================================
// Induced current and continuity
//==============================================================================

//! Central-difference time derivative of the Coulomb correction:
//!   j(t) = (1/(mu0 c^2)) * (E_c(t+dt) - E_c(t-dt)) / (2 dt),
//! returned for the interior time slices 1 .. nt-2 of the charge series.
//! Requires at least three slices on a common GridSpec.
std::vector<VectorGrid>
emergent_current(const std::vector<ScalarGrid> &j0_series, double dt,
                 const ModelParams &p,
                 PoissonMethod method = PoissonMethod::automatic);

//! Joint continuity residual of a charge series and its induced current:
//!   || (1/c) dj0/dt + div j ||_rms / || (1/c) dj0/dt ||_rms
//! aggregated over interior time slices and interior cells. A static series
//! returns 0 (the induced current vanishes identically).
double continuity_residual(const std::vector<ScalarGrid> &j0_series, double dt,
                           const ModelParams &p,
                           PoissonMethod method = PoissonMethod::automatic);

} // namespace qbind
