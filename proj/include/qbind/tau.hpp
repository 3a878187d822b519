#pragma once
#include "qbind/kinematics.hpp"
#include <vector>

namespace qbind {

namespace detail {
inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i)
    f *= i;
  return f;
}
} // namespace detail

//! Atomic region predicate over the electron momentum k. Predicates may
//! reference the horizontal polarization direction of the current photon
//! momentum (that is their only allowed photon dependence).
struct RegionAtom {
  enum class Kind {
    always,         //!< whole momentum space
    halfspace_pol,  //!< dot(k, eps_h(k_ph)) > 0
    halfspace_fixed,//!< dot(k, direction) > 0 for a fixed direction
    ball            //!< |k| < radius
  };
  Kind kind = Kind::always;
  Vec3 direction{}; //!< used by halfspace_fixed
  double radius = 0.0; //!< used by ball
  bool negate = false; //!< complement of the atom
};

//! One occupied excitation sector: tau_{m,n} equals 1 exactly on the
//! conjunction of the atoms and 0 elsewhere. Sectors without an entry are
//! identically zero.
struct TauEntry {
  int m = 0;
  int n = 0;
  std::vector<RegionAtom> region; //!< conjunction; empty means everywhere
};

//! Indicator table tau_{m,n}(k_ph, k) in {0,1} describing which excitation
//! sectors are switched on at each electron momentum.
/*!
 *  Structural requirements enforced at runtime (InvariantError):
 *   - the normalization z_el(k) = sum_{m,n} tau_{m,n}/(m! n!) must be
 *     strictly positive, and
 *   - z_el must not depend on the photon momentum
 *  (checked on a deterministic sample of momenta by `validate`).
 */
class TauTable final {
public:
  explicit TauTable(std::vector<TauEntry> entries);

  //! tau_{m,n} at electron momentum k given the horizontal polarization
  //! direction of the photon momentum. Returns 0.0 or 1.0.
  double value(const Vec3 &eps_h, const Vec3 &k, int m, int n) const;

  //! Convenience overload deriving eps_h from k_ph.
  double value(const Vec3 &k_ph, const Vec3 &k, int m, int n,
               const ModelParams &p) const;

  //! Normalization z_el(k) = sum tau_{m,n}(k) / (m! n!).
  double z_el(const Vec3 &eps_h, const Vec3 &k) const;

  //! Largest occupied photon / companion indices.
  int max_m() const { return m_max_m; }
  int max_n() const { return m_max_n; }

  //! True when no atom singles out a fixed spatial direction, in which case
  //! every derived integral depends on the photon momentum only through its
  //! magnitude.
  bool isotropic() const { return m_isotropic; }

  //! Runs the structural checks on a seeded sample of momenta; throws
  //! InvariantError on failure.
  void validate(const ModelParams &p) const;

  const std::vector<TauEntry> &entries() const { return m_entries; }

private:
  std::vector<TauEntry> m_entries;
  std::vector<int> m_index; //!< dense (m,n) -> entry lookup, -1 when absent
  int m_max_m = 0;
  int m_max_n = 0;
  bool m_isotropic = true;

  bool occupied(const TauEntry &e, const Vec3 &eps_h, const Vec3 &k) const;
};

//! The two-sector table behind all closed-form results: tau_{1,0} = 1 on the
//! half space {dot(k, eps_h) > 0}, tau_{0,0} = 1 on the complement. Its
//! normalization is identically 1.
TauTable tau_specific();

} // namespace qbind
