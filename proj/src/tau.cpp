#include "qbind/tau.hpp"
#include "qbind/errors.hpp"
#include "qbind/rng.hpp"
#include <cmath>

namespace qbind {

namespace {

using detail::factorial;

//! Deterministic sample direction from two uniforms.
Vec3 sample_direction(SplitMix64 &rng) {
  const double u = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * M_PI);
  const double st = std::sqrt(1.0 - u * u);
  return {st * std::cos(phi), st * std::sin(phi), u};
}

} // namespace

TauTable::TauTable(std::vector<TauEntry> entries)
    : m_entries(std::move(entries)) {
  for (const auto &e : m_entries) {
    if (e.m < 0 || e.n < 0)
      throw DomainError("TauTable: sector indices must be non-negative");
    m_max_m = std::max(m_max_m, e.m);
    m_max_n = std::max(m_max_n, e.n);
    for (const auto &a : e.region)
      if (a.kind == RegionAtom::Kind::halfspace_fixed)
        m_isotropic = false;
  }
  m_index.assign(static_cast<std::size_t>(m_max_m + 1) * (m_max_n + 1), -1);
  for (std::size_t i = 0; i < m_entries.size(); ++i) {
    const auto &e = m_entries[i];
    int &slot = m_index[static_cast<std::size_t>(e.m) * (m_max_n + 1) + e.n];
    if (slot >= 0)
      throw DomainError("TauTable: duplicate (m,n) sector");
    slot = static_cast<int>(i);
  }
}

bool TauTable::occupied(const TauEntry &e, const Vec3 &eps_h,
                        const Vec3 &k) const {
  for (const auto &a : e.region) {
    bool inside = true;
    switch (a.kind) {
    case RegionAtom::Kind::always:
      inside = true;
      break;
    case RegionAtom::Kind::halfspace_pol:
      inside = dot(k, eps_h) > 0.0;
      break;
    case RegionAtom::Kind::halfspace_fixed:
      inside = dot(k, a.direction) > 0.0;
      break;
    case RegionAtom::Kind::ball:
      inside = norm2(k) < a.radius * a.radius;
      break;
    }
    if (a.negate)
      inside = !inside;
    if (!inside)
      return false;
  }
  return true;
}

double TauTable::value(const Vec3 &eps_h, const Vec3 &k, int m, int n) const {
  if (m < 0 || n < 0 || m > m_max_m || n > m_max_n)
    return 0.0;
  const int slot = m_index[static_cast<std::size_t>(m) * (m_max_n + 1) + n];
  if (slot < 0)
    return 0.0;
  return occupied(m_entries[static_cast<std::size_t>(slot)], eps_h, k) ? 1.0
                                                                       : 0.0;
}

double TauTable::value(const Vec3 &k_ph, const Vec3 &k, int m, int n,
                       const ModelParams &) const {
  return value(polarization_basis(k_ph).eps_h, k, m, n);
}

double TauTable::z_el(const Vec3 &eps_h, const Vec3 &k) const {
  double z = 0.0;
  for (const auto &e : m_entries)
    if (occupied(e, eps_h, k))
      z += 1.0 / (factorial(e.m) * factorial(e.n));
  return z;
}

void TauTable::validate(const ModelParams &p) const {
  // Sample a handful of photon directions and electron momenta; the
  // normalization must be positive everywhere and identical across photon
  // momenta (the sectors may move with eps_h, their weighted sum may not).
  SplitMix64 rng(0x7a0bdcafULL);
  constexpr int n_kph = 6;
  constexpr int n_k = 24;
  std::vector<Vec3> eps;
  for (int i = 0; i < n_kph; ++i) {
    const Vec3 k_ph = rng.uniform(0.1, 1.0) * sample_direction(rng);
    eps.push_back(polarization_basis(k_ph).eps_h);
  }
  for (int j = 0; j < n_k; ++j) {
    const Vec3 k = (p.sigma * rng.uniform(0.0, 3.0)) * sample_direction(rng);
    const double z0 = z_el(eps[0], k);
    if (!(z0 > 0.0))
      throw InvariantError("TauTable: normalization must be positive");
    for (int i = 1; i < n_kph; ++i) {
      if (z_el(eps[i], k) != z0)
        throw InvariantError(
            "TauTable: normalization depends on the photon momentum");
    }
  }
}

TauTable tau_specific() {
  TauEntry ground;
  ground.m = 0;
  ground.n = 0;
  ground.region = {{RegionAtom::Kind::halfspace_pol, {}, 0.0, true}};
  TauEntry excited;
  excited.m = 1;
  excited.n = 0;
  excited.region = {{RegionAtom::Kind::halfspace_pol, {}, 0.0, false}};
  return TauTable({ground, excited});
}

} // namespace qbind
