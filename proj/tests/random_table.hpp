#pragma once
#include "qbind/rng.hpp"
#include "qbind/tau.hpp"
#include <cstdint>
#include <vector>

//! Deterministic small occupation tables for the layout-equivalence checks:
//! besides the always-on (0,0) sector (which keeps the normalization
//! positive), a few sectors with m, n <= 2 are cut out by fixed half spaces
//! and balls. Fixed directions keep the normalization independent of the
//! photon momentum, and at least one half space is always present so the
//! interaction energy does not vanish by inversion symmetry.
inline qbind::TauTable make_random_table(std::uint64_t seed) {
  using qbind::RegionAtom;
  using qbind::Vec3;
  qbind::SplitMix64 rng(seed);

  auto random_direction = [&rng]() {
    for (;;) {
      Vec3 d{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
             rng.uniform(-1.0, 1.0)};
      const double n = qbind::norm(d);
      if (n > 1e-2)
        return d / n;
    }
  };

  std::vector<qbind::TauEntry> entries;
  entries.push_back({0, 0, {}});
  const int extra = 2 + static_cast<int>(rng.next() % 3);
  for (int e = 0; e < extra; ++e) {
    const int m = static_cast<int>(rng.next() % 3);
    const int n = static_cast<int>(rng.next() % 3);
    if (m == 0 && n == 0)
      continue;
    bool duplicate = false;
    for (const auto &ent : entries)
      duplicate = duplicate || (ent.m == m && ent.n == n);
    if (duplicate)
      continue;

    std::vector<RegionAtom> region;
    const int n_atoms = 1 + static_cast<int>(rng.next() % 2);
    for (int a = 0; a < n_atoms; ++a) {
      RegionAtom atom;
      if (a == 0 && entries.size() == 1) {
        // First atom of the first extra sector: guarantee anisotropy.
        atom.kind = RegionAtom::Kind::halfspace_fixed;
        atom.direction = random_direction();
      } else if (rng.next() % 2 == 0) {
        atom.kind = RegionAtom::Kind::halfspace_fixed;
        atom.direction = random_direction();
      } else {
        atom.kind = RegionAtom::Kind::ball;
        atom.radius = rng.uniform(0.8, 2.5);
      }
      atom.negate = (rng.next() & 1) != 0;
      region.push_back(atom);
    }
    entries.push_back({m, n, region});
  }
  return qbind::TauTable(entries);
}
