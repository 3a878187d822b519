#pragma once
#include <cstdint>

namespace qbind {

//! Tiny deterministic PRNG (SplitMix64). Used wherever reproducibility across
//! compilers matters: std::uniform_real_distribution is implementation-defined
//! and would silently change frozen test values between standard libraries.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : m_state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (m_state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  //! Uniform double in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  //! Uniform double in [a,b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
  std::uint64_t m_state;
};

} // namespace qbind
