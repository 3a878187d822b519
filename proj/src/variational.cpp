#include "qbind/variational.hpp"
#include "qbind/coupling.hpp"
#include "qbind/errors.hpp"
#include "qbind/rng.hpp"
#include <algorithm>
#include <cmath>
#include <limits>

namespace qbind {

namespace {

using detail::factorial;

//! Occupancy-weighted sector sums at one electron momentum: the
//! normalization z_el and the excitation count sum_{m,n}(m+n)/(m!n!) tau.
struct SectorSums {
  double z = 0.0;
  double count = 0.0;
};

SectorSums sector_sums(const TauTable &tau, const Vec3 &eps_h, const Vec3 &k) {
  SectorSums s;
  for (const auto &e : tau.entries()) {
    if (tau.value(eps_h, k, e.m, e.n) == 0.0)
      continue;
    const double inv = 1.0 / (factorial(e.m) * factorial(e.n));
    s.z += inv;
    s.count += (e.m + e.n) * inv;
  }
  return s;
}

} // namespace

double z_ph(const TauTable &tau, const Vec3 &k_ph, const ModelParams &p,
            const QuadratureSpec &spec) {
  p.validate();
  tau.validate(p);
  const Vec3 eps_h = polarization_basis(k_ph).eps_h;
  auto integrand = [&](const Vec3 &k) {
    const SectorSums s = sector_sums(tau, eps_h, k);
    if (s.count == 0.0)
      return 0.0; // an occupied sector would contribute to z as well
    return rho_el(k, p) / s.z * s.count;
  };
  const double ell3 = p.ell * p.ell * p.ell;
  return ell3 * integrate_fullspace_gaussian(integrand, eps_h, p.sigma, spec);
}

double w_general(const TauTable &tau, const Vec3 &k_ph, const ModelParams &p,
                 const QuadratureSpec &spec) {
  p.validate();
  tau.validate(p);
  const Vec3 eps_h = polarization_basis(k_ph).eps_h;
  auto integrand = [&](const Vec3 &k) {
    const Vec3 kp = k + k_ph;
    const Vec3 km = -kp; // exact negation keeps k -> -k arguments bitwise
    const double zk = tau.z_el(eps_h, k);
    const double zkp = tau.z_el(eps_h, kp);
    const double zkm = tau.z_el(eps_h, km);
    double sum_h = 0.0, sum_v = 0.0;
    for (const auto &e : tau.entries()) {
      if (tau.value(eps_h, k, e.m, e.n) == 0.0)
        continue;
      const double wmn = 1.0 / (factorial(e.m) * factorial(e.n));
      // horizontal ladder partners (m+1, n): the two companion momenta
      // enter with opposite sign ...
      const double tp = tau.value(eps_h, kp, e.m + 1, e.n);
      const double tm = tau.value(eps_h, km, e.m + 1, e.n);
      if (tp != 0.0)
        sum_h += wmn * tp / std::sqrt(zk * zkp);
      if (tm != 0.0)
        sum_h -= wmn * tm / std::sqrt(zk * zkm);
      // ... vertical ladder partners (m, n+1) with equal sign.
      const double sp = tau.value(eps_h, kp, e.m, e.n + 1);
      const double sm = tau.value(eps_h, km, e.m, e.n + 1);
      if (sp != 0.0)
        sum_v += wmn * sp / std::sqrt(zk * zkp);
      if (sm != 0.0)
        sum_v += wmn * sm / std::sqrt(zk * zkm);
    }
    double out = 0.0;
    if (sum_h != 0.0)
      out += u_coupling(Polarization::horizontal, k_ph, k, p) * sum_h;
    if (sum_v != 0.0)
      out += u_coupling(Polarization::vertical, k_ph, k, p) * sum_v;
    return out;
  };
  const double ell3 = p.ell * p.ell * p.ell;
  return -ell3 * integrate_fullspace_gaussian(integrand, eps_h, p.sigma, spec);
}

double w_oracle(const TauTable &tau, const Vec3 &k_ph, const ModelParams &p,
                const QuadratureSpec &spec) {
  p.validate();
  tau.validate(p);
  const Vec3 eps_h = polarization_basis(k_ph).eps_h;
  const Vec3 k_ph_neg = -k_ph;
  auto integrand = [&](const Vec3 &k) {
    const Vec3 mk = -k;
    const Vec3 kp = k + k_ph;
    const Vec3 km = k - k_ph;
    const double zk = tau.z_el(eps_h, k);
    const double zmk = tau.z_el(eps_h, mk);
    const double zkp = tau.z_el(eps_h, kp);
    const double zkm = tau.z_el(eps_h, km);
    double acc = 0.0;
    for (const auto &e : tau.entries()) {
      const double wmn = 1.0 / (factorial(e.m) * factorial(e.n));
      if (tau.value(eps_h, k, e.m, e.n) != 0.0) {
        // +k_ph branch: companion k + k_ph
        const double inv = wmn / std::sqrt(zk * zkp);
        const double th = tau.value(eps_h, kp, e.m + 1, e.n);
        if (th != 0.0)
          acc += th * inv *
                 u_coupling(Polarization::horizontal, k_ph, k, p);
        const double tv = tau.value(eps_h, kp, e.m, e.n + 1);
        if (tv != 0.0)
          acc += tv * inv * u_coupling(Polarization::vertical, k_ph, k, p);
      }
      if (tau.value(eps_h, mk, e.m, e.n) != 0.0) {
        // -k_ph branch: first factor at -k, companion k - k_ph
        const double inv = wmn / std::sqrt(zmk * zkm);
        const double th = tau.value(eps_h, km, e.m + 1, e.n);
        if (th != 0.0)
          acc += th * inv *
                 u_coupling(Polarization::horizontal, k_ph_neg, k, p);
        const double tv = tau.value(eps_h, km, e.m, e.n + 1);
        if (tv != 0.0)
          acc += tv * inv *
                 u_coupling(Polarization::vertical, k_ph_neg, k, p);
      }
    }
    return acc;
  };
  const double ell3 = p.ell * p.ell * p.ell;
  return -ell3 * integrate_fullspace_gaussian(integrand, eps_h, p.sigma, spec);
}

double w_specific(const Vec3 &k_ph, const ModelParams &p,
                  const QuadratureSpec &spec) {
  p.validate();
  const Vec3 eps_h = polarization_basis(k_ph).eps_h;
  auto integrand = [&](const Vec3 &k) {
    return u_coupling(Polarization::horizontal, k_ph, -k, p);
  };
  const double ell3 = p.ell * p.ell * p.ell;
  return ell3 * integrate_halfspace_gaussian(integrand, eps_h, p.sigma, spec);
}

//==============================================================================

PhotonProfile uniform_profile(double delta, const ModelParams &p) {
  if (!(delta > 0.0))
    throw DomainError("uniform_profile: delta must be positive");
  const double ell3 = p.ell * p.ell * p.ell;
  return {delta, 3.0 / (4.0 * M_PI * delta * delta * delta * ell3)};
}

namespace {

//! Integral over the photon ball |k_ph| <= delta with its own refinement
//! loop. For isotropic tables the angular integral is exactly 4 pi and the
//! rule collapses to the radial direction, so the expensive integrand is
//! evaluated once per radius instead of once per node.
template <class F>
double integrate_photon_ball(F &&g, double delta, bool isotropic,
                             const QuadratureSpec &spec) {
  auto evaluate = [&](int radial, int angular) {
    const GaussLegendre rad = gauss_legendre(radial);
    double acc = 0.0;
    if (isotropic) {
      for (int ir = 0; ir < radial; ++ir) {
        const double r = 0.5 * delta * (rad.x[ir] + 1.0);
        const double wr = 0.5 * delta * rad.w[ir] * r * r;
        acc += 4.0 * M_PI * wr * g(Vec3{0.0, 0.0, r});
      }
      return acc;
    }
    for (const auto &node : ball_nodes(delta, radial, angular))
      acc += node.weight * g(node.k);
    return acc;
  };
  int radial = std::max(4, spec.radial_order / 8);
  int angular = std::max(2, spec.angular_order / 8);
  double prev = evaluate(radial, angular);
  double cur = prev;
  for (int level = 1; level <= spec.max_refinements; ++level) {
    radial *= 2;
    angular *= 2;
    cur = evaluate(radial, angular);
    if (detail::agreed(prev, cur, spec))
      return cur;
    if (level < spec.max_refinements)
      prev = cur;
  }
  throw ConvergenceError("integrate_photon_ball: estimates did not stabilize",
                         prev, cur);
}

} // namespace

EnergyBreakdown energy_breakdown(const TauTable &tau,
                                 const PhotonProfile &profile,
                                 const ModelParams &p,
                                 const QuadratureSpec &spec) {
  p.validate();
  spec.validate();
  tau.validate(p);
  if (!(profile.delta > 0.0) || !(profile.amplitude > 0.0))
    throw DomainError("energy_breakdown: profile must have positive radius "
                      "and amplitude");
  const double ell3 = p.ell * p.ell * p.ell;
  const double total =
      ell3 * profile.amplitude * (4.0 / 3.0) * M_PI * std::pow(profile.delta, 3);
  if (std::abs(total - 1.0) > 1e-6)
    throw InvariantError("energy_breakdown: photon profile is not normalized");
  if (profile.amplitude * p.rho_el0 > 1.0 + 1e-12)
    throw InvariantError("energy_breakdown: occupation bound "
                         "amplitude * rho_el(0) <= 1 violated");

  EnergyBreakdown out;
  const bool isotropic = tau.isotropic();
  out.e_ph = ell3 * integrate_photon_ball(
                        [&](const Vec3 &k_ph) {
                          return p.hbar * p.c * norm(k_ph) *
                                 profile.amplitude * z_ph(tau, k_ph, p, spec);
                        },
                        profile.delta, isotropic, spec);
  out.e_int = -ell3 * integrate_photon_ball(
                          [&](const Vec3 &k_ph) {
                            return profile.amplitude *
                                   w_general(tau, k_ph, p, spec);
                          },
                          profile.delta, isotropic, spec);
  out.e_el = ell3 * integrate_fullspace_gaussian(
                        [&](const Vec3 &k) {
                          return p.hbar * omega(k, p) * rho_el(k, p);
                        },
                        Vec3{0.0, 0.0, 1.0}, p.sigma, spec);
  out.binding = out.e_ph + out.e_int;
  return out;
}

//==============================================================================

double f_lemma(double u) {
  if (u < 0.0)
    throw DomainError("f_lemma: argument must be non-negative");
  return (std::sqrt(M_PI / 2.0) * std::erf(u / std::sqrt(2.0)) -
          u * std::exp(-u * u / 2.0)) /
         28.0;
}

double epsilon_lemma(const ModelParams &p) {
  p.validate();
  if (!(p.coupling > 0.0))
    throw DomainError("epsilon_lemma: coupling must be positive");
  return p.coupling * f_lemma(p.kappa / p.sigma) / std::sqrt(2.0 * M_PI);
}

double solve_delta(const ModelParams &p) {
  const double eps = epsilon_lemma(p);
  const double sigma = p.sigma;
  auto g = [&](double d) {
    return d * sigma * std::exp(d * d / (4.0 * sigma * sigma)) - eps;
  };
  // g is strictly increasing with g(0) = -eps < 0 and g(eps/sigma) >= 0.
  double lo = 0.0;
  double hi = eps / sigma;
  if (g(hi) < 0.0)
    hi *= 2.0; // cannot happen for eps > 0, kept as a safety net
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-16 * hi)
      break;
  }
  return 0.5 * (lo + hi);
}

double lemma_bound(const Vec3 &k_ph, const ModelParams &p) {
  p.validate();
  if (!(p.coupling > 0.0))
    throw DomainError("lemma_bound: coupling must be positive");
  const double r2 = norm2(k_ph);
  if (!(r2 < p.kappa * p.kappa))
    throw DomainError("lemma_bound: only valid for |k_ph| < kappa");
  const double ell3 = p.ell * p.ell * p.ell;
  return ell3 * M_PI * p.sigma * p.sigma * p.coupling * p.c * p.rho_el0 *
         std::exp(-r2 / (4.0 * p.sigma * p.sigma)) *
         f_lemma(p.kappa / p.sigma);
}

ZphComparison zph_closed_specific(const Vec3 &k_ph, const ModelParams &p,
                                  const QuadratureSpec &spec) {
  ZphComparison out;
  const double ell3 = p.ell * p.ell * p.ell;
  out.quoted = 2.0 * M_PI * std::sqrt(2.0 * M_PI) * std::pow(p.sigma, 3) *
               p.rho_el0 * ell3;
  out.computed = z_ph(tau_specific(), k_ph, p, spec);
  out.ratio = out.quoted / out.computed;
  return out;
}

//==============================================================================

TheoremReport theorem_check(const ModelParams &p, const QuadratureSpec &spec) {
  p.validate();
  spec.validate();
  TheoremReport rep;
  rep.delta = solve_delta(p);
  rep.epsilon = epsilon_lemma(p);
  rep.rho_el0_input = p.rho_el0;

  // Clamp the electron peak density so that the normalized uniform profile
  // satisfies the pointwise occupation bound amplitude * rho_el(0) <= 1.
  ModelParams q = p;
  const double ell3 = p.ell * p.ell * p.ell;
  const double cap = (4.0 / 3.0) * M_PI * std::pow(rep.delta, 3) * ell3;
  q.rho_el0 = std::min(p.rho_el0, cap);
  rep.rho_el0_used = q.rho_el0;
  rep.profile = uniform_profile(rep.delta, q);

  const TauTable tau = tau_specific();
  rep.energy = energy_breakdown(tau, rep.profile, q, spec);
  rep.binding_negative = rep.energy.binding < 0.0;

  // The binding integrand w - hbar c |k_ph| Z_ph must be positive across the
  // photon ball; sample it on a radial grid (w depends on |k_ph| only).
  constexpr int n_radii = 16;
  rep.integrand_positive = true;
  for (int i = 0; i < n_radii; ++i) {
    const double r = rep.delta * (i + 0.5) / n_radii;
    const Vec3 k_ph{0.0, 0.0, r};
    const double val = w_general(tau, k_ph, q, spec) -
                       q.hbar * q.c * r * z_ph(tau, k_ph, q, spec);
    rep.integrand.push_back({r, val});
    if (!(val > 0.0))
      rep.integrand_positive = false;
  }

  // Independent 1D reduction of the electron energy (radial Gauss-Legendre
  // at fixed high order, no shared code with the 3D path's angular part).
  {
    const int n = 200;
    const GaussLegendre rad = gauss_legendre(n);
    const double r_max = 10.0 * q.sigma;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = 0.5 * r_max * (rad.x[i] + 1.0);
      acc += 0.5 * r_max * rad.w[i] * r * r * rho_el(r, q) * q.hbar *
             omega(r, q);
    }
    rep.e_el_radial = ell3 * 4.0 * M_PI * acc;
  }
  rep.e_el_rel_err =
      std::abs(rep.energy.e_el - rep.e_el_radial) / std::abs(rep.e_el_radial);
  rep.e_el_consistent = rep.e_el_rel_err <= 1e-10;

  rep.pass =
      rep.binding_negative && rep.integrand_positive && rep.e_el_consistent;
  return rep;
}

MinABoundReport min_a_bound_check(const ModelParams &p, std::uint64_t samples,
                                  std::uint64_t seed) {
  p.validate();
  MinABoundReport rep;
  rep.samples = samples;
  rep.threshold = 4.0 / std::sqrt(std::sqrt(5.0) * (1.0 + std::sqrt(5.0)) *
                                  std::sqrt(2.0) * (1.0 + std::sqrt(2.0)));
  const double kappa = p.kappa;

  // kappa * A in the reduced coordinates (|k|, |k_ph|, cos of the angle
  // between them); A is rotation invariant so these three numbers carry all
  // the dependence.
  auto reduced = [&](double r, double s, double cg) {
    const double sg = std::sqrt(std::max(0.0, 1.0 - cg * cg));
    const Vec3 k{0.0, 0.0, r};
    const Vec3 k_ph{s * sg, 0.0, s * cg};
    return kappa * coeff_A(k, k_ph, p);
  };

  SplitMix64 rng(seed);
  auto ball_point = [&]() {
    const double r = kappa * std::cbrt(rng.uniform());
    const double u = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    const double st = std::sqrt(1.0 - u * u);
    return Vec3{r * st * std::cos(phi), r * st * std::sin(phi), r * u};
  };
  rep.min_random = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Vec3 k = ball_point();
    const Vec3 k_ph = ball_point();
    rep.min_random = std::min(rep.min_random, kappa * coeff_A(k, k_ph, p));
  }

  // Dense scan of the reduced domain (includes all boundary faces), then a
  // coordinate-descent polish around the best cell.
  const int nr = 121, nc = 241;
  rep.min_scan = std::numeric_limits<double>::infinity();
  double br = 0.0, bs = 0.0, bc = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = kappa * i / (nr - 1);
    for (int j = 0; j < nr; ++j) {
      const double s = kappa * j / (nr - 1);
      for (int l = 0; l < nc; ++l) {
        const double cg = -1.0 + 2.0 * l / (nc - 1);
        const double v = reduced(r, s, cg);
        if (v < rep.min_scan) {
          rep.min_scan = v;
          br = r;
          bs = s;
          bc = cg;
        }
      }
    }
  }
  double step_r = kappa / (nr - 1), step_c = 2.0 / (nc - 1);
  for (int iter = 0; iter < 60; ++iter) {
    bool improved = false;
    const double trial[4][3] = {{br + step_r, bs, bc},
                                {br - step_r, bs, bc},
                                {br, bs + step_r, bc},
                                {br, bs - step_r, bc}};
    for (const auto &t : trial) {
      const double r = std::clamp(t[0], 0.0, kappa);
      const double s = std::clamp(t[1], 0.0, kappa);
      const double v = reduced(r, s, bc);
      if (v < rep.min_scan) {
        rep.min_scan = v;
        br = r;
        bs = s;
        improved = true;
      }
    }
    for (const double cg :
         {std::clamp(bc + step_c, -1.0, 1.0), std::clamp(bc - step_c, -1.0, 1.0)}) {
      const double v = reduced(br, bs, cg);
      if (v < rep.min_scan) {
        rep.min_scan = v;
        bc = cg;
        improved = true;
      }
    }
    if (!improved) {
      step_r *= 0.5;
      step_c *= 0.5;
    }
  }
  rep.argmin_abs_k = br;
  rep.argmin_abs_kph = bs;
  rep.argmin_cos = bc;

  rep.corner_parallel = reduced(kappa, kappa, 1.0);
  rep.corner_antiparallel = reduced(kappa, kappa, -1.0);
  rep.min_overall = std::min(rep.min_random, rep.min_scan);
  rep.pass = rep.min_overall > rep.threshold && rep.min_overall > 1.0 / 7.0;
  return rep;
}

} // namespace qbind
