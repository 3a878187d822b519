#include "qbind/studies.hpp"
#include "qbind/coupling.hpp"
#include "qbind/errors.hpp"
#include "qbind/rng.hpp"
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <thread>

namespace qbind {

namespace {

//==============================================================================
// Blob helpers
//==============================================================================

ScalarGrid gaussian_blob(const GridSpec &spec, const Vec3 &center,
                         double width, double charge) {
  ScalarGrid out(spec);
  const double amp =
      charge / std::pow(2.0 * M_PI * width * width, 1.5);
  const double inv = 1.0 / (2.0 * width * width);
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      for (int k = 0; k < spec.n; ++k) {
        const Vec3 d = spec.point(i, j, k) - center;
        out.at(i, j, k) = amp * std::exp(-norm2(d) * inv);
      }
  return out;
}

//! Analytic Coulomb correction of a Gaussian blob: radially inward with
//! magnitude mu0 c Q_enc(r) / (4 pi r^2), where Q_enc is the enclosed charge
//! expressed through erf.
Vec3 erf_field(const Vec3 &x, const Vec3 &center, double width, double charge,
               const ModelParams &p) {
  const Vec3 d = x - center;
  const double r = norm(d);
  if (r == 0.0)
    return {};
  const double s = r / (width * std::sqrt(2.0));
  const double enclosed =
      std::erf(s) -
      std::sqrt(2.0 / M_PI) * (r / width) * std::exp(-r * r / (2.0 * width * width));
  const double magnitude =
      p.mu0 * p.c * charge * enclosed / (4.0 * M_PI * r * r);
  return (-magnitude / r) * d;
}

VectorGrid add_fields(const VectorGrid &a, const VectorGrid &b) {
  VectorGrid out(a.spec());
  for (std::size_t i = 0; i < out.data().size(); ++i)
    out.data()[i] = a.data()[i] + b.data()[i];
  return out;
}

double relative_curl(const VectorGrid &e) {
  constexpr int margin = 2;
  return curl(e).rms_interior(margin) / e.rms_interior(margin);
}

bool order_ok(double order) { return order > 1.7 && order < 2.3; }

//! Continuity residual with the opposite sign convention on the induced
//! current, used to demonstrate that the implemented sign is the one that
//! closes the balance (the flipped version misses by a factor ~2).
double flipped_continuity_residual(const std::vector<ScalarGrid> &series,
                                   double dt, const ModelParams &p,
                                   PoissonMethod method) {
  const std::vector<VectorGrid> current =
      emergent_current(series, dt, p, method);
  constexpr int margin = 2;
  const int n = series.front().n();
  double num = 0.0, denom = 0.0;
  for (std::size_t t = 1; t + 1 < series.size(); ++t) {
    const ScalarGrid div = divergence(current[t - 1]);
    for (int i = margin; i < n - margin; ++i)
      for (int j = margin; j < n - margin; ++j)
        for (int k = margin; k < n - margin; ++k) {
          const double dj0 =
              (series[t + 1].at(i, j, k) - series[t - 1].at(i, j, k)) /
              (2.0 * dt * p.c);
          const double r = dj0 - div.at(i, j, k);
          num += r * r;
          denom += dj0 * dj0;
        }
  }
  return std::sqrt(num / denom);
}

} // namespace

//==============================================================================

EmergentReport emergent_report(const ModelParams &p, std::uint64_t seed,
                               const std::vector<int> &sizes) {
  p.validate();
  if (sizes.size() < 2)
    throw DomainError("emergent_report: need at least two grid sizes");
  EmergentReport rep;
  const double box = 1.0;
  // Width balances two error budgets: wide enough that the (h/width)^2
  // stencil error clears the translating-blob and erf-window tolerances,
  // narrow enough that the support stays clear of the box faces on the
  // coarsest grid.
  const double width = box / 7.0;
  const Vec3 center{box / 2.0, box / 2.0, box / 2.0};
  const double charge = 1.0;

  for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
    const int n = sizes[idx];
    const GridSpec spec{n, box / n, {0.0, 0.0, 0.0}};
    const ScalarGrid blob = gaussian_blob(spec, center, width, charge);
    const VectorGrid e_c = coulomb_correction(blob, p);
    const VectorGrid e_t = make_transverse_field(spec, seed);

    rep.gauss.h.push_back(spec.h);
    rep.gauss.residual.push_back(
        gauss_residual(add_fields(e_c, e_t), blob, p));

    rep.curl_pipeline_max =
        std::max(rep.curl_pipeline_max, relative_curl(e_c));

    // The discrete curl annihilates the discrete gradient identically, so
    // the order-2 statement is exhibited on exact samples of the continuum
    // Coulomb field instead.
    VectorGrid e_exact(spec);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          e_exact.at(i, j, k) =
              erf_field(spec.point(i, j, k), center, width, charge, p);
    rep.curl.h.push_back(spec.h);
    rep.curl.residual.push_back(relative_curl(e_exact));

    if (idx + 1 == sizes.size()) {
      // Window comparison against the analytic solution on the finest grid.
      rep.erf_low = 4.0 * spec.h;
      rep.erf_high = box / 4.0;
      double worst = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            const Vec3 x = spec.point(i, j, k);
            const double r = norm(x - center);
            if (r < rep.erf_low || r > rep.erf_high)
              continue;
            const Vec3 exact = erf_field(x, center, width, charge, p);
            const Vec3 got = e_c.at(i, j, k);
            worst = std::max(worst, norm(got - exact) / norm(exact));
          }
      rep.erf_max_rel_err = worst;
    }
  }
  rep.gauss.order = convergence_slope(rep.gauss.h, rep.gauss.residual);
  rep.curl.order = convergence_slope(rep.curl.h, rep.curl.residual);

  // Oscillating blob: joint (h, dt) refinement of the continuity residual.
  const double period = 1.0;
  for (const int n : sizes) {
    const GridSpec spec{n, box / n, {0.0, 0.0, 0.0}};
    const int nt = n / 2;
    const double dt = period / nt;
    std::vector<ScalarGrid> series;
    series.reserve(nt + 1);
    for (int s = 0; s <= nt; ++s) {
      const double amp = 1.0 + 0.5 * std::sin(2.0 * M_PI * s * dt / period);
      series.push_back(gaussian_blob(spec, center, width, amp * charge));
    }
    rep.continuity.h.push_back(spec.h);
    rep.continuity.residual.push_back(continuity_residual(series, dt, p));
  }
  rep.continuity.order =
      convergence_slope(rep.continuity.h, rep.continuity.residual);

  // Translating blob: fixed baseline resolution (the 1e-2 bound is tied to
  // this particular n and step count, unlike the refinement studies above).
  {
    const int n = 64;
    const GridSpec spec{n, box / n, {0.0, 0.0, 0.0}};
    const int nt = n;
    const double dt = period / nt;
    std::vector<ScalarGrid> series;
    series.reserve(nt + 1);
    for (int s = 0; s <= nt; ++s) {
      const double t = s * dt;
      const Vec3 c = center + Vec3{4.0 * spec.h * (t / period - 0.5), 0.0, 0.0};
      series.push_back(gaussian_blob(spec, c, width, charge));
    }
    rep.translating_residual = continuity_residual(series, dt, p);
  }

  rep.pass = order_ok(rep.gauss.order) && order_ok(rep.curl.order) &&
             rep.curl_pipeline_max < 1e-10 && rep.erf_max_rel_err < 0.01 &&
             order_ok(rep.continuity.order) &&
             rep.translating_residual < 1e-2;
  return rep;
}

//==============================================================================

VerifyReport verify_suite(const ModelParams &p, const QuadratureSpec &spec,
                          std::uint64_t seed) {
  p.validate();
  spec.validate();
  VerifyReport rep;
  auto add = [&](const std::string &name, bool pass, double value,
                 double bound) {
    rep.checks.push_back({name, pass, value, bound});
  };
  SplitMix64 rng(seed);
  auto rand_vec = [&](double scale) {
    return Vec3{rng.uniform(-scale, scale), rng.uniform(-scale, scale),
                rng.uniform(-scale, scale)};
  };

  constexpr int n_pairs = 1000;
  double d_orthonormal = 0.0, d_transversal = 0.0;
  int parity_failures = 0;
  double d_h_inversion = 0.0, d_v_inversion = 0.0;
  double d_h_shift = 0.0, d_v_shift = 0.0;
  int sign_violations = 0, zero_violations = 0;
  for (int it = 0; it < n_pairs; ++it) {
    Vec3 k_ph = rand_vec(2.0 * p.sigma);
    if (norm(k_ph) < 1e-6)
      k_ph = Vec3{0.0, 0.0, p.sigma};
    const Vec3 k = rand_vec(2.0 * p.sigma);

    const PolarizationBasis b = polarization_basis(k_ph);
    d_orthonormal = std::max(
        {d_orthonormal, std::abs(dot(b.eps_h, b.eps_h) - 1.0),
         std::abs(dot(b.eps_v, b.eps_v) - 1.0),
         std::abs(dot(b.khat, b.khat) - 1.0), std::abs(dot(b.eps_h, b.eps_v)),
         std::abs(dot(b.eps_h, b.khat)), std::abs(dot(b.eps_v, b.khat)),
         norm(cross(b.eps_h, b.eps_v) - b.khat)});
    d_transversal =
        std::max(d_transversal, std::abs(dot(b.eps_h, k_ph)) / norm(k_ph));
    const PolarizationBasis bm = polarization_basis(-k_ph);
    if (!(bm.eps_h == b.eps_h) || !(bm.eps_v == -b.eps_v) ||
        !(bm.khat == -b.khat))
      ++parity_failures;

    using P = Polarization;
    const double uh = u_coupling(P::horizontal, k_ph, k, p);
    const double uv = u_coupling(P::vertical, k_ph, k, p);
    d_h_inversion = std::max(
        d_h_inversion, std::abs(u_coupling(P::horizontal, -k_ph, -k, p) + uh));
    d_v_inversion = std::max(
        d_v_inversion, std::abs(u_coupling(P::vertical, -k_ph, -k, p) - uv));
    const Vec3 shifted = k - k_ph;
    d_h_shift = std::max(d_h_shift,
                         std::abs(u_coupling(P::horizontal, -k_ph, k, p) -
                                  u_coupling(P::horizontal, k_ph, shifted, p)));
    d_v_shift = std::max(d_v_shift,
                         std::abs(u_coupling(P::vertical, -k_ph, k, p) +
                                  u_coupling(P::vertical, k_ph, shifted, p)));

    const double proj = dot(b.eps_h, k);
    if ((proj > 0.0 && uh > 0.0) || (proj < 0.0 && uh < 0.0) ||
        (proj == 0.0 && uh != 0.0))
      ++sign_violations;

    // Exactly transverse electron momentum: the amplitude must vanish
    // exactly, not merely to rounding.
    const Vec3 axis_kph{0.0, 0.0, rng.uniform(0.2, 2.0) * p.sigma};
    const Vec3 perp{0.0, rng.uniform(-2.0, 2.0) * p.sigma,
                    rng.uniform(-2.0, 2.0) * p.sigma};
    if (u_coupling(P::horizontal, axis_kph, perp, p) != 0.0)
      ++zero_violations;
  }
  add("polarization_orthonormal", d_orthonormal <= 1e-12, d_orthonormal, 1e-12);
  add("polarization_transversality", d_transversal <= 1e-13, d_transversal,
      1e-13);
  add("polarization_parity_bitwise", parity_failures == 0, parity_failures, 0);
  add("coupling_inversion_h", d_h_inversion <= 1e-12, d_h_inversion, 1e-12);
  add("coupling_inversion_v", d_v_inversion <= 1e-12, d_v_inversion, 1e-12);
  add("coupling_shift_h", d_h_shift <= 1e-12, d_h_shift, 1e-12);
  add("coupling_shift_v", d_v_shift <= 1e-12, d_v_shift, 1e-12);
  add("coupling_sign_structure", sign_violations == 0, sign_violations, 0);
  add("coupling_exact_zero", zero_violations == 0, zero_violations, 0);

  // Layout equivalence of the interaction energy on the two-sector table.
  {
    const TauTable tau = tau_specific();
    double worst_oracle = 0.0, worst_closed = 0.0;
    for (const double r : {0.1 * p.sigma, 0.7 * p.sigma}) {
      const Vec3 k_ph{0.0, 0.0, r};
      const double wg = w_general(tau, k_ph, p, spec);
      const double wo = w_oracle(tau, k_ph, p, spec);
      const double ws = w_specific(k_ph, p, spec);
      worst_oracle = std::max(worst_oracle, std::abs(wg - wo) / std::abs(wg));
      worst_closed = std::max(worst_closed, std::abs(wg - ws) / std::abs(wg));
    }
    add("w_layout_equivalence", worst_oracle <= 1e-10, worst_oracle, 1e-10);
    add("w_closed_reduction", worst_closed <= 1e-10, worst_closed, 1e-10);
  }

  // Quadrature invariances.
  {
    const double s2 = 2.0 * p.sigma * p.sigma;
    auto gauss = [&](const Vec3 &k) { return std::exp(-norm2(k) / s2); };
    const double half = integrate_halfspace_gaussian(
        gauss, Vec3{0.0, 0.0, 1.0}, p.sigma, spec);
    const double half_exact =
        0.5 * std::pow(2.0 * M_PI, 1.5) * std::pow(p.sigma, 3);
    add("halfspace_gaussian_moment",
        std::abs(half / half_exact - 1.0) <= 1e-12,
        std::abs(half / half_exact - 1.0), 1e-12);

    auto odd = [&](const Vec3 &k) { return k.x * std::exp(-norm2(k) / s2); };
    const double odd_val = integrate_fullspace_gaussian(
        odd, Vec3{0.0, 0.0, 1.0}, p.sigma, spec);
    add("fullspace_odd_cancellation", std::abs(odd_val) <= 1e-12,
        std::abs(odd_val), 1e-12);

    const double ball =
        integrate_ball([](const Vec3 &) { return 1.0; }, 0.5, spec);
    const double ball_exact = 4.0 / 3.0 * M_PI * 0.125;
    add("ball_volume", std::abs(ball / ball_exact - 1.0) <= 1e-12,
        std::abs(ball / ball_exact - 1.0), 1e-12);
  }

  // Behavior of w under inversion and rotation of the photon momentum.
  {
    const double r = 0.3 * p.sigma;
    const double w_plus = w_specific(Vec3{0.0, 0.0, r}, p, spec);
    const double w_minus = w_specific(Vec3{0.0, 0.0, -r}, p, spec);
    const double even_dev = std::abs(w_plus - w_minus) / std::abs(w_plus);
    add("w_even_in_kph", even_dev <= 1e-12, even_dev, 1e-12);

    const double w_x = w_specific(Vec3{r, 0.0, 0.0}, p, spec);
    const double inv = 1.0 / std::sqrt(3.0);
    const double w_diag =
        w_specific(Vec3{r * inv, r * inv, r * inv}, p, spec);
    const double rot_dev =
        std::max(std::abs(w_x - w_plus), std::abs(w_diag - w_plus)) /
        std::abs(w_plus);
    const double rot_bound = 10.0 * spec.rel_tol;
    add("w_rotation_invariant", rot_dev <= rot_bound, rot_dev, rot_bound);
  }

  // Window construction and profile bookkeeping.
  {
    const double eps = epsilon_lemma(p);
    const double delta = solve_delta(p);
    const double resid =
        std::abs(delta * p.sigma *
                     std::exp(delta * delta / (4.0 * p.sigma * p.sigma)) -
                 eps) /
        eps;
    add("delta_root_residual", resid <= 1e-12, resid, 1e-12);

    const PhotonProfile prof = uniform_profile(delta, p);
    const double ell3 = p.ell * p.ell * p.ell;
    const double total = ell3 * prof.amplitude * (4.0 / 3.0) * M_PI *
                         std::pow(prof.delta, 3);
    add("profile_normalized", std::abs(total - 1.0) <= 1e-12,
        std::abs(total - 1.0), 1e-12);
  }

  // Two-sector table: unit normalization everywhere, photon independence.
  {
    const TauTable tau = tau_specific();
    int violations = 0;
    for (int it = 0; it < 200; ++it) {
      Vec3 k_ph = rand_vec(p.sigma);
      if (norm(k_ph) < 1e-6)
        k_ph = Vec3{0.0, 0.0, p.sigma};
      const Vec3 eps_h = polarization_basis(k_ph).eps_h;
      if (tau.z_el(eps_h, rand_vec(3.0 * p.sigma)) != 1.0)
        ++violations;
    }
    add("two_sector_unit_normalization", violations == 0, violations, 0);
  }

  rep.pass = true;
  for (const auto &c : rep.checks)
    rep.pass = rep.pass && c.pass;
  return rep;
}

//==============================================================================

AuditReport audit_findings(const ModelParams &p, const QuadratureSpec &spec) {
  p.validate();
  spec.validate();
  AuditReport rep;

  rep.zph = zph_closed_specific(Vec3{0.0, 0.0, 0.3 * p.sigma}, p, spec);

  rep.delta = solve_delta(p);
  const double ell3 = p.ell * p.ell * p.ell;
  const double amp_cubed = 3.0 / (4.0 * M_PI * std::pow(rep.delta, 3) * ell3);
  const double amp_squared = 3.0 / (4.0 * M_PI * rep.delta * rep.delta * ell3);
  rep.norm_with_cubed =
      ell3 * integrate_ball([&](const Vec3 &) { return amp_cubed; }, rep.delta,
                            spec);
  rep.norm_with_squared =
      ell3 * integrate_ball([&](const Vec3 &) { return amp_squared; },
                            rep.delta, spec);

  // Long-wavelength factor probed away from c = 1, where the scaled and
  // unscaled variants disagree by the factor c.
  {
    ModelParams q = p;
    q.c = 2.0;
    const Vec3 k{0.4 * q.kappa, 0.0, 0.0};
    const Vec3 tiny{0.0, 0.0, 1e-7 * q.kappa};
    rep.a_exact = coeff_A(k, tiny, q);
    rep.a_scaled = a_long_wavelength(k, tiny, q);
    rep.a_unscaled = rep.a_scaled / q.c;
  }

  // Induced-current sign on a small oscillating blob.
  {
    const double box = 1.0;
    const int n = 24, nt = 12;
    const GridSpec gspec{n, box / n, {0.0, 0.0, 0.0}};
    const Vec3 center{box / 2.0, box / 2.0, box / 2.0};
    const double width = box / 8.0;
    const double dt = 1.0 / nt;
    std::vector<ScalarGrid> series;
    for (int s = 0; s <= nt; ++s) {
      const double amp = 1.0 + 0.5 * std::sin(2.0 * M_PI * s * dt);
      series.push_back(gaussian_blob(gspec, center, width, amp));
    }
    rep.continuity_implemented =
        continuity_residual(series, dt, p, PoissonMethod::fft);
    rep.continuity_flipped =
        flipped_continuity_residual(series, dt, p, PoissonMethod::fft);
  }

  const double ratio_dev = std::abs(rep.zph.ratio - 2.0);
  const double scaled_dev = std::abs(rep.a_scaled / rep.a_exact - 1.0);
  const double unscaled_dev = std::abs(rep.a_unscaled / rep.a_exact - 0.5);
  rep.confirmed = ratio_dev <= 1e-4 &&
                  std::abs(rep.norm_with_cubed - 1.0) <= 1e-9 &&
                  std::abs(rep.norm_with_squared - rep.delta) <=
                      1e-9 * rep.delta &&
                  scaled_dev <= 1e-4 && unscaled_dev <= 1e-4 &&
                  rep.continuity_implemented < 0.2 &&
                  std::abs(rep.continuity_flipped - 2.0) <= 0.2;
  return rep;
}

//==============================================================================

std::vector<SweepRow> sweep_w(const ModelParams &p, const QuadratureSpec &spec,
                              double kph_min, double kph_max, int steps,
                              int threads) {
  p.validate();
  spec.validate();
  if (steps < 1)
    throw ConfigError("sweep_w: need at least one step");
  if (!(kph_min > 0.0) || !(kph_max >= kph_min))
    throw ConfigError("sweep_w: need 0 < kph_min <= kph_max");
  if (threads < 0)
    throw ConfigError("sweep_w: thread count cannot be negative");
  unsigned n_workers =
      threads == 0 ? std::thread::hardware_concurrency() : threads;
  if (n_workers == 0)
    n_workers = 1;
  n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(steps));

  std::vector<SweepRow> rows(static_cast<std::size_t>(steps));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    try {
      const TauTable tau = tau_specific();
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= steps)
          break;
        const double r =
            steps == 1
                ? kph_min
                : kph_min + (kph_max - kph_min) * i / (steps - 1.0);
        const Vec3 k_ph{0.0, 0.0, r};
        SweepRow row;
        row.abs_kph = r;
        row.w = w_specific(k_ph, p, spec);
        row.hc_kph_zph = p.hbar * p.c * r * z_ph(tau, k_ph, p, spec);
        row.integrand = row.w - row.hc_kph_zph;
        row.lower_bound = (p.coupling > 0.0 && r < p.kappa)
                              ? lemma_bound(k_ph, p)
                              : std::numeric_limits<double>::quiet_NaN();
        rows[static_cast<std::size_t>(i)] = row;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure)
        failure = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_workers; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow> &rows) {
  std::string out = "abs_kph,w,hc_kph_zph,binding_integrand,w_lower_bound\n";
  char line[256];
  for (const auto &r : rows) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.abs_kph, r.w, r.hc_kph_zph, r.integrand, r.lower_bound);
    out += line;
  }
  return out;
}

} // namespace qbind
