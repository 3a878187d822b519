#include "qbind/fields.hpp"
#include "qbind/errors.hpp"
#include "qbind/rng.hpp"
#include <cmath>
#include <cstring>
#include <fftw3.h>
#include <limits>
#include <mutex>

namespace qbind {

namespace {

//! 2nd-order derivative along one axis: central in the interior, one-sided
//! (three-point) on the two faces. Requires at least 3 cells per axis.
ScalarGrid derivative(const ScalarGrid &f, int axis) {
  const int n = f.n();
  if (n < 3)
    throw DomainError("derivative: need at least 3 cells per axis");
  const double inv2h = 1.0 / (2.0 * f.spec().h);
  ScalarGrid out(f.spec());
  auto shifted = [&](int i, int j, int k, int offset) {
    switch (axis) {
    case 0:
      return f.at(i + offset, j, k);
    case 1:
      return f.at(i, j + offset, k);
    default:
      return f.at(i, j, k + offset);
    }
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int pos = (axis == 0) ? i : (axis == 1) ? j : k;
        double d;
        if (pos == 0)
          d = (-3.0 * shifted(i, j, k, 0) + 4.0 * shifted(i, j, k, 1) -
               shifted(i, j, k, 2)) *
              inv2h;
        else if (pos == n - 1)
          d = (3.0 * shifted(i, j, k, 0) - 4.0 * shifted(i, j, k, -1) +
               shifted(i, j, k, -2)) *
              inv2h;
        else
          d = (shifted(i, j, k, 1) - shifted(i, j, k, -1)) * inv2h;
        out.at(i, j, k) = d;
      }
  return out;
}

ScalarGrid component(const VectorGrid &v, int c) {
  ScalarGrid out(v.spec());
  const int n = v.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 &w = v.at(i, j, k);
        out.at(i, j, k) = (c == 0) ? w.x : (c == 1) ? w.y : w.z;
      }
  return out;
}

} // namespace

VectorGrid gradient(const ScalarGrid &f) {
  const ScalarGrid gx = derivative(f, 0);
  const ScalarGrid gy = derivative(f, 1);
  const ScalarGrid gz = derivative(f, 2);
  VectorGrid out(f.spec());
  const int n = f.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out.at(i, j, k) = {gx.at(i, j, k), gy.at(i, j, k), gz.at(i, j, k)};
  return out;
}

ScalarGrid divergence(const VectorGrid &v) {
  const ScalarGrid dx = derivative(component(v, 0), 0);
  const ScalarGrid dy = derivative(component(v, 1), 1);
  const ScalarGrid dz = derivative(component(v, 2), 2);
  ScalarGrid out(v.spec());
  const int n = v.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out.at(i, j, k) = dx.at(i, j, k) + dy.at(i, j, k) + dz.at(i, j, k);
  return out;
}

VectorGrid curl(const VectorGrid &v) {
  const ScalarGrid x = component(v, 0);
  const ScalarGrid y = component(v, 1);
  const ScalarGrid z = component(v, 2);
  const ScalarGrid zy = derivative(z, 1), yz = derivative(y, 2);
  const ScalarGrid xz = derivative(x, 2), zx = derivative(z, 0);
  const ScalarGrid yx = derivative(y, 0), xy = derivative(x, 1);
  VectorGrid out(v.spec());
  const int n = v.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out.at(i, j, k) = {zy.at(i, j, k) - yz.at(i, j, k),
                           xz.at(i, j, k) - zx.at(i, j, k),
                           yx.at(i, j, k) - xy.at(i, j, k)};
  return out;
}

VectorGrid make_transverse_field(const GridSpec &spec, std::uint64_t seed,
                                 int n_modes) {
  if (n_modes < 1)
    throw DomainError("make_transverse_field: need at least one mode");
  SplitMix64 rng(seed);
  const double l = spec.extent();
  struct Mode {
    Vec3 q, amplitude;
    double phase;
  };
  std::vector<Mode> modes(static_cast<std::size_t>(n_modes));
  for (auto &m : modes) {
    // Wavelengths of the order of the box: smooth on any grid of interest.
    const double qmax = 2.0 * M_PI / l;
    m.q = {rng.uniform(-qmax, qmax), rng.uniform(-qmax, qmax),
           rng.uniform(-qmax, qmax)};
    m.amplitude = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                   rng.uniform(-1.0, 1.0)};
    m.phase = rng.uniform(0.0, 2.0 * M_PI);
  }
  VectorGrid out(spec);
  const int n = spec.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 x = spec.point(i, j, k);
        Vec3 e{};
        // curl of sum_m amplitude_m sin(q_m . x + phase_m) evaluated
        // analytically: cos(q . x + phase) (q x amplitude).
        for (const auto &m : modes)
          e += std::cos(dot(m.q, x) + m.phase) * cross(m.q, m.amplitude);
        out.at(i, j, k) = e;
      }
  return out;
}

//==============================================================================
// Coulomb correction
//==============================================================================

double self_cell_kernel(double h) {
  static const double c =
      6.0 * std::log((1.0 + std::sqrt(3.0)) / std::sqrt(2.0)) - 0.5 * M_PI;
  return c * h * h;
}

namespace {

//! FFTW plan management is not thread-safe; execution is.
std::mutex &fftw_mutex() {
  static std::mutex m;
  return m;
}

} // namespace

struct CoulombSolver::Impl {
  GridSpec spec;
  ModelParams params;
  bool use_fft = false;

  // FFT state (padded cube of side m = 2n).
  int m = 0;
  std::size_t n_real = 0, n_cplx = 0;
  double *real_buf = nullptr;
  fftw_complex *cplx_buf = nullptr;
  std::vector<double> kernel_hat; // interleaved re,im of the kernel transform
  fftw_plan forward = nullptr, backward = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    if (forward)
      fftw_destroy_plan(forward);
    if (backward)
      fftw_destroy_plan(backward);
    if (real_buf)
      fftw_free(real_buf);
    if (cplx_buf)
      fftw_free(cplx_buf);
  }

  void init_fft() {
    m = 2 * spec.n;
    n_real = static_cast<std::size_t>(m) * m * m;
    n_cplx = static_cast<std::size_t>(m) * m * (m / 2 + 1);
    {
      std::lock_guard<std::mutex> lock(fftw_mutex());
      real_buf = fftw_alloc_real(n_real);
      cplx_buf = fftw_alloc_complex(n_cplx);
      forward = fftw_plan_dft_r2c_3d(m, m, m, real_buf, cplx_buf,
                                     FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r_3d(m, m, m, cplx_buf, real_buf,
                                      FFTW_ESTIMATE);
    }
    if (!real_buf || !cplx_buf || !forward || !backward)
      throw DomainError("CoulombSolver: FFT setup failed");

    // Transform of the open-boundary kernel: offsets wrap negatively above
    // m/2. Values at |offset| = n are never touched by zero-padded charges.
    const double h = spec.h;
    for (int a = 0; a < m; ++a) {
      const int da = (a <= m / 2) ? a : a - m;
      for (int b = 0; b < m; ++b) {
        const int db = (b <= m / 2) ? b : b - m;
        for (int c = 0; c < m; ++c) {
          const int dc = (c <= m / 2) ? c : c - m;
          const std::size_t idx =
              (static_cast<std::size_t>(a) * m + b) * m + c;
          if (da == 0 && db == 0 && dc == 0)
            real_buf[idx] = self_cell_kernel(h);
          else
            real_buf[idx] =
                h * h /
                std::sqrt(static_cast<double>(da) * da +
                          static_cast<double>(db) * db +
                          static_cast<double>(dc) * dc);
        }
      }
    }
    fftw_execute(forward);
    kernel_hat.resize(2 * n_cplx);
    std::memcpy(kernel_hat.data(), cplx_buf, n_cplx * sizeof(fftw_complex));
  }

  ScalarGrid potential_direct(const ScalarGrid &j0) const {
    const int n = spec.n;
    const double h = spec.h;
    ScalarGrid phi(spec);
    // Gather the nonzero sources once; the sum is then sources x targets.
    struct Source {
      int i, j, k;
      double q;
    };
    std::vector<Source> sources;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (j0.at(i, j, k) != 0.0)
            sources.push_back({i, j, k, j0.at(i, j, k)});
    const double self = self_cell_kernel(h);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double acc = 0.0;
          for (const auto &s : sources) {
            const double di = i - s.i, dj = j - s.j, dk = k - s.k;
            const double r2 = di * di + dj * dj + dk * dk;
            acc += (r2 == 0.0) ? self * s.q
                               : h * h / std::sqrt(r2) * s.q;
          }
          phi.at(i, j, k) = acc;
        }
    return phi;
  }

  ScalarGrid potential_fft(const ScalarGrid &j0) {
    const int n = spec.n;
    std::memset(real_buf, 0, n_real * sizeof(double));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          real_buf[(static_cast<std::size_t>(i) * m + j) * m + k] =
              j0.at(i, j, k);
    fftw_execute(forward);
    const double scale = 1.0 / static_cast<double>(n_real);
    const double *kh = kernel_hat.data();
    for (std::size_t i = 0; i < n_cplx; ++i) {
      const double re = cplx_buf[i][0], im = cplx_buf[i][1];
      const double kre = kh[2 * i], kim = kh[2 * i + 1];
      cplx_buf[i][0] = (re * kre - im * kim) * scale;
      cplx_buf[i][1] = (re * kim + im * kre) * scale;
    }
    fftw_execute(backward);
    ScalarGrid phi(spec);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          phi.at(i, j, k) =
              real_buf[(static_cast<std::size_t>(i) * m + j) * m + k];
    return phi;
  }
};

CoulombSolver::CoulombSolver(const GridSpec &spec, const ModelParams &p,
                             PoissonMethod method)
    : m_impl(std::make_unique<Impl>()) {
  p.validate();
  if (spec.n < 8)
    throw DomainError("CoulombSolver: grid too small to hold padded charge");
  m_impl->spec = spec;
  m_impl->params = p;
  if (method == PoissonMethod::automatic)
    method = (spec.n <= 24) ? PoissonMethod::direct : PoissonMethod::fft;
  m_method = method;
  m_impl->use_fft = (method == PoissonMethod::fft);
  if (m_impl->use_fft)
    m_impl->init_fft();
}

CoulombSolver::~CoulombSolver() = default;

VectorGrid CoulombSolver::field(const ScalarGrid &j0) const {
  if (!(j0.spec() == m_impl->spec))
    throw DomainError("CoulombSolver: charge grid does not match the solver");
  const int n = m_impl->spec.n;
  const double peak = j0.max_abs();
  if (peak == 0.0)
    return VectorGrid(m_impl->spec);
  // Free-space evaluation needs clearance: cells above 5% of the peak must
  // keep 4 cells of padding to every face.
  const double support_level = 0.05 * peak;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (std::abs(j0.at(i, j, k)) > support_level) {
          const int edge = std::min(std::min(i, n - 1 - i),
                                    std::min(std::min(j, n - 1 - j),
                                             std::min(k, n - 1 - k)));
          if (edge < 4)
            throw DomainError(
                "CoulombSolver: charge support too close to the boundary");
        }

  ScalarGrid phi = m_impl->use_fft ? m_impl->potential_fft(j0)
                                   : m_impl->potential_direct(j0);
  VectorGrid e = gradient(phi);
  const ModelParams &p = m_impl->params;
  const double prefactor = p.mu0 * p.c / (4.0 * M_PI);
  for (Vec3 &v : e.data())
    v = prefactor * v;
  return e;
}

VectorGrid coulomb_correction(const ScalarGrid &j0, const ModelParams &p,
                              PoissonMethod method) {
  return CoulombSolver(j0.spec(), p, method).field(j0);
}

double gauss_residual(const VectorGrid &e, const ScalarGrid &j0,
                      const ModelParams &p) {
  if (!(e.spec() == j0.spec()))
    throw DomainError("gauss_residual: field and charge grids differ");
  p.validate();
  const ScalarGrid div = divergence(e);
  ScalarGrid resid(e.spec());
  ScalarGrid scale(e.spec());
  const int n = e.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double rho_term = p.mu0 * p.c * j0.at(i, j, k);
        resid.at(i, j, k) = div.at(i, j, k) + rho_term;
        scale.at(i, j, k) = rho_term;
      }
  constexpr int margin = 2;
  const double denom = scale.rms_interior(margin);
  if (denom == 0.0)
    throw DomainError("gauss_residual: charge vanishes on the interior");
  return resid.rms_interior(margin) / denom;
}

//==============================================================================

namespace {

void check_series(const std::vector<ScalarGrid> &series, double dt) {
  if (series.size() < 3)
    throw DomainError("charge series needs at least three time slices");
  if (!(dt > 0.0))
    throw DomainError("time step must be positive");
  for (const auto &s : series)
    if (!(s.spec() == series.front().spec()))
      throw DomainError("charge series mixes grid layouts");
}

} // namespace

std::vector<VectorGrid>
emergent_current(const std::vector<ScalarGrid> &j0_series, double dt,
                 const ModelParams &p, PoissonMethod method) {
  check_series(j0_series, dt);
  p.validate();
  CoulombSolver solver(j0_series.front().spec(), p, method);
  std::vector<VectorGrid> e;
  e.reserve(j0_series.size());
  for (const auto &j0 : j0_series)
    e.push_back(solver.field(j0));

  std::vector<VectorGrid> current;
  const double factor = 1.0 / (p.mu0 * p.c * p.c * 2.0 * dt);
  for (std::size_t t = 1; t + 1 < j0_series.size(); ++t) {
    VectorGrid j(j0_series.front().spec());
    const auto &ep = e[t + 1].data();
    const auto &em = e[t - 1].data();
    auto &out = j.data();
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = factor * (ep[i] - em[i]);
    current.push_back(std::move(j));
  }
  return current;
}

double continuity_residual(const std::vector<ScalarGrid> &j0_series, double dt,
                           const ModelParams &p, PoissonMethod method) {
  check_series(j0_series, dt);
  p.validate();
  const std::vector<VectorGrid> current =
      emergent_current(j0_series, dt, p, method);

  constexpr int margin = 2;
  const int n = j0_series.front().n();
  double num = 0.0, denom = 0.0;
  for (std::size_t t = 1; t + 1 < j0_series.size(); ++t) {
    const ScalarGrid div = divergence(current[t - 1]);
    for (int i = margin; i < n - margin; ++i)
      for (int j = margin; j < n - margin; ++j)
        for (int k = margin; k < n - margin; ++k) {
          const double dj0 = (j0_series[t + 1].at(i, j, k) -
                              j0_series[t - 1].at(i, j, k)) /
                             (2.0 * dt * p.c);
          const double r = dj0 + div.at(i, j, k);
          num += r * r;
          denom += dj0 * dj0;
        }
  }
  if (denom == 0.0)
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / denom);
}

} // namespace qbind
