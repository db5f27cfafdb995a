#include "cutoff.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "operators.hpp"

namespace imlab {

namespace {

// smooth 0-to-1 transition on [0,1], flat to all orders at both ends
double bump_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double transition_phi(double s, double r2, double kappa) {
  const double t = (s - 1.0) / (r2 - 1.0);
  return std::pow(1.0 - bump_step(t), kappa);
}

// 16-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr int kGL = 16;
constexpr double kGLx[kGL] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGLw[kGL] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <class F>
double gauss_panel(F&& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double s = 0.0;
  for (int i = 0; i < kGL; ++i) s += kGLw[i] * f(mid + half * kGLx[i]);
  return s * half;
}

// integral over [0,1] of (1 - step(t))^kappa, composite quadrature; the
// integrand is steep for small kappa, so the grid is deliberately fine
double transition_mass(double kappa, int panels = 1024) {
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = static_cast<double>(p) / panels;
    const double hi = static_cast<double>(p + 1) / panels;
    total += gauss_panel([&](double t) { return std::pow(1.0 - bump_step(t), kappa); }, lo, hi);
  }
  return total;
}

struct ProfileCache {
  std::mutex mu;
  std::map<double, CutoffProfile> by_r2;
};

ProfileCache& profile_cache() {
  static ProfileCache cache;
  return cache;
}

void project_divfree(const WaveVector& j, Complex* v, int d) {
  const double n2 = static_cast<double>(j.norm2());
  Complex dot{0.0, 0.0};
  for (int c = 0; c < d; ++c) dot += static_cast<double>(j.c[c]) * v[c];
  dot /= n2;
  for (int c = 0; c < d; ++c) v[c] -= static_cast<double>(j.c[c]) * dot;
}

}  // namespace

CutoffProfile CutoffProfile::make(double r2) {
  if (!(r2 > 2.0))
    throw std::invalid_argument("CutoffProfile: saturation radius must exceed 2");
  CutoffProfile p;
  p.r2 = r2;

  // solve transition_mass(kappa) = 1/(r2-1); the mass decreases monotonically
  // from 1 (kappa -> 0) to 0 (kappa -> infinity)
  const double target = 1.0 / (r2 - 1.0);
  if (std::abs(transition_mass(1.0) - target) < 1e-13) {
    p.kappa = 1.0;
  } else {
    double lo = std::log(1e-8), hi = std::log(1e8);
    for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (transition_mass(std::exp(mid)) > target)
        lo = mid;
      else
        hi = mid;
    }
    p.kappa = std::exp(0.5 * (lo + hi));
  }

  // cumulative integral of phi over [1, r2]: values by per-panel quadrature,
  // slopes from the closed form; evaluation interpolates with cubic Hermite
  const int panels = 2048;
  p.h = (r2 - 1.0) / panels;
  p.node_m.resize(panels + 1);
  p.node_phi.resize(panels + 1);
  p.node_m[0] = 1.0;
  for (int i = 0; i <= panels; ++i)
    p.node_phi[i] = transition_phi(1.0 + i * p.h, r2, p.kappa);
  for (int i = 1; i <= panels; ++i) {
    const double lo = 1.0 + (i - 1) * p.h, hi = 1.0 + i * p.h;
    p.node_m[i] = p.node_m[i - 1] +
                  gauss_panel([&](double s) { return transition_phi(s, r2, p.kappa); }, lo, hi);
  }
  return p;
}

double CutoffProfile::value(double r) const {
  if (r <= 1.0) return r;
  if (r >= r2) return 2.0;
  const double x = (r - 1.0) / h;
  int i = static_cast<int>(x);
  if (i >= static_cast<int>(node_m.size()) - 1) i = static_cast<int>(node_m.size()) - 2;
  const double t = x - i;
  const double m0 = node_m[i], m1 = node_m[i + 1];
  const double d0 = node_phi[i] * h, d1 = node_phi[i + 1] * h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * m0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * m1 +
         (t3 - t2) * d1;
}

double CutoffProfile::derivative(double r) const {
  if (r <= 1.0) return 1.0;
  if (r >= r2) return 0.0;
  return transition_phi(r, r2, kappa);
}

const CutoffProfile& cutoff_profile(const CutoffSpec& spec) {
  auto& cache = profile_cache();
  std::lock_guard<std::mutex> lock(cache.mu);
  auto it = cache.by_r2.find(spec.r2);
  if (it == cache.by_r2.end())
    it = cache.by_r2.emplace(spec.r2, CutoffProfile::make(spec.r2)).first;
  return it->second;
}

Complex eta(Complex zeta, const CutoffSpec& spec) {
  const double r = std::abs(zeta);
  if (r <= 1.0) return zeta;
  const auto& prof = cutoff_profile(spec);
  return zeta * (prof.value(r) / r);
}

EtaDerivative eta_prime(Complex zeta, const CutoffSpec& spec) {
  const double r = std::abs(zeta);
  EtaDerivative d;
  if (r <= 1.0) return d;  // identity zone
  const auto& prof = cutoff_profile(spec);
  const double m = prof.value(r), mp = prof.derivative(r);
  const double q = m / r;
  const double qp = (mp * r - m) / (r * r);
  d.a = q + 0.5 * r * qp;
  d.b = zeta * zeta * (qp / (2.0 * r));
  return d;
}

SpectralField truncate_W(const SpectralField& w, const CutoffSpec& spec) {
  const int d = w.grid.d;
  SpectralField out(w.grid);
  for_each_mode(w.grid, [&](const WaveVector& j, std::size_t idx) {
    if (j.is_zero()) return;
    const double s = std::pow(static_cast<double>(j.norm2()), 0.5 * CutoffSpec::weight_exponent);
    const double fwd = s / spec.rho;
    bool inside = true;
    for (int c = 0; c < d; ++c)
      if (std::abs(w.a[idx * d + c]) * fwd > 1.0) {
        inside = false;
        break;
      }
    if (inside) {
      // the map is the exact identity here; copy so no roundoff enters
      for (int c = 0; c < d; ++c) out.a[idx * d + c] = w.a[idx * d + c];
      return;
    }
    Complex v[3];
    for (int c = 0; c < d; ++c) v[c] = eta(fwd * w.a[idx * d + c], spec) / fwd;
    project_divfree(j, v, d);
    for (int c = 0; c < d; ++c) out.a[idx * d + c] = v[c];
  });
  return out;
}

SpectralField truncate_W_derivative(const SpectralField& w, const SpectralField& z,
                                    const CutoffSpec& spec) {
  if (!(w.grid == z.grid))
    throw std::invalid_argument("truncate_W_derivative: grid mismatch");
  const int d = w.grid.d;
  SpectralField out(w.grid);
  for_each_mode(w.grid, [&](const WaveVector& j, std::size_t idx) {
    if (j.is_zero()) return;
    const double s = std::pow(static_cast<double>(j.norm2()), 0.5 * CutoffSpec::weight_exponent);
    const double fwd = s / spec.rho;
    bool inside = true;
    for (int c = 0; c < d; ++c)
      if (std::abs(w.a[idx * d + c]) * fwd > 1.0) {
        inside = false;
        break;
      }
    if (inside) {
      for (int c = 0; c < d; ++c) out.a[idx * d + c] = z.a[idx * d + c];
      return;
    }
    // the forward/backward scaling by s/rho cancels on the linear piece:
    // (rho/s) eta'(zeta)[ (s/rho) zhat ] = a zhat + b conj(zhat)
    Complex v[3];
    for (int c = 0; c < d; ++c) {
      const auto D = eta_prime(fwd * w.a[idx * d + c], spec);
      v[c] = D.apply(z.a[idx * d + c]);
    }
    project_divfree(j, v, d);
    for (int c = 0; c < d; ++c) out.a[idx * d + c] = v[c];
  });
  return out;
}

double lipschitz_bound(const CutoffSpec& spec) {
  const auto& prof = cutoff_profile(spec);
  double worst = 1.0;  // q = m/r = 1 throughout the identity zone
  const int samples = 20000;
  for (int i = 1; i <= samples; ++i) {
    const double r = 1.0 + (prof.r2 - 1.0) * i / samples;
    worst = std::max(worst, std::max(prof.value(r) / r, prof.derivative(r)));
  }
  return worst;
}

SpectralField modified_nonlinearity_2d(const SpectralField& w, const StationaryContext& ctx,
                                       const CutoffSpec& spec) {
  if (w.grid.d != 2 || ctx.v.grid.d != 2 || !(w.grid == ctx.v.grid))
    throw std::invalid_argument("modified_nonlinearity_2d: dimension mismatch");
  auto W = truncate_W(w, spec);
  auto F = bilinear_form(W, W);
  axpy(1.0, bilinear_form(W, ctx.v), F);
  axpy(1.0, bilinear_form(ctx.v, W), F);
  return F;
}

SpectralField modified_nonlinearity_3d(const SpectralField& w, const StationaryContext& ctx,
                                       const CutoffSpec& spec) {
  if (w.grid.d != 3 || ctx.v.grid.d != 3 || !(w.grid == ctx.v.grid))
    throw std::invalid_argument("modified_nonlinearity_3d: dimension mismatch");
  auto W = truncate_W(w, spec);
  auto F = bilinear_form(W, W);
  axpy(1.0, bilinear_form(ctx.v, W), F);
  axpy(1.0, bilinear_form(W, ctx.v), F);
  return apply_stokes_power(F, -0.25, 1.0);
}

SpectralField modified_nonlinearity_3d_derivative(const SpectralField& w, const SpectralField& z,
                                                  const StationaryContext& ctx,
                                                  const CutoffSpec& spec) {
  if (w.grid.d != 3 || ctx.v.grid.d != 3 || !(w.grid == ctx.v.grid) || !(w.grid == z.grid))
    throw std::invalid_argument("modified_nonlinearity_3d_derivative: dimension mismatch");
  auto W = truncate_W(w, spec);
  auto h = truncate_W_derivative(w, z, spec);
  auto U = W + ctx.v;
  auto F = bilinear_form(h, U);
  axpy(1.0, bilinear_form(U, h), F);
  return apply_stokes_power(F, -0.25, 1.0);
}

}  // namespace imlab
