#include "operators.hpp"

#include <cmath>
#include <stdexcept>

#include "gap_search.hpp"

namespace imlab {

namespace {

bool is_integer_level(double lambda) {
  return lambda >= 1.0 && lambda == std::floor(lambda) && lambda < 9.0e18;
}

void require_achieved(int d, double lambda) {
  if (!is_integer_level(lambda) || !is_achieved_level(d, static_cast<long long>(lambda)))
    throw std::invalid_argument("projector cut " + std::to_string(lambda) +
                                " is not an achieved eigenvalue for d=" + std::to_string(d));
}

int linf(const WaveVector& j) {
  return std::max({std::abs(j.c[0]), std::abs(j.c[1]), std::abs(j.c[2])});
}

}  // namespace

void BandProjectorSpec::validate() const {
  if (!(lambda_N > 0.0) || !(lambda_N1 > lambda_N))
    throw std::invalid_argument("BandProjectorSpec: need lambda_N1 > lambda_N > 0");
  if (!(k >= 0.0) || !(k < lambda_N))
    throw std::invalid_argument("BandProjectorSpec: need 0 <= k < lambda_N");
}

SpectralField apply_stokes_power(const SpectralField& u, double theta, double nu) {
  SpectralField r = u;
  apply_multiplier(r, [theta, nu](double lam) { return nu * std::pow(lam, theta); });
  return r;
}

SpectralField project_low(const SpectralField& u, double lambda_N) {
  require_achieved(u.grid.d, lambda_N);
  SpectralField r = u;
  apply_multiplier(r, [lambda_N](double lam) { return lam <= lambda_N ? 1.0 : 0.0; });
  return r;
}

SpectralField project_high(const SpectralField& u, double lambda_N) {
  require_achieved(u.grid.d, lambda_N);
  SpectralField r = u;
  apply_multiplier(r, [lambda_N](double lam) { return lam > lambda_N ? 1.0 : 0.0; });
  return r;
}

BandSplit band_project(const SpectralField& u, const BandProjectorSpec& spec) {
  spec.validate();
  const double lo = spec.lambda_N - spec.k, hi = spec.lambda_N + spec.k;
  BandSplit s{u, u, u};
  apply_multiplier(s.low, [lo](double lam) { return lam < lo ? 1.0 : 0.0; });
  apply_multiplier(s.band, [lo, hi](double lam) { return (lam >= lo && lam <= hi) ? 1.0 : 0.0; });
  apply_multiplier(s.high, [hi](double lam) { return lam > hi ? 1.0 : 0.0; });
  return s;
}

SpectralField band_restrict(const SpectralField& u, const BandProjectorSpec& spec) {
  spec.validate();
  const double lo = spec.lambda_N - spec.k, hi = spec.lambda_N + spec.k;
  SpectralField r = u;
  apply_multiplier(r, [lo, hi](double lam) { return (lam >= lo && lam <= hi) ? 1.0 : 0.0; });
  return r;
}

SpectralField spectral_derivative(const SpectralField& u, int axis) {
  if (axis < 0 || axis >= u.grid.d) throw std::invalid_argument("spectral_derivative: bad axis");
  SpectralField r = u;
  const int d = u.grid.d;
  for_each_mode(r.grid, [&](const WaveVector& j, std::size_t idx) {
    const Complex factor(0.0, static_cast<double>(j.c[axis]));
    for (int c = 0; c < d; ++c) r.a[idx * d + c] *= factor;
  });
  return r;
}

SpectralField dealias_mask(const SpectralField& u) {
  SpectralField r = u;
  const int d = u.grid.d, cut = u.grid.cut;
  for_each_mode(r.grid, [&](const WaveVector& j, std::size_t idx) {
    if (linf(j) > cut)
      for (int c = 0; c < d; ++c) r.a[idx * d + c] = 0.0;
  });
  return r;
}

SpectralField bilinear_form(const SpectralField& u, const SpectralField& v) {
  if (u.grid != v.grid) throw std::invalid_argument("bilinear_form: grid mismatch");
  const GridSpec& g = u.grid;
  const int d = g.d, n = g.n;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);

  const SpectralField um = dealias_mask(u);
  const SpectralField vm = dealias_mask(v);
  const PhysicalField pu = to_physical(um);

  PhysicalField w;
  w.d = d;
  w.n = n;
  w.v.assign(total * d, 0.0);
  for (int a = 0; a < d; ++a) {
    const PhysicalField dva = to_physical(spectral_derivative(vm, a));
    for (std::size_t m = 0; m < total; ++m) {
      const double ua = pu.v[m * d + a];
      for (int c = 0; c < d; ++c) w.v[m * d + c] += ua * dva.v[m * d + c];
    }
  }
  SpectralField r = from_physical(w, g, true);
  leray_project_inplace(r);
  return r;
}

double trilinear(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
  return inner(bilinear_form(u, v), w);
}

}  // namespace imlab
