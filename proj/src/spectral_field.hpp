#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace imlab {

using Complex = std::complex<double>;

struct WaveVector {
  std::array<int, 3> c{0, 0, 0};

  int norm2() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2]; }
  bool is_zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0; }
  bool lex_positive() const {
    if (c[0] != 0) return c[0] > 0;
    if (c[1] != 0) return c[1] > 0;
    return c[2] > 0;
  }
  WaveVector operator-() const { return {{-c[0], -c[1], -c[2]}}; }
  bool operator==(const WaveVector&) const = default;
};

struct GridSpec {
  int d = 2;                          // torus dimension, 2 or 3
  int M = 8;                          // retained modes: |j|_inf <= M
  double dealias_fraction = 2.0 / 3;  // product cut relative to M
  int n = 0;                          // physical points per axis
  int cut = 0;                        // floor(dealias_fraction * M)

  // n is the smallest 2,3,5,7-smooth integer >= 2M+2 so that products of
  // cut-limited fields are alias-free on the retained modes.
  static GridSpec make(int d, int M, double dealias_fraction = 2.0 / 3);
  bool operator==(const GridSpec&) const = default;
};

struct PhysicalField {
  int d = 2;
  int n = 0;
  std::vector<double> v;  // n^d grid points at x = 2*pi*m/n, d components each

  double& at(std::size_t point, int comp) { return v[point * d + comp]; }
  double at(std::size_t point, int comp) const { return v[point * d + comp]; }
};

// Fourier coefficients of a real vector field on the torus, dense over the
// box |j|_inf <= M, d complex components per mode. Public constructors and
// operations maintain: hermitian symmetry (coef(-j) = conj(coef(j))), zero
// mean (no j=0 coefficient), and divergence-free coefficients where stated.
struct SpectralField {
  GridSpec grid;
  std::vector<Complex> a;  // mode-major: a[index(j)*d + component]

  SpectralField() = default;
  explicit SpectralField(const GridSpec& g);

  int side() const { return 2 * grid.M + 1; }
  std::size_t mode_count() const;
  bool in_box(const WaveVector& j) const;
  std::size_t index(const WaveVector& j) const;
  Complex* coef(const WaveVector& j) { return &a[index(j) * grid.d]; }
  const Complex* coef(const WaveVector& j) const { return &a[index(j) * grid.d]; }
  Complex& coef(const WaveVector& j, int comp) { return a[index(j) * grid.d + comp]; }
  const Complex& coef(const WaveVector& j, int comp) const {
    return a[index(j) * grid.d + comp];
  }
};

template <class F>
void for_each_mode(const GridSpec& g, F&& f) {
  const int M = g.M;
  std::size_t idx = 0;
  if (g.d == 2) {
    for (int j1 = -M; j1 <= M; ++j1)
      for (int j2 = -M; j2 <= M; ++j2, ++idx) f(WaveVector{{j1, j2, 0}}, idx);
  } else {
    for (int j1 = -M; j1 <= M; ++j1)
      for (int j2 = -M; j2 <= M; ++j2)
        for (int j3 = -M; j3 <= M; ++j3, ++idx) f(WaveVector{{j1, j2, j3}}, idx);
  }
}

// Coefficient-wise multiplication by f(lambda), lambda = |j|^2; j=0 untouched
// (always zero). Projectors, Stokes powers and semigroup factors all ride on
// this hook.
template <class F>
void apply_multiplier(SpectralField& u, F&& f) {
  const int d = u.grid.d;
  for_each_mode(u.grid, [&](const WaveVector& j, std::size_t idx) {
    if (j.is_zero()) return;
    const double w = f(static_cast<double>(j.norm2()));
    for (int c = 0; c < d; ++c) u.a[idx * d + c] *= w;
  });
}

// in-place vector arithmetic on coefficients
void axpy(double alpha, const SpectralField& x, SpectralField& y);  // y += alpha*x
void scale(SpectralField& u, double alpha);
SpectralField operator+(const SpectralField& x, const SpectralField& y);
SpectralField operator-(const SpectralField& x, const SpectralField& y);
SpectralField operator*(double alpha, const SpectralField& x);

double sobolev_norm(const SpectralField& u, double s);
double inner(const SpectralField& u, const SpectralField& v);  // L2 pairing

// kills any j=0 entry and applies the divergence-removing matrix
// P_j = I - j j^T/|j|^2 to every coefficient
SpectralField leray_project(const SpectralField& raw);
void leray_project_inplace(SpectralField& u);

PhysicalField to_physical(const SpectralField& u);
// mask_to_cut drops modes with |j|_inf > grid.cut (alias junk from products);
// the j=0 mean is always dropped
SpectralField from_physical(const PhysicalField& p, const GridSpec& g,
                            bool mask_to_cut = true);

// hermitian divergence-free field with component magnitudes |j|^{-s0-d/2},
// giving finite H^s norms exactly for s < s0; deterministic in seed
SpectralField random_field(const GridSpec& g, std::uint64_t seed, double s0);

// diagnostics for the structural invariants
double hermitian_residual(const SpectralField& u);
double divergence_residual(const SpectralField& u);  // max |j.c|/(|j||c|)
void hermitize(SpectralField& u);

// snapshot format: ASCII header "IMLAB1 d=<2|3> M=<int> count=<int>\n", then
// count binary records: d int32 (little-endian wavevector) + 2d float64
// (little-endian re/im per component); only lexicographically positive j are
// stored, conjugates are implied
void save_snapshot(const SpectralField& u, const std::string& path);
SpectralField load_snapshot(const std::string& path);

}  // namespace imlab
