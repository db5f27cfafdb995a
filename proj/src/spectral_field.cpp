#include "spectral_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "fft.hpp"

namespace imlab {

namespace {

bool smooth2357(int n) {
  for (int p : {2, 3, 5, 7})
    while (n % p == 0) n /= p;
  return n == 1;
}

std::size_t box_size(const GridSpec& g) {
  std::size_t side = static_cast<std::size_t>(2 * g.M + 1);
  std::size_t total = side * side;
  if (g.d == 3) total *= side;
  return total;
}

int wrap(int j, int n) { return ((j % n) + n) % n; }

std::size_t grid_index(const WaveVector& j, int d, int n) {
  std::size_t idx = static_cast<std::size_t>(wrap(j.c[0], n)) * n + wrap(j.c[1], n);
  if (d == 3) idx = idx * n + wrap(j.c[2], n);
  return idx;
}

void put_u32le(std::string& buf, std::uint32_t x) {
  for (int k = 0; k < 4; ++k) buf.push_back(static_cast<char>((x >> (8 * k)) & 0xff));
}

void put_f64le(std::string& buf, double x) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  for (int k = 0; k < 8; ++k) buf.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
  std::uint32_t x = 0;
  for (int k = 0; k < 4; ++k) x |= static_cast<std::uint32_t>(p[k]) << (8 * k);
  return x;
}

double get_f64le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(p[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

}  // namespace

GridSpec GridSpec::make(int d, int M, double dealias_fraction) {
  if (d != 2 && d != 3) throw std::invalid_argument("GridSpec: d must be 2 or 3");
  if (M < 1) throw std::invalid_argument("GridSpec: M must be positive");
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
    throw std::invalid_argument("GridSpec: dealias_fraction must be in (0,1]");
  GridSpec g;
  g.d = d;
  g.M = M;
  g.dealias_fraction = dealias_fraction;
  int n = 2 * M + 2;
  while (!smooth2357(n)) ++n;
  g.n = n;
  g.cut = std::max(1, static_cast<int>(std::floor(dealias_fraction * M)));
  return g;
}

SpectralField::SpectralField(const GridSpec& g) : grid(g), a(box_size(g) * g.d) {}

std::size_t SpectralField::mode_count() const { return box_size(grid); }

bool SpectralField::in_box(const WaveVector& j) const {
  const int M = grid.M;
  if (std::abs(j.c[0]) > M || std::abs(j.c[1]) > M) return false;
  if (grid.d == 2) return j.c[2] == 0;
  return std::abs(j.c[2]) <= M;
}

std::size_t SpectralField::index(const WaveVector& j) const {
  const int M = grid.M;
  const std::size_t s = static_cast<std::size_t>(2 * M + 1);
  std::size_t idx = static_cast<std::size_t>(j.c[0] + M) * s + (j.c[1] + M);
  if (grid.d == 3) idx = idx * s + (j.c[2] + M);
  return idx;
}

void axpy(double alpha, const SpectralField& x, SpectralField& y) {
  if (x.grid != y.grid) throw std::invalid_argument("axpy: grid mismatch");
  for (std::size_t i = 0; i < y.a.size(); ++i) y.a[i] += alpha * x.a[i];
}

void scale(SpectralField& u, double alpha) {
  for (auto& z : u.a) z *= alpha;
}

SpectralField operator+(const SpectralField& x, const SpectralField& y) {
  SpectralField r = x;
  axpy(1.0, y, r);
  return r;
}

SpectralField operator-(const SpectralField& x, const SpectralField& y) {
  SpectralField r = x;
  axpy(-1.0, y, r);
  return r;
}

SpectralField operator*(double alpha, const SpectralField& x) {
  SpectralField r = x;
  scale(r, alpha);
  return r;
}

double sobolev_norm(const SpectralField& u, double s) {
  const int d = u.grid.d;
  double sum = 0.0;
  for_each_mode(u.grid, [&](const WaveVector& j, std::size_t idx) {
    if (j.is_zero()) return;
    double m2 = 0.0;
    for (int c = 0; c < d; ++c) m2 += std::norm(u.a[idx * d + c]);
    if (m2 == 0.0) return;
    sum += std::pow(static_cast<double>(j.norm2()), s) * m2;
  });
  return std::sqrt(sum);
}

double inner(const SpectralField& u, const SpectralField& v) {
  if (u.grid != v.grid) throw std::invalid_argument("inner: grid mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.a.size(); ++i)
    sum += u.a[i].real() * v.a[i].real() + u.a[i].imag() * v.a[i].imag();
  return sum;
}

void leray_project_inplace(SpectralField& u) {
  const int d = u.grid.d;
  for_each_mode(u.grid, [&](const WaveVector& j, std::size_t idx) {
    Complex* c = &u.a[idx * d];
    if (j.is_zero()) {
      for (int k = 0; k < d; ++k) c[k] = 0.0;
      return;
    }
    Complex dot = 0.0;
    for (int k = 0; k < d; ++k) dot += static_cast<double>(j.c[k]) * c[k];
    dot /= static_cast<double>(j.norm2());
    for (int k = 0; k < d; ++k) c[k] -= dot * static_cast<double>(j.c[k]);
  });
}

SpectralField leray_project(const SpectralField& raw) {
  SpectralField u = raw;
  leray_project_inplace(u);
  return u;
}

PhysicalField to_physical(const SpectralField& u) {
  const int d = u.grid.d, n = u.grid.n;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
  PhysicalField p;
  p.d = d;
  p.n = n;
  p.v.assign(total * d, 0.0);
  std::vector<Complex> spec(total), phys;
  for (int c = 0; c < d; ++c) {
    std::fill(spec.begin(), spec.end(), Complex(0.0));
    for_each_mode(u.grid, [&](const WaveVector& j, std::size_t idx) {
      spec[grid_index(j, d, n)] = u.a[idx * d + c];
    });
    dft_backward(d, n, spec, phys);
    for (std::size_t m = 0; m < total; ++m) p.v[m * d + c] = phys[m].real();
  }
  return p;
}

SpectralField from_physical(const PhysicalField& p, const GridSpec& g, bool mask_to_cut) {
  if (p.d != g.d || p.n != g.n) throw std::invalid_argument("from_physical: size mismatch");
  const int d = g.d, n = g.n;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
  SpectralField u(g);
  std::vector<Complex> phys(total), spec;
  const int keep = mask_to_cut ? g.cut : g.M;
  for (int c = 0; c < d; ++c) {
    for (std::size_t m = 0; m < total; ++m) phys[m] = p.v[m * d + c];
    dft_forward(d, n, phys, spec);
    for_each_mode(g, [&](const WaveVector& j, std::size_t idx) {
      if (j.is_zero()) return;
      int linf = std::max({std::abs(j.c[0]), std::abs(j.c[1]), std::abs(j.c[2])});
      if (linf > keep) return;
      u.a[idx * d + c] = spec[grid_index(j, d, n)];
    });
  }
  hermitize(u);
  return u;
}

SpectralField random_field(const GridSpec& g, std::uint64_t seed, double s0) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
  };
  auto gauss_pair = [&](double& g1, double& g2) {
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1)), t = 2.0 * M_PI * u2;
    g1 = r * std::cos(t);
    g2 = r * std::sin(t);
  };
  const int d = g.d;
  SpectralField u(g);
  for_each_mode(g, [&](const WaveVector& j, std::size_t idx) {
    if (!j.lex_positive()) return;
    const double amp = std::pow(static_cast<double>(j.norm2()), -(s0 + d / 2.0) / 2.0);
    for (int c = 0; c < d; ++c) {
      double re, im;
      gauss_pair(re, im);
      u.a[idx * d + c] = amp * Complex(re, im);
    }
    const std::size_t nidx = u.index(-j);
    for (int c = 0; c < d; ++c) u.a[nidx * d + c] = std::conj(u.a[idx * d + c]);
  });
  leray_project_inplace(u);
  return u;
}

double hermitian_residual(const SpectralField& u) {
  const int d = u.grid.d;
  double worst = 0.0;
  for_each_mode(u.grid, [&](const WaveVector& j, std::size_t idx) {
    if (!j.lex_positive()) return;
    const std::size_t nidx = u.index(-j);
    for (int c = 0; c < d; ++c)
      worst = std::max(worst, std::abs(u.a[idx * d + c] - std::conj(u.a[nidx * d + c])));
  });
  return worst;
}

double divergence_residual(const SpectralField& u) {
  const int d = u.grid.d;
  double worst = 0.0;
  for_each_mode(u.grid, [&](const WaveVector& j, std::size_t idx) {
    if (j.is_zero()) return;
    Complex dot = 0.0;
    double m2 = 0.0;
    for (int c = 0; c < d; ++c) {
      dot += static_cast<double>(j.c[c]) * u.a[idx * d + c];
      m2 += std::norm(u.a[idx * d + c]);
    }
    if (m2 == 0.0) return;
    worst = std::max(worst, std::abs(dot) / std::sqrt(static_cast<double>(j.norm2()) * m2));
  });
  return worst;
}

void hermitize(SpectralField& u) {
  const int d = u.grid.d;
  for_each_mode(u.grid, [&](const WaveVector& j, std::size_t idx) {
    if (j.is_zero()) {
      for (int c = 0; c < d; ++c) u.a[idx * d + c] = 0.0;
      return;
    }
    if (!j.lex_positive()) return;
    const std::size_t nidx = u.index(-j);
    for (int c = 0; c < d; ++c) {
      const Complex avg = 0.5 * (u.a[idx * d + c] + std::conj(u.a[nidx * d + c]));
      u.a[idx * d + c] = avg;
      u.a[nidx * d + c] = std::conj(avg);
    }
  });
}

void save_snapshot(const SpectralField& u, const std::string& path) {
  const int d = u.grid.d;
  std::vector<std::pair<WaveVector, std::size_t>> half;
  for_each_mode(u.grid, [&](const WaveVector& j, std::size_t idx) {
    if (j.lex_positive()) half.emplace_back(j, idx);
  });
  std::string buf = "IMLAB1 d=" + std::to_string(d) + " M=" + std::to_string(u.grid.M) +
                    " count=" + std::to_string(half.size()) + "\n";
  for (const auto& [j, idx] : half) {
    for (int k = 0; k < d; ++k) put_u32le(buf, static_cast<std::uint32_t>(j.c[k]));
    for (int c = 0; c < d; ++c) {
      put_f64le(buf, u.a[idx * d + c].real());
      put_f64le(buf, u.a[idx * d + c].imag());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_snapshot: cannot open " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("save_snapshot: write failed for " + path);
}

SpectralField load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_snapshot: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("load_snapshot: missing header");
  int d = 0, M = 0;
  long long count = -1;
  if (std::sscanf(header.c_str(), "IMLAB1 d=%d M=%d count=%lld", &d, &M, &count) != 3)
    throw std::runtime_error("load_snapshot: bad header '" + header + "'");
  if ((d != 2 && d != 3) || M < 1 || count < 0)
    throw std::runtime_error("load_snapshot: invalid header fields");
  SpectralField u(GridSpec::make(d, M));
  std::vector<char> seen(u.mode_count(), 0);
  const std::size_t rec = 4 * static_cast<std::size_t>(d) + 16 * static_cast<std::size_t>(d);
  std::vector<unsigned char> r(rec);
  for (long long k = 0; k < count; ++k) {
    if (!in.read(reinterpret_cast<char*>(r.data()), static_cast<std::streamsize>(rec)))
      throw std::runtime_error("load_snapshot: truncated record " + std::to_string(k));
    WaveVector j;
    for (int i = 0; i < d; ++i)
      j.c[i] = static_cast<std::int32_t>(get_u32le(&r[4 * static_cast<std::size_t>(i)]));
    if (!u.in_box(j)) throw std::runtime_error("load_snapshot: wavevector out of range");
    if (!j.lex_positive())
      throw std::runtime_error("load_snapshot: non-canonical wavevector (must be lex-positive)");
    const std::size_t idx = u.index(j);
    if (seen[idx]) throw std::runtime_error("load_snapshot: duplicate wavevector");
    seen[idx] = 1;
    const std::size_t base = 4 * static_cast<std::size_t>(d);
    const std::size_t nidx = u.index(-j);
    for (int c = 0; c < d; ++c) {
      const double re = get_f64le(&r[base + 16 * static_cast<std::size_t>(c)]);
      const double im = get_f64le(&r[base + 16 * static_cast<std::size_t>(c) + 8]);
      u.a[idx * d + c] = Complex(re, im);
      u.a[nidx * d + c] = Complex(re, -im);
    }
  }
  char extra;
  if (in.read(&extra, 1)) throw std::runtime_error("load_snapshot: trailing bytes");
  return u;
}

}  // namespace imlab
