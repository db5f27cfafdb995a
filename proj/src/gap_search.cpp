#include "gap_search.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace imlab {

namespace {

long long isqrt_floor(long long x) {
  if (x < 0) return -1;
  long long r = static_cast<long long>(std::sqrt(static_cast<double>(x)));
  while (r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

std::vector<long long> lattice_counts(int d, long long lambda_max) {
  std::vector<long long> count(static_cast<std::size_t>(lambda_max) + 1, 0);
  const long long R = isqrt_floor(lambda_max);
  if (d == 2) {
    for (long long j1 = -R; j1 <= R; ++j1) {
      const long long rem = lambda_max - j1 * j1;
      const long long r2 = isqrt_floor(rem);
      for (long long j2 = -r2; j2 <= r2; ++j2) {
        const long long lam = j1 * j1 + j2 * j2;
        if (lam > 0) ++count[static_cast<std::size_t>(lam)];
      }
    }
  } else {
    for (long long j1 = -R; j1 <= R; ++j1) {
      const long long rem1 = lambda_max - j1 * j1;
      const long long r2 = isqrt_floor(rem1);
      for (long long j2 = -r2; j2 <= r2; ++j2) {
        const long long rem2 = rem1 - j2 * j2;
        const long long r3 = isqrt_floor(rem2);
        for (long long j3 = -r3; j3 <= r3; ++j3) {
          const long long lam = j1 * j1 + j2 * j2 + j3 * j3;
          if (lam > 0) ++count[static_cast<std::size_t>(lam)];
        }
      }
    }
  }
  return count;
}

}  // namespace

bool is_achieved_level(int d, long long lambda) {
  if (lambda < 1) return false;
  if (d == 2) {
    for (long long j1 = 0; j1 * j1 <= lambda; ++j1)
      if (isqrt_floor(lambda - j1 * j1) * isqrt_floor(lambda - j1 * j1) == lambda - j1 * j1)
        return true;
    return false;
  }
  if (d == 3) {
    for (long long j1 = 0; j1 * j1 <= lambda; ++j1) {
      const long long rem = lambda - j1 * j1;
      for (long long j2 = 0; j2 * j2 <= rem; ++j2) {
        const long long t = rem - j2 * j2;
        const long long r = isqrt_floor(t);
        if (r * r == t) return true;
      }
    }
    return false;
  }
  throw std::invalid_argument("is_achieved_level: d must be 2 or 3");
}

std::vector<GapRecord> enumerate_levels(int d, long long lambda_max) {
  if (d != 2 && d != 3) throw std::invalid_argument("enumerate_levels: d must be 2 or 3");
  if (lambda_max < 1) throw std::invalid_argument("enumerate_levels: lambda_max must be >= 1");
  const auto count = lattice_counts(d, lambda_max);
  std::vector<GapRecord> out;
  long long cumulative = 0;
  for (long long lam = 1; lam <= lambda_max; ++lam) {
    const long long c = count[static_cast<std::size_t>(lam)];
    if (c == 0) continue;
    GapRecord r;
    r.lambda = lam;
    r.lattice_count = c;
    r.multiplicity = c * (d - 1);
    cumulative += r.multiplicity;
    r.N = cumulative;
    if (!out.empty()) {
      out.back().next_lambda = lam;
      out.back().gap = lam - out.back().lambda;
    }
    out.push_back(r);
  }
  return out;
}

GapSearchResult find_gap(int d, double L, long long lambda_max) {
  if (L <= 0) throw std::invalid_argument("find_gap: L must be positive");
  const long long slack = std::max<long long>(64, static_cast<long long>(4 * L) + 16);
  const auto levels = enumerate_levels(d, lambda_max + slack);
  GapSearchResult res;
  for (const auto& r : levels) {
    if (r.lambda > lambda_max || r.gap == 0) break;
    if (r.gap > res.largest_gap) {
      res.largest_gap = r.gap;
      res.largest_gap_lambda = r.lambda;
    }
    if (static_cast<double>(r.gap) > 2.0 * L) {
      res.found = true;
      res.record = r;
      return res;
    }
  }
  return res;
}

GapSearchResult find_gap_2d(double L, long long lambda_max) { return find_gap(2, L, lambda_max); }

AbstractGapCheck check_abstract_gap(double lambda_N, double lambda_N1, double alpha, double L) {
  if (!(lambda_N > 0.0) || !(lambda_N1 >= lambda_N))
    throw std::invalid_argument("check_abstract_gap: need 0 < lambda_N <= lambda_N1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("check_abstract_gap: alpha must be in (0,1)");
  AbstractGapCheck r;
  const double pa = std::pow(lambda_N, alpha), pb = std::pow(lambda_N1, alpha);
  r.lhs = (std::pow(lambda_N1, 1.0 + alpha) - std::pow(lambda_N, 1.0 + alpha)) / (pb + pa);
  r.pass = r.lhs > L;
  r.margin = r.lhs - L;
  r.difference_threshold = L * (pb + pa) / ((1.0 + alpha) * pa);
  r.threshold_asymptote = 2.0 * L / (1.0 + alpha);
  return r;
}

namespace {

std::vector<std::array<long long, 3>> shell_points_3d(double lo, double hi) {
  std::vector<std::array<long long, 3>> pts;
  if (hi < 1.0) return pts;
  const long long lam_lo = std::max<long long>(1, static_cast<long long>(std::ceil(lo)));
  const long long lam_hi = static_cast<long long>(std::floor(hi));
  if (lam_hi < lam_lo) return pts;
  const long long R = isqrt_floor(lam_hi);
  for (long long j1 = -R; j1 <= R; ++j1)
    for (long long j2 = -R; j2 <= R; ++j2)
      for (long long j3 = -R; j3 <= R; ++j3) {
        const long long lam = j1 * j1 + j2 * j2 + j3 * j3;
        if (lam >= lam_lo && lam <= lam_hi) pts.push_back({j1, j2, j3});
      }
  return pts;
}

}  // namespace

AnnulusCertificate certify_annulus(double lambda, double k, double b) {
  AnnulusCertificate cert;
  cert.lambda = lambda;
  cert.k = k;
  cert.b = b;
  const auto pts = shell_points_3d(lambda - k, lambda + k);
  cert.shell_points = static_cast<long long>(pts.size());
  if (pts.size() < 2) {
    cert.vacuous = true;
    cert.verified = true;
    return cert;
  }
  double min_sep2 = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      ++cert.pairs_checked;
      double s2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double diff = static_cast<double>(pts[i][c] - pts[j][c]);
        s2 += diff * diff;
      }
      if (min_sep2 < 0.0 || s2 < min_sep2) min_sep2 = s2;
    }
  cert.min_separation = std::sqrt(min_sep2);
  cert.verified = cert.min_separation >= b;
  return cert;
}

AnnulusSearchResult find_annulus(double b, long long lambda_start, long long search_budget,
                                 double chat) {
  if (b < 1.0) throw std::invalid_argument("find_annulus: b must be >= 1");
  AnnulusSearchResult res;
  long long spent = 0;
  for (long long lam = std::max<long long>(2, lambda_start); spent < search_budget; ++lam) {
    const double k = chat * std::log(static_cast<double>(lam));
    auto cert = certify_annulus(static_cast<double>(lam), k, b);
    ++res.candidates_tried;
    spent += std::max<long long>(1, cert.pairs_checked);
    if (cert.vacuous) continue;
    res.best_separation = std::max(res.best_separation, cert.min_separation);
    if (cert.verified) {
      res.found = true;
      res.certificate = cert;
      return res;
    }
  }
  return res;
}

}  // namespace imlab
