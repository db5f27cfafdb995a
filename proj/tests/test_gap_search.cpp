#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "gap_search.hpp"

using namespace imlab;

namespace {

// classic two-squares criterion: every prime p = 3 (mod 4) divides lambda to
// an even power
bool two_squares_criterion(long long lambda) {
  for (long long p = 2; p * p <= lambda; ++p) {
    if (lambda % p) continue;
    int e = 0;
    while (lambda % p == 0) {
      lambda /= p;
      ++e;
    }
    if (p % 4 == 3 && e % 2) return false;
  }
  return lambda % 4 != 3;  // leftover prime factor
}

// Legendre: sums of three squares are exactly those not of form 4^a(8b+7)
bool three_squares_criterion(long long lambda) {
  while (lambda % 4 == 0) lambda /= 4;
  return lambda % 8 != 7;
}

}  // namespace

TEST_CASE("first 2d levels") {
  const auto levels = enumerate_levels(2, 25);
  std::vector<long long> got;
  for (const auto& r : levels) got.push_back(r.lambda);
  CHECK(got == std::vector<long long>{1, 2, 4, 5, 8, 9, 10, 13, 16, 17, 18, 20, 25});
}

TEST_CASE("gaps at 5 and 20") {
  const auto levels = enumerate_levels(2, 30);
  for (const auto& r : levels) {
    if (r.lambda == 5) CHECK(r.gap == 3);
    if (r.lambda == 20) CHECK(r.gap == 5);
  }
}

TEST_CASE("multiplicities and cumulative count") {
  const auto l2 = enumerate_levels(2, 5);
  CHECK(l2[0].lambda == 1);
  CHECK(l2[0].lattice_count == 4);
  CHECK(l2[0].multiplicity == 4);
  CHECK(l2[3].lambda == 5);
  CHECK(l2[3].lattice_count == 8);
  CHECK(l2[3].N == 20);

  const auto l3 = enumerate_levels(3, 3);
  CHECK(l3[0].lambda == 1);
  CHECK(l3[0].lattice_count == 6);
  CHECK(l3[0].multiplicity == 12);  // two divergence-free directions per vector
  CHECK(l3[1].lambda == 2);
  CHECK(l3[1].lattice_count == 12);
}

TEST_CASE("enumeration matches the two-squares criterion") {
  const long long bound = 10000;
  const auto levels = enumerate_levels(2, bound);
  std::set<long long> achieved;
  for (const auto& r : levels) achieved.insert(r.lambda);
  for (long long lam = 1; lam <= bound; ++lam) {
    CHECK(achieved.count(lam) == (two_squares_criterion(lam) ? 1u : 0u));
    CHECK(is_achieved_level(2, lam) == two_squares_criterion(lam));
  }
}

TEST_CASE("3d levels match the three-squares criterion") {
  const long long bound = 500;
  const auto levels = enumerate_levels(3, bound);
  std::set<long long> achieved;
  for (const auto& r : levels) achieved.insert(r.lambda);
  for (long long lam = 1; lam <= bound; ++lam) {
    CHECK(achieved.count(lam) == (three_squares_criterion(lam) ? 1u : 0u));
    CHECK(is_achieved_level(3, lam) == three_squares_criterion(lam));
  }
}

TEST_CASE("find_gap_2d frozen results") {
  auto r1 = find_gap_2d(1.0);
  REQUIRE(r1.found);
  CHECK(r1.record.lambda == 5);
  CHECK(r1.record.gap == 3);
  CHECK(r1.record.N == 20);

  auto r2 = find_gap_2d(2.0);
  REQUIRE(r2.found);
  CHECK(r2.record.lambda == 20);
  CHECK(r2.record.gap == 5);

  auto r3 = find_gap_2d(0.4);
  REQUIRE(r3.found);
  CHECK(r3.record.lambda == 1);
  CHECK(r3.record.gap == 1);

  auto none = find_gap(2, 1000.0, 2000);
  CHECK(!none.found);
  CHECK(none.largest_gap >= 1);
}

TEST_CASE("find_gap results brute-force verified") {
  for (double L : {1.0, 2.0}) {
    auto r = find_gap_2d(L);
    REQUIRE(r.found);
    const auto levels = enumerate_levels(2, r.record.lambda + 64);
    long long cumulative = 0;
    for (const auto& lv : levels) {
      cumulative += lv.multiplicity;
      if (lv.lambda < r.record.lambda && lv.gap != 0)
        CHECK(static_cast<double>(lv.gap) <= 2.0 * L);  // no earlier qualifying gap
      if (lv.lambda == r.record.lambda) {
        CHECK(static_cast<double>(lv.gap) > 2.0 * L);
        CHECK(cumulative == r.record.N);
      }
    }
  }
}

TEST_CASE("abstract gap check") {
  // (9^{5/4} - 4^{5/4}) / (9^{1/4} + 4^{1/4}), frozen from direct evaluation
  auto r = check_abstract_gap(4.0, 9.0, 0.25, 1.0);
  CHECK(r.lhs == doctest::Approx(3.156633343818685).epsilon(1e-12));
  CHECK(r.pass);
  CHECK(r.margin == doctest::Approx(r.lhs - 1.0));

  auto eq = check_abstract_gap(7.0, 7.0, 0.5, 0.3);
  CHECK(eq.lhs == 0.0);
  CHECK(!eq.pass);

  // difference exactly 2L at large lambda: the ratio tends to (1+alpha)L so
  // the check passes, and the required-difference threshold approaches the
  // asymptote 2L/(1+alpha)
  const double L = 2.0, alpha = 0.5;
  auto big = check_abstract_gap(1e8, 1e8 + 2.0 * L, alpha, L);
  CHECK(big.pass);
  CHECK(big.lhs == doctest::Approx((1.0 + alpha) * L).epsilon(1e-6));
  CHECK(big.threshold_asymptote == doctest::Approx(2.0 * L / (1.0 + alpha)));
  CHECK(std::abs(big.difference_threshold / big.threshold_asymptote - 1.0) < 0.01);
}

TEST_CASE("richards-style gap growth") {
  const auto levels = enumerate_levels(2, 10000);
  long long max_gap_1e2 = 0, max_gap_1e3 = 0, max_gap_1e4 = 0;
  for (const auto& r : levels) {
    if (r.gap == 0) continue;
    if (r.lambda <= 100) max_gap_1e2 = std::max(max_gap_1e2, r.gap);
    if (r.lambda <= 1000) max_gap_1e3 = std::max(max_gap_1e3, r.gap);
    if (r.lambda <= 10000) max_gap_1e4 = std::max(max_gap_1e4, r.gap);
  }
  CHECK(max_gap_1e2 <= max_gap_1e3);
  CHECK(max_gap_1e3 <= max_gap_1e4);
  CHECK(max_gap_1e4 > max_gap_1e2);
  const double fitted_c = static_cast<double>(max_gap_1e4) / std::log(1e4);
  CHECK(fitted_c > 0.0);
  MESSAGE("max gaps ", max_gap_1e2, " ", max_gap_1e3, " ", max_gap_1e4, ", fitted c ", fitted_c);
}

TEST_CASE("annulus certificates") {
  // lambda=16 is an isolated level: only (+-4,0,0) type points, separation sqrt(32)
  auto good = certify_annulus(16.0, 0.9, 3.0);
  CHECK(good.verified);
  CHECK(!good.vacuous);
  CHECK(good.shell_points == 6);
  CHECK(good.min_separation == doctest::Approx(std::sqrt(32.0)));

  auto bad = certify_annulus(2.0, 0.2, 3.0);
  CHECK(!bad.verified);
  CHECK(bad.min_separation == doctest::Approx(std::sqrt(2.0)));

  // 7 is not a sum of three squares: empty shell, vacuous certificate
  auto empty = certify_annulus(7.0, 0.1, 1.0);
  CHECK(empty.vacuous);
  CHECK(empty.verified);
  CHECK(empty.shell_points == 0);
}

TEST_CASE("find_annulus and independent re-verification") {
  auto res = find_annulus(3.0, 2, 1000000);
  REQUIRE(res.found);
  const auto& cert = res.certificate;
  CHECK(cert.min_separation >= 3.0);

  // independent double loop over the certified shell
  const long long lo = static_cast<long long>(std::ceil(cert.lambda - cert.k));
  const long long hi = static_cast<long long>(std::floor(cert.lambda + cert.k));
  std::vector<std::array<long long, 3>> pts;
  const long long R = static_cast<long long>(std::floor(std::sqrt(static_cast<double>(hi))));
  for (long long x = -R; x <= R; ++x)
    for (long long y = -R; y <= R; ++y)
      for (long long z = -R; z <= R; ++z) {
        const long long lam = x * x + y * y + z * z;
        if (lam >= lo && lam <= hi) pts.push_back({x, y, z});
      }
  CHECK(static_cast<long long>(pts.size()) == cert.shell_points);
  double min_sep2 = 1e300;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double s2 = 0;
      for (int c = 0; c < 3; ++c) {
        double diff = static_cast<double>(pts[i][c] - pts[j][c]);
        s2 += diff * diff;
      }
      min_sep2 = std::min(min_sep2, s2);
    }
  CHECK(std::sqrt(min_sep2) == doctest::Approx(cert.min_separation));
  MESSAGE("annulus b=3 found at lambda ", cert.lambda, " k ", cert.k, " separation ",
          cert.min_separation);

  auto one = find_annulus(1.0, 1, 100000);
  REQUIRE(one.found);
  CHECK(one.certificate.lambda == 2.0);  // first non-vacuous shell
  CHECK(one.certificate.min_separation >= 1.0);
}
