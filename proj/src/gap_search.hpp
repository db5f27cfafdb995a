#pragma once

#include <cstdint>
#include <vector>

namespace imlab {

// one achieved Stokes eigenvalue level lambda = |j|^2 on T^d
struct GapRecord {
  long long lambda = 0;
  long long next_lambda = 0;  // following achieved level (0 if unknown)
  long long gap = 0;          // next_lambda - lambda
  long long lattice_count = 0;
  long long multiplicity = 0;  // lattice_count * (d-1) divergence-free directions
  long long N = 0;             // cumulative multiplicity through lambda
};

// is lambda representable as a sum of d nonzero-vector squares
bool is_achieved_level(int d, long long lambda);

// all achieved levels up to lambda_max, exhaustively, in increasing order;
// the last record has next_lambda/gap = 0 when the next level is not known
// within the enumeration bound
std::vector<GapRecord> enumerate_levels(int d, long long lambda_max);

struct GapSearchResult {
  bool found = false;
  GapRecord record;         // first level with gap > 2L (when found)
  long long largest_gap = 0;  // best gap seen (reported when exhausted)
  long long largest_gap_lambda = 0;
};

// smallest level lambda_N <= lambda_max whose gap to the next level
// exceeds 2L
GapSearchResult find_gap(int d, double L, long long lambda_max);
GapSearchResult find_gap_2d(double L, long long lambda_max = 100000);

struct AbstractGapCheck {
  double lhs = 0;     // (l1^{1+a} - l0^{1+a})/(l1^a + l0^a)
  bool pass = false;  // lhs > L
  double margin = 0;  // lhs - L
  double difference_threshold = 0;  // eigenvalue difference at which lhs == L
  double threshold_asymptote = 0;   // its large-lambda limit 2L/(1+alpha)
};

AbstractGapCheck check_abstract_gap(double lambda_N, double lambda_N1, double alpha, double L);

struct AnnulusCertificate {
  double lambda = 0;
  double k = 0;
  double b = 0;  // required pairwise separation |j - l|
  bool verified = false;
  bool vacuous = false;        // fewer than two shell points
  double min_separation = 0;   // smallest pairwise distance found (0 if vacuous)
  long long shell_points = 0;
  long long pairs_checked = 0;
};

// exhaustive pairwise check over the d=3 shell {j : |j|^2 in [lambda-k, lambda+k]}
AnnulusCertificate certify_annulus(double lambda, double k, double b);

struct AnnulusSearchResult {
  bool found = false;
  AnnulusCertificate certificate;
  double best_separation = 0;  // over non-vacuous candidates when exhausted
  long long candidates_tried = 0;
};

// scan integer lambda >= lambda_start with half-width k = chat*log(lambda),
// charging shell pair counts against search_budget; returns the first
// non-vacuous certificate with separation >= b
AnnulusSearchResult find_annulus(double b, long long lambda_start, long long search_budget,
                                 double chat = 0.25);

}  // namespace imlab
