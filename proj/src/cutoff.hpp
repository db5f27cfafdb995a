#pragma once

#include <vector>

#include "spectral_field.hpp"

namespace imlab {

// Smooth radial saturation profile: m(r) = r for r <= 1, nondecreasing, and
// m(r) = 2 for r >= r2. Between the branches m(r) = 1 + integral_1^r phi with
// phi(s) = (1 - step((s-1)/(r2-1)))^kappa, step the standard exp(-1/t) smooth
// 0-to-1 transition, and kappa solved so that m(r2) = 2. phi(1) = 1 and
// phi(r2) = 0, so the profile joins both branches with matching slope and is
// C-infinity throughout. For r2 = 3 the solution is kappa = 1 exactly (the
// transition integrates to 1/2 by symmetry).
struct CutoffProfile {
  double r2 = 3.0;
  double kappa = 1.0;
  double h = 0.0;                // node spacing over [1, r2]
  std::vector<double> node_m;    // profile values at the nodes
  std::vector<double> node_phi;  // profile slopes at the nodes

  double value(double r) const;       // m(r); exact on r <= 1 and r >= r2
  double derivative(double r) const;  // m'(r); evaluated from the closed form

  static CutoffProfile make(double r2 = 3.0);  // requires r2 > 2
};

struct CutoffSpec {
  double rho = 1.0;  // saturation radius in the weighted-coefficient norm
  double r2 = 3.0;   // radial profile saturation point, must be > 2

  static constexpr double weight_exponent = 4.5;  // per-mode weight |j|^{9/2}
  static constexpr double saturation_level = 2.0;
};

// shared profile lookup; profiles are cached per r2
const CutoffProfile& cutoff_profile(const CutoffSpec& spec);

// frozen stationary background the truncated dynamics are written around
struct StationaryContext {
  SpectralField v;
  int d = 2;
  double theta = 1.0;
  double nu = 1.0;
};

// scalar saturation: zeta * m(|zeta|)/|zeta|, identity on |zeta| <= 1,
// modulus capped at 2 with the argument preserved
Complex eta(Complex zeta, const CutoffSpec& spec);

// derivative of eta as a real-linear map delta -> a*delta + b*conj(delta)
struct EtaDerivative {
  double a = 1.0;
  Complex b{0.0, 0.0};

  Complex apply(Complex delta) const { return a * delta + b * std::conj(delta); }
  double op_norm() const { return std::abs(a) + std::abs(b); }
};
EtaDerivative eta_prime(Complex zeta, const CutoffSpec& spec);

// coefficient-wise saturation W: mode j is rescaled by |j|^{9/2}/rho, passed
// through eta componentwise, scaled back, and re-projected divergence-free.
// Modes already inside the unit ball after rescaling are copied unchanged, so
// W is the exact identity on fields with weighted norm below rho (inputs are
// expected divergence-free, as all pipeline states are).
SpectralField truncate_W(const SpectralField& w, const CutoffSpec& spec);

// directional derivative W'(w)z; linear in z with operator norm <= the
// profile's Lipschitz bound
SpectralField truncate_W_derivative(const SpectralField& w, const SpectralField& z,
                                    const CutoffSpec& spec);

// sup over r of max(m(r)/r, m'(r)); equals 1 for this profile family
double lipschitz_bound(const CutoffSpec& spec);

// saturated advection terms around the stationary background:
//   d=2: B(W,W) + B(W,v) + B(v,W)
//   d=3: A^{-1/4} (B(W,W) + B(v,W) + B(W,v)) and its derivative in w
SpectralField modified_nonlinearity_2d(const SpectralField& w, const StationaryContext& ctx,
                                       const CutoffSpec& spec);
SpectralField modified_nonlinearity_3d(const SpectralField& w, const StationaryContext& ctx,
                                       const CutoffSpec& spec);
SpectralField modified_nonlinearity_3d_derivative(const SpectralField& w, const SpectralField& z,
                                                  const StationaryContext& ctx,
                                                  const CutoffSpec& spec);

}  // namespace imlab
