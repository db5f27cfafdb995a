#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evolution.hpp"
#include "model.hpp"
#include "operators.hpp"

namespace imlab {

// Quadratic form V(xi) = ||Q_N xi||^2_{H^beta} - ||P_N xi||^2_{H^beta} with
// the low/high split taken at spec.lambda_N. The cone K+ is {V <= 0}. beta=0
// measures in H; beta=-alpha gives the weighted variant used with the sharp
// spectral-gap coefficients.
struct ConeForm {
  BandProjectorSpec spec;
  double beta = 0.0;
};

double cone_value(const SpectralField& xi, const ConeForm& form);

// Strong cone coefficients in the normalization
//   1/2 dV/dt + gamma V <= -mu ||v||^2_{H^beta}.
// The monitored residual is stated doubled: dV/dt + 2 gamma V + 2 mu ||v||^2.
struct ConeCoefficients {
  double gamma = 0.0;
  double mu = 0.0;
};

// gamma = lam_N^a lam_N1^a (lam_N1 + lam_N) / (lam_N1^a + lam_N^a),
// mu    = (lam_N1^{1+a} - lam_N^{1+a}) / (lam_N1^a + lam_N^a) - L;
// valid under the sharp gap condition mu > 0, metric beta = -alpha
ConeCoefficients spectral_gap_coefficients(double lambda_N, double lambda_N1, double alpha,
                                           double L);

// halved form of dV/dt + (lam_N1^{1+a} + lam_N^{1+a}) V <= -((1+a) lam_N^a/4) ||v||^2:
// gamma = (lam_N1^{1+a} + lam_N^{1+a})/2, mu = (1+a) lam_N^a / 8, metric beta = 0
ConeCoefficients spatial_averaging_coefficients(double lambda_N, double lambda_N1, double alpha);

// scalar-averaging variant: the V coefficient drops by L + delta
ConeCoefficients scalar_averaging_coefficients(double lambda_N, double lambda_N1, double alpha,
                                               double L, double delta);

struct ConeTrace {
  std::vector<double> times;
  std::vector<double> V;
  std::vector<double> v_norm2;   // ||v||^2_{H^beta}
  std::vector<double> dVdt;      // centered differences, one-sided endpoints
  std::vector<double> residual;  // dVdt + 2 gamma V + 2 mu v_norm2
  ConeCoefficients coefficients;
  double beta = 0.0;

  // discretization allowances: 10x the estimated local error plus a roundoff
  // floor; slack_rate is in dV/dt units, slack_V in V units
  double slack_rate = 0.0;
  double slack_V = 0.0;

  bool cone_entered = false;                 // some V_i <= 0
  bool invariance_ok = true;                 // no V > slack_V after entry
  std::vector<long long> violation_steps;    // sample indices of violations
  double max_residual = 0.0;

  bool squeezing_applicable = false;         // V > 0 at every sample
  double squeeze_theta = 0.0;                // fitted decay rate of ||v||
  double squeeze_C = 0.0;                    // smallest C making the bound hold

  std::string to_json() const;
};

// Co-evolves u1 and u2 under the model, records V, ||v||^2 and the strong
// cone residual along the way, flags cone-invariance violations (V returning
// above slack after having entered K+), and fits the squeezing envelope
// ||v(t)|| <= C e^{-theta t} ||v(0)|| whenever V stays positive throughout.
ConeTrace monitor_strong_cone(const SpectralField& u1_0, const SpectralField& u2_0,
                              const Model& model, const ConeForm& form,
                              const ConeCoefficients& coefficients, double t_end, double dt);

// data-parallel batch over initial pairs; worker count honors IMLAB_THREADS
std::vector<ConeTrace> monitor_strong_cone_batch(
    const std::vector<std::pair<SpectralField, SpectralField>>& pairs, const Model& model,
    const ConeForm& form, const ConeCoefficients& coefficients, double t_end, double dt);

// Adjoints of the advection pieces in the volume-normalized L2 pairing, with
// the same dealias masking as bilinear_form:
//   bilinear_left_adjoint(U, y)  is the adjoint of  h -> bilinear_form(h, U)
//   bilinear_right_adjoint(U, y) is the adjoint of  h -> bilinear_form(U, h)
SpectralField bilinear_left_adjoint(const SpectralField& U, const SpectralField& y);
SpectralField bilinear_right_adjoint(const SpectralField& U, const SpectralField& y);

// adjoint of z -> truncate_W_derivative(w, z): the per-mode projection and
// the componentwise eta' map compose in reversed order
SpectralField truncate_W_derivative_adjoint(const SpectralField& w, const SpectralField& y,
                                            const CutoffSpec& spec);

// Band-restricted averaging-condition operator for the saturated 3D
// nonlinearity and its adjoint:
//   z -> R_{k,N} A^{-1/4} ( B(h, W+v) + B(W+v, h) ),  h = W'(w) R_{k,N} z
SpectralField sac_apply(const SpectralField& w, const StationaryContext& ctx,
                        const CutoffSpec& cutoff, const BandProjectorSpec& spec,
                        const SpectralField& z);
SpectralField sac_apply_adjoint(const SpectralField& w, const StationaryContext& ctx,
                                const CutoffSpec& cutoff, const BandProjectorSpec& spec,
                                const SpectralField& y);

// H operator norm of sac_apply at a fixed w by power iteration on the normal
// operator; `restarts` independent seeded starts, best final forward-norm
// value wins
double sac_operator_norm(const SpectralField& w, const StationaryContext& ctx,
                         const CutoffSpec& cutoff, const BandProjectorSpec& spec,
                         int power_iters = 30, int restarts = 5, std::uint64_t seed = 0x5ac0);

// sup over sampled w of ||R_{k,N} F'(W(w)) R_{k,N}|| for the saturated 3D
// model; draws alternate between the identity zone of W and the saturated
// regime, all seeds deterministic
double sac_estimate(const Model& model3d, const BandProjectorSpec& spec, int samples,
                    int power_iters = 30);

struct SacScalarEstimate {
  double delta_hat = 0.0;
  std::vector<double> a_fit;  // fitted band multiple per sample
};

// subtracts the least-squares scalar multiple of the identity on the band
// before taking the norm; works for the saturated 3D model and for Abstract
// models carrying F_prime / F_prime_adjoint handles
SacScalarEstimate sac_estimate_with_scalar(const Model& model, const BandProjectorSpec& spec,
                                           int samples);

// desk-scale parameters recorded against the smallness thresholds the theory
// asks for; nothing is enforced, the report just states the comparison
struct SacThresholds {
  double delta_hat = 0.0;
  double lambda_N = 0.0;
  double k = 0.0;
  double L = 0.0;
  double hbar = 0.0;
  double delta_max = 1.0 / 30.0;      // required delta_hat <= 1/30
  double lambda_required = 0.0;       // required lambda_N >= e^{60 L^2 / hbar}
  double k_lo = 0.0;                  // required k in [hbar log lambda_N, lambda_N/2)
  double k_hi = 0.0;
  bool delta_ok = false;
  bool lambda_ok = false;
  bool k_in_range = false;

  std::string to_json() const;
};

SacThresholds sac_thresholds(double delta_hat, const BandProjectorSpec& spec, double L,
                             double hbar);

// zero-mean bookkeeping for the saturated 3D quantities: component means of
// w, W(w), v and of every first derivative of W(w) and v, straight from the
// j=0 coefficients
struct ZeroMeanReport {
  double mean_w = 0.0;
  double mean_W = 0.0;
  double mean_v = 0.0;
  double mean_dW = 0.0;
  double mean_dv = 0.0;
  double worst = 0.0;
  bool clean = false;  // worst <= 1e-15

  std::string to_json() const;
};

ZeroMeanReport zero_mean_audit(const StationaryContext& ctx, const SpectralField& w,
                               const CutoffSpec& cutoff = {});

}  // namespace imlab
