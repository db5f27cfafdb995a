#pragma once

#include <functional>
#include <optional>

#include "cutoff.hpp"
#include "spectral_field.hpp"

namespace imlab {

// Equation families sharing the shape  d/dt x + L x + N(x) = const,
// with L diagonal in Fourier space:
//   NS2D          d/dt u + nu A u         + B(u,u) = f
//   HNS3D         d/dt u + nu A^{5/4} u   + B(u,u) = f
//   Difference2D  d/dt w + nu A w         + B(w,w) + B(v,w) + B(w,v) = 0
//   Difference3D  d/dt w + nu A^{5/4} w   + B(w,w) + B(v,w) + B(w,v) = 0
//   Prepared2D    d/dt w + nu A w         + B(W,W) + B(W,v) + B(v,W) = 0
//   Prepared3D    d/dt w + nu A^{5/4} w   + B(W,W) + B(v,W) + B(W,v) = 0
//   Abstract      d/dt u + nu A^{1+alpha} u + A^alpha F(u) = g
// where v is a frozen stationary state, W = truncate_W(w), and the abstract
// kind reuses the grid modes with a configurable diagonal spectrum.
enum class ModelKind {
  NS2D,
  HNS3D,
  Difference2D,
  Difference3D,
  Prepared2D,
  Prepared3D,
  Abstract,
};

struct AbstractParams {
  double alpha = 0.25;
  // level |j|^2 -> eigenvalue of the diagonal operator; identity when absent;
  // must be strictly positive and nondecreasing over the achieved levels
  std::function<double(double)> spectrum;
  // nonlinearity H -> H; zero map when absent. Outputs are re-projected onto
  // the divergence-free zero-mean subspace the states live in.
  std::function<SpectralField(const SpectralField&)> F;
  // optional directional derivative z -> F'(u)z and its adjoint in the L2
  // pairing; only consumed by the averaging-condition estimators
  std::function<SpectralField(const SpectralField&, const SpectralField&)> F_prime;
  std::function<SpectralField(const SpectralField&, const SpectralField&)> F_prime_adjoint;
};

struct ModelSpec {
  ModelKind kind = ModelKind::NS2D;
  GridSpec grid;
  double nu = 1.0;
  std::optional<SpectralField> forcing;          // f for the flow kinds, g for Abstract
  std::optional<StationaryContext> stationary;   // required by difference/prepared kinds
  CutoffSpec cutoff;                             // used by prepared kinds; rho > 0
  std::optional<AbstractParams> abstract_params; // required by Abstract
};

// Validated, executable model: d/dt x = -L x + rhs_nonlinear(x), where L acts
// per mode as multiplication by linear_eigenvalue(|j|^2) >= 0 and
// rhs_nonlinear collects the constant forcing minus the nonlinear terms.
struct Model {
  ModelSpec spec;
  int d = 2;
  double theta = 1.0;  // exponent of the dissipation (1+alpha for Abstract)
  std::function<double(double)> linear_eigenvalue;
  std::function<SpectralField(const SpectralField&)> rhs_nonlinear;
};

Model make_model(const ModelSpec& spec);

}  // namespace imlab
