#pragma once

#include "spectral_field.hpp"

namespace imlab {

struct BandProjectorSpec {
  long long N = 0;        // cumulative mode count through lambda_N
  double lambda_N = 0;    // largest retained level
  double lambda_N1 = 0;   // next achieved level
  double k = 0;           // band half-width
  void validate() const;  // requires lambda_N1 > lambda_N > k >= 0
};

// coefficient-wise multiplication by nu*|j|^{2*theta}; negative theta allowed
// since j=0 carries no coefficient
SpectralField apply_stokes_power(const SpectralField& u, double theta, double nu);

// sharp eigenvalue splits; lambda_N must be an achieved level (|j|^2 value)
SpectralField project_low(const SpectralField& u, double lambda_N);   // |j|^2 <= lambda_N
SpectralField project_high(const SpectralField& u, double lambda_N);  // |j|^2 > lambda_N

struct BandSplit {
  SpectralField low;   // |j|^2 <  lambda_N - k
  SpectralField band;  // |j|^2 in [lambda_N - k, lambda_N + k] (ties to band)
  SpectralField high;  // |j|^2 >  lambda_N + k
};
BandSplit band_project(const SpectralField& u, const BandProjectorSpec& spec);
SpectralField band_restrict(const SpectralField& u, const BandProjectorSpec& spec);

// coefficient-wise derivative along one axis (multiplication by i*j_axis)
SpectralField spectral_derivative(const SpectralField& u, int axis);

// dealiased pseudo-spectral P_sigma((u.grad)v): inputs masked to the dealias
// cut, pointwise product on the physical grid, output masked and projected
SpectralField bilinear_form(const SpectralField& u, const SpectralField& v);

// <B(u,v), w> in the volume-normalized L2 pairing
double trilinear(const SpectralField& u, const SpectralField& v, const SpectralField& w);

// zeroes modes with |j|_inf above the grid's dealias cut
SpectralField dealias_mask(const SpectralField& u);

}  // namespace imlab
