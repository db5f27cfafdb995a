#pragma once

#include <string>
#include <vector>

#include "cutoff.hpp"
#include "spectral_field.hpp"

namespace imlab {

struct StationarySolveResult {
  StationaryContext ctx;
  bool converged = false;
  std::string phase;  // "trivial", "picard" or "newton"
  int picard_iterations = 0;
  int newton_iterations = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;
  double contraction_factor = 0.0;  // sampled local linearization gain
  bool nonuniqueness_possible = false;
  std::string initial_guess = "zero";

  std::string report_json() const;
};

// Solves the steady balance: dissipation power theta of the Stokes operator
// plus self-advection equals the forcing. Damped fixed-point iteration first
// (contractive for small data), matrix-free Newton-Krylov when it stalls.
// Starts from zero so repeated runs pick the same solution branch.
StationarySolveResult solve_stationary(const SpectralField& f, int d, double theta, double nu,
                                       double tol, int max_iterations = 400);

// residual of the steady balance for a candidate v
SpectralField stationary_residual(const SpectralField& v, const SpectralField& f, double theta,
                                  double nu);

}  // namespace imlab
