#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"

namespace imlab {

// raised when a step produces non-finite coefficients; carries the last time
// at which the state was still valid
struct BlowUpError : std::runtime_error {
  double last_valid_time;
  explicit BlowUpError(double t);
};

struct RecordSpec {
  std::vector<double> norm_exponents{0.0};  // H^s norms sampled per record
  int every = 1;                            // sampling cadence in steps
  bool keep_states = false;                 // retain sampled states in memory
};

struct TrajectorySample {
  long long step = 0;
  double t = 0.0;
  std::vector<double> norms;  // aligned with RecordSpec::norm_exponents
};

struct TrajectoryRecord {
  std::vector<double> norm_exponents;
  double dt = 0.0;
  long long steps = 0;
  std::vector<TrajectorySample> samples;
  SpectralField final_state;
  std::vector<SpectralField> states;       // aligned with samples when kept
  std::vector<std::string> snapshot_refs;  // filled by callers that write files

  // newline-delimited JSON, one object per sample: t, step, dt, norms keyed
  // "H<s>"
  std::string to_ndjson() const;
};

// One step of the exponential two-stage integrator: the diagonal linear part
// is applied exactly via e^{-L dt} and the phi_1/phi_2 weights; the
// nonlinearity enters through two evaluations (second order accuracy).
// Divergence-free and zero-mean structure is preserved exactly.
SpectralField step(const SpectralField& state, const Model& model, double dt);

// Repeated stepping with sampling; t_end must be an integer multiple of dt
// (within rounding). Throws BlowUpError on non-finite states.
TrajectoryRecord evolve(const SpectralField& u0, const Model& model, double t_end, double dt,
                        const RecordSpec& record = {});

// sup over a seeded random ensemble and t in [burn_in, horizon] of the H^s
// norm, times a 1.5 safety factor; deterministic in seed
double estimate_absorbing_radius(const Model& model, int ensemble_size, double s, double burn_in,
                                 double horizon, double dt = 0.01, std::uint64_t seed = 1000,
                                 double initial_amplitude = 1.0,
                                 double initial_smoothness = 6.0);

}  // namespace imlab
