#include "evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

namespace imlab {

namespace {

// (e^z - 1)/z and (e^z - z - 1)/z^2 with a series switch near zero to avoid
// cancellation
double phi1(double z) {
  if (std::abs(z) < 1e-4)
    return 1.0 + z * (1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z / 120)));
  return std::expm1(z) / z;
}

double phi2(double z) {
  if (std::abs(z) < 1e-4)
    return 0.5 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z / 720)));
  return (std::expm1(z) - z) / (z * z);
}

std::string norm_key(double s) {
  std::ostringstream os;
  os << "H" << s;
  return os.str();
}

}  // namespace

BlowUpError::BlowUpError(double t)
    : std::runtime_error("trajectory blew up; last valid time " + std::to_string(t)),
      last_valid_time(t) {}

SpectralField step(const SpectralField& state, const Model& model, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  if (!(state.grid == model.spec.grid)) throw std::invalid_argument("step: state grid mismatch");

  const auto& lin = model.linear_eigenvalue;
  auto n0 = model.rhs_nonlinear(state);

  auto a = state;
  apply_multiplier(a, [&](double lam) { return std::exp(-dt * lin(lam)); });
  auto k1 = n0;
  apply_multiplier(k1, [&](double lam) { return phi1(-dt * lin(lam)); });
  axpy(dt, k1, a);

  auto dn = model.rhs_nonlinear(a);
  axpy(-1.0, n0, dn);
  apply_multiplier(dn, [&](double lam) { return phi2(-dt * lin(lam)); });
  axpy(dt, dn, a);

  if (!std::isfinite(sobolev_norm(a, 0.0))) throw BlowUpError(0.0);
  return a;
}

TrajectoryRecord evolve(const SpectralField& u0, const Model& model, double t_end, double dt,
                        const RecordSpec& record) {
  if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
  if (t_end < 0.0) throw std::invalid_argument("evolve: t_end must be nonnegative");
  if (record.every < 1) throw std::invalid_argument("evolve: record cadence must be >= 1");
  const long long steps = std::llround(t_end / dt);
  if (std::abs(steps * dt - t_end) > 1e-9 * std::max(1.0, t_end))
    throw std::invalid_argument("evolve: t_end must be an integer multiple of dt");

  TrajectoryRecord out;
  out.norm_exponents = record.norm_exponents;
  out.dt = dt;
  out.steps = steps;

  auto sample = [&](long long i, const SpectralField& x) {
    TrajectorySample s;
    s.step = i;
    s.t = i * dt;
    for (double e : record.norm_exponents) s.norms.push_back(sobolev_norm(x, e));
    out.samples.push_back(std::move(s));
    if (record.keep_states) out.states.push_back(x);
  };

  auto x = u0;
  sample(0, x);
  for (long long i = 1; i <= steps; ++i) {
    try {
      x = step(x, model, dt);
    } catch (const BlowUpError&) {
      throw BlowUpError((i - 1) * dt);
    }
    if (i % record.every == 0 || i == steps) sample(i, x);
  }
  out.final_state = std::move(x);
  return out;
}

std::string TrajectoryRecord::to_ndjson() const {
  std::string out;
  for (const auto& s : samples) {
    nlohmann::json line;
    line["step"] = s.step;
    line["t"] = s.t;
    line["dt"] = dt;
    nlohmann::json norms;
    for (std::size_t k = 0; k < norm_exponents.size(); ++k)
      norms[norm_key(norm_exponents[k])] = s.norms[k];
    line["norms"] = std::move(norms);
    out += line.dump();
    out += '\n';
  }
  return out;
}

double estimate_absorbing_radius(const Model& model, int ensemble_size, double s, double burn_in,
                                 double horizon, double dt, std::uint64_t seed,
                                 double initial_amplitude, double initial_smoothness) {
  if (ensemble_size < 1) throw std::invalid_argument("estimate_absorbing_radius: empty ensemble");
  if (!(horizon > burn_in) || burn_in < 0.0)
    throw std::invalid_argument("estimate_absorbing_radius: need horizon > burn_in >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("estimate_absorbing_radius: dt must be positive");

  const long long steps = std::llround(horizon / dt);
  double sup = 0.0;
  for (int e = 0; e < ensemble_size; ++e) {
    auto x = random_field(model.spec.grid, seed + static_cast<std::uint64_t>(e),
                          initial_smoothness);
    const double n0 = sobolev_norm(x, 0.0);
    if (n0 > 0.0) scale(x, initial_amplitude / n0);
    for (long long i = 1; i <= steps; ++i) {
      try {
        x = step(x, model, dt);
      } catch (const BlowUpError&) {
        throw std::runtime_error("estimate_absorbing_radius: ensemble member " +
                                 std::to_string(e) + " (seed " + std::to_string(seed + e) +
                                 ") blew up before t=" + std::to_string(i * dt));
      }
      if (i * dt >= burn_in) sup = std::max(sup, sobolev_norm(x, s));
    }
  }
  return 1.5 * sup;
}

}  // namespace imlab
