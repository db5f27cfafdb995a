#include "stationary.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "krylov.hpp"
#include "operators.hpp"

namespace imlab {

namespace {

SpectralField inverse_dissipation(const SpectralField& u, double theta, double nu) {
  return apply_stokes_power(u, -theta, 1.0 / nu);
}

// sampled norm of v -> (nu A^theta)^{-1}(B(v,z) + B(z,v)) over unit fields;
// values near or above 1 mean the fixed-point map is not locally contractive
double sample_contraction(const SpectralField& v, double theta, double nu) {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto z = random_field(v.grid, seed, 2.0);
    auto masked = dealias_mask(z);
    const double zn = sobolev_norm(masked, 0.0);
    if (zn == 0.0) continue;
    auto jz = bilinear_form(v, masked);
    axpy(1.0, bilinear_form(masked, v), jz);
    worst = std::max(worst, sobolev_norm(inverse_dissipation(jz, theta, nu), 0.0) / zn);
  }
  return worst;
}

}  // namespace

SpectralField stationary_residual(const SpectralField& v, const SpectralField& f, double theta,
                                  double nu) {
  auto r = apply_stokes_power(v, theta, nu);
  axpy(1.0, bilinear_form(v, v), r);
  axpy(-1.0, f, r);
  return r;
}

StationarySolveResult solve_stationary(const SpectralField& f, int d, double theta, double nu,
                                       double tol, int max_iterations) {
  if (f.grid.d != d) throw std::invalid_argument("solve_stationary: dimension mismatch");
  if (!(nu > 0.0)) throw std::invalid_argument("solve_stationary: nu must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_stationary: tol must be positive");

  StationarySolveResult out;
  out.ctx.d = d;
  out.ctx.theta = theta;
  out.ctx.nu = nu;

  SpectralField v(f.grid);
  auto residual_norm_for = [&](const SpectralField& cand, const SpectralField& rhs_f) {
    return sobolev_norm(stationary_residual(cand, rhs_f, theta, nu), 0.0);
  };
  auto residual_norm = [&](const SpectralField& cand) { return residual_norm_for(cand, f); };

  double rn = residual_norm(v);
  out.residual_history.push_back(rn);
  if (rn <= tol) {
    out.ctx.v = v;
    out.converged = true;
    out.phase = "trivial";
    out.final_residual = rn;
    return out;
  }
  const double initial_rn = rn;

  // phase 1: damped fixed-point iteration v <- v + 0.5 (G(v) - v) with
  // G(v) = (nu A^theta)^{-1} (f - B(v,v)); keep the best iterate seen
  SpectralField best_v = v;
  double best_rn = rn;
  const int picard_cap = std::min(max_iterations, 200);
  for (int it = 0; it < picard_cap; ++it) {
    auto g = f - bilinear_form(v, v);
    auto gv = inverse_dissipation(g, theta, nu);
    axpy(-1.0, v, gv);
    axpy(0.5, gv, v);
    ++out.picard_iterations;
    rn = residual_norm(v);
    out.residual_history.push_back(rn);
    if (std::isfinite(rn) && rn < best_rn) {
      best_rn = rn;
      best_v = v;
    }
    if (rn <= tol) break;
    if (!std::isfinite(rn) || rn > 5.0 * initial_rn) break;  // diverging
    const auto& h = out.residual_history;
    if (h.size() >= 7 && rn > 0.7 * h[h.size() - 7]) break;  // stalled
  }
  v = best_v;
  rn = best_rn;

  if (rn > tol) {
    // phase 2: Newton with preconditioned matrix-free Krylov solves and a
    // backtracking line search; an inexact Jacobian solve still yields a
    // descent direction for the residual norm.  When the pure Newton step is
    // rejected, retry with a shifted Jacobian J + mu nu A^theta (damped
    // pseudo-transient step), enlarging mu until a step is accepted.
    const int newton_cap = 100;
    double mu = 0.0;
    int attempts = 0;
    while (out.newton_iterations < newton_cap && attempts < 3 * newton_cap && rn > tol) {
      ++attempts;
      auto r = stationary_residual(v, f, theta, nu);
      auto apply = [&](const SpectralField& z) {
        auto jz = apply_stokes_power(z, theta, nu);
        axpy(1.0, bilinear_form(v, z), jz);
        axpy(1.0, bilinear_form(z, v), jz);
        auto pz = inverse_dissipation(jz, theta, nu);
        if (mu > 0.0) axpy(mu, z, pz);
        return pz;
      };
      auto rhs = inverse_dissipation(r, theta, nu);
      scale(rhs, -1.0);
      SpectralField delta(f.grid);
      gmres(apply, rhs, delta, 200, 400, 1e-6);

      bool accepted = false;
      for (double step = 1.0; step >= 1.0 / 64; step *= 0.5) {
        auto trial = v;
        axpy(step, delta, trial);
        const double tn = residual_norm(trial);
        if (std::isfinite(tn) && tn < (1.0 - 1e-4 * step) * rn) {
          v = trial;
          rn = tn;
          accepted = true;
          break;
        }
      }
      if (accepted) {
        mu = (mu < 1e-3) ? 0.0 : 0.25 * mu;
        ++out.newton_iterations;
        out.residual_history.push_back(rn);
      } else {
        mu = (mu == 0.0) ? 1.0 : 8.0 * mu;
        if (mu > 1e7) break;  // no acceptable step, report last residual
      }
    }
  }

  out.ctx.v = v;
  out.final_residual = rn;
  out.converged = rn <= tol;
  out.phase = out.newton_iterations > 0 ? "newton" : "picard";
  out.contraction_factor = sample_contraction(v, theta, nu);
  out.nonuniqueness_possible = out.contraction_factor >= 1.0 || !out.converged;
  return out;
}

std::string StationarySolveResult::report_json() const {
  nlohmann::json j;
  j["converged"] = converged;
  j["phase"] = phase;
  j["picard_iterations"] = picard_iterations;
  j["newton_iterations"] = newton_iterations;
  j["final_residual"] = final_residual;
  j["residual_history"] = residual_history;
  j["contraction_factor"] = contraction_factor;
  j["nonuniqueness_possible"] = nonuniqueness_possible;
  j["initial_guess"] = initial_guess;
  j["d"] = ctx.d;
  j["theta"] = ctx.theta;
  j["nu"] = ctx.nu;
  return j.dump(2);
}

}  // namespace imlab
