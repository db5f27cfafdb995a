#include "cone_sac.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace imlab {

namespace {

void project_divfree(const WaveVector& j, Complex* v, int d) {
  const double n2 = static_cast<double>(j.norm2());
  Complex dot{0.0, 0.0};
  for (int c = 0; c < d; ++c) dot += static_cast<double>(j.c[c]) * v[c];
  dot /= n2;
  for (int c = 0; c < d; ++c) v[c] -= static_cast<double>(j.c[c]) * dot;
}

long long round_steps(double t_end, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("monitor_strong_cone: dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("monitor_strong_cone: t_end must be >= 0");
  const long long steps = std::llround(t_end / dt);
  if (std::abs(static_cast<double>(steps) * dt - t_end) > 1e-9 * std::max(1.0, t_end))
    throw std::invalid_argument("monitor_strong_cone: t_end is not a multiple of dt");
  return steps;
}

int worker_count(std::size_t jobs) {
  int n = 0;
  if (const char* env = std::getenv("IMLAB_THREADS")) n = std::atoi(env);
  if (n < 1) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), jobs));
}

}  // namespace

double cone_value(const SpectralField& xi, const ConeForm& form) {
  form.spec.validate();
  const double qn = sobolev_norm(project_high(xi, form.spec.lambda_N), form.beta);
  const double pn = sobolev_norm(project_low(xi, form.spec.lambda_N), form.beta);
  return qn * qn - pn * pn;
}

ConeCoefficients spectral_gap_coefficients(double lambda_N, double lambda_N1, double alpha,
                                           double L) {
  if (!(lambda_N1 > lambda_N) || !(lambda_N > 0.0))
    throw std::invalid_argument("spectral_gap_coefficients: need lambda_N1 > lambda_N > 0");
  const double pa = std::pow(lambda_N, alpha), pa1 = std::pow(lambda_N1, alpha);
  ConeCoefficients c;
  c.gamma = pa * pa1 * (lambda_N1 + lambda_N) / (pa1 + pa);
  c.mu = (lambda_N1 * pa1 - lambda_N * pa) / (pa1 + pa) - L;
  return c;
}

ConeCoefficients spatial_averaging_coefficients(double lambda_N, double lambda_N1, double alpha) {
  if (!(lambda_N1 > lambda_N) || !(lambda_N > 0.0))
    throw std::invalid_argument("spatial_averaging_coefficients: need lambda_N1 > lambda_N > 0");
  ConeCoefficients c;
  c.gamma = 0.5 * (std::pow(lambda_N1, 1.0 + alpha) + std::pow(lambda_N, 1.0 + alpha));
  c.mu = (1.0 + alpha) * std::pow(lambda_N, alpha) / 8.0;
  return c;
}

ConeCoefficients scalar_averaging_coefficients(double lambda_N, double lambda_N1, double alpha,
                                               double L, double delta) {
  ConeCoefficients c = spatial_averaging_coefficients(lambda_N, lambda_N1, alpha);
  c.gamma -= 0.5 * (L + delta);
  return c;
}

std::string ConeTrace::to_json() const {
  nlohmann::json j;
  j["times"] = times;
  j["V"] = V;
  j["v_norm2"] = v_norm2;
  j["dVdt"] = dVdt;
  j["residual"] = residual;
  j["gamma"] = coefficients.gamma;
  j["mu"] = coefficients.mu;
  j["beta"] = beta;
  j["slack_rate"] = slack_rate;
  j["slack_V"] = slack_V;
  j["cone_entered"] = cone_entered;
  j["invariance_ok"] = invariance_ok;
  j["violation_steps"] = violation_steps;
  j["max_residual"] = max_residual;
  j["squeezing_applicable"] = squeezing_applicable;
  j["squeeze_theta"] = squeeze_theta;
  j["squeeze_C"] = squeeze_C;
  return j.dump();
}

ConeTrace monitor_strong_cone(const SpectralField& u1_0, const SpectralField& u2_0,
                              const Model& model, const ConeForm& form,
                              const ConeCoefficients& coefficients, double t_end, double dt) {
  if (!(u1_0.grid == model.spec.grid) || !(u2_0.grid == model.spec.grid))
    throw std::invalid_argument("monitor_strong_cone: initial states off the model grid");
  const long long steps = round_steps(t_end, dt);

  ConeTrace trace;
  trace.coefficients = coefficients;
  trace.beta = form.beta;
  trace.times.reserve(steps + 1);
  trace.V.reserve(steps + 1);
  trace.v_norm2.reserve(steps + 1);

  SpectralField u1 = u1_0, u2 = u2_0;
  auto record = [&](long long i) {
    const SpectralField v = u1 - u2;
    const double nv = sobolev_norm(v, form.beta);
    trace.times.push_back(static_cast<double>(i) * dt);
    trace.V.push_back(cone_value(v, form));
    trace.v_norm2.push_back(nv * nv);
  };
  record(0);
  for (long long i = 1; i <= steps; ++i) {
    try {
      u1 = step(u1, model, dt);
      u2 = step(u2, model, dt);
    } catch (const BlowUpError&) {
      throw BlowUpError(static_cast<double>(i - 1) * dt);
    }
    record(i);
  }

  const std::size_t n = trace.V.size();
  trace.dVdt.assign(n, 0.0);
  if (n >= 2) {
    trace.dVdt[0] = (trace.V[1] - trace.V[0]) / dt;
    trace.dVdt[n - 1] = (trace.V[n - 1] - trace.V[n - 2]) / dt;
    for (std::size_t i = 1; i + 1 < n; ++i)
      trace.dVdt[i] = (trace.V[i + 1] - trace.V[i - 1]) / (2.0 * dt);
  }
  trace.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    trace.residual[i] = trace.dVdt[i] + 2.0 * coefficients.gamma * trace.V[i] +
                        2.0 * coefficients.mu * trace.v_norm2[i];

  // one-step local error of V by step halving at t = 0, plus the centered
  // difference truncation scale from the largest third difference
  double lte_V = 0.0;
  if (steps >= 1) {
    SpectralField a1 = step(u1_0, model, dt);
    SpectralField a2 = step(u2_0, model, dt);
    SpectralField b1 = step(step(u1_0, model, 0.5 * dt), model, 0.5 * dt);
    SpectralField b2 = step(step(u2_0, model, 0.5 * dt), model, 0.5 * dt);
    lte_V = std::abs(cone_value(a1 - a2, form) - cone_value(b1 - b2, form));
  }
  double d3max = 0.0;
  for (std::size_t i = 0; i + 3 < n; ++i)
    d3max = std::max(d3max, std::abs(trace.V[i + 3] - 3.0 * trace.V[i + 2] +
                                     3.0 * trace.V[i + 1] - trace.V[i]));
  double scale = 0.0, vscale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scale = std::max(scale, std::abs(trace.dVdt[i]) +
                                2.0 * std::abs(coefficients.gamma) * std::abs(trace.V[i]) +
                                2.0 * std::abs(coefficients.mu) * trace.v_norm2[i]);
    vscale = std::max(vscale, std::max(std::abs(trace.V[i]), trace.v_norm2[i]));
  }
  trace.slack_rate = 10.0 * (lte_V / dt + d3max / (6.0 * dt)) + 1e-11 * scale;
  trace.slack_V = 10.0 * static_cast<double>(steps) * lte_V + 1e-12 * vscale;

  bool entered = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (trace.V[i] <= 0.0) {
      entered = true;
    } else if (entered && trace.V[i] > trace.slack_V) {
      trace.invariance_ok = false;
      trace.violation_steps.push_back(static_cast<long long>(i));
    }
  }
  trace.cone_entered = entered;

  // endpoints use first-order one-sided differences, so the headline residual
  // is taken over the interior samples the slack model covers
  for (std::size_t i = 1; i + 1 < n; ++i)
    trace.max_residual = std::max(trace.max_residual, trace.residual[i]);

  bool positive = n > 0;
  for (std::size_t i = 0; i < n; ++i) positive = positive && trace.V[i] > 0.0;
  if (positive && n >= 2) {
    trace.squeezing_applicable = true;
    // least squares on log ||v||; theta is minus the slope
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = 0.5 * std::log(trace.v_norm2[i]);
      st += trace.times[i];
      sy += y;
      stt += trace.times[i] * trace.times[i];
      sty += trace.times[i] * y;
    }
    const double den = static_cast<double>(n) * stt - st * st;
    const double slope = (static_cast<double>(n) * sty - st * sy) / den;
    trace.squeeze_theta = -slope;
    const double y0 = 0.5 * std::log(trace.v_norm2[0]);
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      c = std::max(c, std::exp(0.5 * std::log(trace.v_norm2[i]) - y0 +
                               trace.squeeze_theta * trace.times[i]));
    trace.squeeze_C = c;
  }
  return trace;
}

std::vector<ConeTrace> monitor_strong_cone_batch(
    const std::vector<std::pair<SpectralField, SpectralField>>& pairs, const Model& model,
    const ConeForm& form, const ConeCoefficients& coefficients, double t_end, double dt) {
  std::vector<ConeTrace> traces(pairs.size());
  if (pairs.empty()) return traces;
  const int workers = worker_count(pairs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pairs.size()) return;
      try {
        traces[i] = monitor_strong_cone(pairs[i].first, pairs[i].second, model, form,
                                        coefficients, t_end, dt);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return traces;
}

SpectralField bilinear_left_adjoint(const SpectralField& U, const SpectralField& y) {
  if (U.grid != y.grid) throw std::invalid_argument("bilinear_left_adjoint: grid mismatch");
  const GridSpec& g = U.grid;
  const int d = g.d, n = g.n;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);

  const SpectralField Um = dealias_mask(U);
  const PhysicalField py = to_physical(dealias_mask(leray_project(y)));

  PhysicalField acc;
  acc.d = d;
  acc.n = n;
  acc.v.assign(total * d, 0.0);
  for (int a = 0; a < d; ++a) {
    const PhysicalField da = to_physical(spectral_derivative(Um, a));
    for (std::size_t m = 0; m < total; ++m) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += da.v[m * d + c] * py.v[m * d + c];
      acc.v[m * d + a] = s;
    }
  }
  SpectralField r = from_physical(acc, g, true);
  leray_project_inplace(r);
  return r;
}

SpectralField bilinear_right_adjoint(const SpectralField& U, const SpectralField& y) {
  if (U.grid != y.grid) throw std::invalid_argument("bilinear_right_adjoint: grid mismatch");
  const GridSpec& g = U.grid;
  const int d = g.d, n = g.n;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);

  const PhysicalField pu = to_physical(dealias_mask(U));
  const PhysicalField py = to_physical(dealias_mask(leray_project(y)));

  SpectralField out(g);
  PhysicalField q;
  q.d = d;
  q.n = n;
  for (int a = 0; a < d; ++a) {
    q.v.assign(total * d, 0.0);
    for (std::size_t m = 0; m < total; ++m) {
      const double ua = pu.v[m * d + a];
      for (int c = 0; c < d; ++c) q.v[m * d + c] = ua * py.v[m * d + c];
    }
    axpy(-1.0, spectral_derivative(from_physical(q, g, true), a), out);
  }
  leray_project_inplace(out);
  return out;
}

SpectralField truncate_W_derivative_adjoint(const SpectralField& w, const SpectralField& y,
                                            const CutoffSpec& spec) {
  if (!(w.grid == y.grid))
    throw std::invalid_argument("truncate_W_derivative_adjoint: grid mismatch");
  const int d = w.grid.d;
  SpectralField out(w.grid);
  for_each_mode(w.grid, [&](const WaveVector& j, std::size_t idx) {
    if (j.is_zero()) return;
    const double s = std::pow(static_cast<double>(j.norm2()), 0.5 * CutoffSpec::weight_exponent);
    const double fwd = s / spec.rho;
    bool inside = true;
    for (int c = 0; c < d; ++c)
      if (std::abs(w.a[idx * d + c]) * fwd > 1.0) {
        inside = false;
        break;
      }
    if (inside) {
      for (int c = 0; c < d; ++c) out.a[idx * d + c] = y.a[idx * d + c];
      return;
    }
    // forward map is (projection o componentwise eta'); each eta' factor is
    // symmetric as a real-linear map, so the adjoint applies them reversed
    Complex v[3];
    for (int c = 0; c < d; ++c) v[c] = y.a[idx * d + c];
    project_divfree(j, v, d);
    for (int c = 0; c < d; ++c) {
      const auto D = eta_prime(fwd * w.a[idx * d + c], spec);
      v[c] = D.apply(v[c]);
    }
    for (int c = 0; c < d; ++c) out.a[idx * d + c] = v[c];
  });
  return out;
}

SpectralField sac_apply(const SpectralField& w, const StationaryContext& ctx,
                        const CutoffSpec& cutoff, const BandProjectorSpec& spec,
                        const SpectralField& z) {
  spec.validate();
  return band_restrict(
      modified_nonlinearity_3d_derivative(w, band_restrict(z, spec), ctx, cutoff), spec);
}

SpectralField sac_apply_adjoint(const SpectralField& w, const StationaryContext& ctx,
                                const CutoffSpec& cutoff, const BandProjectorSpec& spec,
                                const SpectralField& y) {
  spec.validate();
  if (w.grid.d != 3 || !(w.grid == y.grid) || !(w.grid == ctx.v.grid))
    throw std::invalid_argument("sac_apply_adjoint: dimension mismatch");
  const SpectralField t = apply_stokes_power(band_restrict(y, spec), -0.25, 1.0);
  const SpectralField U = truncate_W(w, cutoff) + ctx.v;
  SpectralField s = bilinear_left_adjoint(U, t);
  axpy(1.0, bilinear_right_adjoint(U, t), s);
  return band_restrict(truncate_W_derivative_adjoint(w, s, cutoff), spec);
}

namespace {

// largest singular value of a matrix-free pair (apply, adjoint) by power
// iteration on the normal operator, restricted to the divergence-free band
// subspace; returns the best final Rayleigh value over the restarts
template <class Apply, class Adjoint>
double power_iteration_norm(Apply&& apply, Adjoint&& adjoint, const GridSpec& g,
                            const BandProjectorSpec& spec, int power_iters, int restarts,
                            std::uint64_t seed) {
  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    SpectralField x = band_restrict(random_field(g, seed + 0x9e3779b9ull * (r + 1), 3.0), spec);
    double nx = sobolev_norm(x, 0.0);
    if (!(nx > 0.0)) continue;
    scale(x, 1.0 / nx);
    double rayleigh = 0.0;
    for (int it = 0; it < power_iters; ++it) {
      SpectralField ax = apply(x);
      const double na = sobolev_norm(ax, 0.0);
      // report the forward norm at the current unit iterate: a true lower
      // bound that stays at roundoff scale for vanishing operators, where
      // the normal-operator pairing would amplify adjoint rounding noise
      rayleigh = na * na;
      SpectralField gx = leray_project(adjoint(ax));
      const double ng = sobolev_norm(gx, 0.0);
      if (!(ng > 1e-300)) break;
      scale(gx, 1.0 / ng);
      // re-project after normalizing: when the operator nearly vanishes, gx
      // is rounding noise whose divergence part would otherwise be blown up
      // to unit scale, and the forward map would report phantom norm
      gx = leray_project(gx);
      const double nn = sobolev_norm(gx, 0.0);
      if (!(nn > 1e-300)) break;
      scale(gx, 1.0 / nn);
      x = std::move(gx);
    }
    best = std::max(best, rayleigh);
  }
  return std::sqrt(std::max(best, 0.0));
}

SpectralField draw_sample_state(const GridSpec& g, double rho, int index) {
  SpectralField w = random_field(g, 9001 + 127ull * index, 5.0);
  const double nw = sobolev_norm(w, CutoffSpec::weight_exponent);
  // alternate between the identity zone of the truncation and saturation
  const double target = (index % 2 == 0) ? 0.5 * rho : 50.0 * rho;
  scale(w, target / nw);
  return w;
}

}  // namespace

double sac_operator_norm(const SpectralField& w, const StationaryContext& ctx,
                         const CutoffSpec& cutoff, const BandProjectorSpec& spec,
                         int power_iters, int restarts, std::uint64_t seed) {
  return power_iteration_norm(
      [&](const SpectralField& z) { return sac_apply(w, ctx, cutoff, spec, z); },
      [&](const SpectralField& y) { return sac_apply_adjoint(w, ctx, cutoff, spec, y); },
      w.grid, spec, power_iters, restarts, seed);
}

double sac_estimate(const Model& model3d, const BandProjectorSpec& spec, int samples,
                    int power_iters) {
  spec.validate();
  if (model3d.spec.kind != ModelKind::Prepared3D || !model3d.spec.stationary)
    throw std::invalid_argument("sac_estimate: needs the saturated 3D model");
  if (samples < 1) throw std::invalid_argument("sac_estimate: samples must be >= 1");
  const StationaryContext& ctx = *model3d.spec.stationary;
  const CutoffSpec& cutoff = model3d.spec.cutoff;
  double delta = 0.0;
  for (int i = 0; i < samples; ++i) {
    const SpectralField w = draw_sample_state(model3d.spec.grid, cutoff.rho, i);
    delta = std::max(delta, sac_operator_norm(w, ctx, cutoff, spec, power_iters, 5,
                                              0x5ac0 + 977ull * i));
  }
  return delta;
}

SacScalarEstimate sac_estimate_with_scalar(const Model& model, const BandProjectorSpec& spec,
                                           int samples) {
  spec.validate();
  if (samples < 1) throw std::invalid_argument("sac_estimate_with_scalar: samples must be >= 1");
  const GridSpec& g = model.spec.grid;

  SacScalarEstimate result;
  for (int i = 0; i < samples; ++i) {
    std::function<SpectralField(const SpectralField&)> apply, adjoint;
    if (model.spec.kind == ModelKind::Prepared3D && model.spec.stationary) {
      const StationaryContext& ctx = *model.spec.stationary;
      const CutoffSpec& cutoff = model.spec.cutoff;
      auto w = std::make_shared<SpectralField>(draw_sample_state(g, cutoff.rho, i));
      apply = [&, w](const SpectralField& z) { return sac_apply(*w, ctx, cutoff, spec, z); };
      adjoint = [&, w](const SpectralField& y) {
        return sac_apply_adjoint(*w, ctx, cutoff, spec, y);
      };
    } else if (model.spec.kind == ModelKind::Abstract && model.spec.abstract_params &&
               model.spec.abstract_params->F_prime &&
               model.spec.abstract_params->F_prime_adjoint) {
      const AbstractParams& ap = *model.spec.abstract_params;
      auto u = std::make_shared<SpectralField>(random_field(g, 9001 + 127ull * i, 5.0));
      scale(*u, (i % 2 == 0) ? 0.5 : 50.0);
      apply = [&ap, &spec, u](const SpectralField& z) {
        return band_restrict(leray_project(ap.F_prime(*u, band_restrict(z, spec))), spec);
      };
      adjoint = [&ap, &spec, u](const SpectralField& y) {
        return band_restrict(ap.F_prime_adjoint(*u, leray_project(band_restrict(y, spec))),
                             spec);
      };
    } else {
      throw std::invalid_argument(
          "sac_estimate_with_scalar: needs the saturated 3D model or an Abstract model with "
          "derivative handles");
    }

    // least-squares multiple of the band identity over sampled directions
    double num = 0.0, den = 0.0;
    const int dirs = 16;
    for (int k = 0; k < dirs; ++k) {
      const SpectralField z = random_field(g, 15101 + 37ull * i + 1009ull * k, 3.0);
      const SpectralField rz = band_restrict(z, spec);
      num += inner(apply(z), rz);
      den += inner(rz, rz);
    }
    const double a = den > 0.0 ? num / den : 0.0;
    result.a_fit.push_back(a);

    auto shifted = [&](const SpectralField& z) {
      SpectralField o = apply(z);
      axpy(-a, band_restrict(z, spec), o);
      return o;
    };
    auto shifted_adj = [&](const SpectralField& y) {
      SpectralField o = adjoint(y);
      axpy(-a, band_restrict(y, spec), o);
      return o;
    };
    result.delta_hat = std::max(
        result.delta_hat,
        power_iteration_norm(shifted, shifted_adj, g, spec, 30, 5, 0x5ca1 + 977ull * i));
  }
  return result;
}

std::string SacThresholds::to_json() const {
  nlohmann::json j;
  j["delta_hat"] = delta_hat;
  j["lambda_N"] = lambda_N;
  j["k"] = k;
  j["L"] = L;
  j["hbar"] = hbar;
  j["delta_max"] = delta_max;
  j["lambda_required"] = lambda_required;
  j["k_lo"] = k_lo;
  j["k_hi"] = k_hi;
  j["delta_ok"] = delta_ok;
  j["lambda_ok"] = lambda_ok;
  j["k_in_range"] = k_in_range;
  return j.dump();
}

SacThresholds sac_thresholds(double delta_hat, const BandProjectorSpec& spec, double L,
                             double hbar) {
  if (!(hbar > 0.0) || !(hbar <= 0.5))
    throw std::invalid_argument("sac_thresholds: hbar must lie in (0, 1/2]");
  SacThresholds t;
  t.delta_hat = delta_hat;
  t.lambda_N = spec.lambda_N;
  t.k = spec.k;
  t.L = L;
  t.hbar = hbar;
  t.lambda_required = std::exp(60.0 * L * L / hbar);
  t.k_lo = hbar * std::log(spec.lambda_N);
  t.k_hi = 0.5 * spec.lambda_N;
  t.delta_ok = delta_hat <= t.delta_max;
  t.lambda_ok = spec.lambda_N >= t.lambda_required;
  t.k_in_range = spec.k >= t.k_lo && spec.k < t.k_hi;
  return t;
}

std::string ZeroMeanReport::to_json() const {
  nlohmann::json j;
  j["mean_w"] = mean_w;
  j["mean_W"] = mean_W;
  j["mean_v"] = mean_v;
  j["mean_dW"] = mean_dW;
  j["mean_dv"] = mean_dv;
  j["worst"] = worst;
  j["clean"] = clean;
  return j.dump();
}

ZeroMeanReport zero_mean_audit(const StationaryContext& ctx, const SpectralField& w,
                               const CutoffSpec& cutoff) {
  if (ctx.d != 3 || ctx.v.grid.d != 3 || w.grid.d != 3 || !(w.grid == ctx.v.grid))
    throw std::invalid_argument("zero_mean_audit: needs matching 3D fields");
  const WaveVector origin{{0, 0, 0}};
  auto field_mean = [&](const SpectralField& x) {
    double m = 0.0;
    for (int c = 0; c < 3; ++c) m = std::max(m, std::abs(x.coef(origin, c)));
    return m;
  };
  auto derivative_mean = [&](const SpectralField& x) {
    double m = 0.0;
    for (int axis = 0; axis < 3; ++axis)
      m = std::max(m, field_mean(spectral_derivative(x, axis)));
    return m;
  };
  const SpectralField W = truncate_W(w, cutoff);
  ZeroMeanReport r;
  r.mean_w = field_mean(w);
  r.mean_W = field_mean(W);
  r.mean_v = field_mean(ctx.v);
  r.mean_dW = derivative_mean(W);
  r.mean_dv = derivative_mean(ctx.v);
  r.worst = std::max({r.mean_w, r.mean_W, r.mean_v, r.mean_dW, r.mean_dv});
  r.clean = r.worst <= 1e-15;
  return r;
}

}  // namespace imlab
