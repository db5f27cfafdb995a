#include "manifold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "krylov.hpp"

namespace imlab {

namespace {

int worker_count(std::size_t jobs) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("IMLAB_THREADS")) n = std::atoi(env);
  if (n < 1) n = 1;
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), jobs));
}

// backward transport by the exact diagonal flow on the low modes; the
// exponent is clamped so extreme horizons degrade the guess instead of
// overflowing
SpectralField low_transport(const SpectralField& x, double span, const Model& model,
                            double lambda_N) {
  SpectralField out = x;
  const auto& lin = model.linear_eigenvalue;
  apply_multiplier(out, [&](double lam) {
    if (lam > lambda_N) return 0.0;
    return std::exp(std::min(lin(lam) * span, 300.0));
  });
  return out;
}

struct Shot {
  SpectralField full;  // state at t = 0
  SpectralField r;     // P_N(full) - target
  double rnorm = 0.0;
};

// damped quasi-Newton on the shooting map from a caller-supplied start
BvpResult newton_shoot(const SpectralField& target, double T, const SpectralField& guess,
                       const Model& model, const BandProjectorSpec& spec, const BvpOptions& opt) {
  const double lam_N = spec.lambda_N;
  const GridSpec& g = model.spec.grid;

  auto shoot = [&](const SpectralField& v) {
    Shot s;
    s.full = bvp_forward(v, T, model, spec, opt.dt);
    s.r = project_low(s.full, lam_N);
    axpy(-1.0, target, s.r);
    s.rnorm = sobolev_norm(s.r, 0.0);
    return s;
  };

  auto precon = [&](const SpectralField& y) { return low_transport(y, T, model, lam_N); };

  BvpResult out;
  out.v = project_low(guess, lam_N);
  Shot cur = shoot(out.v);

  for (int it = 0; it < opt.max_newton; ++it) {
    if (cur.rnorm <= opt.tol) break;

    const double nv = sobolev_norm(out.v, 0.0);
    auto jmv = [&](const SpectralField& h) {
      const double nh = sobolev_norm(h, 0.0);
      if (nh == 0.0) return SpectralField(g);
      const double eps = 1.4901161193847656e-8 * (1.0 + nv) / nh;
      SpectralField vp = out.v;
      axpy(eps, h, vp);
      Shot s = shoot(vp);
      SpectralField d = s.r;
      axpy(-1.0, cur.r, d);
      scale(d, 1.0 / eps);
      return d;
    };
    auto apply = [&](const SpectralField& y) { return jmv(precon(y)); };

    SpectralField b = cur.r;
    scale(b, -1.0);
    SpectralField y(g);
    gmres(apply, b, y, opt.gmres_restart, opt.gmres_iters, 1e-6);
    SpectralField h = precon(y);

    double s = 1.0;
    bool accepted = false;
    SpectralField best_v = out.v;
    Shot best = cur;
    for (int half = 0; half < 12; ++half, s *= 0.5) {
      SpectralField cand_v = out.v;
      axpy(s, h, cand_v);
      Shot cand = shoot(cand_v);
      if (cand.rnorm < best.rnorm) {
        best_v = cand_v;
        best = cand;
      }
      if (cand.rnorm <= (1.0 - 1e-4 * s) * cur.rnorm) {
        accepted = true;
        break;
      }
    }
    ++out.newton_iters;
    if (!accepted && !(best.rnorm < cur.rnorm)) break;  // stalled
    out.v = std::move(best_v);
    cur = std::move(best);
  }

  out.residual = cur.rnorm;
  out.converged = cur.rnorm <= opt.tol;
  out.u0 = std::move(cur.full);
  return out;
}

void check_common(const SpectralField& u0_plus, const Model& model, const BandProjectorSpec& spec) {
  spec.validate();
  if (!(u0_plus.grid == model.spec.grid))
    throw std::invalid_argument("manifold: state grid does not match the model grid");
}

double lsq_slope_intercept(const std::vector<double>& t, const std::vector<double>& y,
                           double* intercept) {
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  const double det = n * stt - st * st;
  const double slope = (n * sty - st * sy) / det;
  *intercept = (sy - slope * st) / n;
  return slope;
}

}  // namespace

SpectralField bvp_forward(const SpectralField& v, double T, const Model& model,
                          const BandProjectorSpec& spec, double dt) {
  check_common(v, model, spec);
  if (!(T > 0.0)) throw std::invalid_argument("bvp_forward: horizon must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("bvp_forward: dt must be positive");
  long long n = std::llround(T / dt);
  if (n < 1) n = 1;
  const double dte = T / static_cast<double>(n);
  SpectralField x = project_low(v, spec.lambda_N);
  for (long long i = 0; i < n; ++i) x = step(x, model, dte);
  return x;
}

BvpResult solve_bvp(const SpectralField& u0_plus, double T, const Model& model,
                    const BandProjectorSpec& spec, const BvpOptions& opt) {
  check_common(u0_plus, model, spec);
  if (!(T > 0.0)) throw std::invalid_argument("solve_bvp: horizon must be positive");
  if (!(opt.tol > 0.0) || !(opt.dt > 0.0))
    throw std::invalid_argument("solve_bvp: tol and dt must be positive");
  if (opt.max_newton < 1 || opt.multistart < 1)
    throw std::invalid_argument("solve_bvp: iteration counts must be positive");

  const SpectralField target = project_low(u0_plus, spec.lambda_N);
  BvpResult out =
      newton_shoot(target, T, low_transport(target, T, model, spec.lambda_N), model, spec, opt);

  if (out.converged && opt.multistart > 1) {
    const double nv = sobolev_norm(out.v, 0.0);
    for (int k = 1; k < opt.multistart; ++k) {
      SpectralField pert = project_low(
          random_field(model.spec.grid, opt.seed + 77ull * static_cast<std::uint64_t>(k), 3.0),
          spec.lambda_N);
      const double np = sobolev_norm(pert, 0.0);
      if (np == 0.0) continue;
      scale(pert, opt.multistart_spread * (1.0 + nv) / np);
      SpectralField start = out.v;
      axpy(1.0, pert, start);
      BvpResult alt = newton_shoot(target, T, start, model, spec, opt);
      if (!alt.converged) continue;
      SpectralField d = alt.v;
      axpy(-1.0, out.v, d);
      const double dist = sobolev_norm(d, 0.0);
      out.multistart_spread_seen = std::max(out.multistart_spread_seen, dist);
      if (dist > 1e-3 * (1.0 + nv)) out.multistart_disagreement = true;
    }
  }
  return out;
}

PhiResult phi(const SpectralField& u0_plus, const Model& model, const BandProjectorSpec& spec,
              const PhiOptions& opt) {
  check_common(u0_plus, model, spec);
  if (!(opt.T0 > 0.0) || !(opt.T_max >= opt.T0))
    throw std::invalid_argument("phi: need 0 < T0 <= T_max");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("phi: tol must be positive");

  const double lam_N = spec.lambda_N;
  const SpectralField target = project_low(u0_plus, lam_N);

  PhiResult out;
  std::optional<BvpResult> prev;
  SpectralField phi_prev;
  double T_prev = 0.0;

  for (double T = opt.T0; T <= opt.T_max * (1.0 + 1e-12); T *= 2.0) {
    const SpectralField guess = prev ? low_transport(prev->v, T - T_prev, model, lam_N)
                                     : low_transport(target, T, model, lam_N);
    BvpOptions bo = opt.bvp;
    bo.multistart = 1;
    BvpResult res = newton_shoot(target, T, guess, model, spec, bo);
    ++out.bvp_solves;
    out.T = T;
    if (!res.converged) {
      out.value = project_high(res.u0, lam_N);
      out.v = std::move(res.v);
      return out;  // Newton failure at this rung; diagnostics carried
    }
    SpectralField phi_T = project_high(res.u0, lam_N);
    if (prev) {
      SpectralField d = phi_T;
      axpy(-1.0, phi_prev, d);
      const double diff = sobolev_norm(d, 0.0);
      out.history.push_back(diff);
      if (diff <= opt.tol) {
        out.convergence = diff;
        out.converged = true;
        out.v = res.v;
        out.value = phi_T;
        out.u0 = target;
        axpy(1.0, phi_T, out.u0);
        if (opt.bvp.multistart > 1) {
          BvpResult probe = solve_bvp(target, T, model, spec, opt.bvp);
          out.bvp_solves += opt.bvp.multistart;
          out.multistart_disagreement = probe.multistart_disagreement;
        }
        return out;
      }
    }
    phi_prev = std::move(phi_T);
    T_prev = T;
    prev = std::move(res);
  }
  if (prev) {  // budget exhausted; report the last rung
    out.value = phi_prev;
    out.v = prev->v;
    out.convergence = out.history.empty() ? 0.0 : out.history.back();
  }
  return out;
}

PhiEvaluator::PhiEvaluator(const Model& model, BandProjectorSpec spec, PhiOptions opt,
                           int audit_every)
    : model_(model), spec_(std::move(spec)), opt_(std::move(opt)), audit_every_(audit_every) {
  spec_.validate();
  if (audit_every_ < 1) throw std::invalid_argument("PhiEvaluator: audit cadence must be >= 1");
}

SpectralField PhiEvaluator::operator()(const SpectralField& p) {
  ++calls_;
  const double lam_N = spec_.lambda_N;
  const SpectralField target = project_low(p, lam_N);

  auto run_ladder = [&]() {
    PhiResult r = phi(target, model_, spec_, opt_);
    if (!r.converged) throw std::runtime_error("PhiEvaluator: graph evaluation did not converge");
    T_ = r.T;
    v_warm_ = r.v;
    ++ladder_runs_;
    return r.value;
  };

  if (T_ == 0.0 || !v_warm_) return run_ladder();

  BvpOptions bo = opt_.bvp;
  bo.multistart = 1;
  BvpResult res = newton_shoot(target, T_, *v_warm_, model_, spec_, bo);
  if (!res.converged) return run_ladder();

  if (calls_ % audit_every_ == 0) {
    const SpectralField mid = bvp_forward(res.v, T_ / 2, model_, spec_, bo.dt);
    BvpResult half = newton_shoot(target, T_ / 2, project_low(mid, lam_N), model_, spec_, bo);
    bool pass = half.converged;
    if (pass) {
      SpectralField d = project_high(res.u0, lam_N);
      axpy(-1.0, project_high(half.u0, lam_N), d);
      pass = sobolev_norm(d, 0.0) <= opt_.tol;
    }
    if (!pass) return run_ladder();
  }

  v_warm_ = res.v;
  return project_high(res.u0, lam_N);
}

ManifoldChart build_chart(const std::vector<SpectralField>& base, const Model& model,
                          const BandProjectorSpec& spec, const PhiOptions& opt) {
  spec.validate();
  if (base.empty()) throw std::invalid_argument("build_chart: need at least one base point");

  ManifoldChart chart;
  chart.spec = spec;
  const std::size_t n = base.size();
  chart.base.resize(n);
  chart.values.resize(n);
  chart.T_used.assign(n, 0.0);
  chart.convergence.assign(n, 0.0);
  std::vector<char> ok(n, 0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        PhiResult r = phi(base[i], model, spec, opt);
        chart.base[i] = project_low(base[i], spec.lambda_N);
        chart.values[i] = r.value;
        chart.T_used[i] = r.T;
        chart.convergence[i] = r.convergence;
        ok[i] = r.converged ? 1 : 0;
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const int workers = worker_count(n);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  chart.all_converged = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      SpectralField dp = chart.base[i];
      axpy(-1.0, chart.base[j], dp);
      const double np = sobolev_norm(dp, 0.0);
      if (np < 1e-12) continue;
      SpectralField dv = chart.values[i];
      axpy(-1.0, chart.values[j], dv);
      chart.lipschitz = std::max(chart.lipschitz, sobolev_norm(dv, 0.0) / np);
    }
  return chart;
}

ManifoldChart build_chart(const ChartGrid& grid, const Model& model,
                          const BandProjectorSpec& spec, const PhiOptions& opt) {
  spec.validate();
  if (grid.n1 < 1 || grid.n2 < 1) throw std::invalid_argument("build_chart: grid must be >= 1x1");
  if (!(grid.h1 > 0.0) || !(grid.h2 > 0.0))
    throw std::invalid_argument("build_chart: grid spacing must be positive");

  ChartGrid gg = grid;
  gg.origin = project_low(grid.origin, spec.lambda_N);
  gg.dir1 = project_low(grid.dir1, spec.lambda_N);
  double n1 = sobolev_norm(gg.dir1, 0.0);
  if (n1 < 1e-12) throw std::invalid_argument("build_chart: first slice direction is degenerate");
  scale(gg.dir1, 1.0 / n1);
  gg.dir2 = project_low(grid.dir2, spec.lambda_N);
  axpy(-inner(gg.dir2, gg.dir1), gg.dir1, gg.dir2);
  double n2 = sobolev_norm(gg.dir2, 0.0);
  if (n2 < 1e-12) throw std::invalid_argument("build_chart: second slice direction is degenerate");
  scale(gg.dir2, 1.0 / n2);

  std::vector<SpectralField> base;
  base.reserve(static_cast<std::size_t>(gg.n1) * gg.n2);
  for (int i = 0; i < gg.n1; ++i)
    for (int j = 0; j < gg.n2; ++j) {
      SpectralField b = gg.origin;
      axpy((i - 0.5 * (gg.n1 - 1)) * gg.h1, gg.dir1, b);
      axpy((j - 0.5 * (gg.n2 - 1)) * gg.h2, gg.dir2, b);
      base.push_back(std::move(b));
    }
  ManifoldChart chart = build_chart(base, model, spec, opt);
  chart.grid = std::move(gg);
  return chart;
}

SpectralField ManifoldChart::interpolate(const SpectralField& p) const {
  if (!grid) throw std::logic_error("ManifoldChart: interpolation needs a grid chart");
  const ChartGrid& gg = *grid;
  SpectralField rel = project_low(p, spec.lambda_N);
  axpy(-1.0, gg.origin, rel);
  const double c1 = inner(rel, gg.dir1);
  const double c2 = inner(rel, gg.dir2);
  SpectralField resid = rel;
  axpy(-c1, gg.dir1, resid);
  axpy(-c2, gg.dir2, resid);
  if (sobolev_norm(resid, 0.0) > 1e-8 * (1.0 + sobolev_norm(rel, 0.0)))
    throw std::domain_error("ManifoldChart: point lies off the chart slice");

  auto locate = [](double c, double h, int n, int* i0, double* f) {
    double x = c / h + 0.5 * (n - 1);
    if (x < -1e-9 || x > n - 1 + 1e-9)
      throw std::domain_error("ManifoldChart: point lies outside the chart span");
    x = std::clamp(x, 0.0, static_cast<double>(n - 1));
    *i0 = std::min(static_cast<int>(x), std::max(n - 2, 0));
    *f = (n == 1) ? 0.0 : x - *i0;
  };
  int i0 = 0, j0 = 0;
  double fx = 0, fy = 0;
  locate(c1, gg.h1, gg.n1, &i0, &fx);
  locate(c2, gg.h2, gg.n2, &j0, &fy);

  auto at = [&](int i, int j) -> const SpectralField& {
    return values[static_cast<std::size_t>(i) * gg.n2 + j];
  };
  SpectralField out = at(i0, j0);
  scale(out, (1.0 - fx) * (1.0 - fy));
  if (gg.n1 > 1) axpy(fx * (1.0 - fy), at(i0 + 1, j0), out);
  if (gg.n2 > 1) axpy((1.0 - fx) * fy, at(i0, j0 + 1), out);
  if (gg.n1 > 1 && gg.n2 > 1) axpy(fx * fy, at(i0 + 1, j0 + 1), out);
  return out;
}

SpectralField inertial_form_step(const SpectralField& p, const PhiMap& phi_map,
                                 const Model& model, const BandProjectorSpec& spec, double dt) {
  check_common(p, model, spec);
  if (!phi_map) throw std::invalid_argument("inertial_form_step: graph map is empty");
  if (!(dt > 0.0)) throw std::invalid_argument("inertial_form_step: dt must be positive");

  const double lam_N = spec.lambda_N;
  const auto& lin = model.linear_eigenvalue;
  auto phi1 = [](double z) {
    if (std::abs(z) < 1e-4)
      return 1.0 + z * (1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z / 120)));
    return std::expm1(z) / z;
  };
  auto phi2 = [](double z) {
    if (std::abs(z) < 1e-4)
      return 0.5 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z / 720)));
    return (std::expm1(z) - z) / (z * z);
  };
  auto n_of = [&](const SpectralField& q) {
    SpectralField u = q;
    axpy(1.0, project_high(phi_map(q), lam_N), u);
    return project_low(model.rhs_nonlinear(u), lam_N);
  };

  SpectralField p0 = project_low(p, lam_N);
  SpectralField n0 = n_of(p0);

  SpectralField a = p0;
  apply_multiplier(a, [&](double lam) { return std::exp(-dt * lin(lam)); });
  SpectralField k1 = n0;
  apply_multiplier(k1, [&](double lam) { return phi1(-dt * lin(lam)); });
  axpy(dt, k1, a);

  SpectralField dn = n_of(a);
  axpy(-1.0, n0, dn);
  apply_multiplier(dn, [&](double lam) { return phi2(-dt * lin(lam)); });
  axpy(dt, dn, a);

  if (!std::isfinite(sobolev_norm(a, 0.0))) throw BlowUpError(0.0);
  return a;
}

TrackingFit measure_tracking(const SpectralField& u0, const Model& model,
                             const BandProjectorSpec& spec, const PhiMap& phi_map, double horizon,
                             double dt) {
  check_common(u0, model, spec);
  if (!phi_map) throw std::invalid_argument("measure_tracking: graph map is empty");
  if (!(horizon > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("measure_tracking: horizon and dt must be positive");
  const long long steps = std::llround(horizon / dt);
  if (steps < 2 || std::abs(steps * dt - horizon) > 1e-9 * std::max(1.0, horizon))
    throw std::invalid_argument("measure_tracking: horizon must be a multiple of dt, >= 2 steps");

  const double lam_N = spec.lambda_N;
  SpectralField x = u0;
  SpectralField p0 = project_low(u0, lam_N);
  SpectralField y = p0;
  axpy(1.0, project_high(phi_map(p0), lam_N), y);

  TrackingFit fit;
  auto record = [&](long long i) {
    SpectralField d = x;
    axpy(-1.0, y, d);
    fit.times.push_back(i * dt);
    fit.dist.push_back(sobolev_norm(d, 0.0));
  };
  record(0);
  for (long long i = 1; i <= steps; ++i) {
    try {
      x = step(x, model, dt);
      y = step(y, model, dt);
    } catch (const BlowUpError&) {
      throw BlowUpError((i - 1) * dt);
    }
    record(i);
  }

  const double floor = 1e-10 * std::max(1.0, sobolev_norm(u0, 0.0));
  const double t_start = 0.1 * horizon - 1e-12;
  std::vector<double> ts, ys;
  double dmax = 0.0;
  for (std::size_t i = 0; i < fit.dist.size(); ++i) dmax = std::max(dmax, fit.dist[i]);
  for (std::size_t i = 0; i < fit.dist.size(); ++i) {
    if (fit.times[i] < t_start || !(fit.dist[i] > 0.0)) continue;
    ts.push_back(fit.times[i]);
    ys.push_back(std::log(fit.dist[i]));
  }
  if (dmax <= floor || ts.size() < 2) {
    fit.on_manifold = true;
    fit.C_fit = dmax;
    fit.omega_fit = 0.0;
    fit.monotone_tail = true;
    return fit;
  }
  double intercept = 0.0;
  const double slope = lsq_slope_intercept(ts, ys, &intercept);
  fit.omega_fit = -slope;
  fit.C_fit = std::exp(intercept);
  double prev = -1.0;
  for (std::size_t i = 0; i < fit.dist.size(); ++i) {
    if (fit.times[i] < t_start) continue;
    if (prev >= 0.0 && fit.dist[i] > 1.05 * prev + floor) fit.monotone_tail = false;
    prev = fit.dist[i];
  }
  return fit;
}

}  // namespace imlab
