#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "operators.hpp"

namespace imlab {

namespace {

int kind_dimension(ModelKind k) {
  switch (k) {
    case ModelKind::NS2D:
    case ModelKind::Difference2D:
    case ModelKind::Prepared2D:
      return 2;
    case ModelKind::HNS3D:
    case ModelKind::Difference3D:
    case ModelKind::Prepared3D:
      return 3;
    case ModelKind::Abstract:
      return 0;  // either
  }
  return 0;
}

bool needs_stationary(ModelKind k) {
  return k == ModelKind::Difference2D || k == ModelKind::Difference3D ||
         k == ModelKind::Prepared2D || k == ModelKind::Prepared3D;
}

bool is_prepared(ModelKind k) {
  return k == ModelKind::Prepared2D || k == ModelKind::Prepared3D;
}

void validate_spectrum(const AbstractParams& ap, const GridSpec& g) {
  if (!(ap.alpha > 0.0 && ap.alpha < 1.0))
    throw std::invalid_argument("ModelSpec: Abstract alpha must lie in (0,1)");
  if (!ap.spectrum) return;
  std::set<long long> levels;
  for_each_mode(g, [&](const WaveVector& j, std::size_t) {
    if (!j.is_zero()) levels.insert(j.norm2());
  });
  double prev = 0.0;
  for (long long lam : levels) {
    const double val = ap.spectrum(static_cast<double>(lam));
    if (!(val > 0.0))
      throw std::invalid_argument("ModelSpec: Abstract spectrum must be strictly positive");
    if (val < prev)
      throw std::invalid_argument("ModelSpec: Abstract spectrum must be nondecreasing");
    prev = val;
  }
}

// saturated advection sum entering the prepared equations; for d=3 the
// displayed nonlinearity A^{1/4}(A^{-1/4} sum) collapses back to the sum
SpectralField prepared_sum(const SpectralField& w, const StationaryContext& ctx,
                           const CutoffSpec& spec, int d) {
  if (d == 2) return modified_nonlinearity_2d(w, ctx, spec);
  auto W = truncate_W(w, spec);
  auto out = bilinear_form(W, W);
  axpy(1.0, bilinear_form(ctx.v, W), out);
  axpy(1.0, bilinear_form(W, ctx.v), out);
  return out;
}

}  // namespace

Model make_model(const ModelSpec& spec) {
  const GridSpec& g = spec.grid;
  if (g.d != 2 && g.d != 3) throw std::invalid_argument("ModelSpec: grid dimension must be 2 or 3");
  if (!(spec.nu > 0.0)) throw std::invalid_argument("ModelSpec: nu must be positive");
  const int want_d = kind_dimension(spec.kind);
  if (want_d != 0 && want_d != g.d)
    throw std::invalid_argument("ModelSpec: model kind and grid dimension disagree");
  if (spec.forcing && !(spec.forcing->grid == g))
    throw std::invalid_argument("ModelSpec: forcing grid mismatch");
  if (needs_stationary(spec.kind)) {
    if (!spec.stationary)
      throw std::invalid_argument("ModelSpec: difference/prepared kinds need a stationary context");
    if (!(spec.stationary->v.grid == g))
      throw std::invalid_argument("ModelSpec: stationary state grid mismatch");
  }
  if (is_prepared(spec.kind) && !(spec.cutoff.rho > 0.0))
    throw std::invalid_argument("ModelSpec: prepared kinds need a positive saturation radius");
  if (spec.kind == ModelKind::Abstract) {
    if (!spec.abstract_params)
      throw std::invalid_argument("ModelSpec: Abstract kind needs abstract_params");
    validate_spectrum(*spec.abstract_params, g);
  }

  Model m;
  m.spec = spec;
  m.d = g.d;

  const double nu = spec.nu;
  switch (spec.kind) {
    case ModelKind::NS2D:
    case ModelKind::Difference2D:
    case ModelKind::Prepared2D:
      m.theta = 1.0;
      m.linear_eigenvalue = [nu](double lam) { return nu * lam; };
      break;
    case ModelKind::HNS3D:
    case ModelKind::Difference3D:
    case ModelKind::Prepared3D:
      m.theta = 1.25;
      m.linear_eigenvalue = [nu](double lam) { return nu * std::pow(lam, 1.25); };
      break;
    case ModelKind::Abstract: {
      const auto ap = *spec.abstract_params;
      m.theta = 1.0 + ap.alpha;
      if (ap.spectrum) {
        m.linear_eigenvalue = [nu, ap](double lam) {
          return nu * std::pow(ap.spectrum(lam), 1.0 + ap.alpha);
        };
      } else {
        const double p = 1.0 + ap.alpha;
        m.linear_eigenvalue = [nu, p](double lam) { return nu * std::pow(lam, p); };
      }
      break;
    }
  }

  SpectralField forcing = spec.forcing ? *spec.forcing : SpectralField(g);
  switch (spec.kind) {
    case ModelKind::NS2D:
    case ModelKind::HNS3D:
      m.rhs_nonlinear = [forcing](const SpectralField& x) {
        auto out = forcing;
        axpy(-1.0, bilinear_form(x, x), out);
        return out;
      };
      break;
    case ModelKind::Difference2D:
    case ModelKind::Difference3D: {
      const SpectralField v = spec.stationary->v;
      m.rhs_nonlinear = [v](const SpectralField& w) {
        auto out = bilinear_form(w, w);
        axpy(1.0, bilinear_form(v, w), out);
        axpy(1.0, bilinear_form(w, v), out);
        scale(out, -1.0);
        return out;
      };
      break;
    }
    case ModelKind::Prepared2D:
    case ModelKind::Prepared3D: {
      const StationaryContext ctx = *spec.stationary;
      const CutoffSpec cs = spec.cutoff;
      const int d = g.d;
      m.rhs_nonlinear = [ctx, cs, d](const SpectralField& w) {
        auto out = prepared_sum(w, ctx, cs, d);
        scale(out, -1.0);
        return out;
      };
      break;
    }
    case ModelKind::Abstract: {
      const auto ap = *spec.abstract_params;
      m.rhs_nonlinear = [forcing, ap](const SpectralField& x) {
        auto out = forcing;
        if (ap.F) {
          auto fx = ap.F(x);
          leray_project_inplace(fx);
          if (ap.spectrum) {
            const double a = ap.alpha;
            const auto spec_fn = ap.spectrum;
            apply_multiplier(fx, [a, spec_fn](double lam) { return std::pow(spec_fn(lam), a); });
          } else {
            const double a = ap.alpha;
            apply_multiplier(fx, [a](double lam) { return std::pow(lam, a); });
          }
          axpy(-1.0, fx, out);
        }
        return out;
      };
      break;
    }
  }

  return m;
}

}  // namespace imlab
