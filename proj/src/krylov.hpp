#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "spectral_field.hpp"

namespace imlab {

// minimal vector-space operations a Krylov state type must provide
template <class V>
struct KrylovOps;

template <>
struct KrylovOps<SpectralField> {
  static double dot(const SpectralField& a, const SpectralField& b) { return inner(a, b); }
  static void axpy(double al, const SpectralField& x, SpectralField& y) { imlab::axpy(al, x, y); }
  static void scal(double al, SpectralField& x) { scale(x, al); }
};

template <>
struct KrylovOps<std::vector<double>> {
  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  static void axpy(double al, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += al * x[i];
  }
  static void scal(double al, std::vector<double>& x) {
    for (auto& v : x) v *= al;
  }
};

struct GmresReport {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

// restarted GMRES with modified Gram-Schmidt and Givens rotations; solves
// apply(x) = b in place, x holds the initial guess on entry
template <class V, class Apply>
GmresReport gmres(Apply&& apply, const V& b, V& x, int restart, int max_iter, double rtol) {
  using Ops = KrylovOps<V>;
  GmresReport rep;
  const double bnorm = std::sqrt(Ops::dot(b, b));
  if (bnorm == 0.0) {
    Ops::scal(0.0, x);
    rep.converged = true;
    return rep;
  }
  const double target = rtol * bnorm;

  while (rep.iterations < max_iter) {
    V r = apply(x);
    Ops::scal(-1.0, r);
    Ops::axpy(1.0, b, r);
    const double beta = std::sqrt(Ops::dot(r, r));
    rep.residual = beta;
    if (beta <= target) {
      rep.converged = true;
      return rep;
    }
    const int m = std::min(restart, max_iter - rep.iterations);
    std::vector<V> vs;
    vs.reserve(m + 1);
    Ops::scal(1.0 / beta, r);
    vs.push_back(std::move(r));

    std::vector<double> H(static_cast<std::size_t>(m + 1) * m, 0.0);
    std::vector<double> cs(m, 0.0), sn(m, 0.0), g(m + 1, 0.0);
    g[0] = beta;
    int k = 0;
    bool breakdown = false;
    for (; k < m; ++k) {
      V w = apply(vs[k]);
      for (int i = 0; i <= k; ++i) {
        const double h = Ops::dot(w, vs[i]);
        H[static_cast<std::size_t>(i) * m + k] = h;
        Ops::axpy(-h, vs[i], w);
      }
      const double hk1 = std::sqrt(Ops::dot(w, w));
      H[static_cast<std::size_t>(k + 1) * m + k] = hk1;
      if (hk1 > 0.0) {
        Ops::scal(1.0 / hk1, w);
        vs.push_back(std::move(w));
      } else {
        breakdown = true;
      }
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H[static_cast<std::size_t>(i) * m + k] +
                         sn[i] * H[static_cast<std::size_t>(i + 1) * m + k];
        H[static_cast<std::size_t>(i + 1) * m + k] =
            -sn[i] * H[static_cast<std::size_t>(i) * m + k] +
            cs[i] * H[static_cast<std::size_t>(i + 1) * m + k];
        H[static_cast<std::size_t>(i) * m + k] = t;
      }
      const double denom = std::hypot(H[static_cast<std::size_t>(k) * m + k], hk1);
      cs[k] = H[static_cast<std::size_t>(k) * m + k] / denom;
      sn[k] = hk1 / denom;
      H[static_cast<std::size_t>(k) * m + k] = denom;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++rep.iterations;
      if (std::abs(g[k + 1]) <= target || breakdown) {
        ++k;
        break;
      }
    }
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H[static_cast<std::size_t>(i) * m + j] * y[j];
      y[i] = s / H[static_cast<std::size_t>(i) * m + i];
    }
    for (int i = 0; i < k; ++i) Ops::axpy(y[i], vs[i], x);
    rep.residual = std::abs(g[k]);
    if (rep.residual <= target || breakdown) {
      rep.converged = rep.residual <= target;
      return rep;
    }
  }
  rep.converged = rep.residual <= target;
  return rep;
}

}  // namespace imlab
