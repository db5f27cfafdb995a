#include "radii.hpp"

#include <cmath>
#include <stdexcept>

namespace imlab {

namespace {

double need(const std::map<std::string, double>& norms, const std::string& key) {
  auto it = norms.find(key);
  if (it == norms.end())
    throw std::invalid_argument("analytic_radii: missing forcing norm \"" + key + "\"");
  if (!(it->second >= 0.0))
    throw std::invalid_argument("analytic_radii: forcing norm \"" + key + "\" must be >= 0");
  return it->second;
}

}  // namespace

std::map<std::string, double> RadiiEstimates::as_map() const {
  if (d == 2)
    return {{"rho_v", rho_v},         {"rho_1", rho_1},
            {"rho_2", rho_2},         {"rho_3", rho_3},
            {"rho_bar_0", rho_bar_0}, {"rho_bar_1", rho_bar_1},
            {"rho_bar_2", rho_bar_2}, {"rho_bar_5/2", rho_bar_5_2},
            {"varrho_2", varrho_2}};
  return {{"r_v", r_v},         {"r_0", r_0},         {"r_1/2", r_1_2},
          {"r_1", r_1},         {"r_5/4", r_5_4},     {"r_3/2", r_3_2},
          {"r_2", r_2},         {"r_5/2", r_5_2},     {"r_bar_0", r_bar_0},
          {"r_bar_1", r_bar_1}, {"r_bar_2", r_bar_2}, {"varrho_3", varrho_3}};
}

RadiiEstimates analytic_radii(int d, const std::map<std::string, double>& f_norms, double nu,
                              const RadiiConstants& con, const RadiiOverrides& ovr) {
  if (d != 2 && d != 3) throw std::invalid_argument("analytic_radii: d must be 2 or 3");
  if (!(nu > 0.0)) throw std::invalid_argument("analytic_radii: nu must be positive");

  RadiiEstimates out;
  out.d = d;
  if (d == 2) {
    const double fH = need(f_norms, "H");
    const double fH1 = need(f_norms, "H1");

    out.rho_v = con.c * (fH * fH + fH1);
    // stand-ins where the source displays no formula (overridable)
    out.rho_1 = ovr.rho_1.value_or(con.c * fH);
    out.rho_2 = ovr.rho_2.value_or(con.c * fH);
    out.rho_bar_0 = ovr.rho_bar_0.value_or(con.c * (fH + out.rho_2 + out.rho_1 * out.rho_2));

    const double e = std::exp(std::pow(out.rho_1, 4) + out.rho_2 * out.rho_2);
    const double bar1_sq = con.k * e * (out.rho_2 * out.rho_2 * out.rho_bar_0 * out.rho_bar_0);
    out.rho_bar_1 = std::sqrt(bar1_sq);
    out.rho_3 = con.k * (out.rho_bar_1 + out.rho_2 * out.rho_2 + fH1);

    const double poly = 1.0 + std::pow(out.rho_1, 4) + out.rho_2 * out.rho_2;
    const double bar2_sq =
        con.k * e * (poly * bar1_sq + bar1_sq * out.rho_2 * out.rho_3);
    out.rho_bar_2 = std::sqrt(bar2_sq);

    const double bar52_sq =
        con.k * e *
        (poly * bar2_sq + bar1_sq * out.rho_2 * out.rho_3 +
         (out.rho_bar_1 + out.rho_bar_2) * out.rho_bar_2 * out.rho_3 * out.rho_3);
    out.rho_bar_5_2 = std::sqrt(bar52_sq);

    out.varrho_2 = con.k * (std::pow(out.rho_v + out.rho_3, 2) + out.rho_bar_5_2);
    return out;
  }

  const double fH = need(f_norms, "H");
  const double fm54 = need(f_norms, "H-5/4");
  const double fm1 = need(f_norms, "H-1");
  const double fm12 = need(f_norms, "H-1/2");
  const double fm14 = need(f_norms, "H-1/4");

  out.r_v = con.c_tilde *
                (std::pow(fm54, 4) + std::pow(fm54, 10) + fm1 * fm1) * fm54 * fm54 +
            (2.0 / (nu * nu)) * fH * fH;

  const double r0_sq = (2.0 / nu) * fm54 * fm54;
  out.r_0 = std::sqrt(r0_sq);

  const double r12_sq = con.C * std::exp(r0_sq + fm54 * fm54) * (r0_sq + fm54 * fm54);
  out.r_1_2 = std::sqrt(r12_sq);

  const double r1_sq = con.C * std::exp(r12_sq * (r0_sq + fm54 * fm54)) *
                       (r0_sq + fm54 * fm54 + fm14 * fm14);
  out.r_1 = std::sqrt(r1_sq);

  const double r1_8 = std::pow(r1_sq, 4);
  const double r54_sq = con.C * std::exp(r0_sq * r1_8) * (r0_sq + fm54 * fm54 + fH * fH);
  out.r_5_4 = std::sqrt(r54_sq);

  const double rbar0_sq = std::exp(con.C_nu * r1_sq) *
                          (con.C_nu * r54_sq * (1.0 + r1_sq) * (1.0 + r0_sq * r1_8 + fH * fH));
  out.r_bar_0 = std::sqrt(rbar0_sq);

  out.r_3_2 = con.C * (rbar0_sq + r1_sq + fm1);
  out.r_2 = con.C * (rbar0_sq + out.r_1 * out.r_3_2 + fm12);
  out.r_5_2 = con.C * (rbar0_sq + out.r_1 * out.r_2 + fH);

  const double rbar1_sq =
      con.C_tilde * std::exp(std::pow(out.r_2, 2.25)) * ((1.0 + r1_sq * r1_sq) * rbar0_sq);
  out.r_bar_1 = std::sqrt(rbar1_sq);

  const double rbar2_sq =
      con.C_tilde * std::exp(out.r_2 * out.r_2) * (1.0 + out.r_2 * out.r_2) * rbar1_sq;
  out.r_bar_2 = std::sqrt(rbar2_sq);

  out.varrho_3 = std::sqrt(con.K * (out.r_v * out.r_v + out.r_5_2 * out.r_5_2 + rbar2_sq));
  return out;
}

}  // namespace imlab
