#pragma once

#include <map>
#include <optional>
#include <string>

namespace imlab {

// generic constants appearing in the closed-form radius bounds; the source
// analysis never instantiates them, so they are configuration inputs
struct RadiiConstants {
  double c = 1.0;        // planar chain
  double k = 1.0;        // planar chain
  double c_tilde = 1.0;  // hyperviscous chain
  double C = 1.0;        // hyperviscous chain
  double C_nu = 1.0;     // hyperviscous chain
  double C_tilde = 1.0;  // hyperviscous chain
  double K = 1.0;        // final hyperviscous combination
};

// three planar radii have no displayed formula; defaults are documented
// stand-ins and any of them can be pinned from configuration
struct RadiiOverrides {
  std::optional<double> rho_1;
  std::optional<double> rho_2;
  std::optional<double> rho_bar_0;
};

struct RadiiEstimates {
  int d = 2;
  // planar chain
  double rho_v = 0, rho_1 = 0, rho_2 = 0, rho_3 = 0;
  double rho_bar_0 = 0, rho_bar_1 = 0, rho_bar_2 = 0, rho_bar_5_2 = 0;
  double varrho_2 = 0;
  // hyperviscous chain
  double r_v = 0, r_0 = 0, r_1_2 = 0, r_1 = 0, r_5_4 = 0, r_3_2 = 0;
  double r_2 = 0, r_5_2 = 0, r_bar_0 = 0, r_bar_1 = 0, r_bar_2 = 0;
  double varrho_3 = 0;

  double absorbing_radius() const { return d == 2 ? varrho_2 : varrho_3; }
  std::map<std::string, double> as_map() const;
};

// Evaluates the closed-form radius chains from the norms of the forcing.
// Required keys in f_norms: d=2 needs "H" and "H1"; d=3 needs "H", "H-5/4",
// "H-1", "H-1/2" and "H-1/4". Throws std::invalid_argument when a required
// norm is missing or inputs are invalid.
RadiiEstimates analytic_radii(int d, const std::map<std::string, double>& f_norms, double nu,
                              const RadiiConstants& constants = {},
                              const RadiiOverrides& overrides = {});

}  // namespace imlab
