#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "evolution.hpp"
#include "model.hpp"
#include "operators.hpp"

namespace imlab {

// Boundary-value construction of the invariant-graph map: the graph point
// over a low-mode state p is Q_N u(0), where u solves the two-point problem
//   P_N u(0) = p,   Q_N u(-T) = 0
// for the model's flow. The unknown is the low-mode start v = P_N u(-T); the
// shooting map v -> P_N S(T) v is inverted by a damped quasi-Newton with
// finite-difference directional derivatives and GMRES right-preconditioned by
// the exact low-mode linear growth (the shooting map contracts like the
// low-mode semigroup, which is what the preconditioner undoes).

struct BvpOptions {
  double dt = 0.01;   // forward integration step over [-T, 0]
  double tol = 1e-9;  // target on ||P_N u(0) - p||_H
  int max_newton = 30;
  int gmres_restart = 30;
  int gmres_iters = 120;
  int multistart = 1;  // >1 probes solution uniqueness from perturbed starts
  double multistart_spread = 0.25;  // start perturbation relative to 1 + ||v||
  std::uint64_t seed = 0x8a1d;
};

struct BvpResult {
  SpectralField u0;  // full state at t = 0
  SpectralField v;   // low-mode start P_N u(-T)
  double residual = 0.0;
  int newton_iters = 0;
  bool converged = false;
  bool multistart_disagreement = false;  // a macroscopically distinct start hit the target
  double multistart_spread_seen = 0.0;   // largest ||v_alt - v|| among alternates that hit
};

// integrate the model from the low-mode state v (graph part zeroed) over a
// horizon T and return the full final state; BlowUpError propagates
SpectralField bvp_forward(const SpectralField& v, double T, const Model& model,
                          const BandProjectorSpec& spec, double dt);

// solve the two-point problem at a fixed horizon; Newton non-convergence is
// reported through the result, blow-up during shooting propagates
BvpResult solve_bvp(const SpectralField& u0_plus, double T, const Model& model,
                    const BandProjectorSpec& spec, const BvpOptions& opt = {});

struct PhiOptions {
  BvpOptions bvp{};
  double tol = 1e-6;    // accept once ||Phi_T - Phi_{T/2}||_H <= tol
  double T0 = 0.5;      // first horizon; doubled until acceptance
  double T_max = 64.0;  // horizon budget; exhaustion is reported, not thrown
};

struct PhiResult {
  SpectralField value;          // graph value Q_N u(0)
  SpectralField u0;             // assembled graph point p + value
  SpectralField v;              // low-mode start of the accepted solve
  double T = 0.0;               // accepted horizon
  double convergence = 0.0;     // ||Phi_T - Phi_{T/2}|| at acceptance
  std::vector<double> history;  // successive doubling differences
  bool converged = false;
  int bvp_solves = 0;
  bool multistart_disagreement = false;
};

// graph value with horizon doubling; successive solves warm-start from the
// previous horizon's solution transported backward by the exact linear flow
PhiResult phi(const SpectralField& u0_plus, const Model& model, const BandProjectorSpec& spec,
              const PhiOptions& opt = {});

// pointwise graph evaluation tuned for trajectories: the first call runs the
// full doubling ladder, later calls reuse the accepted horizon and warm-start
// the Newton solve from the previous solution; every audit_every-th call the
// half-horizon difference is re-measured and the ladder re-runs when it
// exceeds the tolerance. Throws on non-convergence (a trajectory cannot
// continue through a silent bad graph value).
class PhiEvaluator {
 public:
  PhiEvaluator(const Model& model, BandProjectorSpec spec, PhiOptions opt, int audit_every = 16);
  SpectralField operator()(const SpectralField& p);
  double horizon() const { return T_; }
  int calls() const { return calls_; }
  int ladder_runs() const { return ladder_runs_; }

 private:
  const Model& model_;
  BandProjectorSpec spec_;
  PhiOptions opt_;
  int audit_every_;
  double T_ = 0.0;
  int calls_ = 0;
  int ladder_runs_ = 0;
  std::optional<SpectralField> v_warm_;
};

// regular grid in a two-direction slice of the low-mode subspace; directions
// are orthonormalized when the chart is built
struct ChartGrid {
  SpectralField origin;      // slice center, a low-mode state
  SpectralField dir1, dir2;  // slice directions
  int n1 = 5, n2 = 5;
  double h1 = 0.1, h2 = 0.1;  // node spacing along each direction
};

struct ManifoldChart {
  BandProjectorSpec spec;
  std::vector<SpectralField> base;    // low-mode base points
  std::vector<SpectralField> values;  // graph values at the base points
  std::vector<double> T_used;
  std::vector<double> convergence;  // per-point ||Phi_T - Phi_{T/2}||
  double lipschitz = 0.0;           // max pairwise ||dPhi|| / ||dp||
  bool all_converged = false;
  std::optional<ChartGrid> grid;  // present when built over a regular slice

  // bilinear interpolation inside a grid chart; rejects points off the slice
  // or outside the grid span
  SpectralField interpolate(const SpectralField& p) const;
};

// base points are evaluated in parallel; worker count honors IMLAB_THREADS
ManifoldChart build_chart(const std::vector<SpectralField>& base, const Model& model,
                          const BandProjectorSpec& spec, const PhiOptions& opt = {});
ManifoldChart build_chart(const ChartGrid& grid, const Model& model,
                          const BandProjectorSpec& spec, const PhiOptions& opt = {});

using PhiMap = std::function<SpectralField(const SpectralField&)>;

// one exponential two-stage step of the reduced low-mode system
//   dp/dt + L p = P_N rhs(p + Phi(p)),
// with the graph re-evaluated at both stages
SpectralField inertial_form_step(const SpectralField& p, const PhiMap& phi_map,
                                 const Model& model, const BandProjectorSpec& spec, double dt);

struct TrackingFit {
  double C_fit = 0.0;
  double omega_fit = 0.0;
  bool on_manifold = false;   // separation stayed at integrator-noise scale
  bool monotone_tail = true;  // separation non-increasing past the window start
  std::vector<double> times;
  std::vector<double> dist;  // ||S(t)u0 - S(t)v0||_H
};

// evolve u0 and its graph projection v0 = P_N u0 + Phi(P_N u0) side by side
// and fit log separation ~ log C - omega t over the last 90% of the horizon
TrackingFit measure_tracking(const SpectralField& u0, const Model& model,
                             const BandProjectorSpec& spec, const PhiMap& phi_map, double horizon,
                             double dt);

}  // namespace imlab
