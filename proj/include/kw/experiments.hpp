#pragma once

#include <vector>

#include "kw/scenarios.hpp"
#include "kw/solver.hpp"

namespace kw {

// Drivers shared by the command-line front-end and the acceptance checks.

struct OseenRun {
  double alpha = 0.0;
  double curl_error = 0.0;         // ||curl m1(T) - rho_bar (w_ref(T) - mean)||_{L2}
  double density_deviation = 0.0;  // ||q(T)||_{L2}
  IterationReport report;
};
// Starts from rho = rho_bar and the periodic Oseen velocity at spec.t0, solves on
// graded(t0, T, panels) and compares at T.
OseenRun oseen_run(const OseenSpec& spec, const KortewegParams& p, const TorusGrid& grid, double T, int panels,
                   const FixedPointConfig& cfg, const MapOptions& opt);

struct ShockRun {
  std::vector<double> times;     // nodes with t > 0
  std::vector<double> grad_sup;  // ||grad rho(t)||_inf
  IterationReport report;
};
// Density from shock_density, zero velocity; solves on graded(0, T, panels).
ShockRun shock_run(const TorusGrid& grid, const KortewegParams& p, double rho_left, double rho_right, double width_cells,
                   double T, int panels, const FixedPointConfig& cfg, const MapOptions& opt);

struct RegularizationSummary {
  double weighted_sup = 0.0;    // max of sqrt(t) ||grad rho||_inf over the window
  double weighted_ratio = 0.0;  // max / min of sqrt(t) ||grad rho||_inf
  double unweighted_ratio = 0.0;
  double decades = 0.0;  // log10 of the window span
  int samples = 0;
};
// Window: nodes with t >= t_min.
RegularizationSummary summarize(const ShockRun& run, double t_min);

struct TwinComparison {
  double same_box = 0.0;    // twin on the box L / lambda at the same n
  double replicated = -1.0;  // fine run on the original box, lambda^N copies; -1 unless lambda is an integer
};
// Runs the base setup and its scaling twin from the same samples and returns the worst
// relative L2 discrepancy over nodes and components. Needs kappa^2 = mu^2.
TwinComparison scaling_twin_check(const RunSetup& base, const MildState& data, double lambda, int panels,
                                  const FixedPointConfig& cfg, const MapOptions& opt);

}  // namespace kw
