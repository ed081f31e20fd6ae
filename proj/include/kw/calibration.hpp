#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kw/solver.hpp"

namespace kw {

// Empirical operator constants: sups of ratios over random heat-flow trajectories.
struct MeasuredConstants {
  double C = 0.0;         // ||int e^{c1(t-s)Lap} div m ds||_{L^inf L^inf} / ||m||_{E_T}
  double linear = 0.0;    // ||e^{c t Lap} w0||_{E_T} / ||w0||_{bmo_T}
  double bilinear = 0.0;  // ||int e^{c(t-s)Lap} P/Q div(v (x) w) ds||_{E_T} / (||v||_{E_T} ||w||_{E_T})
  double pressure = 0.0;  // ||int e^{c(t-s)Lap} grad Pi ds||_{E_T} / (T ||Pi||_{L^inf L^inf})
  double C1() const;      // max of the three E_T ratios
};

struct CalibrationOptions {
  double T = 0.05;
  int panels = 12;
  int samples = 4;
  std::uint64_t seed = 1;
  double envelope = 4.0;  // Gaussian envelope width in lattice wavenumbers, fixed across resolutions
};

// Heat coefficients probed are mu, c1 and c2 of p; fields are random with a Gaussian envelope.
MeasuredConstants measure_constants(const TorusGrid& grid, const KortewegParams& p, const CalibrationOptions& opt = {});

struct Admissibility {
  FixedPointConfig config;  // R, T, M, weight_beta filled in
  double rho_min = 0.0;
  double rho_sup = 0.0;
  double M1 = 0.0;  // sup of P on [0, 2 ||rho0||_inf]
  double M2 = 0.0;  // sup of P' on the same interval
  double bmo_sum = 0.0;
  double R_data = 0.0;  // 4 C1 * bmo_sum
  double R_adm = 0.0;   // largest R the radius and contraction conditions allow as T -> 0
  double contraction = 0.0;  // Cc (M R + 2 sqrt(M^2 R^2 + M2 T)) at the optimal weight
  bool admissible = false;
  std::vector<std::string> violations;
};

// R from the data rule, then T halved from T_max until the horizon and contraction
// conditions hold; Cc = max(C, C1).
Admissibility admissible_config(const MildState& data, const KortewegParams& p, const MeasuredConstants& k,
                                double T_max, int max_halvings = 40);

}  // namespace kw
