#pragma once

#include <vector>

#include "kw/solver.hpp"
#include "kw/spectral.hpp"

namespace kw {

// Lamb-Oseen vortex with circulation alpha, started at t0 > 0. The core must fit the box:
// 4 sqrt(t) < L/8 at every time the fields are evaluated.
struct OseenSpec {
  double alpha = 1.0;
  double t0 = 0.01;
  std::vector<double> center;  // empty = box center

  void validate(const TorusGrid& grid, double t) const;
};

struct OseenFields {
  SpectralField vorticity;  // (alpha / t) G(x / sqrt t), G(y) = exp(-|y|^2 / 4) / (4 pi)
  SpectralField velocity;   // periodic Biot-Savart velocity; curl = vorticity minus its mean
};

OseenFields oseen_fields(const OseenSpec& spec, const TorusGrid& grid);
SpectralField oseen_reference(const OseenSpec& spec, const TorusGrid& grid, double t);

// grad^perp Lap^{-1} w on the torus (dim 2). A periodic field has zero total vorticity, so
// the mean of w is dropped.
SpectralField biot_savart(const SpectralField& vorticity);

// Oseen-regularized point vortex plus, with `radial`, the matching source field
// (alpha1 / 2 pi) x / |x|^2 (1 - exp(-|x|^2 / 4 t0)); without it the second term repeats the
// rotational profile as written in the source text.
SpectralField combined_vortex(const OseenSpec& spec, double alpha1, const TorusGrid& grid, bool radial = true);

// Periodic step along axis 0: rho_left near x = 0, rho_right on the middle half, joined by
// tanh fronts of width `width_cells` grid cells at L/4 and 3L/4.
SpectralField shock_density(const TorusGrid& grid, double rho_left, double rho_right, double width_cells);

struct RunSetup {
  TorusGrid grid;
  KortewegParams params;
  double T = 1.0;
  double velocity_scale = 1.0;
};

// (rho, u) -> (rho(lambda^2 t, lambda x), lambda u(lambda^2 t, lambda x)): box L / lambda,
// horizon T / lambda^2, velocities times lambda, pressure coefficient times lambda^2.
RunSetup scaling_twin(const RunSetup& setup, double lambda);

// Same-n transfer of data to the twin box: the sample arrays coincide, momenta scale by lambda.
MildState scale_data(const MildState& data, const TorusGrid& twin_grid, double lambda);
// Copies coefficients onto another grid with the same n and dim.
SpectralField transfer(const SpectralField& f, const TorusGrid& grid);

struct DecayFit {
  double exponent = 0.0;  // values ~ prefactor * t^{-exponent}
  double prefactor = 0.0;
  double r_squared = 0.0;
};
// Least squares of log value against log t; needs >= 8 positive points over >= 1.5 decades.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values);

}  // namespace kw
