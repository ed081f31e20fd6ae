#include "kw/scenarios.hpp"

#include <cmath>
#include <string>

#include "kw/errors.hpp"

namespace kw {

namespace {

std::vector<double> center_of(const OseenSpec& s, const TorusGrid& g) {
  if (s.center.empty()) return std::vector<double>(g.dim(), 0.5 * g.side_length());
  if (static_cast<int>(s.center.size()) != g.dim()) throw ShapeError("OseenSpec: center has the wrong dimension");
  return s.center;
}

// Minimum-image offset of x from c on a periodic axis of length L.
double wrap(double x, double c, double L) {
  double d = std::fmod(x - c, L);
  if (d < -0.5 * L) d += L;
  if (d >= 0.5 * L) d -= L;
  return d;
}

// (alpha / t) G(x / sqrt t) sampled about the center.
SpectralField gaussian_core(const OseenSpec& s, const TorusGrid& g, double weight, double t) {
  const auto c = center_of(s, g);
  const double L = g.side_length();
  return to_spectral(g, 1, sample(g, 1, [&](const double* x, int) {
                       const double dx = wrap(x[0], c[0], L), dy = wrap(x[1], c[1], L);
                       return weight / (4.0 * M_PI * t) * std::exp(-(dx * dx + dy * dy) / (4.0 * t));
                     }));
}

}  // namespace

void OseenSpec::validate(const TorusGrid& grid, double t) const {
  if (grid.dim() != 2) throw DomainError("Oseen vortex: needs dim 2");
  if (!(t0 > 0.0) || !(t > 0.0)) throw DomainError("Oseen vortex: times must be positive");
  if (!(4.0 * std::sqrt(t) < grid.side_length() / 8.0))
    throw DomainError("Oseen vortex: core 4 sqrt(t) = " + std::to_string(4.0 * std::sqrt(t)) +
                      " does not fit L/8 = " + std::to_string(grid.side_length() / 8.0));
  center_of(*this, grid);
}

SpectralField biot_savart(const SpectralField& w) {
  const TorusGrid& g = w.grid();
  if (g.dim() != 2 || w.components() != 1) throw ShapeError("biot_savart: needs a 2D scalar");
  // psi = -Lap^{-1} w, u = (d2 psi, -d1 psi).
  SpectralField psi = apply_multiplier(w, [&](std::size_t j) { return g.xi_sq(j) > 0.0 ? 1.0 / g.xi_sq(j) : 0.0; });
  SpectralField u(g, 2);
  u.set_component(0, partial(psi, 1));
  u.set_component(1, -1.0 * partial(psi, 0));
  return u;
}

OseenFields oseen_fields(const OseenSpec& spec, const TorusGrid& grid) {
  spec.validate(grid, spec.t0);
  OseenFields f;
  f.vorticity = gaussian_core(spec, grid, spec.alpha, spec.t0);
  f.velocity = biot_savart(f.vorticity);
  return f;
}

SpectralField oseen_reference(const OseenSpec& spec, const TorusGrid& grid, double t) {
  spec.validate(grid, t);
  return gaussian_core(spec, grid, spec.alpha, t);
}

SpectralField combined_vortex(const OseenSpec& spec, double alpha1, const TorusGrid& grid, bool radial) {
  spec.validate(grid, spec.t0);
  SpectralField u = biot_savart(gaussian_core(spec, grid, spec.alpha, spec.t0));
  const SpectralField second = gaussian_core(spec, grid, alpha1, spec.t0);
  if (!radial) return u + biot_savart(second);
  // grad Lap^{-1} of the Gaussian source: the regularized x / |x|^2 profile, mean dropped.
  const SpectralField phi =
      apply_multiplier(second, [&](std::size_t j) { return grid.xi_sq(j) > 0.0 ? -1.0 / grid.xi_sq(j) : 0.0; });
  return u + gradient(phi);
}

SpectralField shock_density(const TorusGrid& grid, double rho_left, double rho_right, double width_cells) {
  if (!(rho_left > 0.0) || !(rho_right > 0.0)) throw DomainError("shock_density: densities must be positive");
  if (!(width_cells >= 2.0)) throw DomainError("shock_density: unresolved jump, width below 2 cells");
  const double L = grid.side_length(), w = width_cells * grid.h();
  const double a = 0.25 * L, b = 0.75 * L, jump = rho_right - rho_left;
  return to_spectral(grid, 1, sample(grid, 1, [&](const double* x, int) {
                       return rho_left + 0.5 * jump * (std::tanh((x[0] - a) / w) - std::tanh((x[0] - b) / w));
                     }));
}

RunSetup scaling_twin(const RunSetup& s, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("scaling_twin: lambda must be positive");
  RunSetup t = s;
  t.grid = TorusGrid(s.grid.dim(), s.grid.side_length() / lambda, s.grid.n());
  t.T = s.T / (lambda * lambda);
  t.velocity_scale = s.velocity_scale * lambda;
  t.params.pressure_a = s.params.pressure_a * lambda * lambda;
  t.params.validate();
  return t;
}

SpectralField transfer(const SpectralField& f, const TorusGrid& grid) {
  if (f.grid().n() != grid.n() || f.grid().dim() != grid.dim()) throw ShapeError("transfer: grids differ in n or dim");
  SpectralField out(grid, f.components());
  out.raw() = f.raw();
  return out;
}

MildState scale_data(const MildState& data, const TorusGrid& twin_grid, double lambda) {
  data.validate();
  return {transfer(data.q, twin_grid), lambda * transfer(data.m1, twin_grid), lambda * transfer(data.m2, twin_grid)};
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& v) {
  if (t.size() != v.size()) throw ShapeError("fit_decay: times and values differ in length");
  if (t.size() < 8) throw DomainError("fit_decay: needs at least 8 points");
  double tmin = t.front(), tmax = t.front();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0)) throw DomainError("fit_decay: times must be positive");
    if (!(v[i] > 0.0)) throw DomainError("fit_decay: values must be positive");
    tmin = std::min(tmin, t[i]);
    tmax = std::max(tmax, t[i]);
  }
  if (std::log10(tmax / tmin) < 1.5 - 1e-12) throw DomainError("fit_decay: window spans less than 1.5 decades");
  const double n = static_cast<double>(t.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = std::log(t[i]), y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double y = std::log(v[i]);
    ss_res += std::pow(y - (icpt + slope * std::log(t[i])), 2);
    ss_tot += std::pow(y - sy / n, 2);
  }
  return {-slope, std::exp(icpt), ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0};
}

}  // namespace kw
