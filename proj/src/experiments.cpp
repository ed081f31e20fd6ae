#include "kw/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "kw/errors.hpp"
#include "kw/norms.hpp"

namespace kw {

namespace {

// Samples of f repeated along every axis of `fine`, whose n is a multiple of f's.
SpectralField tile(const SpectralField& f, const TorusGrid& fine) {
  const TorusGrid& g = f.grid();
  const int n = g.n(), nf = fine.n(), d = g.dim();
  const auto s = from_spectral(f);
  std::vector<double> out(fine.size() * f.components());
  for (std::size_t j = 0; j < fine.size(); ++j) {
    std::size_t rest = j, coarse = 0, stride = 1;
    for (int a = 0; a < d; ++a) {
      const std::size_t i = rest % nf;
      rest /= nf;
      coarse += (i % n) * stride;
      stride *= n;
    }
    for (int c = 0; c < f.components(); ++c) out[c * fine.size() + j] = s[c * g.size() + coarse];
  }
  return to_spectral(fine, f.components(), out);
}

double relative(const SpectralField& got, const SpectralField& want) {
  const double ref = l2_norm(want);
  const double diff = l2_norm(got - want);
  return ref > 0.0 ? diff / ref : diff;
}

// Worst relative discrepancy between two trajectories on a common grid; b's momenta are
// divided by `momentum_scale` first.
double worst_relative(const Trajectory& a, const Trajectory& b, double momentum_scale) {
  double w = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const MildState& x = a.states[j];
    const MildState& y = b.states[j];
    w = std::max({w, relative(y.q, x.q), relative((1.0 / momentum_scale) * y.m1, x.m1),
                  relative((1.0 / momentum_scale) * y.m2, x.m2)});
  }
  return w;
}

}  // namespace

OseenRun oseen_run(const OseenSpec& spec, const KortewegParams& p, const TorusGrid& grid, double T, int panels,
                   const FixedPointConfig& cfg, const MapOptions& opt) {
  spec.validate(grid, T);
  const OseenFields f = oseen_fields(spec, grid);
  const SpectralField m = p.rho_bar * f.velocity;
  const MildState data{SpectralField(grid, 1), m, m};
  auto [traj, rep] = picard_solve(data, p, cfg, opt, TimeGrid::graded(spec.t0, T, panels));
  SpectralField ref = oseen_reference(spec, grid, T);
  ref.at(0, 0) = 0.0;
  OseenRun r;
  r.alpha = spec.alpha;
  r.curl_error = l2_norm(curl2d(traj.states.back().m1) - p.rho_bar * ref);
  r.density_deviation = l2_norm(traj.states.back().q);
  r.report = std::move(rep);
  return r;
}

ShockRun shock_run(const TorusGrid& grid, const KortewegParams& p, double rho_left, double rho_right, double width_cells,
                   double T, int panels, const FixedPointConfig& cfg, const MapOptions& opt) {
  const SpectralField rho = shock_density(grid, rho_left, rho_right, width_cells);
  const MildState data = effective_momenta(rho, SpectralField(grid, grid.dim()), p);
  auto [traj, rep] = picard_solve(data, p, cfg, opt, TimeGrid::graded(0.0, T, panels));
  ShockRun r;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    if (!(traj.times[j] > 0.0)) continue;
    r.times.push_back(traj.times[j]);
    r.grad_sup.push_back(sup_norm(gradient(traj.states[j].q)));
  }
  r.report = std::move(rep);
  return r;
}

RegularizationSummary summarize(const ShockRun& run, double t_min) {
  RegularizationSummary s;
  double wmin = kInf, wmax = 0.0, gmin = kInf, gmax = 0.0, tlo = kInf, thi = 0.0;
  for (std::size_t j = 0; j < run.times.size(); ++j) {
    const double t = run.times[j];
    if (t < t_min) continue;
    const double g = run.grad_sup[j], w = std::sqrt(t) * g;
    wmin = std::min(wmin, w);
    wmax = std::max(wmax, w);
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
    tlo = std::min(tlo, t);
    thi = std::max(thi, t);
    ++s.samples;
  }
  if (s.samples < 2) throw DomainError("summarize: fewer than two nodes in the window");
  s.weighted_sup = wmax;
  s.weighted_ratio = wmax / wmin;
  s.unweighted_ratio = gmax / gmin;
  s.decades = std::log10(thi / tlo);
  return s;
}

TwinComparison scaling_twin_check(const RunSetup& base, const MildState& data, double lambda, int panels,
                                  const FixedPointConfig& cfg, const MapOptions& opt) {
  if (!base.params.degenerate()) throw ConstraintError("scaling_twin_check: needs kappa^2 = mu^2");
  const auto [a, rep_a] = picard_solve(data, base.params, cfg, opt, TimeGrid::graded(0.0, base.T, panels));

  const RunSetup twin = scaling_twin(base, lambda);
  const MildState twin_data = scale_data(data, twin.grid, lambda);
  const auto [b, rep_b] = picard_solve(twin_data, twin.params, cfg, opt, TimeGrid::graded(0.0, twin.T, panels));
  Trajectory b_on_a = b;
  for (auto& s : b_on_a.states) s = {transfer(s.q, a.grid()), transfer(s.m1, a.grid()), transfer(s.m2, a.grid())};

  TwinComparison out;
  out.same_box = worst_relative(a, b_on_a, lambda);

  const int copies = static_cast<int>(std::lround(lambda));
  if (copies >= 2 && std::abs(lambda - copies) < 1e-12) {
    // Same box, lambda n points: rho0(lambda x) repeats lambda^N times, and its samples are the
    // base samples tiled. Compare on the fine lattice against the tiled base solution.
    const TorusGrid fine(base.grid.dim(), base.grid.side_length(), base.grid.n() * copies);
    const MildState fine_data{tile(data.q, fine), lambda * tile(data.m1, fine),
                              lambda * tile(data.m2, fine)};
    const auto [c, rep_c] = picard_solve(fine_data, twin.params, cfg, opt, TimeGrid::graded(0.0, twin.T, panels));
    Trajectory a_tiled = a;
    for (auto& s : a_tiled.states) s = {tile(s.q, fine), tile(s.m1, fine), tile(s.m2, fine)};
    out.replicated = worst_relative(a_tiled, c, lambda);
  }
  return out;
}

}  // namespace kw
