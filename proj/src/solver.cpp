#include "kw/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "kw/errors.hpp"
#include "kw/norms.hpp"

namespace kw {

KortewegParams KortewegParams::make(double mu, double kappa, double rho_bar, double a, double gamma) {
  KortewegParams p{mu, kappa, rho_bar, a, gamma};
  p.validate();
  return p;
}

void KortewegParams::validate() const {
  if (!(mu > 0.0)) throw ConstraintError("KortewegParams: mu must be positive");
  if (!(kappa * kappa > 0.0) || !(kappa * kappa <= mu * mu))
    throw ConstraintError("KortewegParams: need 0 < kappa^2 <= mu^2");
  if (!(rho_bar > 0.0)) throw ConstraintError("KortewegParams: rho_bar must be positive");
  if (!(pressure_a > 0.0) || !(pressure_gamma >= 1.0))
    throw ConstraintError("KortewegParams: pressure needs a > 0 and gamma >= 1");
  if (!(beta() > 0.0)) throw ConstraintError("KortewegParams: P'(rho_bar) must be positive");
}

double KortewegParams::root() const { return std::sqrt(std::max(0.0, mu * mu - kappa * kappa)); }

double KortewegParams::pressure(double rho) const { return pressure_a * std::pow(rho, pressure_gamma); }

double KortewegParams::pressure_derivative(double rho) const {
  return pressure_a * pressure_gamma * std::pow(rho, pressure_gamma - 1.0);
}

LinearParams system1(const KortewegParams& p) { return LinearParams::make(p.c1(), p.mu, p.root(), p.beta()); }

LinearParams system2(const KortewegParams& p, Psi2Pairing pairing) {
  return LinearParams::make(pairing == Psi2Pairing::eq381 ? p.c2() : p.c1(), p.mu, -p.root(), p.beta());
}

namespace {

double min_value(const std::vector<double>& v, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::min(m, v[i]);
  return m;
}

void check_vacuum(double min_rho, const char* where) {
  if (!(min_rho > 0.0))
    throw VacuumError(std::string(where) + ": density reached " + std::to_string(min_rho), min_rho);
}

SpectralField times_samples(const TorusGrid& g, const std::vector<double>& scalar, const SpectralField& vec) {
  auto v = from_spectral(vec);
  const std::size_t n = g.size();
  for (int c = 0; c < vec.components(); ++c)
    for (std::size_t j = 0; j < n; ++j) v[c * n + j] *= scalar[j];
  return to_spectral(g, vec.components(), v);
}

}  // namespace

MildState effective_momenta(const SpectralField& rho, const SpectralField& u, const KortewegParams& p) {
  p.validate();
  require_same_grid(rho, u, "effective_momenta");
  const TorusGrid& g = rho.grid();
  if (rho.components() != 1 || u.components() != g.dim()) throw ShapeError("effective_momenta: bad shapes");
  const auto r = from_spectral(rho);
  check_vacuum(min_value(r, g.size()), "effective_momenta");
  const SpectralField rho_u = times_samples(g, r, u);
  const SpectralField grad = gradient(rho);
  MildState s{rho, rho_u, rho_u};
  s.q.at(0, 0) -= p.rho_bar;
  s.m1.axpy(p.c1(), grad);
  s.m2.axpy(p.c2(), grad);
  return s;
}

Primitive reconstruct(const MildState& s, const KortewegParams& p) {
  p.validate();
  s.validate();
  const TorusGrid& g = s.grid();
  Primitive out;
  out.rho = s.q;
  out.rho.at(0, 0) += p.rho_bar;
  SpectralField rho_u;
  if (p.degenerate()) {
    out.grad_rho = gradient(out.rho);
    rho_u = s.m1;
    rho_u.axpy(-p.c1(), out.grad_rho);
  } else {
    const double w = p.c2() - p.c1();
    out.grad_rho = (1.0 / w) * (s.m2 - s.m1);
    rho_u = (p.c2() / w) * s.m1;
    rho_u.axpy(-p.c1() / w, s.m2);
  }
  auto r = from_spectral(out.rho);
  check_vacuum(min_value(r, g.size()), "reconstruct");
  for (auto& v : r) v = 1.0 / v;
  out.u = times_samples(g, r, rho_u);
  return out;
}

NonlinearTerms nonlinear_rhs(const MildState& s, const KortewegParams& p, PressureForm form,
                             const NonlinearSwitches& sw) {
  const TorusGrid& g = s.grid();
  const int d = g.dim();
  const std::size_t n = g.size();
  const SpectralField q = dealias(s.q);
  auto rho = from_spectral(q);
  for (auto& v : rho) v += p.rho_bar;
  NonlinearTerms out{SpectralField(g, d), SpectralField(g, d), min_value(rho, n)};
  check_vacuum(out.min_rho, "nonlinear_rhs");

  if (sw.tensor) {
    const auto a = from_spectral(dealias(s.m1));
    const auto b = from_spectral(dealias(s.m2));
    std::vector<double> S(n);
    for (int i = 0; i < d; ++i)
      for (int k = i; k < d; ++k) {
        for (std::size_t j = 0; j < n; ++j)
          S[j] = 0.5 * (a[i * n + j] * b[k * n + j] + b[i * n + j] * a[k * n + j]) / rho[j];
        const SpectralField Sf = dealias(to_spectral(g, 1, S));
        // (div S)_k gets d_i S_ik; by symmetry (div S)_i gets d_k S_ik.
        out.tensor.set_component(k, out.tensor.component(k) + partial(Sf, i));
        if (k != i) out.tensor.set_component(i, out.tensor.component(i) + partial(Sf, k));
      }
  }
  if (sw.pressure) {
    const auto qs = from_spectral(q);
    std::vector<double> P(n);
    const double P0 = p.pressure(p.rho_bar), beta = p.beta();
    for (std::size_t j = 0; j < n; ++j)
      P[j] = form == PressureForm::full ? p.pressure(rho[j]) : p.pressure(rho[j]) - P0 - beta * qs[j];
    out.pressure = gradient(dealias(to_spectral(g, 1, P)));
  }
  return out;
}

namespace {

void check_slab(const Trajectory& in, const MildState& data, const TimeGrid& grid) {
  if (in.size() != grid.size()) throw ShapeError("map: trajectory does not match the time grid");
  data.validate();
  for (const auto& s : in.states) require_same_grid(s.q, data.q, "map");
}

Trajectory local_linear(const MildState& data, const TimeGrid& grid, const KortewegParams& p) {
  const auto [P1, Q1] = leray_split(data.m1);
  const auto [P2, Q2] = leray_split(data.m2);
  Trajectory out;
  for (double t : grid.nodes()) {
    const double tau = t - grid.start();
    out.times.push_back(t);
    out.states.push_back({heat_propagate(data.q, tau, p.c1()),
                          heat_propagate(P1, tau, p.mu) + heat_propagate(Q1, tau, p.c2()),
                          heat_propagate(P2, tau, p.mu) + heat_propagate(Q2, tau, p.c1())});
  }
  return out;
}

Trajectory global_linear(const MildState& data, const TimeGrid& grid, const KortewegParams& p, Psi2Pairing pairing) {
  const LinearParams p1 = system1(p), p2 = system2(p, pairing);
  Trajectory out;
  for (double t : grid.nodes()) {
    const double tau = t - grid.start();
    const LinearState a = propagate_full({data.q, data.m1}, tau, p1);
    const LinearState b = propagate_full({data.q, data.m2}, tau, p2);
    out.times.push_back(t);
    out.states.push_back({a.q, a.m, b.m});
  }
  return out;
}

}  // namespace

Trajectory local_map_psi(const Trajectory& in, const MildState& data, const TimeGrid& grid, const KortewegParams& p,
                         const MapOptions& opt) {
  check_slab(in, data, grid);
  const std::size_t n = grid.size();
  std::vector<SpectralField> div_m1(n), PF1(n), QF(n);
  for (std::size_t j = 0; j < n; ++j) {
    const MildState& s = in.states[j];
    const NonlinearTerms N = nonlinear_rhs(s, p, PressureForm::full, opt.switches);
    div_m1[j] = divergence(s.m1);
    auto [Pt, Qt] = leray_split(N.tensor);
    PF1[j] = std::move(Pt);
    QF[j] = Qt + leray_split(N.pressure).second;
  }
  const auto Dq = heat_duhamel(grid, div_m1, p.c1());
  const auto DP = heat_duhamel(grid, PF1, p.mu);
  const auto DQ2 = heat_duhamel(grid, QF, p.c2());
  const auto DQ1 = p.degenerate() ? DQ2 : heat_duhamel(grid, QF, p.c1());

  Trajectory out = local_linear(data, grid, p);
  for (std::size_t j = 0; j < n; ++j) {
    MildState& o = out.states[j];
    o.q -= Dq[j];
    o.m1 -= DP[j];
    o.m1 -= DQ2[j];
    o.m2 -= DP[j];
    o.m2 -= DQ1[j];
  }
  return out;
}

Trajectory global_map_psi3(const Trajectory& in, const MildState& data, const TimeGrid& grid,
                           const KortewegParams& p, const MapOptions& opt) {
  check_slab(in, data, grid);
  const std::size_t n = grid.size();
  const TorusGrid& g = data.grid();
  std::vector<LinearState> src(n);
  for (std::size_t j = 0; j < n; ++j) {
    const NonlinearTerms N = nonlinear_rhs(in.states[j], p, PressureForm::perturbation, opt.switches);
    src[j] = {SpectralField(g, 1), -1.0 * (N.tensor + N.pressure)};
  }
  const auto D1 = coupled_duhamel(grid, src, system1(p));
  const auto D2 = coupled_duhamel(grid, src, system2(p, opt.pairing));
  Trajectory out = global_linear(data, grid, p, opt.pairing);
  for (std::size_t j = 0; j < n; ++j) {
    MildState& o = out.states[j];
    o.q += D1[j].q;
    o.m1 += D1[j].m;
    o.m2 += D2[j].m;
  }
  return out;
}

Trajectory hybrid_map_psi4(const Trajectory& in, const MildState& data, const TimeGrid& grid,
                           const KortewegParams& p, const MapOptions& opt) {
  const auto& t = grid.nodes();
  const bool any_local = t.front() <= opt.T_split;
  const bool any_global = t.back() > opt.T_split;
  if (!any_global) return local_map_psi(in, data, grid, p, opt);
  if (!any_local) return global_map_psi3(in, data, grid, p, opt);
  const Trajectory a = local_map_psi(in, data, grid, p, opt);
  Trajectory b = global_map_psi3(in, data, grid, p, opt);
  for (std::size_t j = 0; j < t.size(); ++j)
    if (t[j] <= opt.T_split) b.states[j] = a.states[j];
  return b;
}

Trajectory apply_map(const Trajectory& in, const MildState& data, const TimeGrid& grid, const KortewegParams& p,
                     const MapOptions& opt) {
  switch (opt.kind) {
    case MapKind::local:
      return local_map_psi(in, data, grid, p, opt);
    case MapKind::global:
      return global_map_psi3(in, data, grid, p, opt);
    case MapKind::hybrid:
      return hybrid_map_psi4(in, data, grid, p, opt);
  }
  throw DomainError("apply_map: unknown map");
}

Trajectory free_evolution(const MildState& data, const TimeGrid& grid, const KortewegParams& p,
                          const MapOptions& opt) {
  data.validate();
  if (opt.kind == MapKind::local) return local_linear(data, grid, p);
  Trajectory g = global_linear(data, grid, p, opt.pairing);
  if (opt.kind == MapKind::hybrid) {
    const Trajectory l = local_linear(data, grid, p);
    for (std::size_t j = 0; j < g.size(); ++j)
      if (g.times[j] <= opt.T_split) g.states[j] = l.states[j];
  }
  return g;
}

namespace {

Trajectory shifted_difference(const Trajectory& a, const Trajectory& b, double t0) {
  if (a.size() != b.size()) throw ShapeError("distance: trajectories differ in length");
  Trajectory d;
  for (std::size_t j = 0; j < a.size(); ++j) {
    d.times.push_back(a.times[j] - t0);
    d.states.push_back(a.states[j] - b.states[j]);
  }
  return d;
}

}  // namespace

double erm_distance(const Trajectory& a, const Trajectory& b, double t0, double weight_beta) {
  const Trajectory d = shifted_difference(a, b, t0);
  const double T = d.times.back();
  double q_sup = 0.0;
  for (const auto& s : d.states) q_sup = std::max(q_sup, sup_norm(s.q));
  return et_norm(series(d, Component::m1), T) + et_norm(series(d, Component::m2), T) + q_sup / weight_beta;
}

double x_distance(const Trajectory& a, const Trajectory& b, double t0, double s1) {
  return composite_norms(shifted_difference(a, b, t0), s1).at("X");
}

std::vector<double> IterationReport::distances(int slab) const {
  std::vector<double> d;
  for (const auto& r : records)
    if (r.slab == slab) d.push_back(r.distance);
  return d;
}

void IterationReport::write_csv(std::ostream& os, bool wall_time) const {
  os << "slab,iteration,distance,contraction_estimate,min_rho" << (wall_time ? ",wall_seconds\n" : "\n");
  for (const auto& r : records) {
    os << r.slab << ',' << r.iteration << ',' << r.distance << ',' << r.ratio << ',' << r.min_rho;
    if (wall_time) os << ',' << r.seconds;
    os << '\n';
  }
}

double fit_contraction(const std::vector<double>& distances) {
  if (distances.empty() || !(distances.front() > 0.0)) return 0.0;
  const double floor = 1e-13 * distances.front();
  std::vector<double> y;
  for (double d : distances) {
    if (!(d > floor)) break;
    y.push_back(std::log(d));
  }
  if (y.size() < 2) return 0.0;
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    sx += k;
    sy += y[k];
    sxx += double(k) * k;
    sxy += k * y[k];
  }
  return std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

double bmo_smallness(const MildState& data, double T) {
  double s = 0.0;
  for (const SpectralField* m : {&data.m1, &data.m2}) {
    const auto [P, Q] = leray_split(*m);
    s += caloric_bmo_norm(P, T) + caloric_bmo_norm(Q, T);
  }
  return s;
}

double besov_smallness(const MildState& data, const KortewegParams& p) {
  const double h = 0.5 * data.grid().dim();
  const Primitive pr = reconstruct(data, p);
  return besov_norm(data.q, h - 1.0, kInf) + besov_norm(data.q, h, kInf) + sup_norm(data.q) +
         besov_norm(pr.u, h - 1.0, kInf);
}

namespace {

double min_density(const Trajectory& t, const KortewegParams& p) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : t.states) m = std::min(m, min_value(from_spectral(s.q), s.grid().size()) + p.rho_bar);
  return m;
}

std::vector<TimeGrid> split_slabs(const TimeGrid& grid, int slabs) {
  const int K = grid.panels();
  if (slabs < 1 || slabs > K) throw DomainError("picard_solve: slabs must be between 1 and the panel count");
  std::vector<TimeGrid> out;
  int start = 0;
  for (int s = 0; s < slabs; ++s) {
    const int stop = static_cast<int>((static_cast<long>(K) * (s + 1)) / slabs);
    std::vector<double> b(grid.breaks().begin() + start, grid.breaks().begin() + stop + 1);
    out.emplace_back(std::move(b));
    start = stop;
  }
  return out;
}

}  // namespace

std::pair<Trajectory, IterationReport> picard_solve(const MildState& data0, const KortewegParams& p,
                                                    const FixedPointConfig& cfg, const MapOptions& opt,
                                                    const TimeGrid& grid) {
  p.validate();
  data0.validate();
  if (opt.kind == MapKind::hybrid && opt.slabs != 1) throw DomainError("picard_solve: the hybrid map runs on one slab");
  MildState data{zero_nyquist(data0.q), zero_nyquist(data0.m1), zero_nyquist(data0.m2)};
  if (p.degenerate()) data.m2 = data.m1;

  IterationReport rep;
  const bool local = opt.kind == MapKind::local;
  rep.norm = local ? "E_RMT" : "X";
  const double rho0_min = min_value(from_spectral(data.q), data.grid().size()) + p.rho_bar;
  check_vacuum(rho0_min, "picard_solve");
  if (opt.kind == MapKind::global)
    rep.smallness = besov_smallness(data, p);
  else
    rep.smallness = bmo_smallness(data, grid.end() - grid.start());
  if (rep.smallness > cfg.eps1)
    throw ConstraintError("picard_solve: initial smallness " + std::to_string(rep.smallness) + " exceeds eps1 " +
                          std::to_string(cfg.eps1));

  Trajectory full;
  MildState slab_data = data;
  const auto slabs = split_slabs(grid, opt.slabs);
  rep.converged = true;
  for (int si = 0; si < static_cast<int>(slabs.size()); ++si) {
    const TimeGrid& sg = slabs[si];
    Trajectory U = free_evolution(slab_data, sg, p, opt);
    bool done = false;
    int above = 0;
    for (int k = 1; k <= cfg.max_iter; ++k) {
      const auto t_begin = std::chrono::steady_clock::now();
      Trajectory V;
      try {
        V = apply_map(U, slab_data, sg, p, opt);
      } catch (const VacuumError& e) {
        // Vacuum in an iterate ends the iteration; vacuum in the data was rejected above.
        rep.converged = false;
        rep.contraction_factor = fit_contraction(rep.distances(si));
        throw DivergenceError("picard_solve: iteration " + std::to_string(k) + " left the density range: " + e.what(),
                              rep);
      }
      const double d = local ? erm_distance(V, U, sg.start(), cfg.weight_beta) : x_distance(V, U, sg.start(), cfg.s1);
      IterationRecord r;
      r.slab = si;
      r.iteration = k;
      r.distance = d;
      const auto prev = rep.distances(si);
      r.ratio = prev.empty() || prev.back() == 0.0 ? 0.0 : d / prev.back();
      r.min_rho = min_density(V, p);
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
      rep.records.push_back(r);
      U = std::move(V);
      if (d < cfg.tol) {
        done = true;
        break;
      }
      above = r.ratio >= 1.0 ? above + 1 : 0;
      if (above >= 3) {
        rep.converged = false;
        rep.contraction_factor = fit_contraction(rep.distances(si));
        throw DivergenceError("picard_solve: distances grew for three consecutive iterations", rep);
      }
    }
    rep.converged = rep.converged && done;
    for (std::size_t j = (si == 0 ? 0 : 1); j < U.size(); ++j) {
      full.times.push_back(U.times[j]);
      full.states.push_back(U.states[j]);
    }
    slab_data = U.states.back();
  }
  double factor = 0.0;
  for (int si = 0; si < static_cast<int>(slabs.size()); ++si) factor = std::max(factor, fit_contraction(rep.distances(si)));
  rep.contraction_factor = factor;
  if (full.size() >= 3) rep.residual = residual_check(full, p).max_interior();
  return {std::move(full), std::move(rep)};
}

double ResidualReport::max_interior() const {
  double m = 0.0;
  for (const auto& [name, r] : residual)
    for (std::size_t j = 1; j + 1 < r.size(); ++j) m = std::max(m, r[j]);
  return m;
}

ResidualReport residual_check(const Trajectory& traj, const KortewegParams& p) {
  traj.validate();
  const std::size_t n = traj.size();
  if (n < 3) throw DomainError("residual_check: needs at least three time nodes");
  const auto& t = traj.times;
  auto ddt = [&](std::size_t j, auto pick) {
    std::size_t a, b, c;
    if (j == 0) a = 0, b = 1, c = 2;
    else if (j == n - 1) a = n - 3, b = n - 2, c = n - 1;
    else a = j - 1, b = j, c = j + 1;
    // Derivative at t_j of the quadratic through (t_a, t_b, t_c).
    const double ta = t[a], tb = t[b], tc = t[c], x = t[j];
    const double wa = ((x - tb) + (x - tc)) / ((ta - tb) * (ta - tc));
    const double wb = ((x - ta) + (x - tc)) / ((tb - ta) * (tb - tc));
    const double wc = ((x - ta) + (x - tb)) / ((tc - ta) * (tc - tb));
    SpectralField r = wa * pick(traj.states[a]);
    r.axpy(wb, pick(traj.states[b]));
    r.axpy(wc, pick(traj.states[c]));
    return r;
  };
  ResidualReport rep;
  rep.times = t;
  const double root = p.root();
  for (std::size_t j = 0; j < n; ++j) {
    const MildState& s = traj.states[j];
    const NonlinearTerms N = nonlinear_rhs(s, p, PressureForm::full);
    const SpectralField forcing = N.tensor + N.pressure;
    const SpectralField dq = ddt(j, [](const MildState& x) -> const SpectralField& { return x.q; });
    const SpectralField dm1 = ddt(j, [](const MildState& x) -> const SpectralField& { return x.m1; });
    const SpectralField dm2 = ddt(j, [](const MildState& x) -> const SpectralField& { return x.m2; });
    const SpectralField lap_q = laplacian(s.q);

    SpectralField mass1 = dq - p.c1() * lap_q + divergence(s.m1);
    SpectralField mass2 = dq - p.c2() * lap_q + divergence(s.m2);
    SpectralField mom1 = dm1 - p.mu * laplacian(s.m1) - root * gradient(divergence(s.m1)) + forcing;
    SpectralField mom2 = dm2 - p.mu * laplacian(s.m2) + root * gradient(divergence(s.m2)) + forcing;
    rep.residual["mass1"].push_back(l2_norm(zero_nyquist(mass1)));
    rep.residual["mass2"].push_back(l2_norm(zero_nyquist(mass2)));
    rep.residual["momentum1"].push_back(l2_norm(zero_nyquist(mom1)));
    rep.residual["momentum2"].push_back(l2_norm(zero_nyquist(mom2)));
  }
  return rep;
}

}  // namespace kw
