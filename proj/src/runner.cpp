#include "kw/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "kw/decay.hpp"
#include "kw/errors.hpp"
#include "kw/experiments.hpp"
#include "kw/norms.hpp"
#include "kw/snapshot.hpp"

#ifndef KW_VERSION
#define KW_VERSION "unknown"
#endif

namespace kw {

namespace {

namespace fs = std::filesystem;

// CSV streams share one fixed format so reruns are byte-identical.
std::ostringstream csv() {
  std::ostringstream os;
  os.precision(12);
  return os;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

struct Outputs {
  fs::path dir;
  void write(const std::string& name, const std::string& text) const { write_file(dir / name, text); }
  void snapshot(const std::string& name, const SpectralField& f) const { write_snapshot((dir / name).string(), f); }
};

FixedPointConfig fixed_point(const RunConfig& cfg) {
  FixedPointConfig fp;
  fp.tol = cfg.tol;
  fp.max_iter = cfg.max_iter;
  fp.s1 = cfg.s1;
  fp.T = cfg.T;
  return fp;
}

MapOptions map_options(const RunConfig& cfg) {
  MapOptions opt;
  opt.kind = cfg.map;
  opt.pairing = cfg.psi2_pairing;
  opt.T_split = cfg.T_split;
  opt.slabs = cfg.slabs;
  return opt;
}

TimeGrid time_grid(const RunConfig& cfg) { return TimeGrid::graded(cfg.start_time(), cfg.T, cfg.nodes); }

void write_iterations(const Outputs& out, const IterationReport& rep) {
  auto os = csv();
  rep.write_csv(os, false);
  out.write("iterations.csv", os.str());
  // Wall times stay out of the CSVs.
  std::ostringstream t;
  t << "slab iteration wall_seconds\n";
  for (const auto& r : rep.records) t << r.slab << ' ' << r.iteration << ' ' << r.seconds << '\n';
  out.write("timing.txt", t.str());
}

void write_summary(const Outputs& out, const IterationReport& rep) {
  auto os = csv();
  os << "iterations,converged,contraction_factor,residual,smallness\n"
     << rep.records.size() << ',' << (rep.converged ? 1 : 0) << ',' << rep.contraction_factor << ','
     << rep.residual << ',' << rep.smallness << '\n';
  out.write("summary.csv", os.str());
}

void write_residual(const Outputs& out, const Trajectory& traj, const KortewegParams& p) {
  if (traj.size() < 3) return;
  const ResidualReport r = residual_check(traj, p);
  auto os = csv();
  os << "t,mass1,mass2,momentum1,momentum2\n";
  for (std::size_t j = 0; j < r.times.size(); ++j)
    os << r.times[j] << ',' << r.residual.at("mass1")[j] << ',' << r.residual.at("mass2")[j] << ','
       << r.residual.at("momentum1")[j] << ',' << r.residual.at("momentum2")[j] << '\n';
  out.write("residual.csv", os.str());
}

void write_states(const Outputs& out, const Trajectory& traj) {
  for (std::size_t j : {std::size_t{0}, traj.size() - 1}) {
    const std::string tag = j == 0 ? "initial" : "final";
    out.snapshot("q_" + tag + ".kwf", traj.states[j].q);
    out.snapshot("m1_" + tag + ".kwf", traj.states[j].m1);
    out.snapshot("m2_" + tag + ".kwf", traj.states[j].m2);
  }
}

int cmd_solve(const RunConfig& cfg, const Outputs& out, std::ostream& log) {
  const KortewegParams p = cfg.params();
  const auto [traj, rep] = picard_solve(scenario_data(cfg), p, fixed_point(cfg), map_options(cfg), time_grid(cfg));
  write_iterations(out, rep);
  write_summary(out, rep);
  write_residual(out, traj, p);
  write_states(out, traj);
  log << "solve: " << rep.records.size() << " iterations, converged " << rep.converged << ", factor "
      << rep.contraction_factor << ", residual " << rep.residual << '\n';
  return rep.converged ? kExitOk : kExitDivergence;
}

int cmd_norms(const RunConfig& cfg, const Outputs& out, std::ostream& log) {
  const KortewegParams p = cfg.params();
  const MildState data = scenario_data(cfg);
  auto os = csv();
  write_csv_header(os);
  NormReport d;
  d.values["data.bmo_sum"] = bmo_smallness(data, cfg.T);
  d.values["data.besov"] = besov_smallness(data, p);
  write_csv(os, d, cfg.T, 0);
  TimeGrid grid = time_grid(cfg);
  for (int level = 0; level < 2; ++level, grid = grid.refined()) {
    const auto [traj, rep] = picard_solve(data, p, fixed_point(cfg), map_options(cfg), grid);
    if (level == 0) write_iterations(out, rep);
    write_csv(os, composite_norms(traj, cfg.s1), cfg.T, level);
  }
  out.write("norms.csv", os.str());
  log << "norms: data bmo sum " << d.values["data.bmo_sum"] << '\n';
  return kExitOk;
}

int cmd_semigroup(const RunConfig& cfg, const Outputs& out, std::ostream& log) {
  const TorusGrid g = cfg.grid();
  const KortewegParams p = cfg.params();
  const int l_min = std::max(0, static_cast<int>(std::ceil(std::log2(g.xi_min()))));
  const int l_max = static_cast<int>(std::floor(std::log2(g.xi_max())));
  auto table = csv(), samples = csv();
  table << "system,block,C,kappa\n";
  samples << "system,block,t,ratio\n";
  bool all_positive = true;
  for (int s = 1; s <= 2; ++s) {
    const LinearParams lp = s == 1 ? system1(p) : system2(p, cfg.psi2_pairing);
    const BlockDecayReport r = block_decay(g, lp, l_min, l_max, 12, cfg.seed);
    for (const auto& [l, b] : r.per_block) {
      table << s << ',' << l << ',' << b.C << ',' << b.kappa << '\n';
      all_positive = all_positive && b.kappa > 0.0;
    }
    table << s << ",pooled," << r.pooled.C << ',' << r.pooled.kappa << '\n';
    for (const auto& x : r.samples) samples << s << ',' << x.block << ',' << x.t << ',' << x.ratio << '\n';
  }
  out.write("semigroup.csv", table.str());
  out.write("semigroup_samples.csv", samples.str());
  log << "semigroup-test: blocks " << l_min << ".." << l_max << ", all kappa > 0: " << all_positive << '\n';
  return kExitOk;
}

int cmd_oseen(const RunConfig& cfg, const Outputs& out, std::ostream& log) {
  const KortewegParams p = cfg.params();
  auto os = csv();
  os << "alpha,curl_error,density_deviation,iterations\n";
  std::vector<OseenRun> runs;
  for (double a : {cfg.alpha, 0.5 * cfg.alpha}) {
    runs.push_back(oseen_run(OseenSpec{a, cfg.t0, {}}, p, cfg.grid(), cfg.T, cfg.nodes, fixed_point(cfg),
                             map_options(cfg)));
    os << a << ',' << runs.back().curl_error << ',' << runs.back().density_deviation << ','
       << runs.back().report.records.size() << '\n';
  }
  out.write("oseen.csv", os.str());
  auto ratio = csv();
  ratio << "quantity,value\n"
        << "curl_error_ratio," << runs[0].curl_error / runs[1].curl_error << '\n'
        << "density_ratio," << runs[0].density_deviation / runs[1].density_deviation << '\n';
  out.write("oseen_ratio.csv", ratio.str());
  log << "oseen-compare: curl error ratio " << runs[0].curl_error / runs[1].curl_error << '\n';
  return kExitOk;
}

int cmd_shock(const RunConfig& cfg, const Outputs& out, std::ostream& log) {
  const TorusGrid g = cfg.grid();
  const ShockRun r = shock_run(g, cfg.params(), cfg.rho_left, cfg.rho_right, cfg.shock_width, cfg.T, cfg.nodes,
                               fixed_point(cfg), map_options(cfg));
  auto os = csv();
  os << "t,grad_rho_sup,sqrt_t_grad_rho_sup\n";
  for (std::size_t j = 0; j < r.times.size(); ++j)
    os << r.times[j] << ',' << r.grad_sup[j] << ',' << std::sqrt(r.times[j]) * r.grad_sup[j] << '\n';
  out.write("shock.csv", os.str());
  write_iterations(out, r.report);
  // Window: t >= 4 h^2, where the jump has spread over a few cells.
  const RegularizationSummary s = summarize(r, 4.0 * g.h() * g.h());
  auto sum = csv();
  sum << "quantity,value\n"
      << "weighted_sup," << s.weighted_sup << '\n'
      << "weighted_ratio," << s.weighted_ratio << '\n'
      << "unweighted_ratio," << s.unweighted_ratio << '\n'
      << "decades," << s.decades << '\n';
  out.write("shock_summary.csv", sum.str());
  log << "shock-test: sqrt(t) sup ratio " << s.weighted_ratio << ", unweighted ratio " << s.unweighted_ratio << '\n';
  return kExitOk;
}

int cmd_scaling(const RunConfig& cfg, const Outputs& out, std::ostream& log) {
  const RunSetup base{cfg.grid(), cfg.params(), cfg.T, 1.0};
  const TwinComparison c =
      scaling_twin_check(base, scenario_data(cfg), cfg.lambda, cfg.nodes, fixed_point(cfg), map_options(cfg));
  auto os = csv();
  os << "variant,relative_l2\n"
     << "same_box," << c.same_box << '\n';
  if (c.replicated >= 0.0) os << "replicated," << c.replicated << '\n';
  out.write("scaling.csv", os.str());
  log << "scaling-test: same-box discrepancy " << c.same_box << '\n';
  return kExitOk;
}

int cmd_decay(const RunConfig& cfg, const Outputs& out, std::ostream& log) {
  const TorusGrid g = cfg.grid();
  const LinearParams lp = system1(cfg.params());
  const auto times = resolved_decay_times(g, lp, 20);
  const auto values = decay_curve(power_law_state(g, cfg.decay_s, cfg.seed), lp, cfg.decay_s1, times);
  const DecayFit f = fit_decay(times, values);
  auto os = csv();
  os << "t,value\n";
  for (std::size_t j = 0; j < times.size(); ++j) os << times[j] << ',' << values[j] << '\n';
  out.write("decay.csv", os.str());
  auto fit = csv();
  fit << "s,s1,exponent,expected,prefactor,r_squared\n"
      << cfg.decay_s << ',' << cfg.decay_s1 << ',' << f.exponent << ',' << 0.5 * (cfg.decay_s1 - cfg.decay_s) << ','
      << f.prefactor << ',' << f.r_squared << '\n';
  out.write("decay_fit.csv", fit.str());
  log << "decay-fit: exponent " << f.exponent << " (expected " << 0.5 * (cfg.decay_s1 - cfg.decay_s) << ")\n";
  return kExitOk;
}

}  // namespace

const char* code_version() { return KW_VERSION; }

std::string manifest_text(const RunConfig& cfg) {
  std::ostringstream os;
  os << "# code_version " << code_version() << "\n# seed " << cfg.seed << "\n" << to_text(cfg);
  return os.str();
}

MildState scenario_data(const RunConfig& cfg) {
  const TorusGrid g = cfg.grid();
  const KortewegParams p = cfg.params();
  const int d = g.dim();
  const double k = 2.0 * M_PI / g.side_length(), a = cfg.amplitude;
  SpectralField rho, u(g, d);
  switch (cfg.scenario) {
    case Scenario::equilibrium:
      rho = to_spectral(g, 1, std::vector<double>(g.size(), p.rho_bar + a));
      break;
    case Scenario::smooth:
      rho = to_spectral(g, 1, sample(g, 1, [&](const double* x, int) {
                          double s = 0.0;
                          for (int i = 0; i < d; ++i) s += x[i];
                          return p.rho_bar + a * (std::cos(k * x[0]) + 0.5 * std::sin(k * s));
                        }));
      u = to_spectral(g, d, sample(g, d, [&](const double* x, int c) {
                        const int o = (c + 1) % d;
                        return a * (std::sin(k * x[o]) + 0.3 * std::cos(k * (x[c] - 2.0 * x[o])));
                      }));
      break;
    case Scenario::random: {
      std::mt19937_64 rng(cfg.seed);
      // Smooth random fields: Gaussian envelope over the first few box wavenumbers.
      auto env = [k](double xi) { return std::exp(-0.125 * (xi / k) * (xi / k)); };
      const SpectralField r = random_field(g, 1, rng, env);
      const SpectralField v = random_field(g, d, rng, env);
      rho = (a / sup_norm(r)) * r;
      rho.at(0, 0) += p.rho_bar;
      u = (a / sup_norm(v)) * v;
      break;
    }
    case Scenario::shock:
      rho = shock_density(g, cfg.rho_left, cfg.rho_right, cfg.shock_width);
      break;
    case Scenario::oseen:
    case Scenario::combined: {
      const OseenSpec spec{cfg.alpha, cfg.t0, {}};
      rho = to_spectral(g, 1, std::vector<double>(g.size(), p.rho_bar));
      u = cfg.scenario == Scenario::oseen ? oseen_fields(spec, g).velocity
                                          : combined_vortex(spec, cfg.alpha1, g, cfg.radial_component);
      break;
    }
  }
  return effective_momenta(rho, u, p);
}

int run(const RunConfig& cfg, std::ostream& log) {
  const Outputs out{fs::path(cfg.output)};
  try {
    std::error_code ec;
    fs::create_directories(out.dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.output + ": " + ec.message());
    out.write("manifest.txt", manifest_text(cfg));
    switch (cfg.command) {
      case Command::solve: return cmd_solve(cfg, out, log);
      case Command::norms: return cmd_norms(cfg, out, log);
      case Command::semigroup_test: return cmd_semigroup(cfg, out, log);
      case Command::oseen_compare: return cmd_oseen(cfg, out, log);
      case Command::shock_test: return cmd_shock(cfg, out, log);
      case Command::scaling_test: return cmd_scaling(cfg, out, log);
      case Command::decay_fit: return cmd_decay(cfg, out, log);
    }
    return kExitRuntime;
  } catch (const DivergenceError& e) {
    log << "divergence: " << e.what() << '\n';
    try {
      write_iterations(out, e.report());
      write_summary(out, e.report());
    } catch (const IoError& io) {
      log << "I/O error: " << io.what() << '\n';
      return kExitIo;
    }
    return kExitDivergence;
  } catch (const IoError& e) {
    log << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace kw
