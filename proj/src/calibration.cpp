#include "kw/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kw/errors.hpp"
#include "kw/norms.hpp"

namespace kw {

double MeasuredConstants::C1() const { return std::max({linear, bilinear, pressure}); }

namespace {

// Node values on a grid starting at 0; node 0 becomes the t = 0 value.
FieldSeries node_series(const TimeGrid& tg, const std::vector<SpectralField>& f) {
  FieldSeries s;
  s.initial = f.front();
  for (std::size_t j = 1; j < f.size(); ++j) {
    s.times.push_back(tg.nodes()[j]);
    s.fields.push_back(f[j]);
  }
  return s;
}

std::vector<SpectralField> heat_path(const TimeGrid& tg, const SpectralField& w0, double coeff) {
  std::vector<SpectralField> out;
  for (double t : tg.nodes()) out.push_back(heat_propagate(w0, t, coeff));
  return out;
}

// Symmetric product v (x) w + w (x) v, halved, then its divergence; 2/3-dealiased.
SpectralField div_product(const SpectralField& v, const SpectralField& w) {
  const TorusGrid& g = v.grid();
  const int d = g.dim();
  const std::size_t n = g.size();
  const auto a = from_spectral(dealias(v));
  const auto b = from_spectral(dealias(w));
  SpectralField out(g, d);
  std::vector<double> S(n);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      for (std::size_t j = 0; j < n; ++j) S[j] = 0.5 * (a[i * n + j] * b[k * n + j] + b[i * n + j] * a[k * n + j]);
      out.set_component(k, out.component(k) + partial(dealias(to_spectral(g, 1, S)), i));
    }
  return out;
}

// Random real field drawn mode by mode over the lattice box |k_i| <= K in a fixed order, so
// the same seed gives the same field on every grid that resolves the box.
SpectralField lattice_random_field(const TorusGrid& g, int components, std::mt19937_64& rng, double kc, int K) {
  const int d = g.dim(), n = g.n();
  std::normal_distribution<double> nd(0.0, 1.0);
  SpectralField f(g, components);
  const double dk = 2.0 * M_PI / g.side_length();
  std::vector<int> k(d, -K);
  auto index = [&](const std::vector<int>& kk) {
    std::size_t j = 0;
    for (int a = 0; a < d; ++a) j = j * n + static_cast<std::size_t>((kk[a] % n + n) % n);
    return j;
  };
  for (;;) {
    int first = 0;
    for (int a = 0; a < d && first == 0; ++a) first = k[a];
    if (first > 0) {
      double k2 = 0.0;
      for (int v : k) k2 += double(v) * v;
      const double amp = std::exp(-k2 * dk * dk / (kc * kc));
      bool fits = true;
      for (int v : k) fits = fits && 2 * std::abs(v) < n;
      std::vector<int> neg(k);
      for (auto& v : neg) v = -v;
      for (int c = 0; c < components; ++c) {
        const cplx z(amp * nd(rng), amp * nd(rng));
        if (!fits) continue;
        f.at(c, index(k)) = z;
        f.at(c, index(neg)) = std::conj(z);
      }
    }
    int a = d - 1;
    while (a >= 0 && k[a] == K) k[a--] = -K;
    if (a < 0) break;
    ++k[a];
  }
  return f;
}

double linf_linf(const std::vector<SpectralField>& f) {
  double m = 0.0;
  for (const auto& x : f) m = std::max(m, sup_norm(x));
  return m;
}

}  // namespace

MeasuredConstants measure_constants(const TorusGrid& grid, const KortewegParams& p, const CalibrationOptions& opt) {
  p.validate();
  if (opt.samples < 1) throw DomainError("measure_constants: need at least one sample");
  const TimeGrid tg = TimeGrid::graded(0.0, opt.T, opt.panels);
  const double T = opt.T;
  std::mt19937_64 rng(opt.seed);
  const double kc = opt.envelope * 2.0 * M_PI / grid.side_length();
  const int K = static_cast<int>(std::ceil(3.0 * opt.envelope));
  const double coeffs[3] = {p.mu, p.c1(), p.c2()};

  MeasuredConstants out;
  for (int s = 0; s < opt.samples; ++s) {
    const SpectralField w0 = lattice_random_field(grid, grid.dim(), rng, kc, K);
    const SpectralField z0 = lattice_random_field(grid, grid.dim(), rng, kc, K);
    const SpectralField pi0 = lattice_random_field(grid, 1, rng, kc, K);
    const auto [Pw, Qw] = leray_split(w0);

    // Heat-flow trajectories with finite E_T norm serve as the generic m, v, w.
    const auto m = heat_path(tg, w0, 1.0);
    const auto z = heat_path(tg, z0, 1.0);
    const auto pi = heat_path(tg, pi0, 1.0);
    const double Em = et_norm(node_series(tg, m), T);
    const double Ez = et_norm(node_series(tg, z), T);

    std::vector<SpectralField> div_m, bil, grad_pi;
    for (std::size_t j = 0; j < m.size(); ++j) {
      div_m.push_back(divergence(m[j]));
      bil.push_back(div_product(m[j], z[j]));
      grad_pi.push_back(gradient(pi[j]));
    }
    out.C = std::max(out.C, linf_linf(heat_duhamel(tg, div_m, p.c1())) / Em);

    for (double c : coeffs) {
      for (const SpectralField* part : {&Pw, &Qw}) {
        const double b = caloric_bmo_norm(*part, T);
        if (b > 0.0) out.linear = std::max(out.linear, et_norm(node_series(tg, heat_path(tg, *part, c)), T) / b);
      }
      auto D = heat_duhamel(tg, bil, c);
      std::vector<SpectralField> Pd, Qd;
      for (auto& x : D) {
        auto [P, Q] = leray_split(x);
        Pd.push_back(std::move(P));
        Qd.push_back(std::move(Q));
      }
      out.bilinear = std::max({out.bilinear, et_norm(node_series(tg, Pd), T) / (Em * Ez),
                               et_norm(node_series(tg, Qd), T) / (Em * Ez)});
      out.pressure =
          std::max(out.pressure, et_norm(node_series(tg, heat_duhamel(tg, grad_pi, c)), T) / (T * linf_linf(pi)));
    }
  }
  return out;
}

Admissibility admissible_config(const MildState& data, const KortewegParams& p, const MeasuredConstants& k,
                                double T_max, int max_halvings) {
  p.validate();
  data.validate();
  if (!(T_max > 0.0)) throw DomainError("admissible_config: T_max must be positive");
  Admissibility a;
  SpectralField rho = data.q;
  rho.at(0, 0) += p.rho_bar;
  const auto r = from_spectral(rho);
  a.rho_min = *std::min_element(r.begin(), r.end());
  a.rho_sup = 0.0;
  for (double v : r) a.rho_sup = std::max(a.rho_sup, std::abs(v));
  if (!(a.rho_min > 0.0)) throw VacuumError("admissible_config: data reach vacuum", a.rho_min);

  const double c = a.rho_min;
  const double M = 2.0 / c;
  // P and P' are increasing for gamma >= 1, so the sups sit at the right end.
  a.M1 = p.pressure(2.0 * a.rho_sup);
  a.M2 = p.pressure_derivative(2.0 * a.rho_sup);
  const double C1 = k.C1();
  const double Cc = std::max(k.C, C1);
  a.R_adm = std::min({std::min(0.5 * c, a.rho_sup) / (2.0 * k.C), c / (16.0 * C1), 1.0 / (3.0 * M * Cc)});

  // One profile per part at T_max, deep enough to serve every halving.
  BallSampling deep;
  deep.octaves += max_halvings;
  std::vector<std::vector<std::pair<double, double>>> profiles;
  for (const SpectralField* m : {&data.m1, &data.m2}) {
    const auto [P, Q] = leray_split(*m);
    profiles.push_back(caloric_bmo_profile(P, T_max, deep));
    profiles.push_back(caloric_bmo_profile(Q, T_max, deep));
  }
  const BallSampling standard;
  auto bmo_sum_at = [&](double T) {
    const double lo = std::ldexp(T, -standard.octaves) * (1.0 - 1e-12), hi = T * (1.0 + 1e-12);
    double sum = 0.0;
    for (const auto& prof : profiles) {
      double sup = 0.0;
      for (const auto& [t, v] : prof)
        if (t >= lo && t <= hi) sup = std::max(sup, v);
      sum += std::sqrt(sup);
    }
    return sum;
  };

  double T = T_max;
  for (int h = 0; h <= max_halvings; ++h, T *= 0.5) {
    a.bmo_sum = bmo_sum_at(T);
    a.R_data = 4.0 * C1 * a.bmo_sum;
    const double R = a.R_data;
    const double root = std::sqrt(M * M * R * R + a.M2 * T);
    a.contraction = Cc * (M * R + 2.0 * root);
    a.config.R = R;
    a.config.R1 = R;
    a.config.T = T;
    a.config.M = M;
    a.config.weight_beta = 1.0 / root;
    a.violations.clear();
    if (R > a.R_adm) a.violations.push_back("data radius exceeds the admissible radius");
    // Zero momentum data need no horizon bound.
    if (R > 0.0 && T > R / (4.0 * C1 * a.M1)) a.violations.push_back("horizon exceeds R / (4 C1 M1)");
    if (!(a.contraction < 1.0)) a.violations.push_back("contraction condition fails");
    a.admissible = a.violations.empty();
    if (a.admissible) break;
  }
  return a;
}

}  // namespace kw
