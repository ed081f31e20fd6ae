#include "kw/norms.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "kw/errors.hpp"
#include "kw/semigroup.hpp"

namespace kw {

namespace {

double ell_r(const std::map<int, double>& weighted, double r) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (const auto& [l, v] : weighted) m = std::max(m, v);
    return m;
  }
  if (!(r >= 1.0)) throw DomainError("ell^r: r must be in [1, inf]");
  double s = 0.0;
  for (const auto& [l, v] : weighted) s += std::pow(v, r);
  return std::pow(s, 1.0 / r);
}

std::map<int, double> weight(const std::map<int, double>& profile, double s) {
  std::map<int, double> out;
  for (const auto& [l, v] : profile) out[l] = std::exp2(l * s) * v;
  return out;
}

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Zero-padded grid with 2n points per axis: products of two fields from the n grid are
// represented exactly there, so ball integrals of |u|^2 carry no aliasing.
struct Padded {
  TorusGrid small;
  TorusGrid big;
  std::vector<std::size_t> slot;  // small mode -> big mode; npos for Nyquist
  std::vector<double> ball;       // ball transform cache, per big mode
  double ball_r = -1.0;
  std::vector<cplx> buf, spec;

  explicit Padded(const TorusGrid& g) : small(g), big(g.dim(), g.side_length(), 2 * g.n()), slot(g.size()) {
    const std::size_t nb = static_cast<std::size_t>(big.n());
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g.nyquist(j)) {
        slot[j] = static_cast<std::size_t>(-1);
        continue;
      }
      std::size_t idx = 0;
      for (int a = 0; a < g.dim(); ++a) {
        const long k = g.k(j, a);
        idx = idx * nb + static_cast<std::size_t>((k + static_cast<long>(nb)) % static_cast<long>(nb));
      }
      slot[j] = idx;
    }
    buf.resize(big.size());
    spec.resize(big.size());
  }

  // Samples of one component on the big grid, appended to out.
  void samples(const SpectralField& f, std::vector<double>& out) {
    for (int c = 0; c < f.components(); ++c) {
      std::fill(spec.begin(), spec.end(), cplx(0.0));
      const cplx* d = f.data(c);
      for (std::size_t j = 0; j < slot.size(); ++j)
        if (slot[j] != static_cast<std::size_t>(-1)) spec[slot[j]] = d[j];
      fft_inverse(big, spec.data(), buf.data());
      for (std::size_t i = 0; i < big.size(); ++i) out.push_back(buf[i].real());
    }
  }

  // max over the center lattice of int_{B(x, r)} G.
  double ball_max(const std::vector<double>& G, double r, int stride) {
    for (std::size_t i = 0; i < big.size(); ++i) buf[i] = cplx(G[i], 0.0);
    fft_forward(big, buf.data(), spec.data());
    if (r != ball_r) {
      ball.resize(big.size());
      for (std::size_t i = 0; i < big.size(); ++i) ball[i] = ball_transform(big.dim(), r, std::sqrt(big.xi_sq(i)));
      ball_r = r;
    }
    for (std::size_t i = 0; i < big.size(); ++i) spec[i] *= ball[i];
    fft_inverse(big, spec.data(), buf.data());

    const int dim = big.dim();
    const std::size_t nb = static_cast<std::size_t>(big.n());
    const int per_axis = (big.n() + stride - 1) / stride;
    std::size_t count = 1;
    for (int a = 0; a < dim; ++a) count *= static_cast<std::size_t>(per_axis);
    double m = -kInf;
    for (std::size_t c = 0; c < count; ++c) {
      std::size_t rem = c, idx = 0, mul = 1;
      for (int a = dim - 1; a >= 0; --a) {
        const std::size_t ia = (rem % per_axis) * static_cast<std::size_t>(stride);
        rem /= per_axis;
        idx += ia * mul;
        mul *= nb;
      }
      m = std::max(m, buf[idx].real());
    }
    return m;
  }
};

void check_ball_fits(const TorusGrid& g, double T, const char* where) {
  if (!(T > 0.0)) throw DomainError(std::string(where) + ": horizon must be positive");
  if (std::sqrt(T) >= 0.5 * g.side_length())
    throw DomainError(std::string(where) + ": ball radius sqrt(T) must stay below L/2");
}

std::vector<double> target_times(double T, const BallSampling& bs) {
  std::vector<double> t;
  const int J = bs.octaves * bs.per_octave;
  for (int j = J; j >= 0; --j) t.push_back(T * std::exp2(-static_cast<double>(j) / bs.per_octave));
  return t;  // ascending
}

int effective_stride(const TorusGrid& g, const BallSampling& bs) {
  return std::clamp(bs.center_stride, 1, 2 * g.n());
}

double carleson_value(Padded& P, const std::vector<double>& G, double t, int stride) {
  const double v = P.ball_max(G, std::sqrt(t), stride) * std::pow(t, -0.5 * P.small.dim());
  return std::max(v, 0.0);
}

}  // namespace

void FieldSeries::validate() const {
  if (times.empty() || times.size() != fields.size()) throw ShapeError("FieldSeries: times and fields must match");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw DomainError("FieldSeries: sample times must be positive");
    if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("FieldSeries: times must increase strictly");
    require_same_grid(fields[i], fields.front(), "FieldSeries");
  }
  if (initial) require_same_grid(*initial, fields.front(), "FieldSeries");
}

FieldSeries series(const Trajectory& traj, Component c) {
  traj.validate();
  auto pick = [c](const MildState& s) -> const SpectralField& {
    return c == Component::q ? s.q : (c == Component::m1 ? s.m1 : s.m2);
  };
  FieldSeries out;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] == 0.0) {
      out.initial = pick(traj.states[i]);
      continue;
    }
    out.times.push_back(traj.times[i]);
    out.fields.push_back(pick(traj.states[i]));
  }
  if (out.times.empty()) throw DomainError("series: trajectory has no positive sample time");
  return out;
}

BallSampling BallSampling::refined() const {
  BallSampling r = *this;
  r.center_stride = std::max(1, center_stride / 2);
  r.per_octave = 2 * per_octave;
  r.gauss_points = 2 * gauss_points;
  return r;
}

double besov_norm(const SpectralField& f, double s, double r, const DyadicDecomposition& dec) {
  return ell_r(weight(dyadic_profile(f, dec), s), r);
}

double besov_norm(const SpectralField& f, double s, double r) {
  return besov_norm(f, s, r, DyadicDecomposition::for_grid(f.grid()));
}

double hybrid_besov_norm(const SpectralField& f, double s_low, double s_high, int l0) {
  double m = 0.0;
  for (const auto& [l, v] : dyadic_profile(f)) m = std::max(m, std::exp2(l * (l <= l0 ? s_low : s_high)) * v);
  return m;
}

std::map<int, double> chemin_lerner_profile(const FieldSeries& u, double rho_exp) {
  u.validate();
  const auto dec = DyadicDecomposition::for_grid(u.grid());
  // Nodes in time including t = 0 (initial value or constant extension of the first sample).
  std::vector<double> t{0.0};
  std::vector<std::map<int, double>> g;
  g.push_back(dyadic_profile(u.initial ? *u.initial : u.fields.front(), dec));
  for (std::size_t i = 0; i < u.times.size(); ++i) {
    t.push_back(u.times[i]);
    g.push_back(dyadic_profile(u.fields[i], dec));
  }
  const bool inf = std::isinf(rho_exp);
  if (!inf) {
    if (!(rho_exp >= 1.0)) throw DomainError("chemin_lerner: rho must be in [1, inf]");
    if (u.times.size() + (u.initial ? 1 : 0) < 2)
      throw DomainError("chemin_lerner: a single time sample gives a degenerate quadrature");
  }
  std::map<int, double> out;
  for (int l = dec.l_min(); l <= dec.l_max(); ++l) {
    double acc = 0.0;
    if (inf) {
      for (const auto& m : g) acc = std::max(acc, m.at(l));
    } else {
      for (std::size_t i = 1; i < t.size(); ++i)
        acc += 0.5 * (t[i] - t[i - 1]) * (std::pow(g[i - 1].at(l), rho_exp) + std::pow(g[i].at(l), rho_exp));
      acc = std::pow(acc, 1.0 / rho_exp);
    }
    out[l] = acc;
  }
  return out;
}

double chemin_lerner_norm(const FieldSeries& u, double rho_exp, double s, double r) {
  return ell_r(weight(chemin_lerner_profile(u, rho_exp), s), r);
}

double ball_transform(int dim, double r, double xi_abs) {
  const double z = r * xi_abs;
  switch (dim) {
    case 1:
      return z < 1e-4 ? 2.0 * r * (1.0 - z * z / 6.0) : 2.0 * std::sin(z) / xi_abs;
    case 2:
      return z < 1e-4 ? M_PI * r * r * (1.0 - z * z / 8.0)
                      : 2.0 * M_PI * r * std::cyl_bessel_j(1.0, z) / xi_abs;
    case 3:
      return z < 1e-2 ? 4.0 * M_PI * r * r * r / 3.0 * (1.0 - z * z / 10.0 + z * z * z * z / 280.0)
                      : 4.0 * M_PI * (std::sin(z) - z * std::cos(z)) / (xi_abs * xi_abs * xi_abs);
    default:
      throw DomainError("ball_transform: dimension must be 1, 2 or 3");
  }
}

std::vector<std::pair<double, double>> caloric_bmo_profile(const SpectralField& w0, double T,
                                                           const BallSampling& bs) {
  const TorusGrid& g = w0.grid();
  check_ball_fits(g, T, "caloric_bmo_norm");
  const auto targets = target_times(T, bs);
  const int stride = effective_stride(g, bs);

  // Below s_min every retained mode satisfies s |xi|^2 <= 0.05, so one panel suffices there;
  // between s_min and the smallest target the panels double in length.
  const double x_max = g.xi_max() * g.xi_max();
  const double s_min = std::min(targets.front(), 0.05 / x_max);
  std::vector<double> breaks{0.0};
  {
    std::vector<double> below;
    for (double b = targets.front() / 2.0; b > s_min; b /= 2.0) below.push_back(b);
    breaks.push_back(s_min);
    for (auto it = below.rbegin(); it != below.rend(); ++it) breaks.push_back(*it);
    for (double t : targets)
      if (t > breaks.back()) breaks.push_back(t);
  }

  std::vector<double> gx, gw;
  gauss_legendre(bs.gauss_points, gx, gw);
  Padded P(g);
  std::vector<double> G(P.big.size(), 0.0), phys;
  std::vector<std::pair<double, double>> out;
  std::size_t next = 0;
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    const double a = breaks[i - 1], b = breaks[i];
    for (int q = 0; q < bs.gauss_points; ++q) {
      const double s = 0.5 * (a + b) + 0.5 * (b - a) * gx[q];
      const double w = 0.5 * (b - a) * gw[q];
      phys.clear();
      P.samples(heat_propagate(w0, s, 1.0), phys);
      for (int c = 0; c < w0.components(); ++c)
        for (std::size_t k = 0; k < P.big.size(); ++k) {
          const double v = phys[c * P.big.size() + k];
          G[k] += w * v * v;
        }
    }
    while (next < targets.size() && targets[next] <= b) {
      if (targets[next] == b) out.emplace_back(b, carleson_value(P, G, b, stride));
      ++next;
    }
  }
  return out;
}

double caloric_bmo_norm(const SpectralField& w0, double T, const BallSampling& bs) {
  double sup = 0.0;
  for (const auto& [t, v] : caloric_bmo_profile(w0, T, bs)) sup = std::max(sup, v);
  return std::sqrt(sup);
}

EtParts et_norm_parts(const FieldSeries& u, double T, const BallSampling& bs) {
  u.validate();
  const TorusGrid& g = u.grid();
  check_ball_fits(g, T, "et_norm");
  const int stride = effective_stride(g, bs);
  const int nc = u.fields.front().components();

  EtParts out;
  std::vector<double> targets;
  for (double t : target_times(T, bs))
    if (t <= u.times.back() * (1.0 + 1e-12)) targets.push_back(std::min(t, u.times.back()));

  Padded P(g);
  const std::size_t nb = P.big.size();
  std::vector<double> a, b, G(nb, 0.0), part(nb);
  P.samples(u.initial ? *u.initial : u.fields.front(), a);
  double t_prev = 0.0, sup = 0.0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < u.times.size(); ++i) {
    const double t = u.times[i];
    if (t <= T * (1.0 + 1e-12)) out.sup_part = std::max(out.sup_part, std::sqrt(t) * sup_norm(u.fields[i]));
    if (next >= targets.size()) continue;
    b.clear();
    P.samples(u.fields[i], b);
    const double h = t - t_prev;
    // int_0^{lam h} |a + (s/h)(b - a)|^2 ds, exact for the linear interpolant.
    auto accumulate = [&](double lam, std::vector<double>& dst) {
      for (std::size_t k = 0; k < nb; ++k) {
        double aa = 0.0, ad = 0.0, dd = 0.0;
        for (int c = 0; c < nc; ++c) {
          const double av = a[c * nb + k], dv = b[c * nb + k] - av;
          aa += av * av;
          ad += av * dv;
          dd += dv * dv;
        }
        dst[k] = G[k] + h * (lam * aa + lam * lam * ad + lam * lam * lam / 3.0 * dd);
      }
    };
    while (next < targets.size() && targets[next] <= t) {
      accumulate((targets[next] - t_prev) / h, part);
      sup = std::max(sup, carleson_value(P, part, targets[next], stride));
      ++next;
    }
    accumulate(1.0, part);
    G.swap(part);
    a.swap(b);
    t_prev = t;
  }
  out.carleson_part = std::sqrt(sup);
  return out;
}

double et_norm(const FieldSeries& u, double T, const BallSampling& bs) { return et_norm_parts(u, T, bs).total(); }

double NormReport::at(const std::string& id) const {
  auto it = values.find(id);
  if (it == values.end()) throw DomainError("NormReport: no entry " + id);
  return it->second;
}

NormReport composite_norms(const Trajectory& traj, double s1) {
  traj.validate();
  NormReport rep;
  const double h = 0.5 * traj.grid().dim();
  if (!(s1 > 0.75 && s1 < 1.0)) rep.flags.push_back("s1 outside (3/4, 1)");

  const FieldSeries q = series(traj, Component::q);
  const FieldSeries m1 = series(traj, Component::m1);
  const FieldSeries m2 = series(traj, Component::m2);

  const auto q_inf = chemin_lerner_profile(q, kInf);
  const auto q_one = chemin_lerner_profile(q, 1.0);
  rep.values["E.q.Linf(B^{N/2-1})"] = ell_r(weight(q_inf, h - 1.0), kInf);
  rep.values["E.q.Linf(B^{N/2})"] = ell_r(weight(q_inf, h), kInf);
  rep.values["E.q.L1(B^{N/2+1})"] = ell_r(weight(q_one, h + 1.0), kInf);
  rep.values["E.q.L1(B^{N/2+2})"] = ell_r(weight(q_one, h + 2.0), kInf);
  rep.blocks["q.Linf"] = q_inf;
  rep.blocks["q.L1"] = q_one;
  double E = 0.0;
  for (const auto& [id, v] : rep.values) E += v;
  for (const auto* m : {&m1, &m2}) {
    const std::string name = m == &m1 ? "m1" : "m2";
    const auto p_inf = chemin_lerner_profile(*m, kInf);
    const auto p_one = chemin_lerner_profile(*m, 1.0);
    const double a = ell_r(weight(p_inf, h - 1.0), kInf);
    const double b = ell_r(weight(p_one, h + 1.0), kInf);
    rep.values["E." + name + ".Linf(B^{N/2-1})"] = a;
    rep.values["E." + name + ".L1(B^{N/2+1})"] = b;
    rep.blocks[name + ".Linf"] = p_inf;
    rep.blocks[name + ".L1"] = p_one;
    E += a + b;
  }
  rep.values["E"] = E;

  // W: the three components are stacked into one vector field block by block.
  const auto dec = DyadicDecomposition::for_grid(traj.grid());
  double W = 0.0, q_sup = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& st = traj.states[i];
    q_sup = std::max(q_sup, sup_norm(st.q));
    const double t = traj.times[i];
    if (t <= 0.0) continue;
    const auto pq = dyadic_profile(st.q, dec), p1 = dyadic_profile(st.m1, dec), p2 = dyadic_profile(st.m2, dec);
    std::map<int, double> stacked;
    for (const auto& [l, v] : pq) stacked[l] = std::sqrt(v * v + p1.at(l) * p1.at(l) + p2.at(l) * p2.at(l));
    const auto weighted = weight(stacked, h - 1.0 + s1);
    const double w = std::pow(t, 0.5 * s1) * ell_r(weighted, kInf);
    if (w >= W) {
      W = w;
      rep.blocks["W.argmax"] = weighted;
    }
  }
  rep.values["W"] = W;
  rep.values["q.LinfLinf"] = q_sup;
  rep.values["X"] = E + W + q_sup;

  rep.resolution["time_samples"] = static_cast<double>(traj.size());
  rep.resolution["grid_n"] = traj.grid().n();
  rep.resolution["dim"] = traj.grid().dim();
  rep.resolution["l_min"] = dec.l_min();
  rep.resolution["l_max"] = dec.l_max();
  return rep;
}

void write_csv_header(std::ostream& os) { os << "norm,T,value,refinement\n"; }

void write_csv(std::ostream& os, const NormReport& report, double T, int refinement) {
  for (const auto& [id, v] : report.values) os << '"' << id << "\"," << T << ',' << v << ',' << refinement << '\n';
}

}  // namespace kw
