#include "kw/lyapunov.hpp"

#include <cmath>

#include "kw/errors.hpp"

namespace kw {

namespace {

constexpr int kDegenerateL0 = 60;

bool dissipation_ok(const LyapunovConfig& c, const LinearParams& p) {
  const double s = p.c + p.nu();
  return c.A * p.nu() - 1.0 / s - std::ldexp(1.0, -2 * c.l0) * c.A * p.beta / (2.0 * c.a) >= 1.0 / (2.0 * s);
}

}  // namespace

LyapunovConfig LyapunovConfig::automatic(const LinearParams& p) {
  p.validate();
  const double s = p.c + p.nu();
  LyapunovConfig cfg;
  cfg.M = std::max(2.0, p.nu() * s / 2.0 * (0.5 + 2.0 / (s * s)));
  cfg.A = 2.0 * cfg.M / (p.nu() * s);
  cfg.a = 1.0 / (cfg.A * s);
  if (p.degenerate()) {
    cfg.l0 = kDegenerateL0;
  } else {
    const double r = 2.0 * std::sqrt(p.beta) / std::abs(p.nu() - p.c) + 1.0;
    cfg.l0 = static_cast<int>(std::ceil(std::log2(r)));
  }
  // a only enters the last constraint through 1/a, so l0 is the free knob; M >= 2 makes the
  // l0 -> infinity limit strictly admissible and the loop terminates.
  while (!dissipation_ok(cfg, p)) ++cfg.l0;
  return cfg;
}

std::vector<std::string> LyapunovConfig::violations(const LinearParams& p) const {
  std::vector<std::string> out;
  const double s = p.c + p.nu();
  if (!(A > 0.0) || !(a > 0.0)) out.push_back("A and a must be positive");
  if (!(M > 1.0)) out.push_back("M must exceed 1");
  if (std::abs(A * p.nu() - 2.0 * M / s) > 1e-12 * std::max(1.0, A * p.nu())) out.push_back("A nu = 2M/(c+nu)");
  if (p.beta / s - A * a * p.beta / 2.0 < -1e-14) out.push_back("beta/(c+nu) - A a beta/2 >= 0");
  if (A > 0.0 && a > 0.0 && !dissipation_ok(*this, p))
    out.push_back("A nu - 1/(c+nu) - 2^{-2 l0} A beta/(2a) >= 1/(2(c+nu))");
  if (2.0 * M / (p.nu() * s) - 2.0 / (s * s) < 0.5 - 1e-14) out.push_back("2M/(nu(c+nu)) - 2/(c+nu)^2 >= 1/2");
  return out;
}

void LyapunovConfig::validate(const LinearParams& p) const {
  const auto v = violations(p);
  if (v.empty()) return;
  std::string msg = "LyapunovConfig violates:";
  for (const auto& s : v) msg += " [" + s + "]";
  throw ConstraintError(msg);
}

std::map<int, double> lyapunov(const SpectralField& q, const SpectralField& m, const LinearParams& p,
                               const LyapunovConfig& cfg, const DyadicDecomposition& dec) {
  cfg.validate(p);
  require_same_grid(q, m, "lyapunov");
  const auto& g = q.grid();
  const int d = g.dim();
  if (q.components() != 1 || m.components() != d) throw ShapeError("lyapunov: expects scalar q and vector m");
  const double s = p.c + p.nu();
  std::map<int, double> out;
  for (int l = dec.l_min(); l <= dec.l_max(); ++l) {
    double qq = 0.0, dd = 0.0, lqlq = 0.0, lqd = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double x = g.xi_sq(j);
      if (x == 0.0 || g.nyquist(j)) continue;
      const double k = std::sqrt(x);
      const double w = DyadicDecomposition::phi(l, k);
      if (w == 0.0) continue;
      cplx dot = 0.0;
      for (int a = 0; a < d; ++a) dot += g.xi(j, a) * m.at(a, j);
      const cplx dh = cplx(0.0, 1.0) * dot / k;
      const cplx qh = q.at(0, j);
      const double w2 = w * w;
      qq += w2 * std::norm(qh);
      dd += w2 * std::norm(dh);
      lqlq += w2 * x * std::norm(qh);
      lqd += w2 * k * (std::conj(qh) * dh).real();
    }
    const double vol = g.volume();
    double f2 = l <= cfg.l0 ? p.beta * qq + dd : lqlq + cfg.A * dd - 2.0 / s * lqd;
    out[l] = std::sqrt(std::max(0.0, vol * f2));
  }
  return out;
}

std::map<int, double> lyapunov(const SpectralField& q, const SpectralField& m, const LinearParams& p,
                               const LyapunovConfig& cfg) {
  return lyapunov(q, m, p, cfg, DyadicDecomposition::for_grid(q.grid()));
}

}  // namespace kw
