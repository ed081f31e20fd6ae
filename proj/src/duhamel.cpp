#include "kw/duhamel.hpp"

#include <cmath>

#include "kw/errors.hpp"
#include "kw/parallel.hpp"

namespace kw {

namespace {

constexpr double kFact[] = {1.0,        1.0,         2.0,          6.0,           24.0,
                            120.0,      720.0,       5040.0,       40320.0,       362880.0,
                            3628800.0,  39916800.0,  479001600.0,  6227020800.0,  87178291200.0};

// Monomial coefficients of the cubic Lagrange basis on the Lobatto points of [0, 1]:
// ell_i(u) = sum_p lagrange()[i][p] u^p.
const std::array<std::array<double, 4>, 4>& lagrange() {
  static const auto table = [] {
    std::array<std::array<double, 4>, 4> out{};
    const auto& u = TimeGrid::lobatto();
    for (int i = 0; i < 4; ++i) {
      std::array<double, 4> poly{1.0, 0.0, 0.0, 0.0};
      double denom = 1.0;
      for (int m = 0; m < 4; ++m) {
        if (m == i) continue;
        std::array<double, 4> next{};
        for (int p = 0; p < 3; ++p) {
          next[p + 1] += poly[p];
          next[p] -= u[m] * poly[p];
        }
        poly = next;
        denom *= u[i] - u[m];
      }
      for (int p = 0; p < 4; ++p) out[i][p] = poly[p] / denom;
    }
    return out;
  }();
  return table;
}

void check_sources(std::size_t nodes, std::size_t got, const char* where) {
  if (got != nodes) throw ShapeError(std::string(where) + ": source must be sampled on every time node");
  if (got == 0) throw ShapeError(std::string(where) + ": empty time grid");
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> breaks) : breaks_(std::move(breaks)) {
  if (breaks_.size() < 2) throw DomainError("TimeGrid: need at least one panel");
  for (std::size_t k = 1; k < breaks_.size(); ++k)
    if (!(breaks_[k] > breaks_[k - 1])) throw DomainError("TimeGrid: breaks must increase strictly");
  const auto& th = lobatto();
  nodes_.push_back(breaks_.front());
  for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
    const double h = breaks_[k + 1] - breaks_[k];
    nodes_.push_back(breaks_[k] + th[1] * h);
    nodes_.push_back(breaks_[k] + th[2] * h);
    nodes_.push_back(breaks_[k + 1]);
  }
}

TimeGrid TimeGrid::graded(double t0, double T, int panels) {
  if (panels < 1 || !(T > t0)) throw DomainError("TimeGrid::graded: bad range");
  std::vector<double> b(panels + 1);
  for (int k = 0; k <= panels; ++k) {
    const double s = static_cast<double>(k) / panels;
    b[k] = t0 + (T - t0) * s * s;
  }
  b.back() = T;
  return TimeGrid(std::move(b));
}

TimeGrid TimeGrid::uniform(double t0, double T, int panels) {
  if (panels < 1 || !(T > t0)) throw DomainError("TimeGrid::uniform: bad range");
  std::vector<double> b(panels + 1);
  for (int k = 0; k <= panels; ++k) b[k] = t0 + (T - t0) * k / panels;
  b.back() = T;
  return TimeGrid(std::move(b));
}

const std::array<double, 4>& TimeGrid::lobatto() {
  static const std::array<double, 4> th{0.0, 0.5 * (1.0 - 1.0 / std::sqrt(5.0)), 0.5 * (1.0 + 1.0 / std::sqrt(5.0)),
                                        1.0};
  return th;
}

TimeGrid TimeGrid::refined() const {
  std::vector<double> b;
  for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
    b.push_back(breaks_[k]);
    b.push_back(0.5 * (breaks_[k] + breaks_[k + 1]));
  }
  b.push_back(breaks_.back());
  return TimeGrid(std::move(b));
}

TimeGrid TimeGrid::truncated(double t) const {
  if (!(t > start())) throw DomainError("TimeGrid::truncated: t must exceed the start");
  std::vector<double> b;
  for (double x : breaks_)
    if (x < t) b.push_back(x);
  b.push_back(t);
  return TimeGrid(std::move(b));
}

PhiTable phi_derivatives(double z) {
  PhiTable t{};
  if (std::abs(z) < 2.0) {
    // d^r phi_k = sum_i z^i (i+r)! / (i! (i+r+k)!)
    for (int r = 0; r < kPhiOrders; ++r) {
      for (int k = 0; k <= 4; ++k) {
        double term = kFact[r] / kFact[r + k];
        double s = term;
        for (int i = 0; i < 60; ++i) {
          term *= z * (i + r + 1) / ((i + 1.0) * (i + r + k + 1.0));
          s += term;
          if (std::abs(term) < 1e-18 * std::abs(s)) break;
        }
        t[r][k] = s;
      }
    }
    return t;
  }
  const double e = std::exp(z);
  t[0][0] = e;
  for (int k = 1; k <= 4; ++k) t[0][k] = (t[0][k - 1] - 1.0 / kFact[k - 1]) / z;
  // z phi_k^{(r)} = phi_{k-1}^{(r-1)} - (k+r-1) phi_k^{(r-1)}
  for (int r = 1; r < kPhiOrders; ++r) {
    t[r][0] = e;
    for (int k = 1; k <= 4; ++k) t[r][k] = (t[r - 1][k - 1] - (k + r - 1) * t[r - 1][k]) / z;
  }
  return t;
}

std::array<cplx, 5> phi_functions(cplx z) {
  std::array<cplx, 5> out{};
  if (std::abs(z) < 2.0) {
    for (int k = 0; k <= 4; ++k) {
      cplx term = 1.0 / kFact[k];
      cplx s = term;
      for (int j = 1; j < 60; ++j) {
        term *= z / static_cast<double>(j + k);
        s += term;
        if (std::abs(term) < 1e-18 * std::abs(s)) break;
      }
      out[k] = s;
    }
    return out;
  }
  out[0] = std::exp(z);
  for (int k = 1; k <= 4; ++k) out[k] = (out[k - 1] - 1.0 / kFact[k - 1]) / z;
  return out;
}

std::array<Mat2, 5> phi_functions(const Mat2& M) {
  // f(M) = a I + b N with N = M - m I traceless, N^2 = delta^2 I, a = (f(m+delta) + f(m-delta))/2
  // and b = (f(m+delta) - f(m-delta))/(2 delta).
  const double m = 0.5 * (M.a + M.d);
  const Mat2 N{M.a - m, M.b, M.c, M.d - m};
  const double half = 0.5 * (M.a - M.d);
  const double d2 = half * half + M.b * M.c;
  std::array<double, 5> ca{}, cb{};
  const double em = std::exp(m);
  if (d2 >= 0.0) {
    const double delta = std::sqrt(d2);
    if (delta > 20.0) {
      const double ep = std::exp(m + delta), en = std::exp(m - delta);
      ca[0] = 0.5 * (ep + en);
      cb[0] = (ep - en) / (2.0 * delta);
    } else {
      ca[0] = em * std::cosh(delta);
      cb[0] = em * sinhc(delta);
    }
  } else {
    const double gamma = std::sqrt(-d2);
    ca[0] = em * std::cos(gamma);
    cb[0] = em * sinc(gamma);
  }
  // For k >= 1 the derivatives of phi_k at m shrink like n!/|m|^n, so the Taylor series in
  // delta converges geometrically in delta/max(1,|m|); beyond the cutoff the divided
  // difference loses at most eps*max(1,|m|)/delta.
  const double cutoff = 0.02 * std::max(1.0, std::abs(m));
  if (std::abs(d2) <= cutoff * cutoff) {
    const PhiTable t = phi_derivatives(m);
    for (int k = 1; k <= 4; ++k) {
      double a = 0.0, b = 0.0, pw = 1.0;
      for (int j = 0; 2 * j + 1 < kPhiOrders; ++j) {
        a += t[2 * j][k] * pw / kFact[2 * j];
        b += t[2 * j + 1][k] * pw / kFact[2 * j + 1];
        pw *= d2;
      }
      ca[k] = a;
      cb[k] = b;
    }
  } else if (d2 > 0.0) {
    const double delta = std::sqrt(d2);
    const PhiTable tp = phi_derivatives(m + delta);
    const PhiTable tm = phi_derivatives(m - delta);
    for (int k = 1; k <= 4; ++k) {
      ca[k] = 0.5 * (tp[0][k] + tm[0][k]);
      cb[k] = (tp[0][k] - tm[0][k]) / (2.0 * delta);
    }
  } else {
    const double gamma = std::sqrt(-d2);
    const auto f = phi_functions(cplx(m, gamma));
    for (int k = 1; k <= 4; ++k) {
      ca[k] = f[k].real();
      cb[k] = f[k].imag() / gamma;
    }
  }
  std::array<Mat2, 5> out;
  for (int k = 0; k <= 4; ++k) out[k] = {ca[k] + cb[k] * N.a, cb[k] * N.b, cb[k] * N.c, ca[k] + cb[k] * N.d};
  return out;
}

namespace {

// Per-shell propagators over one panel: E[r] = exp(-theta_r h A), W[r][i] weights node i,
// for r = 1..3 (stored at r-1).
template <class T>
struct PanelWeights {
  std::vector<T> E;
  std::vector<T> W;
  void resize(std::size_t shells) {
    E.assign(shells * 3, T{});
    W.assign(shells * 12, T{});
  }
};

void heat_weights(PanelWeights<double>& pw, const std::vector<double>& shells, double h, double coeff) {
  const auto& th = TimeGrid::lobatto();
  const auto& lag = lagrange();
  pw.resize(shells.size());
  parallel_for(0, shells.size(), [&](std::size_t s) {
    for (int r = 1; r <= 3; ++r) {
      const PhiTable t = phi_derivatives(-th[r] * h * coeff * shells[s]);
      pw.E[s * 3 + r - 1] = t[0][0];
      for (int i = 0; i < 4; ++i) {
        double w = 0.0;
        double thp = th[r];
        for (int p = 0; p < 4; ++p) {
          w += lag[i][p] * kFact[p] * thp * t[0][p + 1];
          thp *= th[r];
        }
        pw.W[(s * 3 + r - 1) * 4 + i] = h * w;
      }
    }
  });
}

void coupled_weights(PanelWeights<Mat2>& pw, const std::vector<double>& shells, double h, const LinearParams& p) {
  const auto& th = TimeGrid::lobatto();
  const auto& lag = lagrange();
  pw.resize(shells.size());
  parallel_for(0, shells.size(), [&](std::size_t s) {
    const Mat2 A = symbol_matrix(shells[s], p);
    for (int r = 1; r <= 3; ++r) {
      const auto phi = phi_functions((-th[r] * h) * A);
      pw.E[s * 3 + r - 1] = phi[0];
      for (int i = 0; i < 4; ++i) {
        Mat2 w{};
        double thp = th[r];
        for (int q = 0; q < 4; ++q) {
          w = w + (lag[i][q] * kFact[q] * thp) * phi[q + 1];
          thp *= th[r];
        }
        pw.W[(s * 3 + r - 1) * 4 + i] = h * w;
      }
    }
  });
}

}  // namespace

std::vector<SpectralField> heat_duhamel(const TimeGrid& grid, const std::vector<SpectralField>& source, double coeff) {
  check_sources(grid.size(), source.size(), "heat_duhamel");
  const TorusGrid& g = source[0].grid();
  const int comps = source[0].components();
  for (const auto& s : source) require_same_grid(s, source[0], "heat_duhamel");
  for (const auto& s : source)
    if (s.components() != comps) throw ShapeError("heat_duhamel: component count varies over nodes");

  const std::size_t n = g.size();
  const auto& modes = g.modes();
  std::vector<SpectralField> out(grid.size(), SpectralField(g, comps));
  std::vector<cplx> acc(static_cast<std::size_t>(comps) * n, cplx(0.0));
  PanelWeights<double> pw;
  for (int k = 0; k < grid.panels(); ++k) {
    const double h = grid.breaks()[k + 1] - grid.breaks()[k];
    heat_weights(pw, modes.shell_xi_sq, h, coeff);
    parallel_for(0, n, [&](std::size_t j) {
      if (g.nyquist(j)) return;
      const std::size_t s = static_cast<std::size_t>(modes.shell[j]);
      for (int c = 0; c < comps; ++c) {
        cplx S[4];
        for (int i = 0; i < 4; ++i) S[i] = source[3 * k + i].at(c, j);
        const cplx I0 = acc[c * n + j];
        cplx v = 0.0;
        for (int r = 1; r <= 3; ++r) {
          const std::size_t e = s * 3 + r - 1;
          v = pw.E[e] * I0;
          for (int i = 0; i < 4; ++i) v += pw.W[e * 4 + i] * S[i];
          out[3 * k + r].at(c, j) = v;
        }
        acc[c * n + j] = v;
      }
    });
  }
  return out;
}

std::vector<LinearState> coupled_duhamel(const TimeGrid& grid, const std::vector<LinearState>& source,
                                         const LinearParams& p) {
  check_sources(grid.size(), source.size(), "coupled_duhamel");
  p.validate();
  const TorusGrid& g = source[0].q.grid();
  const int d = g.dim();
  for (const auto& s : source) {
    require_same_grid(s.q, source[0].q, "coupled_duhamel");
    require_same_grid(s.m, source[0].q, "coupled_duhamel");
    if (s.q.components() != 1 || s.m.components() != d) throw ShapeError("coupled_duhamel: bad state shape");
  }

  const std::size_t n = g.size();
  const auto& modes = g.modes();
  std::vector<LinearState> out(grid.size(), LinearState::zeros(g));
  // Accumulators per mode: (q, D = i xi.m) through the 2x2 system, P m through heat with mu.
  std::vector<cplx> acc_q(n, 0.0), acc_d(n, 0.0), acc_p(static_cast<std::size_t>(d) * n, 0.0);
  PanelWeights<Mat2> cw;
  PanelWeights<double> hw;
  const cplx I(0.0, 1.0);
  for (int k = 0; k < grid.panels(); ++k) {
    const double h = grid.breaks()[k + 1] - grid.breaks()[k];
    coupled_weights(cw, modes.shell_xi_sq, h, p);
    heat_weights(hw, modes.shell_xi_sq, h, p.mu);
    parallel_for(0, n, [&](std::size_t j) {
      if (g.nyquist(j)) return;
      const std::size_t s = static_cast<std::size_t>(modes.shell[j]);
      const double x = g.xi_sq(j);
      cplx Sq[4], Sd[4], Sp[4][3];
      for (int i = 0; i < 4; ++i) {
        const LinearState& src = source[3 * k + i];
        Sq[i] = src.q.at(0, j);
        cplx dot = 0.0;
        for (int a = 0; a < d; ++a) dot += g.xi(j, a) * src.m.at(a, j);
        Sd[i] = I * dot;
        for (int a = 0; a < d; ++a) Sp[i][a] = x > 0.0 ? src.m.at(a, j) - g.xi(j, a) * dot / x : src.m.at(a, j);
      }
      cplx vq = 0.0, vd = 0.0;
      cplx vp[3] = {0.0, 0.0, 0.0};
      const cplx q0 = acc_q[j], d0 = acc_d[j];
      cplx p0[3];
      for (int a = 0; a < d; ++a) p0[a] = acc_p[a * n + j];
      for (int r = 1; r <= 3; ++r) {
        const std::size_t e = s * 3 + r - 1;
        const Mat2& E = cw.E[e];
        vq = E.a * q0 + E.b * d0;
        vd = E.c * q0 + E.d * d0;
        for (int i = 0; i < 4; ++i) {
          const Mat2& W = cw.W[e * 4 + i];
          vq += W.a * Sq[i] + W.b * Sd[i];
          vd += W.c * Sq[i] + W.d * Sd[i];
        }
        for (int a = 0; a < d; ++a) {
          vp[a] = hw.E[e] * p0[a];
          for (int i = 0; i < 4; ++i) vp[a] += hw.W[e * 4 + i] * Sp[i][a];
        }
        LinearState& o = out[3 * k + r];
        o.q.at(0, j) = vq;
        for (int a = 0; a < d; ++a) o.m.at(a, j) = x > 0.0 ? vp[a] - I * g.xi(j, a) * vd / x : vp[a];
      }
      acc_q[j] = vq;
      acc_d[j] = vd;
      for (int a = 0; a < d; ++a) acc_p[a * n + j] = vp[a];
    });
  }
  return out;
}

LinearState duhamel_integrate(const TimeGrid& grid, const std::vector<LinearState>& source, const LinearParams& p) {
  return coupled_duhamel(grid, source, p).back();
}

LinearState duhamel_integrate(const std::function<LinearState(double)>& source, const LinearParams& p, double t,
                              const QuadratureRule& rule, double* estimate) {
  if (t < 0.0) throw DomainError("duhamel_integrate: negative time");
  if (rule.panels < 1) throw DomainError("duhamel_integrate: need at least one panel");
  if (t == 0.0) {
    if (estimate) *estimate = 0.0;
    LinearState z = source(0.0);
    z *= 0.0;
    return z;
  }
  auto run = [&](int panels) {
    const TimeGrid grid = rule.graded ? TimeGrid::graded(0.0, t, panels) : TimeGrid::uniform(0.0, t, panels);
    std::vector<LinearState> samples;
    samples.reserve(grid.size());
    for (double s : grid.nodes()) samples.push_back(source(s));
    return duhamel_integrate(grid, samples, p);
  };
  const LinearState coarse = run(rule.panels);
  LinearState fine = run(2 * rule.panels);
  const double size = l2_norm(fine);
  const double diff = l2_norm(fine - coarse);
  const double est = size > 0.0 ? diff / size : diff;
  if (estimate) *estimate = est;
  if (est > rule.tol)
    throw ToleranceError("duhamel_integrate: refinement changed the result by " + std::to_string(est), est);
  return fine;
}

}  // namespace kw
