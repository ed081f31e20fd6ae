#include "kw/semigroup.hpp"

#include <cmath>
#include <limits>

#include "kw/errors.hpp"

namespace kw {

LinearParams LinearParams::make(double c, double mu, double alpha, double beta) {
  LinearParams p{c, mu, alpha, beta};
  p.validate();
  return p;
}

void LinearParams::validate() const {
  if (!(c > 0.0)) throw ConstraintError("LinearParams: c must be positive");
  if (!(mu > 0.0)) throw ConstraintError("LinearParams: mu must be positive");
  if (!(nu() > 0.0)) throw ConstraintError("LinearParams: mu + alpha must be positive");
  if (!(beta > 0.0)) throw ConstraintError("LinearParams: beta must be positive");
}

bool LinearParams::degenerate() const { return std::abs(nu() - c) < 1e-12; }

double LinearParams::crossover_sq() const {
  if (degenerate()) return std::numeric_limits<double>::infinity();
  const double d = nu() - c;
  return 4.0 * beta / (d * d);
}

Mat2 operator*(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}
Mat2 operator+(const Mat2& x, const Mat2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }
Mat2 operator*(double s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }
double norm1(const Mat2& x) { return std::max(std::abs(x.a) + std::abs(x.c), std::abs(x.b) + std::abs(x.d)); }

Mat2 symbol_matrix(double xi_sq, const LinearParams& p) {
  return {p.c * xi_sq, 1.0, -p.beta * xi_sq, p.nu() * xi_sq};
}

double sinhc(double z) {
  if (std::abs(z) < 1e-3) {
    const double z2 = z * z;
    return 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0 * (1.0 + z2 / 72.0)));
  }
  return std::sinh(z) / z;
}

double sinc(double z) {
  if (std::abs(z) < 1e-3) {
    const double z2 = z * z;
    return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0)));
  }
  return std::sin(z) / z;
}

SpectralField heat_propagate(const SpectralField& f, double t, double coeff) {
  if (t < 0.0) throw DomainError("heat_propagate: negative time");
  const auto& g = f.grid();
  return apply_multiplier(f, [&](std::size_t j) { return std::exp(-coeff * t * g.xi_sq(j)); });
}

std::pair<cplx, cplx> eigenvalues(double xi_sq, const LinearParams& p) {
  if (xi_sq < 0.0) throw DomainError("eigenvalues: negative |xi|^2");
  const double x = xi_sq;
  const double sum = x * (p.c + p.nu());
  const double det = p.c * p.nu() * x * x + p.beta * x;
  const double dnc = p.nu() - p.c;
  const double disc = x * x * dnc * dnc - 4.0 * p.beta * x;
  if (disc >= 0.0) {
    const double l1 = 0.5 * (sum + std::sqrt(disc));
    // citardauq: the small root from the product of roots.
    const double l2 = l1 > 0.0 ? det / l1 : 0.0;
    return {cplx(l1, 0.0), cplx(l2, 0.0)};
  }
  const double im = 0.5 * std::sqrt(-disc);
  return {cplx(0.5 * sum, im), cplx(0.5 * sum, -im)};
}

Mat2 coupled_exponential(double xi_sq, double t, const LinearParams& p) {
  if (t < 0.0) throw DomainError("propagate_coupled: negative time");
  const double x = xi_sq;
  const double m = 0.5 * x * (p.c + p.nu());
  const double dnc = p.nu() - p.c;
  // delta^2 = disc / 4, eigenvalues m +- delta.
  const double d2 = 0.25 * (x * x * dnc * dnc - 4.0 * p.beta * x);
  double ep, s;
  if (d2 >= 0.0) {
    const double delta = std::sqrt(d2);
    const double z = t * delta;
    if (z > 20.0) {
      const double l1 = m + delta;
      const double l2 = (p.c * p.nu() * x * x + p.beta * x) / l1;
      const double e1 = std::exp(-t * l1);
      const double e2 = std::exp(-t * l2);
      ep = 0.5 * (e2 + e1);
      s = (e2 - e1) / (2.0 * delta);
    } else {
      const double em = std::exp(-t * m);
      ep = em * std::cosh(z);
      s = em * t * sinhc(z);
    }
  } else {
    const double b = std::sqrt(-d2);
    const double z = t * b;
    const double em = std::exp(-t * m);
    ep = em * std::cos(z);
    s = em * t * sinc(z);
  }
  // exp(-tA) = ep I - s (A - m I)
  return {ep - s * (p.c * x - m), -s, s * p.beta * x, ep - s * (p.nu() * x - m)};
}

std::pair<cplx, cplx> propagate_coupled(cplx q0, cplx d0, double xi_sq, double t, const LinearParams& p) {
  const Mat2 e = coupled_exponential(xi_sq, t, p);
  return {e.a * q0 + e.b * d0, e.c * q0 + e.d * d0};
}

LinearState LinearState::zeros(const TorusGrid& grid) { return {SpectralField(grid, 1), SpectralField(grid, grid.dim())}; }

LinearState& LinearState::operator+=(const LinearState& o) {
  q += o.q;
  m += o.m;
  return *this;
}
LinearState& LinearState::operator-=(const LinearState& o) {
  q -= o.q;
  m -= o.m;
  return *this;
}
LinearState& LinearState::operator*=(double s) {
  q *= s;
  m *= s;
  return *this;
}
LinearState operator+(LinearState a, const LinearState& b) { return a += b; }
LinearState operator-(LinearState a, const LinearState& b) { return a -= b; }

double l2_norm(const LinearState& s) {
  const double a = l2_norm(s.q);
  const double b = l2_norm(s.m);
  return std::sqrt(a * a + b * b);
}

LinearState propagate_full(const LinearState& s, double t, const LinearParams& p) {
  if (t < 0.0) throw DomainError("propagate_full: negative time");
  require_same_grid(s.q, s.m, "propagate_full");
  const auto& g = s.q.grid();
  const int d = g.dim();
  if (s.q.components() != 1 || s.m.components() != d) throw ShapeError("propagate_full: bad state shape");
  LinearState out = LinearState::zeros(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g.nyquist(j)) continue;
    const double x = g.xi_sq(j);
    if (x == 0.0) {
      out.q.at(0, j) = s.q.at(0, j);
      for (int a = 0; a < d; ++a) out.m.at(a, j) = s.m.at(a, j);
      continue;
    }
    cplx dot = 0.0;
    for (int a = 0; a < d; ++a) dot += g.xi(j, a) * s.m.at(a, j);
    const cplx D0 = cplx(0.0, 1.0) * dot;
    const auto [q1, D1] = propagate_coupled(s.q.at(0, j), D0, x, t, p);
    const double heat = std::exp(-p.mu * t * x);
    out.q.at(0, j) = q1;
    for (int a = 0; a < d; ++a) {
      const cplx qpart = g.xi(j, a) * dot / x;
      const cplx ppart = s.m.at(a, j) - qpart;
      // Q m = xi (xi . m) / x = -i xi D / x
      out.m.at(a, j) = heat * ppart + cplx(0.0, -1.0) * g.xi(j, a) * D1 / x;
    }
  }
  return out;
}

LinearState apply_generator(const LinearState& s, const LinearParams& p) {
  LinearState out;
  out.q = -p.c * laplacian(s.q) + divergence(s.m);
  out.m = -p.mu * laplacian(s.m) - p.alpha * gradient(divergence(s.m)) + p.beta * gradient(s.q);
  return out;
}

}  // namespace kw
