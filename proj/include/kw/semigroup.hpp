#pragma once

#include <utility>

#include "kw/spectral.hpp"

namespace kw {

// Coefficients of
//   dq/dt - c Lap q + div m = F
//   dm/dt - mu Lap m - alpha grad div m + beta grad q = G.
struct LinearParams {
  double c = 1.0;
  double mu = 1.0;
  double alpha = 0.0;
  double beta = 1.0;

  static LinearParams make(double c, double mu, double alpha, double beta);
  void validate() const;
  double nu() const { return mu + alpha; }
  bool degenerate() const;
  // |xi|^2 where the discriminant vanishes; +inf when degenerate.
  double crossover_sq() const;
};

// Real 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0;
  static Mat2 identity() { return {1, 0, 0, 1}; }
};
Mat2 operator*(const Mat2& x, const Mat2& y);
Mat2 operator+(const Mat2& x, const Mat2& y);
Mat2 operator*(double s, const Mat2& x);
double norm1(const Mat2& x);

// Symbol A(xi) acting on (q^, (div m)^): [[c x, 1], [-beta x, nu x]] with x = |xi|^2.
Mat2 symbol_matrix(double xi_sq, const LinearParams& p);

double sinhc(double z);
double sinc(double z);

SpectralField heat_propagate(const SpectralField& f, double t, double coeff);

// Roots of lambda^2 - lambda x (c + nu) + c nu x^2 + beta x. Real pair (first >= second)
// at or above the crossover, conjugate pair (first has positive imaginary part) below.
std::pair<cplx, cplx> eigenvalues(double xi_sq, const LinearParams& p);

// exp(-t A(xi)) as a real matrix.
Mat2 coupled_exponential(double xi_sq, double t, const LinearParams& p);
std::pair<cplx, cplx> propagate_coupled(cplx q0, cplx d0, double xi_sq, double t, const LinearParams& p);

// Unknown of the linear system: q scalar, m vector.
struct LinearState {
  SpectralField q;
  SpectralField m;

  static LinearState zeros(const TorusGrid& grid);
  LinearState& operator+=(const LinearState& o);
  LinearState& operator-=(const LinearState& o);
  LinearState& operator*=(double s);
};
LinearState operator+(LinearState a, const LinearState& b);
LinearState operator-(LinearState a, const LinearState& b);
double l2_norm(const LinearState& s);

// W(t) applied to (q, m): Q m and q via the 2x2 propagator, P m by the heat flow with mu.
LinearState propagate_full(const LinearState& s, double t, const LinearParams& p);

// A(xi) applied to (q, m) in physical form: (-c Lap q + div m, -mu Lap m - alpha grad div m + beta grad q).
LinearState apply_generator(const LinearState& s, const LinearParams& p);

}  // namespace kw
