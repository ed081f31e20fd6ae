#include "kw/dyadic.hpp"

#include <cmath>

#include "kw/errors.hpp"

namespace kw {

DyadicDecomposition::DyadicDecomposition(int l_min, int l_max) : l_min_(l_min), l_max_(l_max) {
  if (l_max < l_min) throw ConstraintError("DyadicDecomposition: empty block range");
}

DyadicDecomposition DyadicDecomposition::for_grid(const TorusGrid& grid) {
  // phi sums telescope to chi(3|xi|/2^{l_max+2}) - chi(3|xi|/2^{l_min+1}):
  // need |xi_min| >= 2^{l_min} and |xi_max| <= (16/9) 2^{l_max}.
  const int lo = static_cast<int>(std::floor(std::log2(grid.xi_min())));
  const int hi = static_cast<int>(std::ceil(std::log2(grid.xi_max() * 9.0 / 16.0)));
  return DyadicDecomposition(lo, std::max(lo, hi));
}

double DyadicDecomposition::chi(double y) {
  constexpr double a = 4.0 / 3.0;
  constexpr double b = 1.5;
  if (y <= a) return 1.0;
  if (y >= b) return 0.0;
  const double s = (y - a) / (b - a);
  return 1.0 - s * s * s * (4.0 - 3.0 * s);
}

double DyadicDecomposition::phi(int l, double xi_abs) {
  return chi(3.0 * xi_abs / std::ldexp(1.0, l + 2)) - chi(3.0 * xi_abs / std::ldexp(1.0, l + 1));
}

SpectralField dyadic_block(const SpectralField& f, int l, const DyadicDecomposition& dec) {
  if (!dec.contains(l)) return SpectralField(f.grid(), f.components());
  const auto& g = f.grid();
  return apply_multiplier(f, [&](std::size_t j) {
    const double x = g.xi_sq(j);
    return x > 0.0 ? DyadicDecomposition::phi(l, std::sqrt(x)) : 0.0;
  });
}

SpectralField dyadic_block(const SpectralField& f, int l) {
  return dyadic_block(f, l, DyadicDecomposition::for_grid(f.grid()));
}

std::map<int, double> dyadic_profile(const SpectralField& f, const DyadicDecomposition& dec) {
  const auto& g = f.grid();
  std::map<int, double> out;
  for (int l = dec.l_min(); l <= dec.l_max(); ++l) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.modes(); ++j) {
      const double x = g.xi_sq(j);
      if (x == 0.0 || g.nyquist(j)) continue;
      const double w = DyadicDecomposition::phi(l, std::sqrt(x));
      if (w == 0.0) continue;
      for (int c = 0; c < f.components(); ++c) s += w * w * std::norm(f.at(c, j));
    }
    out[l] = std::sqrt(g.volume() * s);
  }
  return out;
}

std::map<int, double> dyadic_profile(const SpectralField& f) {
  return dyadic_profile(f, DyadicDecomposition::for_grid(f.grid()));
}

}  // namespace kw
