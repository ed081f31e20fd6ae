#pragma once

#include <map>

#include "kw/spectral.hpp"

namespace kw {

// Littlewood-Paley blocks on the torus.
//
// chi(y) = 1 for y <= 4/3, 0 for y >= 3/2, and 1 - (4 s^3 - 3 s^4) with
// s = 6 (y - 4/3) in between (C^1 quartic smoothstep, C^2 at y = 4/3).
// phi_l(xi) = chi(3|xi| / 2^{l+2}) - chi(3|xi| / 2^{l+1}), so phi_l >= 0,
// phi_l == 1 on [2^l, (16/9) 2^l] and supp phi_l within [(8/9) 2^l, 2^{l+1}].
class DyadicDecomposition {
 public:
  DyadicDecomposition(int l_min, int l_max);
  // Smallest range whose blocks sum to 1 on every nonzero lattice wavevector.
  static DyadicDecomposition for_grid(const TorusGrid& grid);

  static double chi(double y);
  static double phi(int l, double xi_abs);

  int l_min() const { return l_min_; }
  int l_max() const { return l_max_; }
  bool contains(int l) const { return l >= l_min_ && l <= l_max_; }

 private:
  int l_min_;
  int l_max_;
};

// Delta_l f; a zero field when l is outside the range.
SpectralField dyadic_block(const SpectralField& f, int l, const DyadicDecomposition& dec);
SpectralField dyadic_block(const SpectralField& f, int l);

// l -> ||Delta_l f||_{L2} over the whole range.
std::map<int, double> dyadic_profile(const SpectralField& f, const DyadicDecomposition& dec);
std::map<int, double> dyadic_profile(const SpectralField& f);

}  // namespace kw
