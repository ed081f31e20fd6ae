#pragma once

#include <vector>

#include "kw/spectral.hpp"

namespace kw {

// (q, m1, m2) = (rho - rho_bar, rho v1, rho v2) at one time.
struct MildState {
  SpectralField q;
  SpectralField m1;
  SpectralField m2;

  static MildState zeros(const TorusGrid& grid);
  const TorusGrid& grid() const { return q.grid(); }
  void validate() const;

  MildState& operator+=(const MildState& o);
  MildState& operator-=(const MildState& o);
  MildState& operator*=(double s);
};
MildState operator+(MildState a, const MildState& b);
MildState operator-(MildState a, const MildState& b);

// States on strictly increasing times. The first time may be the initial instant (0 or an
// Oseen start t0); norms that weight by t only look at times > 0.
struct Trajectory {
  std::vector<double> times;
  std::vector<MildState> states;

  const TorusGrid& grid() const { return states.front().grid(); }
  std::size_t size() const { return times.size(); }
  void validate() const;
};

}  // namespace kw
