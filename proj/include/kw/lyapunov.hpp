#pragma once

#include <map>
#include <string>
#include <vector>

#include "kw/dyadic.hpp"
#include "kw/semigroup.hpp"

namespace kw {

// Block energies of the linear system in the variables (q, d = Lambda^{-1} div m).
// Blocks l <= l0 use f_l^2 = beta |q_l|^2 + |d_l|^2; blocks l > l0 use
// f_l^2 = |Lambda q_l|^2 + A |d_l|^2 - 2/(c+nu) (Lambda q_l, d_l).
struct LyapunovConfig {
  double A = 0.0;
  double a = 0.0;
  int l0 = 0;
  double M = 0.0;

  // M and A from the coercivity margin, a = 1/(A(c+nu)), and l0 raised from the
  // crossover octave until the high-frequency dissipation constraint holds.
  static LyapunovConfig automatic(const LinearParams& p);
  // Names of the violated admissibility constraints; empty when admissible.
  std::vector<std::string> violations(const LinearParams& p) const;
  void validate(const LinearParams& p) const;
};

std::map<int, double> lyapunov(const SpectralField& q, const SpectralField& m, const LinearParams& p,
                               const LyapunovConfig& cfg, const DyadicDecomposition& dec);
std::map<int, double> lyapunov(const SpectralField& q, const SpectralField& m, const LinearParams& p,
                               const LyapunovConfig& cfg);

}  // namespace kw
