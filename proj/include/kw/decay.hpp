#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "kw/semigroup.hpp"

namespace kw {

// Per-block decay of the coupled semigroup: ratios ||Delta_l W(t) U0|| / ||Delta_l U0|| for
// random data supported in block l, sampled on t in [0, 4 2^{-2l}].
struct BlockDecaySample {
  int block = 0;
  double t = 0.0;
  double ratio = 0.0;
};

// Bound ratio <= C exp(-kappa 2^{2l} t): kappa from the least-squares slope of log ratio
// against 2^{2l} t, then C as the smallest constant making the bound hold on every sample.
struct ExpBound {
  double C = 0.0;
  double kappa = 0.0;
};

struct BlockDecayReport {
  std::vector<BlockDecaySample> samples;
  std::map<int, ExpBound> per_block;
  ExpBound pooled;  // one (C, kappa) for all blocks
};

ExpBound fit_exponential_bound(const std::vector<BlockDecaySample>& samples);

BlockDecayReport block_decay(const TorusGrid& grid, const LinearParams& p, int l_min, int l_max,
                             int times_per_block, std::uint64_t seed);

// Broadband data with ||Delta_l U0|| ~ 2^{-l s}: coefficients of size |xi|^{-N/2 - s}, random phases.
LinearState power_law_state(const TorusGrid& grid, double s, std::uint64_t seed);

// ||W(t) U0||_{B^{s1}_{2,inf}} with q and m stacked per block.
double state_besov_norm(const LinearState& u, double s1);
std::vector<double> decay_curve(const LinearState& u0, const LinearParams& p, double s1,
                                const std::vector<double>& times);

// Log-spaced times whose heat cutoff 1/sqrt(r t), r = (c + nu)/2, stays between
// margin * xi_min and xi_max / margin.
std::vector<double> resolved_decay_times(const TorusGrid& grid, const LinearParams& p, int count, double margin = 4.0);

}  // namespace kw
