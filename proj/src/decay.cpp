#include "kw/decay.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kw/dyadic.hpp"
#include "kw/errors.hpp"

namespace kw {

ExpBound fit_exponential_bound(const std::vector<BlockDecaySample>& samples) {
  std::vector<double> x, y;
  for (const auto& s : samples) {
    if (!(s.ratio > 0.0)) continue;
    x.push_back(std::ldexp(s.t, 2 * s.block));
    y.push_back(std::log(s.ratio));
  }
  if (x.size() < 2) throw DomainError("fit_exponential_bound: needs two positive samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  ExpBound b;
  b.kappa = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  for (std::size_t i = 0; i < x.size(); ++i) b.C = std::max(b.C, std::exp(y[i] + b.kappa * x[i]));
  return b;
}

BlockDecayReport block_decay(const TorusGrid& grid, const LinearParams& p, int l_min, int l_max,
                             int times_per_block, std::uint64_t seed) {
  if (l_min > l_max || times_per_block < 2) throw DomainError("block_decay: bad block range or sample count");
  std::mt19937_64 rng(seed);
  auto flat = [](double) { return 1.0; };
  BlockDecayReport rep;
  for (int l = l_min; l <= l_max; ++l) {
    const LinearState u0{dyadic_block(random_field(grid, 1, rng, flat), l),
                         dyadic_block(random_field(grid, grid.dim(), rng, flat), l)};
    const double n0 = l2_norm(u0);
    if (!(n0 > 0.0)) throw DomainError("block_decay: block has no lattice modes");
    std::vector<BlockDecaySample> mine;
    const double t_end = 4.0 * std::ldexp(1.0, -2 * l);
    for (int k = 0; k < times_per_block; ++k) {
      const double t = t_end * k / (times_per_block - 1);
      mine.push_back({l, t, l2_norm(propagate_full(u0, t, p)) / n0});
    }
    rep.per_block[l] = fit_exponential_bound(mine);
    rep.samples.insert(rep.samples.end(), mine.begin(), mine.end());
  }
  rep.pooled = fit_exponential_bound(rep.samples);
  return rep;
}

LinearState power_law_state(const TorusGrid& grid, double s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double expo = -0.5 * grid.dim() - s;
  auto env = [expo](double k) { return k > 0.0 ? std::pow(k, expo) : 0.0; };
  return {random_field(grid, 1, rng, env), random_field(grid, grid.dim(), rng, env)};
}

double state_besov_norm(const LinearState& u, double s1) {
  const auto a = dyadic_profile(u.q), b = dyadic_profile(u.m);
  double m = 0.0;
  for (const auto& [l, v] : a) m = std::max(m, std::pow(2.0, l * s1) * std::hypot(v, b.at(l)));
  return m;
}

std::vector<double> decay_curve(const LinearState& u0, const LinearParams& p, double s1,
                                const std::vector<double>& times) {
  std::vector<double> out;
  for (double t : times) out.push_back(state_besov_norm(propagate_full(u0, t, p), s1));
  return out;
}

std::vector<double> resolved_decay_times(const TorusGrid& grid, const LinearParams& p, int count, double margin) {
  if (count < 2) throw DomainError("resolved_decay_times: needs two times");
  const double r = 0.5 * (p.c + p.nu());
  const double k_hi = grid.xi_max() / margin, k_lo = grid.xi_min() * margin;
  const double lo = 1.0 / (r * k_hi * k_hi), hi = 1.0 / (r * k_lo * k_lo);
  if (!(hi > lo)) throw DomainError("resolved_decay_times: grid resolves no decay band");
  std::vector<double> t(count);
  for (int k = 0; k < count; ++k) t[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1));
  return t;
}

}  // namespace kw
