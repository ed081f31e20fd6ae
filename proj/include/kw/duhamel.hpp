#pragma once

#include <array>
#include <functional>
#include <vector>

#include "kw/semigroup.hpp"

namespace kw {

// Panels [t_k, t_{k+1}], each carrying the four Gauss-Lobatto points
// t_k + theta h with theta in {0, (1-1/sqrt5)/2, (1+1/sqrt5)/2, 1}. Adjacent panels share
// their endpoint, so K panels give 3K+1 nodes; node 3k+i is point i of panel k.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> breaks);
  // Breaks t0 + (T - t0)(k/K)^2, clustering toward t0.
  static TimeGrid graded(double t0, double T, int panels);
  static TimeGrid uniform(double t0, double T, int panels);

  static const std::array<double, 4>& lobatto();

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& nodes() const { return nodes_; }
  int panels() const { return static_cast<int>(breaks_.size()) - 1; }
  std::size_t size() const { return nodes_.size(); }
  double start() const { return breaks_.front(); }
  double end() const { return breaks_.back(); }
  // Every panel split at its midpoint.
  TimeGrid refined() const;
  // Grid covering [start, t] with the breaks of this grid that fall below t.
  TimeGrid truncated(double t) const;

 private:
  std::vector<double> breaks_;
  std::vector<double> nodes_;
};

// phi_k(z) = sum_j z^j / (j+k)!, so phi_0 = exp and phi_{k+1}(z) = (phi_k(z) - 1/k!) / z.
// Entry [r][k] is the r-th derivative of phi_k, k <= 4, r < kPhiOrders.
inline constexpr int kPhiOrders = 10;
using PhiTable = std::array<std::array<double, 5>, kPhiOrders>;
PhiTable phi_derivatives(double z);
std::array<cplx, 5> phi_functions(cplx z);
std::array<Mat2, 5> phi_functions(const Mat2& M);

// Values at every node of int_{t0}^{t} exp((t-s) coeff Lap) S(s) ds, given S at the nodes.
// The source is interpolated by a cubic per panel and each mode is integrated exactly.
std::vector<SpectralField> heat_duhamel(const TimeGrid& grid, const std::vector<SpectralField>& source,
                                        double coeff);

// Same for the coupled system: int_{t0}^{t} W(t-s) (F, G)(s) ds at every node.
std::vector<LinearState> coupled_duhamel(const TimeGrid& grid, const std::vector<LinearState>& source,
                                         const LinearParams& p);

struct QuadratureRule {
  int panels = 8;
  double tol = 1e-8;
  bool graded = false;
};

// int_0^t W(t-s) source(s) ds. Evaluated with rule.panels and twice as many; the relative
// change is the error estimate and must not exceed rule.tol (ToleranceError otherwise).
LinearState duhamel_integrate(const std::function<LinearState(double)>& source, const LinearParams& p,
                              double t, const QuadratureRule& rule, double* estimate = nullptr);

// Final-node value for a source already sampled on grid.nodes().
LinearState duhamel_integrate(const TimeGrid& grid, const std::vector<LinearState>& source,
                              const LinearParams& p);

}  // namespace kw
