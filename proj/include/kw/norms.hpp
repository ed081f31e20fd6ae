#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kw/dyadic.hpp"
#include "kw/spectral.hpp"
#include "kw/state.hpp"

namespace kw {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// One field sampled in time. `initial` is the value at t = 0 when known; otherwise the
// first sample is extended as a constant down to t = 0.
struct FieldSeries {
  std::vector<double> times;
  std::vector<SpectralField> fields;
  std::optional<SpectralField> initial;

  const TorusGrid& grid() const { return fields.front().grid(); }
  void validate() const;
};

enum class Component { q, m1, m2 };
// Samples at t > 0; a t = 0 sample becomes `initial`.
FieldSeries series(const Trajectory& traj, Component c);

// Sampling of the sup over balls B(x, sqrt t). Ball integrals are FFT convolutions on the
// 2n padded grid, so every padded point is available as a center at no extra cost; centers
// sit on every `center_stride`-th padded point per axis (2 = the solver grid itself).
// Times are T 2^{-j / per_octave}, j = 0 .. octaves * per_octave.
struct BallSampling {
  int center_stride = 2;
  int octaves = 12;
  int per_octave = 4;
  int gauss_points = 8;

  BallSampling refined() const;
};

// ell^r over l of 2^{ls} ||Delta_l f||_{L2}.
double besov_norm(const SpectralField& f, double s, double r);
double besov_norm(const SpectralField& f, double s, double r, const DyadicDecomposition& dec);
// sup over l of 2^{l s_low} ||Delta_l f|| (l <= l0) and 2^{l s_high} ||Delta_l f|| (l > l0).
double hybrid_besov_norm(const SpectralField& f, double s_low, double s_high, int l0);

// ell^r over l of 2^{ls} || t -> ||Delta_l f(t)|| ||_{L^rho(0, t_last)}, trapezoid in time.
double chemin_lerner_norm(const FieldSeries& u, double rho_exp, double s, double r);
std::map<int, double> chemin_lerner_profile(const FieldSeries& u, double rho_exp);

// Integral of the ball indicator against e^{i xi.y}: the radial transform of B(0, r).
double ball_transform(int dim, double r, double xi_abs);

// (sup_{x, t < T} t^{-N/2} int_0^t int_{B(x, sqrt t)} |e^{s Delta} w0|^2)^{1/2}.
double caloric_bmo_norm(const SpectralField& w0, double T, const BallSampling& sampling = {});
// (t, t^{-N/2} sup_x int_0^t int_{B(x, sqrt t)} |e^{s Delta} w0|^2) at every sampled t; the norm at any
// T 2^{-h} is the root of the max over the samples in [T 2^{-h-octaves}, T 2^{-h}].
std::vector<std::pair<double, double>> caloric_bmo_profile(const SpectralField& w0, double T,
                                                           const BallSampling& sampling = {});

struct EtParts {
  double sup_part = 0.0;      // sup_t sqrt(t) ||u(t)||_inf
  double carleson_part = 0.0;  // (sup t^{-N/2} int int |u|^2)^{1/2}
  double total() const { return sup_part + carleson_part; }
};
EtParts et_norm_parts(const FieldSeries& u, double T, const BallSampling& sampling = {});
double et_norm(const FieldSeries& u, double T, const BallSampling& sampling = {});

struct NormReport {
  std::map<std::string, double> values;
  std::map<std::string, std::map<int, double>> blocks;
  std::map<std::string, double> resolution;
  std::vector<std::string> flags;

  double at(const std::string& id) const;
};

// E, W, sup |q| and X = E + W + sup |q| for a solution trajectory; r = infinity throughout.
NormReport composite_norms(const Trajectory& traj, double s1);

// Rows "norm,T,value,refinement".
void write_csv_header(std::ostream& os);
void write_csv(std::ostream& os, const NormReport& report, double T, int refinement);

}  // namespace kw
