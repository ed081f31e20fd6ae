#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <random>
#include <utility>
#include <vector>

namespace kw {

using cplx = std::complex<double>;

// Per-grid wavevector tables. Layout of per-axis arrays: [axis * size + j].
struct ModeTable {
  std::vector<int> k;
  std::vector<double> xi;
  std::vector<double> xi_sq;
  std::vector<unsigned char> nyquist;
  std::vector<unsigned char> dealias_keep;
  // Modes grouped by integer |k|^2; shell_xi_sq[shell[j]] == xi_sq[j] exactly.
  std::vector<int> shell;
  std::vector<double> shell_xi_sq;
};

// Periodic box [0, L)^dim with n samples per axis. Samples are stored row-major
// with axis 0 slowest; wavenumber index k maps to 2*pi*k/L with k in [-n/2, n/2).
class TorusGrid {
 public:
  TorusGrid() = default;
  TorusGrid(int dim, double side_length, int n);

  int dim() const { return dim_; }
  double side_length() const { return L_; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }
  double h() const { return L_ / n_; }
  double volume() const;

  int k(std::size_t j, int axis) const { return modes_->k[axis * size_ + j]; }
  double xi(std::size_t j, int axis) const { return modes_->xi[axis * size_ + j]; }
  double xi_sq(std::size_t j) const { return modes_->xi_sq[j]; }
  bool nyquist(std::size_t j) const { return modes_->nyquist[j] != 0; }
  const ModeTable& modes() const { return *modes_; }

  // Physical coordinate of sample j along axis.
  double coord(std::size_t j, int axis) const;
  // Largest |xi| and smallest nonzero |xi| on the lattice.
  double xi_max() const;
  double xi_min() const;

  bool operator==(const TorusGrid& o) const { return dim_ == o.dim_ && n_ == o.n_ && L_ == o.L_; }
  bool operator!=(const TorusGrid& o) const { return !(*this == o); }

 private:
  int dim_ = 0;
  double L_ = 0.0;
  int n_ = 0;
  std::size_t size_ = 0;
  std::shared_ptr<const ModeTable> modes_;
};

// Fourier coefficients of a real field, normalized so that f(x_j) = sum_k c_k e^{i k.x_j}.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(const TorusGrid& grid, int components);

  const TorusGrid& grid() const { return grid_; }
  int components() const { return components_; }
  std::size_t modes() const { return grid_.size(); }
  bool empty() const { return components_ == 0; }

  cplx* data(int c) { return coeffs_.data() + static_cast<std::size_t>(c) * modes(); }
  const cplx* data(int c) const { return coeffs_.data() + static_cast<std::size_t>(c) * modes(); }
  cplx& at(int c, std::size_t j) { return data(c)[j]; }
  cplx at(int c, std::size_t j) const { return data(c)[j]; }
  std::vector<cplx>& raw() { return coeffs_; }
  const std::vector<cplx>& raw() const { return coeffs_; }

  SpectralField component(int c) const;
  void set_component(int c, const SpectralField& scalar);

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  // a += s * b
  SpectralField& axpy(double s, const SpectralField& b);

 private:
  TorusGrid grid_;
  int components_ = 0;
  std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* where);

// Physical samples are component-major: samples[c * grid.size() + j].
SpectralField to_spectral(const TorusGrid& grid, int components, const std::vector<double>& samples);
std::vector<double> from_spectral(const SpectralField& f);

std::vector<double> sample(const TorusGrid& grid, int components,
                           const std::function<double(const double* x, int c)>& fn);

// Raw complex transforms on one component (size grid.size()).
void fft_forward(const TorusGrid& grid, const cplx* in, cplx* out);
void fft_inverse(const TorusGrid& grid, const cplx* in, cplx* out);

// L2 over the box, computed spectrally: sqrt(L^N sum |c_k|^2), summed over components.
double l2_norm(const SpectralField& f);
double physical_l2(const TorusGrid& grid, int components, const std::vector<double>& samples);
// Real L2 inner product over the box.
double inner(const SpectralField& a, const SpectralField& b);
// max_x |f(x)| with |.| the Euclidean norm over components.
double sup_norm(const SpectralField& f);
double sup_norm_samples(const TorusGrid& grid, int components, const std::vector<double>& samples);
double max_abs_coefficient(const SpectralField& f);
// max_k |c_{-k} - conj(c_k)| / max_k |c_k|.
double hermitian_defect(const SpectralField& f);

SpectralField zero_nyquist(SpectralField f);
// Multiplies mode j by m(j) in every component, then zeroes the Nyquist modes.
SpectralField apply_multiplier(const SpectralField& f, const std::function<double(std::size_t)>& m);

// Lambda^s = |D|^s. Mean mode goes to 0 for s != 0; strict rejects s < 0 with nonzero mean.
SpectralField apply_lambda_power(const SpectralField& f, double s, bool strict = false);

// (P m, Q m) with Q = xi xi^T / |xi|^2; the mean mode belongs to P.
std::pair<SpectralField, SpectralField> leray_split(const SpectralField& m);

SpectralField partial(const SpectralField& f, int axis);
SpectralField gradient(const SpectralField& scalar);
SpectralField divergence(const SpectralField& vec);
SpectralField laplacian(const SpectralField& f);
// Scalar vorticity d1 u2 - d2 u1 (dim 2 only).
SpectralField curl2d(const SpectralField& vec);

// 2/3-rule truncation: keeps modes with |k_axis| <= n/3 on every axis.
SpectralField dealias(const SpectralField& f);

// Random real field: complex Gaussian coefficients with scale envelope(|xi|).
// Nyquist and mean modes are zero.
SpectralField random_field(const TorusGrid& grid, int components, std::mt19937_64& rng,
                           const std::function<double(double)>& envelope);

}  // namespace kw
