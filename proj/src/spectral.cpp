#include "kw/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "kw/errors.hpp"

namespace kw {

namespace {

std::size_t ipow(int n, int d) {
  std::size_t s = 1;
  for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

// Index of the mode -k for flat index j.
std::size_t mirror_index(const TorusGrid& g, std::size_t j) {
  const int n = g.n();
  std::size_t out = 0;
  std::size_t stride = g.size();
  for (int a = 0; a < g.dim(); ++a) {
    stride /= static_cast<std::size_t>(n);
    const std::size_t i = (j / stride) % static_cast<std::size_t>(n);
    out += ((static_cast<std::size_t>(n) - i) % static_cast<std::size_t>(n)) * stride;
  }
  return out;
}

// FFTW plans are cached per (dim, n, sign); plan creation is not thread-safe, execution is.
struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(dim, n, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    std::vector<int> dims(static_cast<std::size_t>(dim), n);
    const std::size_t total = ipow(n, dim);
    fftw_complex* a = fftw_alloc_complex(total);
    fftw_complex* b = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(dim, dims.data(), a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(a);
    fftw_free(b);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

TorusGrid::TorusGrid(int dim, double side_length, int n) : dim_(dim), L_(side_length), n_(n) {
  if (dim < 1 || dim > 3) throw ShapeError("TorusGrid: dim must be 1, 2 or 3");
  if (!(side_length > 0.0) || !std::isfinite(side_length)) throw DomainError("TorusGrid: side length must be positive");
  if (n < 8 || n % 2 != 0) throw ShapeError("TorusGrid: n must be even and >= 8");
  size_ = ipow(n, dim);
  auto t = std::make_shared<ModeTable>();
  t->k.resize(static_cast<std::size_t>(dim) * size_);
  t->xi.resize(static_cast<std::size_t>(dim) * size_);
  t->xi_sq.assign(size_, 0.0);
  t->nyquist.assign(size_, 0);
  t->dealias_keep.assign(size_, 1);
  t->shell.resize(size_);
  const double k0 = 2.0 * std::numbers::pi / L_;
  const int cut = n / 3;
  std::vector<long> ksq(size_, 0);
  for (std::size_t j = 0; j < size_; ++j) {
    std::size_t stride = size_;
    for (int a = 0; a < dim; ++a) {
      stride /= static_cast<std::size_t>(n);
      const int i = static_cast<int>((j / stride) % static_cast<std::size_t>(n));
      const int kk = i < n / 2 ? i : i - n;
      t->k[a * size_ + j] = kk;
      t->xi[a * size_ + j] = k0 * kk;
      ksq[j] += static_cast<long>(kk) * kk;
      if (kk == -n / 2) t->nyquist[j] = 1;
      if (std::abs(kk) > cut) t->dealias_keep[j] = 0;
    }
    t->xi_sq[j] = k0 * k0 * static_cast<double>(ksq[j]);
  }
  std::map<long, int> shells;
  for (std::size_t j = 0; j < size_; ++j) shells.emplace(ksq[j], 0);
  int idx = 0;
  for (auto& [key, val] : shells) {
    val = idx++;
    t->shell_xi_sq.push_back(k0 * k0 * static_cast<double>(key));
  }
  for (std::size_t j = 0; j < size_; ++j) t->shell[j] = shells[ksq[j]];
  modes_ = std::move(t);
}

double TorusGrid::volume() const { return std::pow(L_, dim_); }

double TorusGrid::coord(std::size_t j, int axis) const {
  std::size_t stride = size_;
  for (int a = 0; a <= axis; ++a) stride /= static_cast<std::size_t>(n_);
  return h() * static_cast<double>((j / stride) % static_cast<std::size_t>(n_));
}

double TorusGrid::xi_max() const { return std::sqrt(modes_->shell_xi_sq.back()); }

double TorusGrid::xi_min() const { return 2.0 * std::numbers::pi / L_; }

SpectralField::SpectralField(const TorusGrid& grid, int components)
    : grid_(grid), components_(components), coeffs_(static_cast<std::size_t>(components) * grid.size()) {
  if (components < 1) throw ShapeError("SpectralField: components must be >= 1");
}

SpectralField SpectralField::component(int c) const {
  if (c < 0 || c >= components_) throw ShapeError("SpectralField::component: index out of range");
  SpectralField out(grid_, 1);
  std::copy(data(c), data(c) + modes(), out.data(0));
  return out;
}

void SpectralField::set_component(int c, const SpectralField& scalar) {
  if (c < 0 || c >= components_ || scalar.components() != 1) throw ShapeError("SpectralField::set_component");
  require_same_grid(*this, scalar, "set_component");
  std::copy(scalar.data(0), scalar.data(0) + modes(), data(c));
}

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* where) {
  if (a.grid() != b.grid()) throw ShapeError(std::string(where) + ": grid mismatch");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(*this, o, "operator+=");
  if (o.components_ != components_) throw ShapeError("operator+=: component mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(*this, o, "operator-=");
  if (o.components_ != components_) throw ShapeError("operator-=: component mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& b) {
  require_same_grid(*this, b, "axpy");
  if (b.components_ != components_) throw ShapeError("axpy: component mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * b.coeffs_[i];
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

void fft_forward(const TorusGrid& grid, const cplx* in, cplx* out) {
  fftw_plan p = plan_cache().get(grid.dim(), grid.n(), FFTW_FORWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)), reinterpret_cast<fftw_complex*>(out));
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] *= scale;
}

void fft_inverse(const TorusGrid& grid, const cplx* in, cplx* out) {
  fftw_plan p = plan_cache().get(grid.dim(), grid.n(), FFTW_BACKWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)), reinterpret_cast<fftw_complex*>(out));
}

SpectralField to_spectral(const TorusGrid& grid, int components, const std::vector<double>& samples) {
  if (components < 1 || samples.size() != static_cast<std::size_t>(components) * grid.size())
    throw ShapeError("to_spectral: sample count does not match grid");
  SpectralField f(grid, components);
  std::vector<cplx> buf(grid.size());
  for (int c = 0; c < components; ++c) {
    const double* s = samples.data() + static_cast<std::size_t>(c) * grid.size();
    for (std::size_t j = 0; j < grid.size(); ++j) buf[j] = cplx(s[j], 0.0);
    fft_forward(grid, buf.data(), f.data(c));
  }
  return f;
}

std::vector<double> from_spectral(const SpectralField& f) {
  const std::size_t n = f.modes();
  std::vector<double> out(static_cast<std::size_t>(f.components()) * n);
  std::vector<cplx> buf(n);
  for (int c = 0; c < f.components(); ++c) {
    fft_inverse(f.grid(), f.data(c), buf.data());
    double* o = out.data() + static_cast<std::size_t>(c) * n;
    for (std::size_t j = 0; j < n; ++j) o[j] = buf[j].real();
  }
  return out;
}

std::vector<double> sample(const TorusGrid& grid, int components,
                           const std::function<double(const double* x, int c)>& fn) {
  std::vector<double> out(static_cast<std::size_t>(components) * grid.size());
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coord(j, a);
    for (int c = 0; c < components; ++c) out[static_cast<std::size_t>(c) * grid.size() + j] = fn(x.data(), c);
  }
  return out;
}

double l2_norm(const SpectralField& f) {
  double s = 0.0;
  for (const auto& c : f.raw()) s += std::norm(c);
  return std::sqrt(f.grid().volume() * s);
}

double physical_l2(const TorusGrid& grid, int components, const std::vector<double>& samples) {
  if (samples.size() != static_cast<std::size_t>(components) * grid.size()) throw ShapeError("physical_l2: shape");
  double s = 0.0;
  for (double v : samples) s += v * v;
  return std::sqrt(s * grid.volume() / static_cast<double>(grid.size()));
}

double inner(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b, "inner");
  if (a.components() != b.components()) throw ShapeError("inner: component mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.raw().size(); ++i) s += (std::conj(a.raw()[i]) * b.raw()[i]).real();
  return a.grid().volume() * s;
}

double sup_norm_samples(const TorusGrid& grid, int components, const std::vector<double>& samples) {
  double m = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double s = 0.0;
    for (int c = 0; c < components; ++c) {
      const double v = samples[static_cast<std::size_t>(c) * grid.size() + j];
      s += v * v;
    }
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

double sup_norm(const SpectralField& f) { return sup_norm_samples(f.grid(), f.components(), from_spectral(f)); }

double max_abs_coefficient(const SpectralField& f) {
  double m = 0.0;
  for (const auto& c : f.raw()) m = std::max(m, std::abs(c));
  return m;
}

double hermitian_defect(const SpectralField& f) {
  const double scale = max_abs_coefficient(f);
  if (scale == 0.0) return 0.0;
  double d = 0.0;
  for (int c = 0; c < f.components(); ++c)
    for (std::size_t j = 0; j < f.modes(); ++j)
      d = std::max(d, std::abs(f.at(c, mirror_index(f.grid(), j)) - std::conj(f.at(c, j))));
  return d / scale;
}

SpectralField zero_nyquist(SpectralField f) {
  const auto& g = f.grid();
  for (int c = 0; c < f.components(); ++c)
    for (std::size_t j = 0; j < f.modes(); ++j)
      if (g.nyquist(j)) f.at(c, j) = 0.0;
  return f;
}

SpectralField apply_multiplier(const SpectralField& f, const std::function<double(std::size_t)>& m) {
  SpectralField out = f;
  const auto& g = f.grid();
  for (std::size_t j = 0; j < f.modes(); ++j) {
    const double w = g.nyquist(j) ? 0.0 : m(j);
    for (int c = 0; c < f.components(); ++c) out.at(c, j) *= w;
  }
  return out;
}

SpectralField apply_lambda_power(const SpectralField& f, double s, bool strict) {
  if (s == 0.0) return zero_nyquist(f);
  if (s < 0.0 && strict) {
    for (int c = 0; c < f.components(); ++c)
      if (std::abs(f.at(c, 0)) > 0.0)
        throw SingularOperatorError("apply_lambda_power: negative power applied to a field with nonzero mean");
  }
  const auto& g = f.grid();
  return apply_multiplier(f, [&](std::size_t j) {
    const double x = g.xi_sq(j);
    return x > 0.0 ? std::pow(x, 0.5 * s) : 0.0;
  });
}

std::pair<SpectralField, SpectralField> leray_split(const SpectralField& m) {
  const auto& g = m.grid();
  const int d = g.dim();
  if (m.components() != d) throw ShapeError("leray_split: expected a vector field");
  SpectralField Q(g, d);
  for (std::size_t j = 0; j < m.modes(); ++j) {
    const double x = g.xi_sq(j);
    if (x == 0.0 || g.nyquist(j)) continue;
    cplx dot = 0.0;
    for (int a = 0; a < d; ++a) dot += g.xi(j, a) * m.at(a, j);
    for (int a = 0; a < d; ++a) Q.at(a, j) = g.xi(j, a) * dot / x;
  }
  SpectralField P = zero_nyquist(m);
  P -= Q;
  return {P, Q};
}

SpectralField partial(const SpectralField& f, int axis) {
  const auto& g = f.grid();
  if (axis < 0 || axis >= g.dim()) throw ShapeError("partial: axis out of range");
  SpectralField out(g, f.components());
  for (int c = 0; c < f.components(); ++c)
    for (std::size_t j = 0; j < f.modes(); ++j)
      out.at(c, j) = g.nyquist(j) ? cplx(0.0) : cplx(0.0, g.xi(j, axis)) * f.at(c, j);
  return out;
}

SpectralField gradient(const SpectralField& scalar) {
  if (scalar.components() != 1) throw ShapeError("gradient: expected a scalar field");
  const auto& g = scalar.grid();
  SpectralField out(g, g.dim());
  for (int a = 0; a < g.dim(); ++a)
    for (std::size_t j = 0; j < scalar.modes(); ++j)
      out.at(a, j) = g.nyquist(j) ? cplx(0.0) : cplx(0.0, g.xi(j, a)) * scalar.at(0, j);
  return out;
}

SpectralField divergence(const SpectralField& vec) {
  const auto& g = vec.grid();
  if (vec.components() != g.dim()) throw ShapeError("divergence: expected a vector field");
  SpectralField out(g, 1);
  for (std::size_t j = 0; j < vec.modes(); ++j) {
    if (g.nyquist(j)) continue;
    cplx s = 0.0;
    for (int a = 0; a < g.dim(); ++a) s += cplx(0.0, g.xi(j, a)) * vec.at(a, j);
    out.at(0, j) = s;
  }
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  const auto& g = f.grid();
  return apply_multiplier(f, [&](std::size_t j) { return -g.xi_sq(j); });
}

SpectralField curl2d(const SpectralField& vec) {
  const auto& g = vec.grid();
  if (g.dim() != 2 || vec.components() != 2) throw ShapeError("curl2d: expected a 2D vector field");
  SpectralField out(g, 1);
  for (std::size_t j = 0; j < vec.modes(); ++j) {
    if (g.nyquist(j)) continue;
    out.at(0, j) = cplx(0.0, g.xi(j, 0)) * vec.at(1, j) - cplx(0.0, g.xi(j, 1)) * vec.at(0, j);
  }
  return out;
}

SpectralField dealias(const SpectralField& f) {
  const auto& keep = f.grid().modes().dealias_keep;
  SpectralField out = f;
  for (int c = 0; c < f.components(); ++c)
    for (std::size_t j = 0; j < f.modes(); ++j)
      if (!keep[j]) out.at(c, j) = 0.0;
  return out;
}

SpectralField random_field(const TorusGrid& grid, int components, std::mt19937_64& rng,
                           const std::function<double(double)>& envelope) {
  SpectralField f(grid, components);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int c = 0; c < components; ++c) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const std::size_t jm = mirror_index(grid, j);
      if (jm < j) continue;
      if (jm == j || grid.nyquist(j) || grid.xi_sq(j) == 0.0) continue;
      const double a = envelope(std::sqrt(grid.xi_sq(j)));
      const cplx v(a * gauss(rng), a * gauss(rng));
      f.at(c, j) = v;
      f.at(c, jm) = std::conj(v);
    }
  }
  return f;
}

}  // namespace kw
