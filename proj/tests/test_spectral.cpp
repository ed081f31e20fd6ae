#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kw/dyadic.hpp"
#include "kw/errors.hpp"
#include "kw/snapshot.hpp"
#include "kw/spectral.hpp"

using namespace kw;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

SpectralField smooth_random(const TorusGrid& g, int comps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_field(g, comps, rng, [](double k) { return std::exp(-0.05 * k * k); });
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(TorusGrid(2, 1.0, 7), ShapeError);
  CHECK_THROWS_AS(TorusGrid(2, 1.0, 6), ShapeError);
  CHECK_THROWS_AS(TorusGrid(4, 1.0, 8), ShapeError);
  CHECK_THROWS_AS(TorusGrid(1, -1.0, 8), DomainError);
  const TorusGrid g(2, 3.0, 16);
  CHECK(g.size() == 256);
  CHECK(g.h() == doctest::Approx(3.0 / 16));
  CHECK(g.xi_min() == doctest::Approx(2 * std::numbers::pi / 3.0));
}

TEST_CASE("constant field has only the mean coefficient") {
  const TorusGrid g(2, 2.0, 16);
  std::vector<double> s(g.size(), 1.75);
  const auto f = to_spectral(g, 1, s);
  CHECK(std::abs(f.at(0, 0) - cplx(1.75)) < 1e-14);
  double rest = 0.0;
  for (std::size_t j = 1; j < g.size(); ++j) rest = std::max(rest, std::abs(f.at(0, j)));
  CHECK(rest < 1e-14);
}

TEST_CASE("cosine gives two conjugate coefficients of modulus 1/2") {
  const double L = 2.5;
  const TorusGrid g(1, L, 32);
  const auto s = sample(g, 1, [&](const double* x, int) { return std::cos(2 * std::numbers::pi * x[0] / L); });
  const auto f = to_spectral(g, 1, s);
  int count = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (std::abs(f.at(0, j)) > 1e-12) {
      ++count;
      CHECK(std::abs(g.k(j, 0)) == 1);
      CHECK(std::abs(f.at(0, j)) == doctest::Approx(0.5).epsilon(1e-13));
    }
  }
  CHECK(count == 2);
}

TEST_CASE("round trip and Parseval on random fields") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int dim : {1, 2}) {
    const TorusGrid g(dim, 1.7, dim == 1 ? 64 : 32);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> s(2 * g.size());
      for (auto& x : s) x = nd(rng);
      const auto f = to_spectral(g, 2, s);
      const auto back = from_spectral(f);
      CHECK(max_abs_diff(s, back) <= 1e-12 * max_abs(s));
      const double phys = physical_l2(g, 2, s);
      CHECK(std::abs(l2_norm(f) - phys) <= 1e-12 * phys);
    }
  }
}

TEST_CASE("shape errors") {
  const TorusGrid g(2, 1.0, 16);
  CHECK_THROWS_AS(to_spectral(g, 1, std::vector<double>(10)), ShapeError);
  const TorusGrid h(2, 1.0, 32);
  SpectralField a(g, 1), b(h, 1);
  CHECK_THROWS_AS(a += b, ShapeError);
  CHECK_THROWS_AS(divergence(SpectralField(g, 1)), ShapeError);
  CHECK_THROWS_AS(gradient(SpectralField(g, 2)), ShapeError);
}

TEST_CASE("random fields are real and mean free") {
  const TorusGrid g(2, 1.0, 32);
  const auto f = smooth_random(g, 2, 3);
  CHECK(hermitian_defect(f) <= 1e-12);
  CHECK(std::abs(f.at(0, 0)) == 0.0);
  CHECK(hermitian_defect(laplacian(f)) <= 1e-12);
}

TEST_CASE("Lambda powers") {
  const double L = 2.0;
  const TorusGrid g(1, L, 64);
  const double w = 3 * 2 * std::numbers::pi / L;
  const auto f = to_spectral(g, 1, sample(g, 1, [&](const double* x, int) { return std::cos(w * x[0]); }));
  CHECK(max_abs_coefficient(apply_lambda_power(f, 0.0) - f) < 1e-15);
  const auto l2 = from_spectral(apply_lambda_power(f, 2.0));
  const auto expect = sample(g, 1, [&](const double* x, int) { return w * w * std::cos(w * x[0]); });
  CHECK(max_abs_diff(l2, expect) <= 1e-11 * w * w);

  const TorusGrid g2(2, 1.3, 32);
  const auto r = smooth_random(g2, 1, 11);
  const auto back = apply_lambda_power(apply_lambda_power(r, 1.0), -1.0);
  CHECK(max_abs_diff(from_spectral(back), from_spectral(r)) <= 1e-11 * sup_norm(r));

  std::vector<double> c(g2.size(), 2.0);
  const auto cf = to_spectral(g2, 1, c);
  CHECK(max_abs_coefficient(apply_lambda_power(cf, -1.0)) == 0.0);
  CHECK_THROWS_AS(apply_lambda_power(cf, -1.0, true), SingularOperatorError);
  CHECK(max_abs_coefficient(apply_lambda_power(cf, 1.0)) == 0.0);
}

TEST_CASE("Leray split") {
  const TorusGrid g(2, 1.0, 32);
  const auto phi = smooth_random(g, 1, 5);
  const auto grad = gradient(phi);
  auto [pg, qg] = leray_split(grad);
  CHECK(max_abs_coefficient(pg) <= 1e-11 * max_abs_coefficient(grad));
  CHECK(max_abs_coefficient(qg - grad) <= 1e-11 * max_abs_coefficient(grad));

  // curl-type field (-d2 psi, d1 psi) is divergence free
  const auto psi = smooth_random(g, 1, 6);
  SpectralField sol(g, 2);
  sol.set_component(0, -1.0 * partial(psi, 1));
  sol.set_component(1, partial(psi, 0));
  auto [ps, qs] = leray_split(sol);
  CHECK(max_abs_coefficient(qs) <= 1e-11 * max_abs_coefficient(sol));

  for (int trial = 0; trial < 10; ++trial) {
    auto m = smooth_random(g, 2, 100 + trial);
    m.at(0, 0) = 0.3;  // mean goes to P
    auto [p, q] = leray_split(m);
    const double ref = max_abs_coefficient(m);
    CHECK(max_abs_coefficient(p + q - m) <= 1e-11 * ref);
    CHECK(max_abs_coefficient(divergence(p)) <= 1e-11 * ref * g.xi_max());
    CHECK(std::abs(p.at(0, 0) - cplx(0.3)) < 1e-15);
    auto [pp, pq] = leray_split(p);
    auto [qp, qq] = leray_split(q);
    CHECK(max_abs_coefficient(pp - p) <= 1e-11 * ref);
    CHECK(max_abs_coefficient(qq - q) <= 1e-11 * ref);
    CHECK(max_abs_coefficient(pq) <= 1e-11 * ref);
    CHECK(max_abs_coefficient(qp) <= 1e-11 * ref);
  }
}

TEST_CASE("chi profile and block multipliers") {
  CHECK(DyadicDecomposition::chi(0.0) == 1.0);
  CHECK(DyadicDecomposition::chi(4.0 / 3.0) == 1.0);
  CHECK(DyadicDecomposition::chi(1.5) == 0.0);
  // s = 1/2: 1 - (4/8 - 3/16)
  CHECK(DyadicDecomposition::chi(17.0 / 12.0) == doctest::Approx(0.6875).epsilon(1e-14));
  for (int l = -2; l <= 4; ++l) {
    const double lo = std::ldexp(1.0, l);
    CHECK(DyadicDecomposition::phi(l, lo * 8.0 / 9.0 * 0.999) == 0.0);
    CHECK(DyadicDecomposition::phi(l, lo * 2.0 * 1.001) == 0.0);
    CHECK(DyadicDecomposition::phi(l, lo * 1.3) == 1.0);
  }
}

TEST_CASE("partition of unity on grid wavevectors") {
  for (auto [dim, L, n] : {std::tuple{1, 1.0, 64}, std::tuple{2, 2.0, 64}, std::tuple{2, 0.7, 32}}) {
    const TorusGrid g(dim, L, n);
    const auto dec = DyadicDecomposition::for_grid(g);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g.xi_sq(j) == 0.0) continue;
      double s = 0.0;
      for (int l = dec.l_min(); l <= dec.l_max(); ++l) s += DyadicDecomposition::phi(l, std::sqrt(g.xi_sq(j)));
      worst = std::max(worst, std::abs(s - 1.0));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("blocks sum to the mean-free field") {
  const TorusGrid g(2, 1.0, 32);
  auto f = smooth_random(g, 1, 9);
  f.at(0, 0) = 0.7;
  const auto dec = DyadicDecomposition::for_grid(g);
  SpectralField sum(g, 1);
  for (int l = dec.l_min(); l <= dec.l_max(); ++l) sum += dyadic_block(f, l, dec);
  auto mf = f;
  mf.at(0, 0) = 0.0;
  CHECK(max_abs_diff(from_spectral(sum), from_spectral(mf)) <= 1e-10);
  CHECK(max_abs_coefficient(dyadic_block(f, dec.l_max() + 3, dec)) == 0.0);
}

TEST_CASE("block supported field") {
  const TorusGrid g(2, 2 * std::numbers::pi, 64);  // xi = k
  const int l0 = 3;
  std::mt19937_64 rng(1);
  // plateau of block 3: 8 <= |k| <= 14.2
  const auto f = random_field(g, 1, rng, [](double k) { return (k >= 8.5 && k <= 14.0) ? 1.0 : 0.0; });
  CHECK(max_abs_coefficient(dyadic_block(f, l0) - f) <= 1e-14);
  for (int l : {0, 1, 5})
    CHECK(max_abs_coefficient(dyadic_block(f, l)) == 0.0);
}

TEST_CASE("almost orthogonality of blocks") {
  const TorusGrid g(2, 1.0, 64);
  const auto dec = DyadicDecomposition::for_grid(g);
  for (int trial = 0; trial < 20; ++trial) {
    std::mt19937_64 rng(40 + trial);
    const auto f = random_field(g, 1, rng, [](double) { return 1.0; });
    double sum = 0.0;
    for (auto [l, v] : dyadic_profile(f, dec)) sum += v * v;
    const double n2 = l2_norm(f) * l2_norm(f);
    CHECK(n2 >= sum / 3.0);
    CHECK(n2 <= 2.0 * sum * (1 + 1e-6));
    CHECK(sum <= n2 * (1 + 1e-6));
  }
}

TEST_CASE("blocks commute with derivatives") {
  const TorusGrid g(2, 1.0, 32);
  const auto f = smooth_random(g, 1, 12);
  for (int l : {2, 3, 4}) {
    const auto a = dyadic_block(partial(f, 0), l);
    const auto b = partial(dyadic_block(f, l), 0);
    CHECK(max_abs_coefficient(a - b) <= 1e-11 * max_abs_coefficient(partial(f, 0)));
  }
}

TEST_CASE("Gaussian profile decays faster than any exponential") {
  const double L = 2 * std::numbers::pi;
  const TorusGrid g(1, L, 256);
  const double c[1] = {L / 2};
  const auto f = to_spectral(g, 1, sample(g, 1, [&](const double* x, int) {
    const double r = x[0] - c[0];
    return std::exp(-r * r / (2 * 0.04));
  }));
  const auto prof = dyadic_profile(f);
  // successive log-ratios grow in magnitude once the bump's scale is passed
  const double r4 = std::log(prof.at(4) / prof.at(3));
  const double r5 = std::log(prof.at(5) / prof.at(4));
  const double r6 = std::log(prof.at(6) / prof.at(5));
  CHECK(r5 < r4);
  CHECK(r6 < r5);
  CHECK(r6 < -10.0);
}

TEST_CASE("KWF1 snapshot round trip") {
  const TorusGrid g(2, 1.5, 16);
  const auto f = smooth_random(g, 2, 21);
  const auto bytes = encode_snapshot(f);
  CHECK(bytes.substr(0, 4) == "KWF1");
  CHECK(bytes.size() == 4 + 12 + 8 + 8 * 2 * g.size());
  CHECK(static_cast<unsigned char>(bytes[4]) == 2);
  const auto back = decode_snapshot(bytes);
  CHECK(back.grid() == g);
  const auto phys = from_spectral(f);
  CHECK(max_abs_diff(from_spectral(back), phys) <= 1e-14 * max_abs(phys));
  CHECK(encode_snapshot(back).size() == bytes.size());
  CHECK_THROWS_AS(decode_snapshot("KWF2" + bytes.substr(4)), IoError);
  CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, bytes.size() - 3)), IoError);
  CHECK_THROWS_AS(read_snapshot("/nonexistent/path.kwf"), IoError);
}

TEST_CASE("dealias keeps the two-thirds band") {
  const TorusGrid g(1, 1.0, 48);
  std::mt19937_64 rng(2);
  const auto f = random_field(g, 1, rng, [](double) { return 1.0; });
  const auto d = dealias(f);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (std::abs(g.k(j, 0)) > 16) CHECK(d.at(0, j) == cplx(0.0));
    else CHECK(d.at(0, j) == f.at(0, j));
  }
}

TEST_CASE("curl of a gradient vanishes") {
  const TorusGrid g(2, 1.0, 32);
  const auto f = smooth_random(g, 1, 77);
  CHECK(max_abs_coefficient(curl2d(gradient(f))) <= 1e-10 * max_abs_coefficient(f));
}
