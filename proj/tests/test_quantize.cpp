#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "weylab/quantize.hpp"

using namespace weylab;
using Complex = std::complex<double>;

namespace {

// Wigner transform of two Hermite functions by direct quadrature:
// W(h_n, h_m)(x, xi) = (1/pi) Int h_n(x+u) h_m(x-u) e^{-2 i u xi} du.
Complex wigner_oracle(int n, int m, double x, double xi) {
  const QuadRule& gh = gauss_hermite(96);
  Complex acc = 0.0;
  // substitute u directly; e^{-u^2} weight folded back out
  for (int i = 0; i < gh.nodes.size(); ++i) {
    double u = gh.nodes[i];
    double f = hermite_function(n, x + u) * hermite_function(m, x - u) * std::exp(u * u);
    acc += gh.weights[i] * f * std::polar(1.0, -2.0 * u * xi);
  }
  return acc / M_PI;
}

const PolyProfile kOne{{1.0}};
const PolyProfile kR2{{0.0, 1.0}};
const PolyProfile kR4{{0.0, 0.0, 1.0}};

}  // namespace

TEST_CASE("hermite function values and orthonormality") {
  CHECK(hermite_function(0, 0.0) == doctest::Approx(std::pow(M_PI, -0.25)));
  CHECK(hermite_function(1, 0.0) == doctest::Approx(0.0));
  // 64-point Gauss-Hermite: Int h_3(x)^2 dx = 1
  const QuadRule& gh = gauss_hermite(64);
  double acc = 0.0;
  for (int i = 0; i < gh.nodes.size(); ++i) {
    double h = hermite_function(3, gh.nodes[i]);
    acc += gh.weights[i] * h * h * std::exp(gh.nodes[i] * gh.nodes[i]);
  }
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
  // distinct indices are orthogonal
  double cross = 0.0;
  for (int i = 0; i < gh.nodes.size(); ++i) {
    cross += gh.weights[i] * hermite_function(2, gh.nodes[i]) *
             hermite_function(4, gh.nodes[i]) * std::exp(gh.nodes[i] * gh.nodes[i]);
  }
  CHECK(std::abs(cross) < 1e-12);
}

TEST_CASE("radial Weyl transform: identity, harmonic, quartic") {
  auto id = radial_weyl_eigs(kOne, 64);
  for (int n = 0; n < 64; ++n) CHECK(id.eigenvalues[n] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(id.trusted_count == 64);

  auto harm = radial_weyl_eigs(kR2, 128);
  for (int n = 0; n < 128; ++n)
    CHECK(harm.eigenvalues[n] == doctest::Approx(2.0 * n + 1.0).epsilon(1e-10));

  auto quart = radial_weyl_eigs(kR4, 64);
  for (int n = 0; n < 64; ++n) {
    double expect = (2.0 * n + 1.0) * (2.0 * n + 1.0) + 1.0;
    CHECK(quart.eigenvalues[n] == doctest::Approx(expect).epsilon(1e-10));
  }
  CHECK(quart.eigenvalues[1] == doctest::Approx(10.0));
}

TEST_CASE("radial anti-Wick transform: identity, harmonic shift, positivity") {
  auto id = radial_antiwick_eigs(kOne, 48);
  for (int n = 0; n < 48; ++n) CHECK(id.eigenvalues[n] == doctest::Approx(1.0).epsilon(1e-10));

  auto harm = radial_antiwick_eigs(kR2, 96);
  for (int n = 0; n < 96; ++n)
    CHECK(harm.eigenvalues[n] == doctest::Approx(2.0 * n + 2.0).epsilon(1e-9));

  // anti-Wick of a pointwise-nonnegative profile is entrywise nonnegative
  auto cosp = radial_antiwick_eigs(
      PolyProfile{{2.0, 1.0}}, 32);  // 2 + r^2 > 0
  for (int n = 0; n < 32; ++n) CHECK(cosp.eigenvalues[n] >= 0.0);
}

TEST_CASE("anti-Wick vs Weyl: the Gaussian smoothing shift on r^2 - 1") {
  // anti-Wick(r^2 - 1) = Weyl(r^2): eigenvalues 2n+1
  PolyProfile shifted{{-1.0, 1.0}};
  auto aw = radial_antiwick_eigs(shifted, 48);
  for (int n = 0; n < 48; ++n)
    CHECK(aw.eigenvalues[n] == doctest::Approx(2.0 * n + 1.0).epsilon(1e-9));
}

TEST_CASE("cross-Wigner closed form matches the defining integral") {
  // the closed form inside build_matrix: W(h_{n+k}, h_n) =
  // ((-1)^n/pi) sqrt(n!/(n+k)!) (sqrt2 (x - i xi))^k e^{-r^2} L_n^{(k)}(2 r^2)
  auto closed = [&](int n, int k, double x, double xi) -> Complex {
    double r2 = x * x + xi * xi;
    // L_n^{(k)} via the three-term recurrence
    double L0 = 1.0, L1 = 1.0 + k - 2.0 * r2;
    double L = n == 0 ? L0 : L1;
    for (int j = 1; j < n; ++j) {
      double L2 = ((2.0 * j + k + 1.0 - 2.0 * r2) * L - (j + k) * L0) / (j + 1.0);
      L0 = L;
      L = L2;
    }
    double norm = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(n + k + 1.0)));
    Complex zbar(x, -xi);
    return ((n % 2 == 0 ? 1.0 : -1.0) / M_PI) * norm *
           std::pow(std::sqrt(2.0) * zbar, k) * std::exp(-r2) * L;
  };
  for (int n : {0, 1, 2}) {
    for (int k : {0, 1, 2, 3}) {
      for (auto [x, xi] : std::vector<std::pair<double, double>>{
               {0.3, 0.0}, {0.5, -0.7}, {1.1, 0.4}}) {
        Complex direct = wigner_oracle(n + k, n, x, xi);
        Complex cf = closed(n, k, x, xi);
        CHECK(std::abs(direct - cf) < 1e-10);
      }
    }
  }
}

TEST_CASE("build_matrix: identity, harmonic diagonal, position tridiagonal") {
  auto one = Symbol::radial_poly({1.0});
  auto m1 = build_matrix(one, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      CHECK(std::abs(m1.entries(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);

  auto r2 = Symbol::harmonic();
  auto m2 = build_matrix(r2, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j)
        CHECK(std::abs(m2.entries(i, j) - (2.0 * i + 1.0)) < 1e-9);
      else
        CHECK(std::abs(m2.entries(i, j)) < 1e-10);
    }

  // a = x: A_{n+1,n} = sqrt((n+1)/2), checked against Gauss-Hermite directly
  auto x = Symbol::coordinate(0);
  auto mx = build_matrix(x, 3);
  const QuadRule& gh = gauss_hermite(48);
  for (int n = 0; n < 2; ++n) {
    double direct = 0.0;
    for (int i = 0; i < gh.nodes.size(); ++i)
      direct += gh.weights[i] * gh.nodes[i] * hermite_function(n, gh.nodes[i]) *
                hermite_function(n + 1, gh.nodes[i]) * std::exp(gh.nodes[i] * gh.nodes[i]);
    CHECK(std::abs(mx.entries(n + 1, n) - direct) < 1e-9);
    CHECK(direct == doctest::Approx(std::sqrt((n + 1.0) / 2.0)).epsilon(1e-12));
    CHECK(std::abs(mx.entries(n, n)) < 1e-10);
  }
  CHECK(m2.hermiticity_defect() < 1e-12);
  CHECK(m2.max_imag() < 1e-12);
}

TEST_CASE("eigensolve: diagonal, reflection, completed square") {
  OperatorMatrix diag;
  diag.entries = Eigen::Vector3cd(1.0, 3.0, 5.0).asDiagonal();
  auto s = eigensolve(diag);
  CHECK(s.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(s.eigenvalues[2] == doctest::Approx(5.0));

  OperatorMatrix refl;
  refl.entries = Eigen::MatrixXcd::Zero(2, 2);
  refl.entries(0, 1) = 1.0;
  refl.entries(1, 0) = 1.0;
  auto sr = eigensolve(refl);
  CHECK(sr.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(sr.eigenvalues[1] == doctest::Approx(1.0));

  OperatorMatrix bad;
  bad.entries = Eigen::MatrixXcd::Zero(2, 2);
  bad.entries(0, 1) = 1.0;
  CHECK_THROWS_AS(eigensolve(bad), InputError);

  // r^2 + x = (x + 1/2)^2 + xi^2 - 1/4: spectrum 2n + 1 - 1/4 (exact shift)
  auto shifted = Symbol::polynomial(
      {{{0, 2}, 1.0}, {{2, 0}, 1.0}, {{1, 0}, 1.0}}, 1);
  auto m100 = build_matrix(shifted, 100);
  auto m200 = build_matrix(shifted, 200);
  auto e100 = eigensolve(m100);
  auto e200 = eigensolve(m200);
  int trust = truncation_trust(e100, e200, 1e-6);
  CHECK(trust >= 60);
  for (int n = 0; n < 40; ++n)
    CHECK(e200.eigenvalues[n] == doctest::Approx(2.0 * n + 0.75).epsilon(1e-6));
}

TEST_CASE("truncation_trust on identical and diverging lists") {
  SpectralData a, b;
  a.eigenvalues = Eigen::Vector3d(1.0, 2.0, 3.0);
  a.trusted_count = 3;
  b = a;
  CHECK(truncation_trust(a, b, 1e-12) == 3);
  b.eigenvalues[2] = 3.5;
  CHECK(truncation_trust(a, b, 1e-6) == 2);
}

TEST_CASE("combine_separable: multiset of pairwise sums") {
  auto harm = radial_weyl_eigs(kR2, 32);
  auto sum = combine_separable(harm, harm, 10.0);
  std::vector<double> expect{2, 4, 4, 6, 6, 6, 8, 8, 8, 8, 10, 10, 10, 10, 10};
  REQUIRE(sum.size() == int(expect.size()));
  for (int i = 0; i < sum.size(); ++i)
    CHECK(sum.eigenvalues[i] == doctest::Approx(expect[std::size_t(i)]));

  // a spectrum pinned at {0, large} filters the other side by the cutoff
  SpectralData zeroish;
  zeroish.eigenvalues = Eigen::Vector2d(0.0, 100.0);
  zeroish.trusted_count = 2;
  auto filt = combine_separable(zeroish, harm, 7.0);
  REQUIRE(filt.size() == 4);  // 1, 3, 5, 7
  CHECK(filt.eigenvalues[3] == doctest::Approx(7.0));

  // d = 2 lattice count: N(200) for harmonic + harmonic = 5050
  auto harm2 = radial_weyl_eigs(kR2, 128);
  auto big = combine_separable(harm2, harm2, 200.0);
  CHECK(big.size() == 5050);

  // coverage guard: sums beyond the trusted ceilings must exceed the cutoff
  CHECK_THROWS_AS(combine_separable(harm, harm, 1000.0), RangeError);
}

TEST_CASE("matrix composition: M(r^2)^2 equals M(r^4 - 1) on a trusted block") {
  const int N = 60;
  auto m_r2 = build_matrix(Symbol::harmonic(), N);
  auto m_r4m1 = build_matrix(Symbol::radial_poly({-1.0, 0.0, 1.0}), N);
  Eigen::MatrixXcd prod = m_r2.entries * m_r2.entries;
  double err = (prod.topLeftCorner(30, 30) - m_r4m1.entries.topLeftCorner(30, 30))
                   .cwiseAbs()
                   .maxCoeff();
  CHECK(err < 1e-6);
}
