#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "weylab/jets.hpp"

using namespace weylab;

TEST_CASE("multi-index set enumeration and ranks") {
  auto ms = MultiIndexSet::get(2, 3);
  CHECK(ms->size() == 10);  // C(3+2,2)
  CHECK(ms->index_of({0, 0}) == 0);
  for (int i = 0; i < ms->size(); ++i) CHECK(ms->index_of(ms->at(i)) == i);
  CHECK(ms->index_of({4, 0}) == -1);
  int i1 = ms->index_of({1, 0});
  int i2 = ms->index_of({0, 2});
  CHECK(ms->sum_index(i1, i2) == ms->index_of({1, 2}));
}

TEST_CASE("compositions enumerate k into j positive parts") {
  auto c = compositions(4, 2);
  CHECK(c.size() == 3);  // 1+3, 2+2, 3+1
  CHECK(compositions(3, 3).size() == 1);
  CHECK(compositions(2, 3).empty());
}

TEST_CASE("jet arithmetic reproduces partial derivatives of a product") {
  auto basis = MultiIndexSet::get(2, 4);
  auto x = TaylorJet<double>::variable(basis, 0, 1.5);
  auto y = TaylorJet<double>::variable(basis, 1, -0.5);
  // f = (x^2 + y) * (x - 2y)
  auto f = (x * x + y) * (x - y * 2.0);
  // partials at (1.5, -0.5): f = (2.25 - 0.5)(1.5 + 1) = 1.75 * 2.5
  CHECK(f.value() == doctest::Approx(1.75 * 2.5));
  // d/dx = 2x(x-2y) + (x^2+y) = 3x^2 - 4xy + y
  CHECK(f.partial({1, 0}) == doctest::Approx(3 * 2.25 - 4 * 1.5 * (-0.5) + (-0.5)));
  // d/dy = (x-2y) - 2(x^2+y)
  CHECK(f.partial({0, 1}) == doctest::Approx(2.5 - 2.0 * 1.75));
  // d2/dxdy = -4x + 1
  CHECK(f.partial({1, 1}) == doctest::Approx(-4 * 1.5 + 1));
  CHECK(f.partial({3, 0}) == doctest::Approx(6.0));
  CHECK(f.partial({0, 2}) == doctest::Approx(-4.0));
}

TEST_CASE("jet transcendental compositions match closed forms") {
  auto basis = MultiIndexSet::get(1, 6);
  auto u = TaylorJet<double>::variable(basis, 0, 0.7);
  auto f = jet_exp(u * u);  // e^{u^2}
  double v = std::exp(0.49);
  CHECK(f.value() == doctest::Approx(v));
  CHECK(f.partial({1}) == doctest::Approx(2 * 0.7 * v));
  CHECK(f.partial({2}) == doctest::Approx((2 + 4 * 0.49) * v));

  auto g = jet_recip(u + 2.0);
  CHECK(g.partial({3}) == doctest::Approx(-6.0 / std::pow(2.7, 4)));

  auto h = jet_pow(u + 1.0, 0.25);
  CHECK(h.value() == doctest::Approx(std::pow(1.7, 0.25)));
  CHECK(h.partial({1}) == doctest::Approx(0.25 * std::pow(1.7, -0.75)));

  auto c = jet_cos(u);
  CHECK(c.partial({4}) == doctest::Approx(std::cos(0.7)));

  auto l = jet_log(u + 2.0);
  CHECK(l.partial({2}) == doctest::Approx(-1.0 / (2.7 * 2.7)));
}

TEST_CASE("derivative extraction re-centers the jet") {
  auto basis = MultiIndexSet::get(2, 5);
  auto x = TaylorJet<double>::variable(basis, 0, 0.3);
  auto y = TaylorJet<double>::variable(basis, 1, 1.2);
  auto f = jet_exp(x * y);
  auto fx = f.derivative({1, 0});  // y e^{xy}
  CHECK(fx.value() == doctest::Approx(1.2 * std::exp(0.36)));
  CHECK(fx.partial({0, 1}) == doctest::Approx((1 + 0.36) * std::exp(0.36)));
}

TEST_CASE("complex jets and promotion") {
  using C = std::complex<double>;
  auto basis = MultiIndexSet::get(1, 3);
  auto x = TaylorJet<double>::variable(basis, 0, 2.0);
  auto z = promote_complex(x * x) + C(0.0, 1.0);
  CHECK(z.value() == C(4.0, 1.0));
  auto r = jet_recip(z);
  C expect = C(1.0, 0.0) / C(4.0, 1.0);
  CHECK(std::abs(r.value() - expect) < 1e-15);
  // d/dx 1/(x^2+i) = -2x/(x^2+i)^2
  C dexpect = C(-4.0, 0.0) / (C(4.0, 1.0) * C(4.0, 1.0));
  CHECK(std::abs(r.partial({1}) - dexpect) < 1e-14);
}

TEST_CASE("embedding into a larger variable set") {
  auto small = MultiIndexSet::get(2, 3);
  auto big = MultiIndexSet::get(4, 3);
  auto x = TaylorJet<double>::variable(small, 0, 1.0);
  auto y = TaylorJet<double>::variable(small, 1, 2.0);
  auto f = x * y * y;
  auto g = f.embed(big, {1, 3});
  CHECK(g.value() == doctest::Approx(4.0));
  CHECK(g.partial({0, 1, 0, 0}) == doctest::Approx(4.0));
  CHECK(g.partial({0, 0, 0, 1}) == doctest::Approx(4.0));
  CHECK(g.partial({0, 1, 0, 1}) == doctest::Approx(4.0));
  CHECK(g.partial({1, 0, 0, 0}) == doctest::Approx(0.0));
}
