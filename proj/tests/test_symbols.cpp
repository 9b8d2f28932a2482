#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "weylab/symbols.hpp"

using namespace weylab;

namespace {

PhasePoint wp(double x, double xi) { return PhasePoint::xp(x, xi); }

// central-difference oracle on the full symbol, for jet cross-checks
double fd_partial(const Symbol& s, const PhasePoint& w, int var, int order2, int var2 = -1) {
  // first or mixed-second partials, 4th-order central stencils
  double h = 1e-3 * std::max(1.0, w.bracket());
  auto at = [&](double d1, double d2) {
    Eigen::VectorXd v = w.w;
    v[var] += d1;
    if (var2 >= 0) v[var2] += d2;
    return s.value(PhasePoint(v));
  };
  if (order2 == 1 && var2 < 0)
    return (at(-2 * h, 0) - 8 * at(-h, 0) + 8 * at(h, 0) - at(2 * h, 0)) / (12 * h);
  if (order2 == 2 && var2 < 0)
    return (-at(-2 * h, 0) + 16 * at(-h, 0) - 30 * at(0, 0) + 16 * at(h, 0) - at(2 * h, 0)) /
           (12 * h * h);
  // mixed: d2/dv1dv2 via 2nd-order cross stencil
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
}

}  // namespace

TEST_CASE("evaluate: radial r^2 and the exp/entire families") {
  auto r2 = Symbol::harmonic();
  auto v = r2.evaluate(wp(3.0, 4.0));
  CHECK(v.sign == 1);
  CHECK(v.log_mag == doctest::Approx(std::log(25.0)).epsilon(1e-14));

  auto eg = Symbol::exp_gevrey(1.0, 2.0);
  auto v2 = eg.evaluate(wp(0.0, 0.0));
  CHECK(v2.sign == 1);
  CHECK(v2.log_mag == doctest::Approx(1.0).epsilon(1e-14));  // exp(<0>^{1/2}) = e

  CHECK_THROWS_AS(PhasePoint::xp(std::nan(""), 0.0), InputError);
}

TEST_CASE("evaluate: entire series respects the two-sided growth bound") {
  // e^{-s} exp(s (hy)^{1/s}/e) <= P(y) <= ((1+e)e)^s/((1+e)^s - 1) exp((1+e) s (hy)^{1/s}/e)
  const double h = 1.0, s = 2.0, eps = 0.5;
  auto es = Symbol::entire_series(h, s);
  for (double y = std::exp(s) / h; y < 1e6; y *= 3.0) {
    // place a point with <w> = y
    double r = std::sqrt(y * y - 1.0);
    double logP = es.evaluate(wp(r, 0.0)).log_mag;
    double lo = -s + s * std::pow(h * y, 1.0 / s) / M_E;
    double hi = s * std::log((1 + eps) * M_E) - std::log(std::pow(1 + eps, s) - 1.0) +
                (1 + eps) * s * std::pow(h * y, 1.0 / s) / M_E;
    CHECK(logP >= lo - 1e-9);
    CHECK(logP <= hi + 1e-9);
  }
}

TEST_CASE("jet: polynomial radial profile r^2") {
  auto r2 = Symbol::harmonic();
  auto J = r2.jet(wp(1.0, 0.0), 2);
  CHECK(J.partial({1, 0}) == doctest::Approx(2.0));
  CHECK(J.partial({0, 1}) == doctest::Approx(0.0));
  CHECK(J.partial({2, 0}) == doctest::Approx(2.0));
  CHECK(J.partial({0, 2}) == doctest::Approx(2.0));
  CHECK(J.partial({1, 1}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(r2.jet(wp(0, 0), kJetOrderCap + 1), CapabilityError);
}

TEST_CASE("jet: exp_gevrey first partial matches the chain rule and FD") {
  auto eg = Symbol::exp_gevrey(1.0, 2.0);
  auto J = eg.jet(wp(1.0, 0.0), 1);
  // d/dx exp((1+x^2+xi^2)^{1/4}) at (1,0): a(w) * (1/4)(2)^{-3/4} * 2 = a * 2^{-7/4}
  double a = std::exp(std::pow(2.0, 0.25));
  double expect = a * std::pow(2.0, -1.75);
  CHECK(J.partial({1, 0}) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(fd_partial(eg, wp(1.0, 0.0), 0, 1) == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("jet: separable sums have no cross-block mixed partials") {
  auto s = Symbol::separable_sum({Symbol::harmonic(), Symbol::harmonic()});
  REQUIRE(s.dim() == 2);
  Eigen::VectorXd v(4);
  v << 0.5, -1.0, 2.0, 0.25;  // (x1, x2, xi1, xi2)
  auto J = s.jet(PhasePoint(v), 2);
  CHECK(J.partial({1, 1, 0, 0}) == doctest::Approx(0.0));
  CHECK(J.partial({1, 0, 0, 1}) == doctest::Approx(0.0));
  CHECK(J.partial({2, 0, 0, 0}) == doctest::Approx(2.0));
  CHECK(J.partial({0, 0, 0, 2}) == doctest::Approx(2.0));
  CHECK(J.partial({1, 0, 0, 0}) == doctest::Approx(2.0 * 0.5));
  CHECK(J.value() == doctest::Approx(v.squaredNorm()));
}

TEST_CASE("jet consistency: exact vs finite differences on random points") {
  std::mt19937 rng(20240801);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  std::vector<Symbol> builtins{Symbol::harmonic(), Symbol::radial_poly({1.0, 2.0, 0.5}),
                               Symbol::exp_gevrey(0.7, 2.5), Symbol::entire_series(1.0, 2.0)};
  for (const auto& sym : builtins) {
    for (int trial = 0; trial < 25; ++trial) {
      PhasePoint w = wp(U(rng), U(rng));
      auto J = sym.jet(w, 2);
      double scale = std::abs(J.value()) + 1.0;
      CHECK(std::abs(J.partial({1, 0}) - fd_partial(sym, w, 0, 1)) / scale < 1e-5);
      CHECK(std::abs(J.partial({0, 1}) - fd_partial(sym, w, 1, 1)) / scale < 1e-5);
      CHECK(std::abs(J.partial({2, 0}) - fd_partial(sym, w, 0, 2)) / scale < 1e-4);
      CHECK(std::abs(J.partial({1, 1}) - fd_partial(sym, w, 0, 2, 1)) / scale < 1e-4);
    }
  }
}

TEST_CASE("radial symmetry: jets at (r,0) and (0,r) agree under x<->xi swap") {
  auto sym = Symbol::exp_gevrey(1.0, 2.0);
  for (double r : {0.5, 1.0, 2.5}) {
    auto Jx = sym.jet(wp(r, 0.0), 3);
    auto Jxi = sym.jet(wp(0.0, r), 3);
    auto basis = MultiIndexSet::get(2, 3);
    for (int i = 0; i < basis->size(); ++i) {
      MultiIndex a = basis->at(i);
      MultiIndex swapped{a[1], a[0]};
      CHECK(Jx.partial(a) == doctest::Approx(Jxi.partial(swapped)).epsilon(1e-10));
    }
  }
}

TEST_CASE("custom profiles fall back to finite-difference jets") {
  auto cosprof = std::make_shared<CustomProfile>([](double u) { return std::cos(u) + 2.0; },
                                                 nullptr, "cos_plus_2");
  auto sym = Symbol::radial(cosprof);
  CHECK_FALSE(sym.profile().has_exact_jet());
  PhasePoint w = wp(1.2, 0.4);
  auto J = sym.jet(w, 2);
  CHECK(J.value() == doctest::Approx(std::cos(w.norm_sq()) + 2.0).epsilon(1e-10));
  CHECK(std::abs(J.partial({1, 0}) - fd_partial(sym, w, 0, 1)) < 1e-6);
  CHECK(std::abs(J.partial({2, 0}) - fd_partial(sym, w, 0, 2)) < 1e-5);
}

TEST_CASE("hypoellipticity report: <w>^2 has order constants 2 and 4") {
  auto sym = Symbol::radial_poly({1.0, 1.0});  // 1 + r^2 = <w>^2
  auto rep = hypoellipticity_report(sym, 0.0, 20.0, 32, 2, 1.0, WeightSequence::gevrey(1.0));
  CHECK(rep.per_order[1] <= 2.0 + 1e-9);
  CHECK(rep.per_order[1] > 1.0);
  CHECK(rep.per_order[2] <= 4.0 + 1e-9);
  CHECK(rep.growth_exponent[1] < 0.2);  // bounded ratios: no growth in <w>
}

TEST_CASE("hypoellipticity report: exp_gevrey at rho = 1/2 is geometric in order") {
  auto sym = Symbol::exp_gevrey(1.0, 2.0);
  auto rep = hypoellipticity_report(sym, 0.0, 20.0, 24, 3, 0.5, WeightSequence::gevrey(1.0));
  for (int k = 1; k <= 3; ++k) {
    CHECK(std::isfinite(rep.per_order[k]));
    CHECK(rep.per_order[k] <= std::pow(3.0, k));  // h^k with h <= 3
    CHECK(rep.growth_exponent[k] < 0.8);  // slow saturation reads as a small positive slope
  }
}

TEST_CASE("hypoellipticity report: oscillatory profile flagged at rho = 1") {
  auto cosprof = std::make_shared<CustomProfile>([](double u) { return std::cos(u) + 2.0; },
                                                 nullptr, "cos_plus_2");
  auto sym = Symbol::radial(cosprof);
  auto rep = hypoellipticity_report(sym, 0.0, 12.0, 24, 1, 1.0, WeightSequence::gevrey(1.0));
  CHECK(rep.growth_exponent[1] > 1.2);  // first-order ratio grows along the grid
  CHECK(rep.per_order[1] > 10.0);
}

TEST_CASE("hypoellipticity report: vanishing symbol is a degenerate input") {
  auto sym = Symbol::radial_poly({-4.0, 1.0});  // r^2 - 4 vanishes at r = 2
  CHECK_THROWS_AS(
      hypoellipticity_report(sym, 0.0, 5.0, 16, 1, 1.0, WeightSequence::gevrey(1.0)),
      DegenerateInputError);
}

TEST_CASE("positivize: plateau, exact tail, positive minimum") {
  auto r2 = Symbol::harmonic();
  auto b = positivize(r2, 1.0, 2.0);
  CHECK(b.value(wp(0.0, 0.0)) == doctest::Approx(1.0));
  CHECK(b.value(wp(0.5, 0.0)) == doctest::Approx(1.0));
  // identical evaluation path outside r_out
  CHECK(b.value(wp(3.0, 0.0)) == r2.value(wp(3.0, 0.0)));
  CHECK(b.value(wp(0.0, 5.0)) == r2.value(wp(0.0, 5.0)));
  double min_b = 1e300;
  for (double r = 0.0; r <= 2.5; r += 0.01) min_b = std::min(min_b, b.value(wp(r, 0.0)));
  CHECK(min_b > 0.0);

  // precondition: base must be positive beyond r_in
  auto bad = Symbol::radial_poly({-4.0, 1.0});
  CHECK_THROWS_AS(positivize(bad, 1.0, 2.0), InputError);
  CHECK_THROWS_AS(positivize(r2, 2.0, 1.0), InputError);
}

TEST_CASE("positivize: jets blend smoothly in the transition zone") {
  auto r2 = Symbol::harmonic();
  auto b = positivize(r2, 1.0, 2.0);
  PhasePoint w = wp(1.5, 0.3);
  auto J = b.jet(w, 2);
  CHECK(std::abs(J.partial({1, 0}) - fd_partial(b, w, 0, 1)) < 1e-5);
  CHECK(std::abs(J.partial({2, 0}) - fd_partial(b, w, 0, 2)) < 1e-3);
}

TEST_CASE("shifted symbols carry the complex constant into jets") {
  auto s = Symbol::shifted(Symbol::harmonic(), {2.0, 3.0});
  CHECK(s.value_complex(wp(1.0, 1.0)) == std::complex<double>(4.0, 3.0));
  CHECK_THROWS_AS(s.evaluate(wp(1.0, 1.0)), InputError);
  auto J = s.jet_complex(wp(1.0, 1.0), 2);
  CHECK(J.value() == std::complex<double>(4.0, 3.0));
  CHECK(std::abs(J.partial({1, 0}) - std::complex<double>(2.0, 0.0)) < 1e-14);
}
