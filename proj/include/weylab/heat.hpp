#ifndef WEYLAB_HEAT_HPP
#define WEYLAB_HEAT_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "weylab/asymptotics.hpp"
#include "weylab/errors.hpp"
#include "weylab/quadrature.hpp"
#include "weylab/spectral.hpp"
#include "weylab/symbols.hpp"

namespace weylab {

struct HeatSample {
  double t = 0.0;
  double spectral_trace = 0.0;
  double phase_integral = 0.0;
  double remainder = 0.0;
  double residual = 0.0;
  double ratio = 0.0;       // residual / remainder
  double tail_bound = 0.0;  // bound on the untrusted spectral tail
};

/// Trace sum over the trusted prefix, log-sum-exp with pairwise reduction,
/// plus a tail bound from the eigenvalue lower bound lambda_j >= f(h j^{1/2d}).
inline std::pair<double, double> heat_trace(const SpectralData& spec, double t,
                                            const ComparisonFunction& f_lower, double h_lower,
                                            int d = 1, double tail_tolerance = 1e-3) {
  if (!(t > 0.0)) throw InputError("heat_trace: t > 0");
  if (spec.trusted_count == 0) throw RangeError("heat_trace: empty trusted prefix");

  // pairwise reduction of exp(-t lambda_j) with max-shift
  const int n = spec.trusted_count;
  const double shift = -t * spec.eigenvalues[0];
  std::vector<double> terms(std::size_t(n));
  for (int j = 0; j < n; ++j) {
    double e = -t * spec.eigenvalues[j] - shift;
    terms[std::size_t(j)] = e < -745.0 ? 0.0 : std::exp(e);
  }
  for (std::size_t width = terms.size(); width > 1;) {
    std::size_t half = (width + 1) / 2;
    for (std::size_t i = 0; i < width / 2; ++i) terms[i] = terms[2 * i] + terms[2 * i + 1];
    if (width % 2 == 1) terms[width / 2] = terms[width - 1];
    width = half;
  }
  double value = terms[0] * std::exp(shift);

  // tail: sum_{j >= n} exp(-t f(h j^{1/2d})) <= first term + integral comparison
  double tail = 0.0;
  {
    auto log_term = [&](double x) {
      double y = h_lower * std::pow(x, 1.0 / (2.0 * d));
      if (y < f_lower.domain_start()) return 0.0;  // no decay information yet
      return -t * std::exp(f_lower.log_f(y));
    };
    double first = log_term(double(n));
    if (first >= 0.0)
      throw ResolutionError("heat_trace: eigenvalue lower bound gives no tail decay at j = " +
                            std::to_string(n));
    tail = std::exp(std::max(first, -745.0));
    tail += integrate_log_tail(log_term, double(n), std::max(1.0, 0.01 * n), 60.0, 1e-8);
  }
  if (tail > tail_tolerance * value)
    throw ResolutionError("heat_trace: tail bound " + std::to_string(tail) +
                          " exceeds tolerance at t = " + std::to_string(t) +
                          "; enlarge the basis or raise t");
  return {value, tail};
}

/// (2 pi)^{-d} Int e^{-t a(w)} dw by polar quadrature, log-domain radial
/// integrand, truncation once the exponent has dropped ~tail_nats below peak.
inline double phase_integral(const Symbol& a, double t, int n_theta = 64,
                             double tail_nats = 46.0) {
  if (!(t > 0.0)) throw InputError("phase_integral: t > 0");
  const int d = a.dim();
  const double log_t = std::log(t);

  auto radial = [&](const Eigen::VectorXd& dir) {
    auto log_f = [&](double r) {
      if (r <= 0.0) return -1e300;
      LogValue av = a.evaluate(PhasePoint(Eigen::VectorXd(r * dir)));
      double ta;
      if (av.sign == 0)
        ta = 0.0;
      else if (av.sign < 0)
        throw InputError("phase_integral: symbol must be bounded below (negative value hit)");
      else
        ta = log_t + av.log_mag > 700.0 ? 1e300 : t * std::exp(av.log_mag);
      return -ta + (2.0 * d - 1.0) * std::log(r);
    };
    return integrate_log_tail(log_f, 0.0, 0.1, tail_nats, 1e-11);
  };

  double acc = 0.0;
  if (d == 1) {
    // radial in the angle-average sense; non-radial d=1 symbols get a theta grid
    int n = a.is_radial() ? 1 : std::max(8, n_theta);
    for (int j = 0; j < n; ++j) {
      double th = 2.0 * M_PI * j / n;
      Eigen::VectorXd dir(2);
      dir << std::cos(th), std::sin(th);
      acc += radial(dir) * (2.0 * M_PI / n);
    }
  } else if (d == 2) {
    int n = std::max(8, n_theta / 8);
    const QuadRule& gl = gauss_legendre(n);
    for (int ip = 0; ip < n; ++ip) {
      double psi = 0.5 * M_PI * (gl.nodes[ip] + 1.0);
      double wp = 0.5 * M_PI * gl.weights[ip] * std::sin(psi) * std::sin(psi);
      for (int it = 0; it < n; ++it) {
        double ct = gl.nodes[it];
        double st = std::sqrt(1.0 - ct * ct);
        for (int jp = 0; jp < 2 * n; ++jp) {
          double ph = 2.0 * M_PI * jp / (2 * n);
          Eigen::VectorXd dir(4);
          dir << std::cos(psi), std::sin(psi) * st * std::cos(ph),
              std::sin(psi) * st * std::sin(ph), std::sin(psi) * ct;
          acc += wp * gl.weights[it] * (2.0 * M_PI / (2 * n)) * radial(dir);
        }
      }
    }
  } else {
    throw CapabilityError("phase_integral: d <= 2");
  }
  return acc / std::pow(2.0 * M_PI, d);
}

/// Int e^{-(t/4) a(w)} / <w>^{2 rho} dw, same scheme (no (2 pi)^{-d} here).
inline double remainder_integral(const Symbol& a, double t, double rho, int n_theta = 64,
                                 double tail_nats = 46.0) {
  if (!(t > 0.0)) throw InputError("remainder_integral: t > 0");
  if (!(rho > 0.0 && rho <= 1.0)) throw InputError("remainder_integral: 0 < rho <= 1");
  const int d = a.dim();
  if (d != 1 && d != 2) throw CapabilityError("remainder_integral: d <= 2");
  const double tq = 0.25 * t;

  auto radial = [&](const Eigen::VectorXd& dir) {
    auto log_f = [&](double r) {
      if (r <= 0.0) return -1e300;
      LogValue av = a.evaluate(PhasePoint(Eigen::VectorXd(r * dir)));
      double ta;
      if (av.sign <= 0)
        ta = 0.0;
      else
        ta = std::log(tq) + av.log_mag > 700.0 ? 1e300 : tq * std::exp(av.log_mag);
      return -ta + (2.0 * d - 1.0) * std::log(r) - rho * std::log1p(r * r);
    };
    return integrate_log_tail(log_f, 0.0, 0.1, tail_nats, 1e-11);
  };

  double acc = 0.0;
  if (d == 1) {
    int n = a.is_radial() ? 1 : 32;
    for (int j = 0; j < n; ++j) {
      double th = 2.0 * M_PI * j / n;
      Eigen::VectorXd dir(2);
      dir << std::cos(th), std::sin(th);
      acc += radial(dir) * (2.0 * M_PI / n);
    }
  } else {
    int n = 10;
    const QuadRule& gl = gauss_legendre(n);
    for (int ip = 0; ip < n; ++ip) {
      double psi = 0.5 * M_PI * (gl.nodes[ip] + 1.0);
      double wp = 0.5 * M_PI * gl.weights[ip] * std::sin(psi) * std::sin(psi);
      for (int it = 0; it < n; ++it) {
        double ct = gl.nodes[it];
        double st = std::sqrt(1.0 - ct * ct);
        for (int jp = 0; jp < 2 * n; ++jp) {
          double ph = 2.0 * M_PI * jp / (2 * n);
          Eigen::VectorXd dir(4);
          dir << std::cos(psi), std::sin(psi) * st * std::cos(ph),
              std::sin(psi) * st * std::sin(ph), std::sin(psi) * ct;
          acc += wp * gl.weights[it] * (2.0 * M_PI / (2 * n)) * radial(dir);
        }
      }
    }
  }
  return acc;
}

struct HeatFormulaReport {
  std::vector<HeatSample> samples;
  double max_ratio = 0.0;
  double min_ratio = 1e300;
  bool pass = false;
};

/// Trace vs phase-space integral across a t-grid; PASS when the
/// residual/remainder ratio stays bounded (no growth trend).
inline HeatFormulaReport verify_heat_formula(const SpectralData& spec, const Symbol& sym,
                                             std::vector<double> ts, double rho,
                                             const ComparisonFunction& f_lower, double h_lower,
                                             double bound_factor = 3.0) {
  std::sort(ts.begin(), ts.end(), std::greater<double>());
  HeatFormulaReport rep;
  for (double t : ts) {
    HeatSample s;
    s.t = t;
    auto [tr, tail] = heat_trace(spec, t, f_lower, h_lower, sym.dim());
    s.spectral_trace = tr;
    s.tail_bound = tail;
    s.phase_integral = phase_integral(sym, t);
    s.remainder = remainder_integral(sym, t, rho);
    s.residual = std::abs(s.spectral_trace - s.phase_integral);
    s.ratio = s.residual / s.remainder;
    rep.max_ratio = std::max(rep.max_ratio, s.ratio);
    rep.min_ratio = std::min(rep.min_ratio, s.ratio);
    rep.samples.push_back(s);
  }
  rep.pass = rep.max_ratio <= bound_factor * std::max(rep.min_ratio, 1e-300);
  if (!rep.pass && rep.samples.size() >= 2) {
    // monotone decreasing ratios also count as bounded
    bool decreasing = true;
    for (std::size_t i = 1; i < rep.samples.size(); ++i)
      if (rep.samples[i].ratio > rep.samples[i - 1].ratio) decreasing = false;
    rep.pass = decreasing;
  }
  return rep;
}

/// Weyl symbol of the harmonic heat semigroup: sech(t) exp(-tanh(t) r^2).
/// Ground truth for the heat-parametrix recursion at d = 1.
inline double mehler_symbol(double t, const PhasePoint& w) {
  if (!(t > 0.0 && t < 0.5 * M_PI)) throw InputError("mehler_symbol: 0 < t < pi/2");
  if (w.dim() != 1) throw InputError("mehler_symbol: d = 1");
  return (1.0 / std::cosh(t)) * std::exp(-std::tanh(t) * w.norm_sq());
}

}  // namespace weylab

#endif  // WEYLAB_HEAT_HPP
