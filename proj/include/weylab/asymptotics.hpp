#ifndef WEYLAB_ASYMPTOTICS_HPP
#define WEYLAB_ASYMPTOTICS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "weylab/errors.hpp"
#include "weylab/quadrature.hpp"
#include "weylab/spectral.hpp"
#include "weylab/symbols.hpp"
#include "weylab/weights.hpp"

namespace weylab {

inline constexpr double kBetaInf = std::numeric_limits<double>::infinity();

/// Comparison profile f: positive, strictly increasing, > 1 on [Y, inf).
/// Everything downstream (sigma, eta, predictions) is phrased through f,
/// its log, its inverse, and the limit of y f'(y)/f(y).
class ComparisonFunction {
 public:
  enum class Family { PowerLog, ExpGevrey, ExpRootScaled, Assoc };

  static ComparisonFunction power_log(double beta, double alpha, double Y = 0.0) {
    if (!(beta > 0.0)) throw InputError("power_log: beta > 0");
    ComparisonFunction f;
    f.family_ = Family::PowerLog;
    f.beta_ = beta;
    f.alpha_ = alpha;
    // f must be > 1 and increasing: ln y > max(0, -alpha/beta) and y > 1
    double y_incr = std::exp(std::max(0.0, -alpha / beta)) * 1.0000001;
    f.Y_ = std::max({Y, 1.0000001, y_incr, alpha != 0.0 ? 1.5 : 1.0000001});
    return f;
  }
  static ComparisonFunction exp_gevrey(double h, double s, double Y = 1.0) {
    if (!(h > 0.0) || !(s > 1.0)) throw InputError("exp_gevrey: h > 0, s > 1");
    ComparisonFunction f;
    f.family_ = Family::ExpGevrey;
    f.h_ = h;
    f.s_ = s;
    f.Y_ = std::max(Y, 1.0);
    return f;
  }
  /// f(y) = exp(c (h y)^{1/s}).
  static ComparisonFunction exp_root_scaled(double h, double s, double c, double Y = 1.0) {
    if (!(h > 0.0) || !(s > 1.0) || !(c > 0.0))
      throw InputError("exp_root_scaled: h > 0, s > 1, c > 0");
    ComparisonFunction f;
    f.family_ = Family::ExpRootScaled;
    f.h_ = h;
    f.s_ = s;
    f.c_ = c;
    f.Y_ = std::max(Y, 1.0);
    return f;
  }
  /// f(y) = exp(M(h y)) for the associated function of a weight sequence.
  static ComparisonFunction assoc(WeightSequence weights, double h, double Y = 2.0) {
    if (!(h > 0.0)) throw InputError("assoc: h > 0");
    ComparisonFunction f;
    f.family_ = Family::Assoc;
    f.weights_ = std::move(weights);
    f.h_ = h;
    // start past the plateau where M vanishes, so f is strictly increasing
    double y = std::max(Y, 1.0);
    while (associated_function(f.weights_, f.h_ * y) <= 1e-12) y *= 1.5;
    f.Y_ = y;
    return f;
  }

  Family family() const { return family_; }
  double domain_start() const { return Y_; }

  double log_f(double y) const {
    switch (family_) {
      case Family::PowerLog:
        return beta_ * std::log(y) + alpha_ * std::log(std::log(y));
      case Family::ExpGevrey:
        return std::pow(h_ * y, 1.0 / s_);
      case Family::ExpRootScaled:
        return c_ * std::pow(h_ * y, 1.0 / s_);
      case Family::Assoc:
        return associated_function(weights_, h_ * y);
    }
    return 0.0;
  }

  double f(double y) const {
    if (y < Y_) throw InputError("ComparisonFunction: y below domain start");
    return std::exp(log_f(y));
  }

  /// y f'(y) / f(y), with analytic forms where available.
  double log_derivative_ratio(double y) const {
    switch (family_) {
      case Family::PowerLog:
        return beta_ + alpha_ / std::log(y);
      case Family::ExpGevrey:
        return std::pow(h_ * y, 1.0 / s_) / s_;
      case Family::ExpRootScaled:
        return c_ * std::pow(h_ * y, 1.0 / s_) / s_;
      case Family::Assoc: {
        double h = 1e-5 * y;
        return y * (log_f(y + h) - log_f(y - h)) / (2.0 * h);
      }
    }
    return 0.0;
  }

  /// The limit beta of y f'(y)/f(y) (infinity for the exp-type families).
  double beta_limit() const {
    return family_ == Family::PowerLog ? beta_ : kBetaInf;
  }

  /// f^{-1}(lambda), monotone bisection on log f (analytic bracketing).
  double inverse(double lambda) const {
    if (!(lambda > 0.0)) throw InputError("ComparisonFunction::inverse: lambda > 0");
    double target = std::log(lambda);
    double lo = Y_;
    if (log_f(lo) > target + 1e-15)
      throw RangeError("ComparisonFunction::inverse: lambda below f(Y)");
    double hi = std::max(2.0 * lo, 2.0);
    int guard = 0;
    while (log_f(hi) < target) {
      hi *= 2.0;
      if (++guard > 4000) throw RangeError("ComparisonFunction::inverse: no bracket");
    }
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (log_f(mid) < target)
        lo = mid;
      else
        hi = mid;
      if (hi - lo <= 1e-13 * hi) break;
    }
    return 0.5 * (lo + hi);
  }

  std::string describe() const {
    switch (family_) {
      case Family::PowerLog:
        return "power_log(beta=" + std::to_string(beta_) + ",alpha=" + std::to_string(alpha_) + ")";
      case Family::ExpGevrey:
        return "exp_gevrey(h=" + std::to_string(h_) + ",s=" + std::to_string(s_) + ")";
      case Family::ExpRootScaled:
        return "exp_root_scaled(h=" + std::to_string(h_) + ",s=" + std::to_string(s_) +
               ",c=" + std::to_string(c_) + ")";
      case Family::Assoc:
        return "assoc(" + weights_.describe() + ",h=" + std::to_string(h_) + ")";
    }
    return "";
  }

 private:
  Family family_ = Family::PowerLog;
  double beta_ = 2.0, alpha_ = 0.0;
  double h_ = 1.0, s_ = 2.0, c_ = 1.0;
  double Y_ = 1.0;
  WeightSequence weights_ = WeightSequence::gevrey(2.0);
};

/// sigma(lambda) = (f^{-1}(lambda))^{2d}.
inline double sigma(const ComparisonFunction& f, double lambda, int d) {
  return std::pow(f.inverse(lambda), 2.0 * d);
}

/// eta(lambda) = lambda sigma'(lambda)/sigma(lambda)
///             = 2d f(y)/(y f'(y)) at y = f^{-1}(lambda).
inline double eta(const ComparisonFunction& f, double lambda, int d) {
  double y = f.inverse(lambda);
  double r = f.log_derivative_ratio(y);
  if (!(r > 0.0)) throw InputError("eta: f' must be positive at f^{-1}(lambda)");
  return 2.0 * d / r;
}

/// N(lambda) over the trusted prefix; refuses to undercount beyond it.
inline int counting(const SpectralData& spec, double lambda) {
  if (spec.trusted_count == 0) throw RangeError("counting: no trusted eigenvalues");
  if (lambda > spec.trusted_ceiling())
    throw RangeError("counting: lambda beyond the trusted range ceiling");
  const double* begin = spec.eigenvalues.data();
  const double* end = begin + spec.trusted_count;
  return int(std::upper_bound(begin, end, lambda) - begin);
}

/// Positive continuous profile on the sphere S^{2d-1}; d = 1 profiles are
/// functions of the polar angle, d = 2 profiles of a unit 4-vector.
struct SphereProfile {
  int d = 1;
  std::function<double(double)> phi_theta;                 // d = 1
  std::function<double(const Eigen::Vector4d&)> phi_s3;    // d = 2
  int quad_order = 64;

  static SphereProfile constant(int d, double value = 1.0) {
    SphereProfile p;
    p.d = d;
    p.phi_theta = [value](double) { return value; };
    p.phi_s3 = [value](const Eigen::Vector4d&) { return value; };
    return p;
  }
};

/// Integral over S^{2d-1} of Phi(theta)^{-power}.
inline double sphere_integral_inverse_power(const SphereProfile& phi, double power) {
  if (phi.d == 1) {
    // trapezoid on the circle: exact for constants, spectrally accurate else
    int n = std::max(8, phi.quad_order);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      double th = 2.0 * M_PI * j / n;
      double v = phi.phi_theta(th);
      if (!(v > 0.0)) throw InputError("SphereProfile: Phi must be positive");
      acc += std::pow(v, -power);
    }
    return acc * 2.0 * M_PI / n;
  }
  if (phi.d == 2) {
    // S^3 via product quadrature: x = (cos psi, sin psi n(theta, phi)),
    // dS = sin^2 psi dpsi dOmega_2
    int n = std::max(12, phi.quad_order / 4);
    const QuadRule& gl = gauss_legendre(n);
    double acc = 0.0;
    for (int ip = 0; ip < n; ++ip) {
      double psi = 0.5 * M_PI * (gl.nodes[ip] + 1.0);
      double wp = 0.5 * M_PI * gl.weights[ip] * std::sin(psi) * std::sin(psi);
      for (int it = 0; it < n; ++it) {
        double ct = gl.nodes[it];  // cos(theta)
        double st = std::sqrt(1.0 - ct * ct);
        double wt = gl.weights[it];
        for (int jp = 0; jp < 2 * n; ++jp) {
          double ph = 2.0 * M_PI * jp / (2 * n);
          Eigen::Vector4d x(std::cos(psi), std::sin(psi) * st * std::cos(ph),
                            std::sin(psi) * st * std::sin(ph), std::sin(psi) * ct);
          double v = phi.phi_s3(x);
          if (!(v > 0.0)) throw InputError("SphereProfile: Phi must be positive");
          acc += wp * wt * (2.0 * M_PI / (2 * n)) * std::pow(v, -power);
        }
      }
    }
    return acc;
  }
  throw CapabilityError("sphere_integral_inverse_power: d <= 2");
}

/// The Weyl-law constant
///   pi/((2 pi)^{d+1} d) Int_{S^{2d-1}} Phi^{-2d/beta} (beta = inf -> exponent 2d).
inline double weyl_constant(int d, double beta, const SphereProfile& phi) {
  double expo = std::isinf(beta) ? 2.0 * d : 2.0 * d / beta;
  double integral = sphere_integral_inverse_power(phi, expo);
  return M_PI / (std::pow(2.0 * M_PI, d + 1) * d) * integral;
}

/// gamma = sqrt(2 pi) (2d / Int Phi^{-2d})^{1/(2d)}.
inline double gamma_const(int d, const SphereProfile& phi) {
  double integral = sphere_integral_inverse_power(phi, 2.0 * d);
  return std::sqrt(2.0 * M_PI) * std::pow(2.0 * d / integral, 1.0 / (2.0 * d));
}

/// Eigenvalue prediction: f(gamma j^{1/2d}) for beta = inf,
/// C^{-beta/(2d)} f(j^{1/2d}) for finite beta.
inline double eigenvalue_prediction(int j, const ComparisonFunction& f, int d,
                                    const SphereProfile& phi, double beta) {
  if (j < 1) throw InputError("eigenvalue_prediction: j >= 1");
  double root = std::pow(double(j), 1.0 / (2.0 * d));
  if (std::isinf(beta)) return f.f(std::max(gamma_const(d, phi) * root, f.domain_start()));
  double C = weyl_constant(d, beta, phi);
  return std::pow(C, -beta / (2.0 * d)) * f.f(std::max(root, f.domain_start()));
}

/// log of the prediction (exp-type predictions overflow doubles quickly).
inline double log_eigenvalue_prediction(int j, const ComparisonFunction& f, int d,
                                        const SphereProfile& phi, double beta) {
  if (j < 1) throw InputError("eigenvalue_prediction: j >= 1");
  double root = std::pow(double(j), 1.0 / (2.0 * d));
  if (std::isinf(beta)) return f.log_f(std::max(gamma_const(d, phi) * root, f.domain_start()));
  double C = weyl_constant(d, beta, phi);
  return -beta / (2.0 * d) * std::log(C) + f.log_f(std::max(root, f.domain_start()));
}

struct UpperBoundConst {
  double bound = 0.0;
  double h_threshold = 0.0;
};

/// N/sigma upper bound and eigenvalue-lower-bound threshold:
/// liminf case:  e/(2^d d!) (1 + Gamma(1+2d/b')/C^{2d/b'}),
///               h < sqrt2 C^{1/b'} e^{-1/(2d)} d!^{1/(2d)} (C^{2d/b'}+Gamma(1+2d/b'))^{-1/(2d)};
/// limit case:   Gamma(1+2d/b') e/(2^d C^{2d/b'} d!)  (= e/(2^d d!) at b' = inf),
///               h < sqrt2 C^{1/b'} d!^{1/(2d)} (e Gamma(1+2d/b'))^{-1/(2d)}
///               (= sqrt2 (d!/e)^{1/(2d)} at b' = inf).
inline UpperBoundConst upper_bound_const(int d, double beta_prime, double C_lower,
                                         bool limit_case = false) {
  if (!(C_lower > 0.0)) throw InputError("upper_bound_const: C > 0");
  const double dfact = std::tgamma(double(d) + 1.0);
  const double twod = std::pow(2.0, d);
  UpperBoundConst out;
  if (std::isinf(beta_prime)) {
    out.bound = M_E / (twod * dfact);
    out.h_threshold = std::sqrt(2.0) * std::pow(dfact / M_E, 1.0 / (2.0 * d));
    return out;
  }
  double g = std::tgamma(1.0 + 2.0 * d / beta_prime);
  double Cp = std::pow(C_lower, 2.0 * d / beta_prime);
  if (limit_case) {
    out.bound = g * M_E / (twod * Cp * dfact);
    out.h_threshold = std::sqrt(2.0) * std::pow(C_lower, 1.0 / beta_prime) *
                      std::pow(dfact, 1.0 / (2.0 * d)) * std::pow(M_E * g, -1.0 / (2.0 * d));
  } else {
    out.bound = M_E / (twod * dfact) * (1.0 + g / Cp);
    out.h_threshold = std::sqrt(2.0) * std::pow(C_lower, 1.0 / beta_prime) *
                      std::pow(M_E, -1.0 / (2.0 * d)) * std::pow(dfact, 1.0 / (2.0 * d)) *
                      std::pow(Cp + g, -1.0 / (2.0 * d));
  }
  return out;
}

/// (2 pi)^{-d} vol{a < lambda} by per-ray root finding in polar coordinates.
inline double geometric_count(const Symbol& a, double lambda, int n_dirs = 64,
                              double r_max_cap = 1e12) {
  const int d = a.dim();
  if (d > 2) throw CapabilityError("geometric_count: d <= 2");
  const double log_lambda = std::log(lambda);

  auto ray_root = [&](const Eigen::VectorXd& dir) -> double {
    auto log_a = [&](double r) {
      LogValue v = a.evaluate(PhasePoint(Eigen::VectorXd(r * dir)));
      return v.sign <= 0 ? -1e300 : v.log_mag;
    };
    if (!(lambda > 0.0)) return 0.0;
    if (log_a(0.0) >= log_lambda) return 0.0;
    double hi = 1.0;
    int guard = 0;
    while (log_a(hi) < log_lambda) {
      hi *= 2.0;
      if (hi > r_max_cap)
        throw RangeError("geometric_count: sublevel set ray exceeds the cap (unbounded?)");
      ++guard;
    }
    double lo = hi * 0.5 >= 1.0 || hi == 1.0 ? hi * 0.5 : 0.0;
    if (guard == 0) lo = 0.0;
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (lo + hi);
      if (log_a(mid) < log_lambda)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  double vol = 0.0;
  if (d == 1) {
    int n = std::max(8, n_dirs);
    for (int j = 0; j < n; ++j) {
      double th = 2.0 * M_PI * j / n;
      Eigen::VectorXd dir(2);
      dir << std::cos(th), std::sin(th);
      double r = ray_root(dir);
      vol += std::pow(r, 2.0) / 2.0 * (2.0 * M_PI / n);
    }
  } else {
    int n = std::max(8, n_dirs / 4);
    const QuadRule& gl = gauss_legendre(n);
    for (int ip = 0; ip < n; ++ip) {
      double psi = 0.5 * M_PI * (gl.nodes[ip] + 1.0);
      double wp = 0.5 * M_PI * gl.weights[ip] * std::sin(psi) * std::sin(psi);
      for (int it = 0; it < n; ++it) {
        double ct = gl.nodes[it];
        double st = std::sqrt(1.0 - ct * ct);
        for (int jp = 0; jp < 2 * n; ++jp) {
          double ph = 2.0 * M_PI * jp / (2 * n);
          // direction on S^3 in coordinates (x1, x2, xi1, xi2)
          Eigen::VectorXd dir(4);
          dir << std::cos(psi), std::sin(psi) * st * std::cos(ph),
              std::sin(psi) * st * std::sin(ph), std::sin(psi) * ct;
          double r = ray_root(dir);
          vol += wp * gl.weights[it] * (2.0 * M_PI / (2 * n)) * std::pow(r, 4.0) / 4.0;
        }
      }
    }
  }
  return vol / std::pow(2.0 * M_PI, d);
}

struct RegularVariationReport {
  double max_deviation = 0.0;  // | sigma(a l)/sigma(l) - a^{2d/beta} |
  double fitted_nu = 0.0;      // smallest nu with sigma(a l)/sigma(l) <= C1 (a+1)^nu
};

inline RegularVariationReport regular_variation_check(const ComparisonFunction& f, int d,
                                                      const std::vector<double>& alphas,
                                                      const std::vector<double>& lambdas) {
  RegularVariationReport rep;
  double index = std::isinf(f.beta_limit()) ? 0.0 : 2.0 * d / f.beta_limit();
  for (double l : lambdas) {
    double s0 = sigma(f, l, d);
    for (double a : alphas) {
      double ratio = sigma(f, a * l, d) / s0;
      rep.max_deviation = std::max(rep.max_deviation, std::abs(ratio - std::pow(a, index)));
      if (a > 0.0 && ratio > 1.0) {
        double nu = std::log(ratio) / std::log(a + 1.0);
        rep.fitted_nu = std::max(rep.fitted_nu, nu);
      }
    }
  }
  return rep;
}

struct KaramataEstimate {
  double L = 0.0;          // lim trace(t)/sigma(1/t)
  double variation_index = 0.0;
  double observed_order = 0.0;  // extrapolation order estimate

  double n_est(const ComparisonFunction& f, int d, double lambda) const {
    return L * sigma(f, lambda, d) / std::tgamma(1.0 + variation_index);
  }
};

/// Tauberian inversion of heat samples: extrapolate L = lim trace/sigma(1/t)
/// by Richardson on the last three samples, divide by Gamma(1 + index).
inline KaramataEstimate karamata_estimate(const std::vector<std::pair<double, double>>& samples,
                                          const ComparisonFunction& f, int d) {
  if (samples.size() < 3) throw InputError("karamata_estimate: need >= 3 samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].first < samples[i - 1].first))
      throw InputError("karamata_estimate: samples must have decreasing t");
  KaramataEstimate est;
  est.variation_index = std::isinf(f.beta_limit()) ? 0.0 : 2.0 * d / f.beta_limit();

  auto L_of = [&](std::size_t i) {
    double t = samples[i].first;
    return samples[i].second / sigma(f, 1.0 / t, d);
  };
  std::size_t n = samples.size();
  double L1 = L_of(n - 3), L2 = L_of(n - 2), L3 = L_of(n - 1);
  double d1 = L2 - L1, d2 = L3 - L2;
  if (d1 == 0.0 && d2 == 0.0) {
    est.L = L3;
    est.observed_order = kBetaInf;
    return est;
  }
  if (d1 * d2 <= 0.0 || std::abs(d2) >= std::abs(d1))
    throw AccuracyError("karamata_estimate: samples not contracting (residuals " +
                        std::to_string(d1) + ", " + std::to_string(d2) + ")");
  double t1 = samples[n - 3].first, t2 = samples[n - 2].first;
  double rho = std::abs(d1 / d2);
  est.observed_order = std::log(rho) / std::log(t1 / t2);
  est.L = L3 + d2 / (rho - 1.0);
  return est;
}

}  // namespace weylab

#endif  // WEYLAB_ASYMPTOTICS_HPP
