#ifndef WEYLAB_QUADRATURE_HPP
#define WEYLAB_QUADRATURE_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "weylab/errors.hpp"

namespace weylab {

struct QuadRule {
  Eigen::VectorXd nodes;    // on [-1,1] (Legendre) or the natural support (Hermite)
  Eigen::VectorXd weights;
};

namespace detail {

inline QuadRule gauss_legendre_compute(int n) {
  // Newton iteration on the Legendre recurrence.
  QuadRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

inline QuadRule gauss_hermite_compute(int n) {
  // Golub-Welsch on the Hermite Jacobi matrix; weight exp(-x^2), total mass sqrt(pi).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = std::sqrt(k / 2.0);
    J(k - 1, k) = b;
    J(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadRule r;
  r.nodes = es.eigenvalues();
  r.weights.resize(n);
  const double mu0 = std::sqrt(M_PI);
  for (int k = 0; k < n; ++k) {
    double v = es.eigenvectors()(0, k);
    r.weights[k] = mu0 * v * v;
  }
  return r;
}

}  // namespace detail

inline const QuadRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::gauss_legendre_compute(n)).first;
  return it->second;
}

inline const QuadRule& gauss_hermite(int n) {
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::gauss_hermite_compute(n)).first;
  return it->second;
}

template <class F>
double integrate_panel(F&& f, double a, double b, int order) {
  const QuadRule& r = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

/// Adaptive Gauss-Legendre with interlaced orders; refinement by bisection.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-12,
                          int max_depth = 40, double abs_floor = 0.0) {
  struct Seg {
    double a, b, coarse;
    int depth;
  };
  double coarse0 = integrate_panel(f, a, b, 15);
  std::vector<Seg> stack{{a, b, coarse0, 0}};
  double total = 0.0;
  double scale = std::abs(coarse0) + abs_floor;
  while (!stack.empty()) {
    Seg s = stack.back();
    stack.pop_back();
    double fine = integrate_panel(f, s.a, s.b, 25);
    double err = std::abs(fine - s.coarse);
    scale = std::max(scale, std::abs(total) + std::abs(fine));
    if (err <= rel_tol * std::max(scale, 1e-300) || s.depth >= max_depth) {
      if (s.depth >= max_depth && err > 1e3 * rel_tol * std::max(scale, 1e-300))
        throw AccuracyError("integrate_adaptive: panel refinement stalled, error estimate " +
                            std::to_string(err));
      total += fine;
      continue;
    }
    double m = 0.5 * (s.a + s.b);
    stack.push_back({s.a, m, integrate_panel(f, s.a, m, 15), s.depth + 1});
    stack.push_back({m, s.b, integrate_panel(f, m, s.b, 15), s.depth + 1});
  }
  return total;
}

/// Integral of exp(log_f(x)) over [a, inf) where log_f decreases eventually;
/// the domain is truncated once log_f drops `tail_nats` below its maximum.
/// Returns the integral in the linear domain (the peak must be representable
/// after the max-shift, which is the caller's normalization job).
template <class LogF>
double integrate_log_tail(LogF&& log_f, double a, double step0, double tail_nats = 46.0,
                          double rel_tol = 1e-11) {
  // locate the peak by expanding steps
  double peak = log_f(a);
  double x = a, step = step0;
  double x_end = a;
  double hi = a;
  for (int it = 0; it < 100000; ++it) {
    x += step;
    double v = log_f(x);
    if (v > peak) peak = v;
    if (v < peak - tail_nats) {
      x_end = x;
      break;
    }
    step *= 1.25;
    hi = x;
    if (it == 99999) throw RangeError("integrate_log_tail: integrand does not decay");
  }
  (void)hi;
  auto f = [&](double t) {
    double v = log_f(t) - peak;
    return v < -700.0 ? 0.0 : std::exp(v);
  };
  double val = integrate_adaptive(f, a, x_end, rel_tol);
  return val * std::exp(peak);
}

}  // namespace weylab

#endif  // WEYLAB_QUADRATURE_HPP
