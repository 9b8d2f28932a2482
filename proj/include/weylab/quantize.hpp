#ifndef WEYLAB_QUANTIZE_HPP
#define WEYLAB_QUANTIZE_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "weylab/errors.hpp"
#include "weylab/parallel.hpp"
#include "weylab/quadrature.hpp"
#include "weylab/spectral.hpp"
#include "weylab/symbols.hpp"

namespace weylab {

/// Orthonormal Hermite function h_n(x), stable normalized recurrence.
/// Convention anchor: the Weyl quantisation of r^2 = x^2 + xi^2 acts as
/// 2n + 1 on h_n.
inline double hermite_function(int n, double x) {
  if (n < 0) throw InputError("hermite_function: n >= 0");
  double h0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  if (n == 0) return h0;
  double h1 = std::sqrt(2.0) * x * h0;
  for (int k = 1; k < n; ++k) {
    double h2 = std::sqrt(2.0 / (k + 1.0)) * x * h1 - std::sqrt(k / (k + 1.0)) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

struct QuadSpec {
  double phase_per_panel = M_PI;  // oscillation budget per Gauss panel
  int points = 20;                // Gauss-Legendre points per panel
  double tail_nats = 50.0;        // stop once the integrand dropped this far
  double check_rel_tol = 1e-9;    // dual-resolution agreement for trusted_count
  int n_theta = 0;                // angular samples for matrix assembly; 0 = auto
  int threads = 1;
};

namespace detail {

/// Scaled three-term recurrence values of the Laguerre functions
/// l_n(v) = L_n(v) e^{-v/2}; keeps a power-of-two exponent so the e^{-v/2}
/// start does not underflow at large v.
struct LaguerreLadder {
  double m0, m1;  // scaled l_{n-1}, l_n
  int e;          // common binary exponent
  int n;          // current index of m1
  double v;

  explicit LaguerreLadder(double v_) : v(v_) {
    double le = -0.5 * v / std::log(2.0);
    e = int(std::floor(le));
    double r = std::exp((le - e) * std::log(2.0));  // in [1, 2)
    m0 = r;             // l_0 scaled
    m1 = (1.0 - v) * r; // l_1 scaled
    n = 1;
  }

  void advance() {  // n -> n+1
    double m2 = ((2.0 * n + 1.0 - v) * m1 - n * m0) / (n + 1.0);
    m0 = m1;
    m1 = m2;
    ++n;
    double a = std::max(std::abs(m0), std::abs(m1));
    if (a > 1e280) {
      m0 = std::ldexp(m0, -1000);
      m1 = std::ldexp(m1, -1000);
      e += 1000;
    } else if (a < 1e-280 && a > 0.0) {
      m0 = std::ldexp(m0, 1000);
      m1 = std::ldexp(m1, 1000);
      e -= 1000;
    }
  }
};

/// Panel boundaries in v adapted to the oscillation of l_{N-1}: the local
/// phase density is sqrt((nu - v)/v)/2 with nu = 4N - 2; past the turning
/// point panels grow geometrically into the decay region.
inline std::vector<double> laguerre_panels(int N, double phase_per_panel, double v_stop) {
  const double nu = 4.0 * N - 2.0;
  std::vector<double> bounds{0.0};
  double v = 0.0;
  // near zero the phase is ~ sqrt(nu v): invert analytically
  while (v < std::min(0.1 * nu, v_stop)) {
    double theta = std::sqrt(std::max(nu * v, 0.0));
    double vn = (theta + phase_per_panel) * (theta + phase_per_panel) / nu;
    v = vn;
    bounds.push_back(v);
  }
  const double airy = std::max(1.0, std::cbrt(nu));
  while (v < std::min(nu, v_stop)) {
    double dens = 0.5 * std::sqrt(std::max(nu - v, 1e-12) / v);
    double dv = std::min(phase_per_panel / dens, 2.0 * airy);
    v += dv;
    bounds.push_back(v);
  }
  double dv = airy;
  while (v < v_stop) {
    v += dv;
    bounds.push_back(v);
    dv *= 1.15;
  }
  return bounds;
}

}  // namespace detail

/// Diagonal Weyl eigenvalues of a radial symbol via the Laguerre transform
/// lambda_n = (-1)^n Int_0^inf g(sqrt u) L_n(2u) e^{-u} du. Radial Weyl
/// symbols are exactly diagonal on the Hermite basis, so the finite section
/// is not a truncation: every converged entry is trusted.
inline SpectralData radial_weyl_eigs(const RadialProfile& g, int N,
                                     const QuadSpec& quad = QuadSpec{}) {
  if (N < 1) throw InputError("radial_weyl_eigs: N >= 1");
  const double nu = 4.0 * N - 2.0;

  // stop where the decay exponent beats the profile growth by tail_nats
  double log_g_max = -1e300;
  double v_stop = nu;
  {
    double v = nu;
    for (;;) {
      double lg = g.eval_log(0.5 * v).sign == 0 ? -1e300 : g.eval_log(0.5 * v).log_mag;
      log_g_max = std::max(log_g_max, lg);
      double decay = 0.6 * std::pow(std::max(v - nu, 0.0), 1.5) / (3.0 * std::sqrt(nu));
      if (lg - decay < log_g_max - quad.tail_nats - 10.0) {
        v_stop = v;
        break;
      }
      v += std::max(1.0, 0.05 * v);
      if (v > 1e4 * nu + 1e7)
        throw AccuracyError("radial_weyl_eigs: integrand does not decay (profile grows too fast)");
    }
  }

  auto run = [&](double phase_budget) {
    std::vector<double> bounds = detail::laguerre_panels(N, phase_budget, v_stop);
    const int n_panels = int(bounds.size()) - 1;
    const int block = 16;
    const int n_blocks = (n_panels + block - 1) / block;
    std::vector<Eigen::VectorXd> partial;
    partial.resize(std::size_t(n_blocks));
    const QuadRule& rule = gauss_legendre(quad.points);

    parallel_blocks(n_blocks, quad.threads, [&](int b) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(N);
      for (int p = b * block; p < std::min(n_panels, (b + 1) * block); ++p) {
        double a = bounds[std::size_t(p)], c = bounds[std::size_t(p) + 1];
        double mid = 0.5 * (a + c), half = 0.5 * (c - a);
        for (int q = 0; q < rule.nodes.size(); ++q) {
          double v = mid + half * rule.nodes[q];
          if (v <= 0.0) continue;
          LogValue gv = g.eval_log(0.5 * v);
          if (gv.sign == 0) continue;
          double cg = gv.value();
          if (!std::isfinite(cg))
            throw AccuracyError("radial_weyl_eigs: profile overflows the linear domain");
          double wgt = rule.weights[q] * half * 0.5 * cg;  // the 1/2 from v = 2u
          detail::LaguerreLadder lad(v);
          double l = std::ldexp(lad.m0, lad.e);
          acc[0] += wgt * l;
          if (N > 1) acc[1] -= wgt * std::ldexp(lad.m1, lad.e);
          for (int n = 2; n < N; ++n) {
            lad.advance();
            double ln = std::ldexp(lad.m1, lad.e);
            acc[n] += (n % 2 == 0 ? wgt : -wgt) * ln;
          }
        }
      }
      partial[std::size_t(b)] = std::move(acc);
    });

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(N);
    for (const auto& v : partial) sum += v;
    return sum;
  };

  Eigen::VectorXd diag = run(quad.phase_per_panel);

  // dual-resolution spot check for the trusted-prefix diagnostic
  {
    Eigen::VectorXd fine = run(quad.phase_per_panel * 0.6);
    double worst = 0.0;
    for (int n : {0, N / 4, N / 2, (3 * N) / 4, N - 1}) {
      double d = std::abs(diag[n] - fine[n]) / (1.0 + std::abs(fine[n]));
      worst = std::max(worst, d);
    }
    if (worst > quad.check_rel_tol)
      throw AccuracyError("radial_weyl_eigs: quadrature not converged, deviation " +
                          std::to_string(worst));
    diag = fine;
  }

  SpectralData out;
  out.eigenvalues = diag;
  std::sort(out.eigenvalues.data(), out.eigenvalues.data() + N);
  out.trusted_count = N;
  out.source = "radial_weyl(" + g.describe() + ",N=" + std::to_string(N) + ")";
  return out;
}

inline SpectralData radial_weyl_eigs(const Symbol& sym, int N, const QuadSpec& quad = QuadSpec{}) {
  if (!sym.is_radial() || sym.dim() != 1)
    throw InputError("radial_weyl_eigs: need a radial symbol with d = 1");
  return radial_weyl_eigs(sym.profile(), N, quad);
}

/// Diagonal anti-Wick values: entry_n = Int_0^inf g(sqrt(2v)) v^n e^{-v}/n! dv,
/// normalized so the anti-Wick quantisation of 1 is the identity.
inline SpectralData radial_antiwick_eigs(const RadialProfile& g, int N,
                                         const QuadSpec& quad = QuadSpec{}) {
  if (N < 1) throw InputError("radial_antiwick_eigs: N >= 1");
  Eigen::VectorXd diag(N);
  const int block = 8;
  const int n_blocks = (N + block - 1) / block;
  parallel_blocks(n_blocks, quad.threads, [&](int b) {
    for (int n = b * block; n < std::min(N, (b + 1) * block); ++n) {
      double lg_n = std::lgamma(double(n) + 1.0);
      auto log_f = [&](double v) {
        if (v <= 0.0) return -1e300;
        LogValue gv = g.eval_log(2.0 * v);
        if (gv.sign <= 0) return -1e300;  // signed profiles handled below
        return gv.log_mag + n * std::log(v) - v - lg_n;
      };
      // the fast log-domain path needs a one-signed profile on the support
      bool nonneg = true;
      double hi_probe = 2.0 * (n + 20.0 * std::sqrt(n + 1.0) + 40.0);
      for (int i = 0; i <= 64 && nonneg; ++i)
        if (g.eval_log(hi_probe * i / 64.0).sign < 0) nonneg = false;
      if (nonneg) {
        diag[n] = integrate_log_tail(log_f, 0.0, std::max(0.5, 0.05 * (n + 1.0)),
                                     quad.tail_nats, 1e-11);
      } else {
        // general signed profile: direct adaptive quadrature around the peak
        double hi = n + 20.0 * std::sqrt(n + 1.0) + 40.0;
        diag[n] = integrate_adaptive(
            [&](double v) {
              double env = std::exp(n * std::log(std::max(v, 1e-300)) - v - lg_n);
              return g.value(2.0 * v) * env;
            },
            0.0, hi, 1e-11);
      }
    }
  });
  SpectralData out;
  out.eigenvalues = diag;
  std::sort(out.eigenvalues.data(), out.eigenvalues.data() + N);
  out.trusted_count = N;
  out.source = "radial_antiwick(" + g.describe() + ",N=" + std::to_string(N) + ")";
  return out;
}

inline SpectralData radial_antiwick_eigs(const Symbol& sym, int N,
                                         const QuadSpec& quad = QuadSpec{}) {
  if (!sym.is_radial() || sym.dim() != 1)
    throw InputError("radial_antiwick_eigs: need a radial symbol with d = 1");
  return radial_antiwick_eigs(sym.profile(), N, quad);
}

/// Finite Hermite-basis section of the Weyl quantisation, d = 1.
struct OperatorMatrix {
  Eigen::MatrixXcd entries;
  std::string source;

  int dimension() const { return int(entries.rows()); }
  double hermiticity_defect() const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  }
  double max_imag() const { return entries.imag().cwiseAbs().maxCoeff(); }
};

/// Matrix elements A_{mn} = (a^w h_n, h_m) through the closed-form
/// cross-Wigner transform: for m = n + k >= n,
///   A_{m n} = (-1)^n/(4 pi) Int_0^inf omega_{n,k}(v) G_k(v) dv,
/// where omega_{n,k}(v) = sqrt(n!/(n+k)!) v^{k/2} L_n^(k)(v) e^{-v/2} (an
/// orthonormal, uniformly bounded family) and G_k is the angular Fourier
/// coefficient Int_0^{2pi} a(r, theta) e^{i k theta} d theta at v = 2 r^2.
inline OperatorMatrix build_matrix(const Symbol& sym, int N, const QuadSpec& quad = QuadSpec{}) {
  if (sym.dim() != 1) throw InputError("build_matrix: d = 1 only");
  if (N < 1) throw InputError("build_matrix: N >= 1");
  const double nu = 4.0 * N - 2.0;

  // radial extent: Gaussian weight e^{-v/2} against the symbol's growth
  double v_stop = nu;
  {
    double v = nu, log_max = -1e300;
    for (;;) {
      PhasePoint w = PhasePoint::xp(std::sqrt(0.5 * v), 0.0);
      LogValue av = sym.evaluate(w);
      double lg = av.sign == 0 ? -1e300 : av.log_mag;
      log_max = std::max(log_max, lg);
      double decay = 0.6 * std::pow(std::max(v - nu, 0.0), 1.5) / (3.0 * std::sqrt(nu));
      if (lg - decay < log_max - quad.tail_nats - 10.0) {
        v_stop = v;
        break;
      }
      v += std::max(1.0, 0.05 * v);
      if (v > 1e4 * nu + 1e7) throw AccuracyError("build_matrix: symbol grows too fast");
    }
  }

  std::vector<double> bounds = detail::laguerre_panels(N, quad.phase_per_panel, v_stop);
  const QuadRule& rule = gauss_legendre(quad.points);
  // the angular grid must push aliases of harmonics |k| <= n_theta - N past
  // the stored band, so it scales with N unless the caller knows better
  const int n_theta = quad.n_theta > 0 ? quad.n_theta : 2 * N + 64;

  // collect nodes and angular Fourier data
  std::vector<double> nodes, wgts;
  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    double a = bounds[p], c = bounds[p + 1];
    double mid = 0.5 * (a + c), half = 0.5 * (c - a);
    for (int q = 0; q < rule.nodes.size(); ++q) {
      double v = mid + half * rule.nodes[q];
      if (v <= 0.0) continue;
      nodes.push_back(v);
      wgts.push_back(rule.weights[q] * half);
    }
  }
  const int M = int(nodes.size());
  Eigen::MatrixXcd G(M, N);  // G(i, k) = angular coefficient at node i
  {
    Eigen::VectorXd theta(n_theta);
    for (int j = 0; j < n_theta; ++j) theta[j] = 2.0 * M_PI * j / n_theta;
    for (int i = 0; i < M; ++i) {
      double r = std::sqrt(0.5 * nodes[std::size_t(i)]);
      Eigen::VectorXcd samples(n_theta);
      for (int j = 0; j < n_theta; ++j) {
        PhasePoint w = PhasePoint::xp(r * std::cos(theta[j]), r * std::sin(theta[j]));
        samples[j] = sym.is_real() ? std::complex<double>(sym.value(w)) : sym.value_complex(w);
      }
      for (int k = 0; k < N; ++k) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < n_theta; ++j)
          acc += samples[j] * std::polar(1.0, k * theta[j]);
        G(i, k) = acc * (2.0 * M_PI / n_theta);
      }
    }
  }

  OperatorMatrix out;
  out.entries = Eigen::MatrixXcd::Zero(N, N);
  const int block = 4;
  const int n_blocks = (N + block - 1) / block;
  parallel_blocks(n_blocks, quad.threads, [&](int b) {
    for (int k = b * block; k < std::min(N, (b + 1) * block); ++k) {
      // omega_{n,k} ladder over n at each node, accumulated for all n
      std::vector<std::complex<double>> acc(std::size_t(N - k), 0.0);
      for (int i = 0; i < M; ++i) {
        double v = nodes[std::size_t(i)];
        std::complex<double> base = wgts[std::size_t(i)] * G(i, k) / (4.0 * M_PI);
        // omega_{0,k} = exp((k/2) ln v - v/2 - lgamma(k+1)/2), scaled ladder
        double le = (0.5 * k * std::log(v) - 0.5 * v - 0.5 * std::lgamma(double(k) + 1.0)) /
                    std::log(2.0);
        int e = int(std::floor(le));
        double m1 = std::exp((le - e) * std::log(2.0));
        double m0 = 0.0;
        for (int n = 0; n + k < N; ++n) {
          if (n > 0) {
            double m2 = ((2.0 * (n - 1.0) + k + 1.0 - v) * m1 -
                         std::sqrt((n - 1.0) * (n - 1.0 + k)) * m0) /
                        std::sqrt(double(n) * (n + k));
            m0 = m1;
            m1 = m2;
            double aa = std::max(std::abs(m0), std::abs(m1));
            if (aa > 1e280) {
              m0 = std::ldexp(m0, -1000);
              m1 = std::ldexp(m1, -1000);
              e += 1000;
            } else if (aa < 1e-280 && aa > 0.0) {
              m0 = std::ldexp(m0, 1000);
              m1 = std::ldexp(m1, 1000);
              e -= 1000;
            }
          }
          double omega = std::ldexp(m1, e);
          acc[std::size_t(n)] += (n % 2 == 0 ? 1.0 : -1.0) * omega * base;
        }
      }
      for (int n = 0; n + k < N; ++n) out.entries(n + k, n) = acc[std::size_t(n)];
    }
  });
  // fill the upper triangle by the Wigner conjugation symmetry
  for (int n = 0; n < N; ++n)
    for (int m = n + 1; m < N; ++m) out.entries(n, m) = std::conj(out.entries(m, n));
  // A_{n,m} for real symbols must come out Hermitian already; the conjugate
  // fill makes that exact and leaves genuinely complex symbols to the caller.
  out.source = "build_matrix(" + sym.describe() + ",N=" + std::to_string(N) + ")";
  return out;
}

/// Ascending eigenvalues of a Hermitian section. Backed by the dense
/// symmetric solver (Householder tridiagonalization + implicit QL), which is
/// deterministic and single-threaded per matrix.
inline SpectralData eigensolve(const OperatorMatrix& mat) {
  double scale = mat.entries.cwiseAbs().maxCoeff();
  if (mat.hermiticity_defect() > 1e-12 * std::max(1.0, scale))
    throw InputError("eigensolve: matrix is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat.entries, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw AccuracyError("eigensolve: iteration failed");
  SpectralData out;
  out.eigenvalues = es.eigenvalues();
  out.trusted_count = 0;  // set by truncation_trust
  out.source = "eigensolve(" + mat.source + ")";
  return out;
}

/// Largest prefix on which two basis sizes agree to tol (relative).
inline int truncation_trust(const SpectralData& eigs_n, const SpectralData& eigs_2n, double tol) {
  int k = 0;
  int limit = std::min(eigs_n.size(), eigs_2n.size());
  while (k < limit) {
    double a = eigs_n.eigenvalues[k], b = eigs_2n.eigenvalues[k];
    if (std::abs(a - b) > tol * (1.0 + std::abs(b))) break;
    ++k;
  }
  return k;
}

/// Spectrum of a separable sum: all pairwise sums up to the cutoff. Any sum
/// that could involve an eigenvalue beyond a trusted ceiling must exceed the
/// cutoff, otherwise the enumeration could silently undercount.
inline SpectralData combine_separable(const SpectralData& a, const SpectralData& b,
                                      double cutoff) {
  if (a.trusted_count == 0 || b.trusted_count == 0)
    throw RangeError("combine_separable: untrusted inputs");
  double amin = a.eigenvalues[0], bmin = b.eigenvalues[0];
  if (a.trusted_ceiling() + bmin < cutoff || b.trusted_ceiling() + amin < cutoff)
    throw RangeError("combine_separable: trusted ranges do not cover the cutoff");
  std::vector<double> sums;
  for (int i = 0; i < a.trusted_count; ++i) {
    double ai = a.eigenvalues[i];
    if (ai + bmin > cutoff) break;
    for (int j = 0; j < b.trusted_count; ++j) {
      double s = ai + b.eigenvalues[j];
      if (s > cutoff) break;
      sums.push_back(s);
    }
  }
  std::sort(sums.begin(), sums.end());
  SpectralData out;
  out.eigenvalues = Eigen::Map<Eigen::VectorXd>(sums.data(), Eigen::Index(sums.size()));
  out.trusted_count = int(sums.size());
  out.source = "separable(" + a.source + " + " + b.source + ")";
  return out;
}

}  // namespace weylab

#endif  // WEYLAB_QUANTIZE_HPP
