#ifndef WEYLAB_CALCULUS_HPP
#define WEYLAB_CALCULUS_HPP

#include <complex>
#include <functional>
#include <vector>

#include "weylab/errors.hpp"
#include "weylab/jets.hpp"
#include "weylab/symbols.hpp"
#include "weylab/weights.hpp"

namespace weylab {

using Complex = std::complex<double>;
using CJet = TaylorJet<Complex>;

namespace detail {

/// Pairs (alpha, beta) of d-dimensional multi-indices with |alpha+beta| = l,
/// together with the combined 2d-variable derivative indices
///   first:  partial^alpha_xi partial^beta_x   (applied to the left factor)
///   second: partial^beta_xi  partial^alpha_x  (applied to the right factor)
/// and the scalar (-1)^{|beta|} / (alpha! beta!).
struct SharpPair {
  MultiIndex left, right;
  double coeff;
};

inline std::vector<SharpPair> sharp_pairs(int d, int l) {
  std::vector<SharpPair> out;
  auto ms = MultiIndexSet::get(d, l);
  for (int ia = 0; ia < ms->size(); ++ia) {
    const MultiIndex& alpha = ms->at(ia);
    int da = mi_degree(alpha);
    for (int ib = 0; ib < ms->size(); ++ib) {
      const MultiIndex& beta = ms->at(ib);
      if (da + mi_degree(beta) != l) continue;
      SharpPair p;
      p.left.assign(std::size_t(2 * d), 0);
      p.right.assign(std::size_t(2 * d), 0);
      for (int i = 0; i < d; ++i) {
        p.left[std::size_t(i)] = beta[std::size_t(i)];        // x-block of left
        p.left[std::size_t(d + i)] = alpha[std::size_t(i)];   // xi-block of left
        p.right[std::size_t(i)] = alpha[std::size_t(i)];      // x-block of right
        p.right[std::size_t(d + i)] = beta[std::size_t(i)];   // xi-block of right
      }
      double sign = (mi_degree(beta) % 2 == 0) ? 1.0 : -1.0;
      p.coeff = sign * std::exp(-mi_log_factorial(alpha) - mi_log_factorial(beta));
      out.push_back(std::move(p));
    }
  }
  return out;
}

inline Complex i_pow_minus(int l) {
  switch (((l % 4) + 4) % 4) {  // i^{-l}
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

}  // namespace detail

/// Order-l layer of the sharp product of two single symbols given as jets:
///   T_l(a, b) = sum_{|alpha+beta|=l} (-1)^{|beta|}/(alpha! beta! 2^l)
///               partial^alpha_xi D^beta_x a . partial^beta_xi D^alpha_x b,
/// with D = i^{-1} partial applied here (jets store plain partials).
inline Complex sharp_layer(const CJet& a, const CJet& b, int l) {
  const int d = a.basis()->nvars() / 2;
  if (l > a.order() || l > b.order())
    throw CapabilityError("sharp_layer: jets of order >= " + std::to_string(l) + " required");
  Complex acc{0.0, 0.0};
  for (const auto& p : detail::sharp_pairs(d, l))
    acc += p.coeff * a.partial(p.left) * b.partial(p.right);
  return acc * detail::i_pow_minus(l) * std::pow(0.5, l);
}

/// Same layer but producing the full jet of the result (for recursions that
/// must differentiate earlier layers).
inline CJet sharp_layer_jet(const CJet& a, const CJet& b, int l, int out_order) {
  const int d = a.basis()->nvars() / 2;
  auto basis = MultiIndexSet::get(2 * d, out_order);
  CJet acc = CJet::constant(basis, Complex(0.0, 0.0));
  for (const auto& p : detail::sharp_pairs(d, l)) {
    CJet da = a.derivative(p.left).promote_order(out_order);
    CJet db = b.derivative(p.right).promote_order(out_order);
    acc = acc + (da * db) * Complex(p.coeff, 0.0);
  }
  return acc * (detail::i_pow_minus(l) * std::pow(0.5, l));
}

/// Formal series: term oracles j -> jet of a_j at a point, with exclusion
/// radii B m_j taken from a weight sequence (m_0 = 0, so term 0 is global).
struct FormalSeries {
  using TermJetFn = std::function<CJet(int j, const PhasePoint& w, int order)>;

  TermJetFn term_jet;
  double B = 0.0;
  WeightSequence weights = WeightSequence::gevrey(1.0);
  int J_max = 0;

  /// Exclusion check: term j is defined on the complement of
  /// Q_{B m_j} = { <x> < B m_j and <xi> < B m_j }.
  bool excluded(int j, const PhasePoint& w) const {
    double t = B * weights.exclusion_ratio(j);
    double bx = std::sqrt(1.0 + w.w.head(w.dim()).squaredNorm());
    double bxi = std::sqrt(1.0 + w.w.tail(w.dim()).squaredNorm());
    return bx < t && bxi < t;
  }

  Complex term_value(int j, const PhasePoint& w) const {
    if (j > J_max) throw CapabilityError("FormalSeries: term beyond J_max");
    if (excluded(j, w))
      throw InputError("FormalSeries: term " + std::to_string(j) +
                       " requested inside its exclusion region");
    return term_jet(j, w, 0).value();
  }

  static FormalSeries from_symbol(const Symbol& a, int J_max = 64) {
    FormalSeries fs;
    fs.J_max = J_max;
    fs.term_jet = [a](int j, const PhasePoint& w, int order) {
      if (j == 0) return a.jet_complex(w, order);
      auto basis = MultiIndexSet::get(2 * a.dim(), order);
      return CJet::constant(basis, Complex(0.0, 0.0));
    };
    return fs;
  }
};

/// The parametrix layers of a hypoelliptic symbol as a formal series.
inline FormalSeries parametrix_series(const Symbol& a, int J_max, double B,
                                      const WeightSequence& weights);

/// c_j layer of the sharp product of two formal series at a point:
/// c_j = sum_{s+k+l=j} T_l(a_s, b_k).
inline Complex sharp_term(const FormalSeries& a, const FormalSeries& b, int j,
                          const PhasePoint& w) {
  Complex acc{0.0, 0.0};
  for (int s = 0; s <= j; ++s) {
    for (int k = 0; s + k <= j; ++k) {
      int l = j - s - k;
      CJet as = a.term_jet(s, w, l);
      CJet bk = b.term_jet(k, w, l);
      acc += sharp_layer(as, bk, l);
    }
  }
  return acc;
}

/// Layers of a # b for two single symbols; c_0 = ab, c_1 the bracket layer...
inline Complex sharp_term(const Symbol& a, const Symbol& b, int j, const PhasePoint& w) {
  CJet aj = a.jet_complex(w, j);
  CJet bj = b.jet_complex(w, j);
  return sharp_layer(aj, bj, j);
}

/// Parametrix layers q_0..q_{J-1} as jets at w:
///   q_0 = 1/(a+z),
///   q_j = -q_0 sum_{s=1..j} T_s(q_{j-s}, a).
/// For z != 0 this is the resolvent recursion with a~ + z.
inline std::vector<CJet> parametrix_jets(const Symbol& a, int J, const PhasePoint& w,
                                         Complex z = Complex(0.0, 0.0), int extra_order = 0) {
  if (J < 1) throw InputError("parametrix_jets: J >= 1");
  const int top = J - 1 + extra_order;
  if (top > kJetOrderCap)
    throw CapabilityError("parametrix_jets: requires jets of order " + std::to_string(top) +
                          " above cap");
  CJet aj = a.jet_complex(w, top);
  Complex az = aj.value() + z;
  if (std::abs(az) < 1e-300)
    throw SingularityError("parametrix_jets: a + z vanishes at the base point");
  std::vector<CJet> q;
  q.push_back(jet_recip(aj + z));
  for (int j = 1; j < J; ++j) {
    const int ord = top - j;  // orders shrink as layers differentiate
    auto basis = MultiIndexSet::get(2 * a.dim(), ord);
    CJet acc = CJet::constant(basis, Complex(0.0, 0.0));
    for (int s = 1; s <= j; ++s)
      acc = acc + sharp_layer_jet(q[std::size_t(j - s)], aj, s, ord);
    q.push_back((-q[0].promote_order(ord)) * acc);
  }
  return q;
}

/// Values q_0(w)..q_{J-1}(w).
inline std::vector<Complex> parametrix_terms(const Symbol& a, int J, const PhasePoint& w,
                                             Complex z = Complex(0.0, 0.0)) {
  std::vector<CJet> q = parametrix_jets(a, J, w, z);
  std::vector<Complex> out;
  out.reserve(q.size());
  for (const auto& jet : q) out.push_back(jet.value());
  return out;
}

constexpr int kHeatOrderCap = 6;

/// u_j(t, w) = e^{-t b(w)} sum_{l=1..2j} t^l u_{l,j}(w) (u_0 = e^{-tb}).
struct HeatTermPolynomial {
  int j = 0;
  std::vector<double> coeff;  // index l = 0..2j; coeff[0] = (j == 0 ? 1 : 0)
  double b_value = 0.0;
  double imag_residual = 0.0;  // largest imaginary part dropped by the recursion

  double evaluate(double t) const {
    double poly = 0.0;
    for (int l = int(coeff.size()) - 1; l >= 0; --l) poly = poly * t + coeff[std::size_t(l)];
    return std::exp(-t * b_value) * poly;
  }
};

namespace detail {

/// s-polynomials with jet coefficients: G_j(s) such that u_j = e^{-s b} G_j.
/// Spatial derivatives act through the twist d_i -> d_i - s (d_i b).
using JetPoly = std::vector<CJet>;  // index = power of s

inline JetPoly jp_zero(std::shared_ptr<const MultiIndexSet> basis) {
  return {CJet::constant(basis, Complex(0.0, 0.0))};
}

inline void jp_add(JetPoly& a, const JetPoly& b) {
  if (b.size() > a.size()) a.resize(b.size(), CJet::constant(a[0].basis(), Complex(0, 0)));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = a[i] + b[i];
}

inline JetPoly jp_scale(const JetPoly& a, Complex c) {
  JetPoly r = a;
  for (auto& x : r) x = x * c;
  return r;
}

/// Twisted first derivative in variable i: (d_i - s d_i b).
inline JetPoly jp_twisted_derivative(const JetPoly& g, int var, const CJet& db_full,
                                     int out_order) {
  MultiIndex e(std::size_t(g[0].basis()->nvars()), 0);
  e[std::size_t(var)] = 1;
  JetPoly r(g.size() + 1, CJet::constant(MultiIndexSet::get(g[0].basis()->nvars(), out_order),
                                         Complex(0, 0)));
  CJet db = db_full.promote_order(out_order);
  for (std::size_t i = 0; i < g.size(); ++i) {
    r[i] = r[i] + g[i].derivative(e).promote_order(out_order);
    r[i + 1] = r[i + 1] - db * g[i].promote_order(out_order);
  }
  return r;
}

inline JetPoly jp_twisted_derivative_multi(JetPoly g, const MultiIndex& gamma, const CJet& b_jet,
                                           int out_order_final) {
  // one variable at a time; each step loses one jet order exactly
  for (std::size_t v = 0; v < gamma.size(); ++v) {
    for (int k = 0; k < gamma[v]; ++k) {
      int cur = g[0].basis()->max_degree();
      MultiIndex de(gamma.size(), 0);
      de[v] = 1;
      g = jp_twisted_derivative(g, int(v), b_jet.derivative(de), cur - 1);
    }
  }
  for (auto& x : g) x = x.promote_order(out_order_final);
  return g;
}

}  // namespace detail

/// Heat-parametrix layers for a single real symbol b, reconstructed by
/// order matching of (d_t + b # .) u = 0 with u(0) = 1:
///   d_t u_j + sum_{l+k=j} T_l(b, u_k) = 0, u_j(0,.) = delta_{j0}.
/// Writing u_j = e^{-sb} G_j turns each step into polynomial integration in
/// t against the e^{-tb} integrating factor; no numeric ODE solve.
inline std::vector<HeatTermPolynomial> heat_terms_at(const Symbol& b, int J, const PhasePoint& w) {
  if (J < 1) throw InputError("heat_terms_at: J >= 1");
  if (J > kHeatOrderCap)
    throw CapabilityError("heat_terms_at: J beyond cap " + std::to_string(kHeatOrderCap));
  const int d = b.dim();
  const int top = 2 * (J - 1);
  CJet b_jet = b.jet_complex(w, std::max(top, 1));
  const double bw = b_jet.value().real();
  if (!(bw > 0.0))
    throw InputError("heat_terms_at: b must be positive on the evaluation region");

  using detail::JetPoly;
  std::vector<JetPoly> G;  // G[j](s), jets of shrinking order 2(J-1-j)
  {
    auto basis0 = MultiIndexSet::get(2 * d, top);
    G.push_back({CJet::constant(basis0, Complex(1.0, 0.0))});
  }

  for (int j = 1; j < J; ++j) {
    const int ord = 2 * (J - 1 - j);
    auto basis = MultiIndexSet::get(2 * d, ord);
    // rhs(s) = sum_{l=1..j} e^{sb} T_l(b, u_{j-l}) as an s-polynomial of jets
    JetPoly rhs = detail::jp_zero(basis);
    for (int l = 1; l <= j; ++l) {
      const JetPoly& Gk = G[std::size_t(j - l)];
      for (const auto& p : detail::sharp_pairs(d, l)) {
        CJet db = b_jet.derivative(p.left).promote_order(ord);
        JetPoly dv = detail::jp_twisted_derivative_multi(Gk, p.right, b_jet, ord);
        Complex c = Complex(p.coeff, 0.0) * detail::i_pow_minus(l) * std::pow(0.5, l);
        JetPoly term(dv.size(), CJet::constant(basis, Complex(0, 0)));
        for (std::size_t i = 0; i < dv.size(); ++i)
          term[i] = (db * dv[i].promote_order(ord)) * c;
        detail::jp_add(rhs, term);
      }
    }
    // G_j(t) = -Int_0^t rhs(s) ds
    JetPoly Gj(rhs.size() + 1, CJet::constant(basis, Complex(0, 0)));
    for (std::size_t i = 0; i < rhs.size(); ++i)
      Gj[i + 1] = rhs[i] * Complex(-1.0 / double(i + 1), 0.0);
    G.push_back(std::move(Gj));
  }

  std::vector<HeatTermPolynomial> out;
  for (int j = 0; j < J; ++j) {
    HeatTermPolynomial h;
    h.j = j;
    h.b_value = bw;
    h.coeff.assign(std::size_t(std::max<int>(2 * j + 1, int(G[std::size_t(j)].size()))), 0.0);
    for (std::size_t l = 0; l < G[std::size_t(j)].size(); ++l) {
      Complex v = G[std::size_t(j)][l].value();
      h.coeff[l] = v.real();
      h.imag_residual = std::max(h.imag_residual, std::abs(v.imag()));
    }
    out.push_back(std::move(h));
  }
  return out;
}

/// Gaussian-moment coefficients of the anti-Wick expansion:
/// c_{alpha,beta} = pi^{-d} Int eta^alpha y^beta e^{-|y|^2-|eta|^2} dy deta.
/// Closed form: product over components of Gamma((k+1)/2)/Gamma(1/2) for
/// even k, zero for any odd component.
inline double anti_wick_coeff(const MultiIndex& alpha, const MultiIndex& beta, int d) {
  if (int(alpha.size()) != d || int(beta.size()) != d)
    throw InputError("anti_wick_coeff: multi-index arity mismatch");
  double log_c = 0.0;
  auto component = [&](int k) -> bool {
    if (k % 2 == 1) return false;
    log_c += std::lgamma((k + 1.0) / 2.0) - std::lgamma(0.5);
    return true;
  };
  for (int i = 0; i < d; ++i)
    if (!component(alpha[std::size_t(i)]) || !component(beta[std::size_t(i)])) return 0.0;
  return std::exp(log_c);
}

/// p'_{k,j}(w) of the Weyl -> anti-Wick correction expansion:
///   p'_{0,0} = b, p'_{k,0} = 0 (k >= 1), p'_{k,j} = 0 (k < j), else
///   sum over compositions l_1+..+l_j = k, l_i >= 1, of products of the
///   order-2l_i Gaussian-moment contractions applied to b.
inline double anti_wick_term(const Symbol& b, int k, int j, const PhasePoint& w) {
  if (k < 0 || j < 0) throw InputError("anti_wick_term: indices >= 0");
  if (k > 6) throw CapabilityError("anti_wick_term: combinatorial guard at k > 6");
  if (k == 0 && j == 0) return b.value(w);
  if (j == 0 || k < j) return 0.0;
  const int d = b.dim();
  auto pair_set = MultiIndexSet::get(2 * d, 2 * k);
  TaylorJet<double> bj = b.jet(w, 2 * k);

  // S_l: constant-coefficient operator sum_{|alpha+beta|=2l} c/(a!b!) d^alpha_xi d^beta_x,
  // stored as map from combined 2d-derivative index to coefficient
  auto S = [&](int l) {
    std::vector<std::pair<MultiIndex, double>> op;
    auto ms = MultiIndexSet::get(d, 2 * l);
    for (int ia = 0; ia < ms->size(); ++ia) {
      const MultiIndex& alpha = ms->at(ia);
      for (int ib = 0; ib < ms->size(); ++ib) {
        const MultiIndex& beta = ms->at(ib);
        if (mi_degree(alpha) + mi_degree(beta) != 2 * l) continue;
        double c = anti_wick_coeff(alpha, beta, d);
        if (c == 0.0) continue;
        c *= std::exp(-mi_log_factorial(alpha) - mi_log_factorial(beta));
        MultiIndex full(std::size_t(2 * d), 0);
        for (int i = 0; i < d; ++i) {
          full[std::size_t(i)] = beta[std::size_t(i)];      // x derivatives
          full[std::size_t(d + i)] = alpha[std::size_t(i)]; // xi derivatives
        }
        op.emplace_back(std::move(full), c);
      }
    }
    return op;
  };

  double total = 0.0;
  for (const auto& comp : compositions(k, j)) {
    // product of the S_{l_i} as commuting operators: convolve coefficient maps
    std::vector<std::pair<MultiIndex, double>> prod{{MultiIndex(std::size_t(2 * d), 0), 1.0}};
    for (int li : comp) {
      auto op = S(li);
      std::vector<std::pair<MultiIndex, double>> next;
      for (const auto& [m1, c1] : prod)
        for (const auto& [m2, c2] : op) next.emplace_back(mi_add(m1, m2), c1 * c2);
      prod = std::move(next);
    }
    for (const auto& [mi, c] : prod) total += c * bj.partial(mi);
  }
  return total;
}

inline FormalSeries parametrix_series(const Symbol& a, int J_max, double B,
                                      const WeightSequence& weights) {
  FormalSeries fs;
  fs.B = B;
  fs.weights = weights;
  fs.J_max = J_max;
  fs.term_jet = [a](int j, const PhasePoint& w, int order) {
    return parametrix_jets(a, j + 1, w, Complex(0.0, 0.0), order)[std::size_t(j)];
  };
  return fs;
}

/// chi_{j,R}(w) = psi(x/(R m_j)) psi(xi/(R m_j)) with psi a plateau cutoff
/// (1 on <y> <= 2, 0 on <y> >= 3); chi_{0,R} = 0, so term 0 always counts.
inline double excision_cutoff(const FormalSeries& series, int j, double R, const PhasePoint& w) {
  if (j == 0) return 0.0;
  double t = R * series.weights.exclusion_ratio(j);
  auto psi = [](double bracket_scaled) { return bump_cutoff(bracket_scaled - 2.0); };
  double bx = std::sqrt(1.0 + w.w.head(w.dim()).squaredNorm() / (t * t));
  double bxi = std::sqrt(1.0 + w.w.tail(w.dim()).squaredNorm() / (t * t));
  return psi(bx) * psi(bxi);
}

/// R(sum_j a_j)(w) = sum_j (1 - chi_{j,R}(w)) a_j(w); locally finite because
/// chi_{j,R} = 1 once R m_j dominates the point.
inline Complex excision(const FormalSeries& series, double R, const PhasePoint& w) {
  if (!(R > series.B)) throw InputError("excision: need R > B of the series");
  Complex acc{0.0, 0.0};
  for (int j = 0; j <= series.J_max; ++j) {
    double chi = excision_cutoff(series, j, R, w);
    if (j > 0 && chi >= 1.0) {
      // cutoffs only plateau harder from here on (m_j nondecreasing)
      bool all_done = true;
      for (int jj = j + 1; jj <= std::min(series.J_max, j + 3); ++jj)
        if (excision_cutoff(series, jj, R, w) < 1.0) all_done = false;
      if (all_done) break;
    }
    if (chi < 1.0) acc += (1.0 - chi) * series.term_jet(j, w, 0).value();
  }
  return acc;
}

}  // namespace weylab

#endif  // WEYLAB_CALCULUS_HPP
