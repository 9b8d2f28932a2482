#ifndef WEYLAB_JETS_HPP
#define WEYLAB_JETS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <memory>
#include <type_traits>

#include "weylab/multiindex.hpp"

namespace weylab {

/// Truncated multivariate Taylor expansion around a base point. Coefficients
/// are Taylor coefficients f_alpha = partial^alpha f / alpha!, stored in the
/// graded order of a shared MultiIndexSet. Arithmetic is forward-mode: sums,
/// truncated products, and composition with univariate analytic functions.
template <class Scalar>
class TaylorJet {
 public:
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TaylorJet() = default;
  TaylorJet(std::shared_ptr<const MultiIndexSet> basis, Coeffs c)
      : basis_(std::move(basis)), c_(std::move(c)) {}

  static TaylorJet constant(std::shared_ptr<const MultiIndexSet> basis, Scalar v) {
    Coeffs c = Coeffs::Zero(basis->size());
    c[0] = v;
    return TaylorJet(std::move(basis), std::move(c));
  }

  /// Jet of the coordinate function w_i expanded at w_i = x0.
  static TaylorJet variable(std::shared_ptr<const MultiIndexSet> basis, int i, Scalar x0) {
    Coeffs c = Coeffs::Zero(basis->size());
    c[0] = x0;
    if (basis->max_degree() >= 1) {
      MultiIndex e(std::size_t(basis->nvars()), 0);
      e[std::size_t(i)] = 1;
      c[basis->index_of(e)] = Scalar(1);
    }
    return TaylorJet(std::move(basis), std::move(c));
  }

  const std::shared_ptr<const MultiIndexSet>& basis() const { return basis_; }
  int order() const { return basis_->max_degree(); }
  const Coeffs& coeffs() const { return c_; }
  Coeffs& coeffs() { return c_; }

  Scalar value() const { return c_[0]; }

  Scalar coeff(const MultiIndex& a) const {
    int i = basis_->index_of(a);
    return i < 0 ? Scalar(0) : c_[i];
  }

  /// partial^alpha f at the base point (coefficient times alpha!).
  Scalar partial(const MultiIndex& a) const {
    int i = basis_->index_of(a);
    if (i < 0) throw CapabilityError("TaylorJet::partial: order above jet order");
    return c_[i] * Scalar(std::exp(basis_->log_factorial(i)));
  }

  /// Jet of partial^gamma f (order drops by |gamma|; coefficients reindexed).
  TaylorJet derivative(const MultiIndex& gamma) const {
    const int g = mi_degree(gamma);
    if (g > order()) throw CapabilityError("TaylorJet::derivative: order above jet order");
    auto out_basis = MultiIndexSet::get(basis_->nvars(), order() - g);
    Coeffs out = Coeffs::Zero(out_basis->size());
    for (int i = 0; i < out_basis->size(); ++i) {
      const MultiIndex& beta = out_basis->at(i);
      MultiIndex bg = mi_add(beta, gamma);
      int src = basis_->index_of(bg);
      if (src < 0) continue;
      // (partial^gamma f)_beta = f_{beta+gamma} * (beta+gamma)! / beta!
      double lf = basis_->log_factorial(src) - out_basis->log_factorial(i);
      out[i] = c_[src] * Scalar(std::exp(lf));
    }
    return TaylorJet(std::move(out_basis), std::move(out));
  }

  TaylorJet operator-() const { return TaylorJet(basis_, -c_); }

  friend TaylorJet operator+(const TaylorJet& a, const TaylorJet& b) {
    return TaylorJet(a.basis_, a.c_ + b.c_);
  }
  friend TaylorJet operator-(const TaylorJet& a, const TaylorJet& b) {
    return TaylorJet(a.basis_, a.c_ - b.c_);
  }
  friend TaylorJet operator*(const TaylorJet& a, Scalar s) { return TaylorJet(a.basis_, a.c_ * s); }
  friend TaylorJet operator*(Scalar s, const TaylorJet& a) { return a * s; }
  friend TaylorJet operator+(const TaylorJet& a, Scalar s) {
    TaylorJet r = a;
    r.c_[0] += s;
    return r;
  }
  friend TaylorJet operator+(Scalar s, const TaylorJet& a) { return a + s; }
  friend TaylorJet operator-(const TaylorJet& a, Scalar s) { return a + (-s); }

  friend TaylorJet operator*(const TaylorJet& a, const TaylorJet& b) {
    const MultiIndexSet& basis = *a.basis_;
    const int n = basis.size();
    Coeffs out = Coeffs::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (a.c_[i] == Scalar(0)) continue;
      for (int j = 0; j < n; ++j) {
        int k = basis.sum_index(i, j);
        if (k < 0) continue;
        out[k] += a.c_[i] * b.c_[j];
      }
    }
    return TaylorJet(a.basis_, std::move(out));
  }

  /// g(f) for univariate analytic g given by its Taylor coefficients at
  /// f.value(): series[k] = g^(k)(f0)/k!. Horner on the zero-constant part.
  TaylorJet compose(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& series) const {
    TaylorJet tilde = *this;
    tilde.c_[0] = Scalar(0);
    const int d = order();
    TaylorJet acc = TaylorJet::constant(basis_, series[d]);
    for (int k = d - 1; k >= 0; --k) acc = acc * tilde + series[k];
    return acc;
  }

  TaylorJet promote_order(int new_order) const {
    auto nb = MultiIndexSet::get(basis_->nvars(), new_order);
    Coeffs out = Coeffs::Zero(nb->size());
    for (int i = 0; i < basis_->size(); ++i) {
      int j = nb->index_of(basis_->at(i));
      if (j >= 0) out[j] = c_[i];
    }
    return TaylorJet(std::move(nb), std::move(out));
  }

  /// Embed a jet in fewer variables into a larger variable set; var_map[i]
  /// gives the target variable of source variable i.
  TaylorJet embed(std::shared_ptr<const MultiIndexSet> target,
                  const std::vector<int>& var_map) const {
    Coeffs out = Coeffs::Zero(target->size());
    for (int i = 0; i < basis_->size(); ++i) {
      MultiIndex big(std::size_t(target->nvars()), 0);
      const MultiIndex& a = basis_->at(i);
      for (std::size_t v = 0; v < a.size(); ++v) big[std::size_t(var_map[v])] = a[v];
      int j = target->index_of(big);
      if (j >= 0) out[j] = c_[i];
    }
    return TaylorJet(std::move(target), std::move(out));
  }

 private:
  std::shared_ptr<const MultiIndexSet> basis_;
  Coeffs c_;
};

namespace jet_series {

template <class Scalar>
using Series = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
Series<Scalar> exp_at(Scalar c, int order) {
  Series<Scalar> s(order + 1);
  Scalar e = std::exp(c);
  double kfact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) kfact *= k;
    s[k] = e / Scalar(kfact);
  }
  return s;
}

template <class Scalar>
Series<Scalar> recip_at(Scalar c, int order) {
  Series<Scalar> s(order + 1);
  Scalar inv = Scalar(1) / c;
  Scalar cur = inv;
  for (int k = 0; k <= order; ++k) {
    s[k] = cur;  // (-1)^k / c^{k+1}
    cur *= -inv;
  }
  return s;
}

/// Taylor coefficients of y -> y^a at c > 0 (real branch).
template <class Scalar>
Series<Scalar> pow_at(Scalar c, double a, int order) {
  Series<Scalar> s(order + 1);
  Scalar cur = std::pow(c, Scalar(a));
  s[0] = cur;
  Scalar binom = Scalar(1);
  for (int k = 1; k <= order; ++k) {
    binom *= Scalar((a - (k - 1)) / double(k));
    s[k] = binom * std::pow(c, Scalar(a - k));
  }
  return s;
}

template <class Scalar>
Series<Scalar> log_at(Scalar c, int order) {
  Series<Scalar> s(order + 1);
  s[0] = std::log(c);
  Scalar inv = Scalar(1) / c;
  Scalar cur = inv;
  for (int k = 1; k <= order; ++k) {
    s[k] = cur / Scalar(k) * Scalar((k % 2 == 1) ? 1 : -1);
    cur *= inv;
  }
  return s;
}

template <class Scalar>
Series<Scalar> cos_at(Scalar c, int order) {
  Series<Scalar> s(order + 1);
  const Scalar table[4] = {std::cos(c), -std::sin(c), -std::cos(c), std::sin(c)};
  double kfact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) kfact *= k;
    s[k] = table[k % 4] / Scalar(kfact);
  }
  return s;
}

template <class Scalar>
Series<Scalar> sin_at(Scalar c, int order) {
  Series<Scalar> s(order + 1);
  const Scalar table[4] = {std::sin(c), std::cos(c), -std::sin(c), -std::cos(c)};
  double kfact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) kfact *= k;
    s[k] = table[k % 4] / Scalar(kfact);
  }
  return s;
}

}  // namespace jet_series

template <class Scalar>
TaylorJet<Scalar> jet_exp(const TaylorJet<Scalar>& f) {
  return f.compose(jet_series::exp_at<Scalar>(f.value(), f.order()));
}

template <class Scalar>
TaylorJet<Scalar> jet_recip(const TaylorJet<Scalar>& f) {
  if (f.value() == Scalar(0)) throw SingularityError("jet_recip: value vanishes at base point");
  return f.compose(jet_series::recip_at<Scalar>(f.value(), f.order()));
}

template <class Scalar>
TaylorJet<Scalar> jet_pow(const TaylorJet<Scalar>& f, double a) {
  return f.compose(jet_series::pow_at<Scalar>(f.value(), a, f.order()));
}

template <class Scalar>
TaylorJet<Scalar> jet_log(const TaylorJet<Scalar>& f) {
  return f.compose(jet_series::log_at<Scalar>(f.value(), f.order()));
}

template <class Scalar>
TaylorJet<Scalar> jet_cos(const TaylorJet<Scalar>& f) {
  return f.compose(jet_series::cos_at<Scalar>(f.value(), f.order()));
}

template <class Scalar>
TaylorJet<Scalar> jet_sin(const TaylorJet<Scalar>& f) {
  return f.compose(jet_series::sin_at<Scalar>(f.value(), f.order()));
}

inline TaylorJet<std::complex<double>> promote_complex(const TaylorJet<double>& f) {
  Eigen::VectorXcd c = f.coeffs().cast<std::complex<double>>();
  return TaylorJet<std::complex<double>>(f.basis(), std::move(c));
}

}  // namespace weylab

#endif  // WEYLAB_JETS_HPP
