#ifndef WEYLAB_SYMBOLS_HPP
#define WEYLAB_SYMBOLS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "weylab/errors.hpp"
#include "weylab/jets.hpp"
#include "weylab/weights.hpp"

namespace weylab {

/// Point w = (x_1..x_d, xi_1..xi_d) of phase space R^{2d}.
struct PhasePoint {
  Eigen::VectorXd w;

  PhasePoint() = default;
  explicit PhasePoint(Eigen::VectorXd coords) : w(std::move(coords)) {
    if (w.size() % 2 != 0 || w.size() == 0) throw InputError("PhasePoint: need 2d coordinates");
    if (!w.allFinite()) throw InputError("PhasePoint: non-finite coordinates");
  }
  static PhasePoint xp(double x, double xi) {
    Eigen::VectorXd v(2);
    v << x, xi;
    return PhasePoint(v);
  }

  int dim() const { return int(w.size()) / 2; }
  double x(int i) const { return w[i]; }
  double xi(int i) const { return w[dim() + i]; }
  double norm_sq() const { return w.squaredNorm(); }
  double norm() const { return w.norm(); }
  double bracket() const { return std::sqrt(1.0 + w.squaredNorm()); }  // <w>
  double x_block_norm() const { return w.head(dim()).norm(); }
  double xi_block_norm() const { return w.tail(dim()).norm(); }
};

/// sign * exp(log_magnitude); the representation symbols of ultrapolynomial
/// growth force on us.
struct LogValue {
  int sign = 0;  // -1, 0, +1
  double log_mag = -std::numeric_limits<double>::infinity();

  double value() const {
    if (sign == 0) return 0.0;
    if (log_mag > 709.0) return sign > 0 ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();
    return sign * std::exp(log_mag);
  }
  static LogValue from(double v) {
    LogValue r;
    if (v == 0.0) return r;
    r.sign = v > 0 ? 1 : -1;
    r.log_mag = std::log(std::abs(v));
    return r;
  }
};

/// Signed log-sum-exp accumulation.
inline LogValue log_sum(const std::vector<LogValue>& terms) {
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms)
    if (t.sign != 0) mx = std::max(mx, t.log_mag);
  if (!std::isfinite(mx)) return LogValue{};
  double acc = 0.0;
  for (const auto& t : terms)
    if (t.sign != 0) acc += t.sign * std::exp(t.log_mag - mx);
  if (acc == 0.0) return LogValue{};
  LogValue r;
  r.sign = acc > 0 ? 1 : -1;
  r.log_mag = mx + std::log(std::abs(acc));
  return r;
}

using Jet1 = TaylorJet<double>;

inline std::shared_ptr<const MultiIndexSet> basis1(int order) { return MultiIndexSet::get(1, order); }

/// Radial profiles are functions of u = r^2, which keeps them smooth at the
/// origin and makes exact jets a chain rule with the polynomial u(x, xi).
class RadialProfile {
 public:
  virtual ~RadialProfile() = default;
  virtual LogValue eval_log(double u) const = 0;
  virtual Jet1 jet(double u, int order) const = 0;
  virtual bool has_exact_jet() const { return true; }
  virtual std::string describe() const = 0;
  double value(double u) const { return eval_log(u).value(); }
};

/// Finite-difference univariate jet by polynomial interpolation on a
/// symmetric stencil (shifted to stay in u >= 0). Used as the fallback for
/// black-box profiles; ~1e-6 at moderate orders.
inline Jet1 fd_profile_jet(const std::function<double(double)>& f, double u0, int order) {
  const int n = order + 5;  // nodes
  // step balances interpolation truncation against roundoff at the top order
  const double scale = std::max(1.0, std::abs(u0));
  const double h = scale * std::pow(2.2e-16, 1.0 / (order + 4));
  double lo = u0 - 0.5 * (n - 1) * h;
  if (lo < 0.0) lo = 0.0;
  Eigen::MatrixXd V(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    double du = lo + i * h - u0;
    double p = 1.0;
    for (int k = 0; k < n; ++k) {
      V(i, k) = p;
      p *= du;
    }
    b[i] = f(lo + i * h);
  }
  Eigen::VectorXd c = V.partialPivLu().solve(b);
  Eigen::VectorXd out = c.head(order + 1);
  return Jet1(basis1(order), out);
}

class PolyProfile : public RadialProfile {
 public:
  PolyProfile(std::vector<double> coeffs, bool exp_wrapped = false)
      : coeffs_(std::move(coeffs)), exp_wrapped_(exp_wrapped) {
    if (coeffs_.empty()) throw InputError("PolyProfile: empty coefficient list");
  }

  LogValue eval_log(double u) const override {
    if (exp_wrapped_) {
      LogValue r;
      r.sign = 1;
      r.log_mag = horner(u);
      return r;
    }
    std::vector<LogValue> terms;
    double lu = u > 0 ? std::log(u) : 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      if (coeffs_[k] == 0.0) continue;
      if (k > 0 && u == 0.0) continue;
      LogValue t;
      t.sign = coeffs_[k] > 0 ? 1 : -1;
      t.log_mag = std::log(std::abs(coeffs_[k])) + (k > 0 ? double(k) * lu : 0.0);
      terms.push_back(t);
    }
    return log_sum(terms);
  }

  Jet1 jet(double u, int order) const override {
    auto basis = basis1(order);
    Jet1 uj = Jet1::variable(basis, 0, u);
    Jet1 acc = Jet1::constant(basis, coeffs_.back());
    for (int k = int(coeffs_.size()) - 2; k >= 0; --k) acc = acc * uj + coeffs_[std::size_t(k)];
    return exp_wrapped_ ? jet_exp(acc) : acc;
  }

  std::string describe() const override {
    return (exp_wrapped_ ? "exp_poly_u" : "poly_u") + std::string("[deg ") +
           std::to_string(coeffs_.size() - 1) + "]";
  }

 private:
  double horner(double u) const {
    double acc = coeffs_.back();
    for (int k = int(coeffs_.size()) - 2; k >= 0; --k) acc = acc * u + coeffs_[std::size_t(k)];
    return acc;
  }
  std::vector<double> coeffs_;
  bool exp_wrapped_;
};

/// exp((h <w>)^{1/s}) as a profile of u: exp(h^{1/s} (1+u)^{1/(2s)}).
class ExpGevreyProfile : public RadialProfile {
 public:
  ExpGevreyProfile(double h, double s) : h_(h), s_(s) {
    if (!(h > 0.0) || !(s > 1.0)) throw InputError("ExpGevreyProfile: need h > 0, s > 1");
  }
  LogValue eval_log(double u) const override {
    LogValue r;
    r.sign = 1;
    r.log_mag = std::pow(h_, 1.0 / s_) * std::pow(1.0 + u, 0.5 / s_);
    return r;
  }
  Jet1 jet(double u, int order) const override {
    auto basis = basis1(order);
    Jet1 uj = Jet1::variable(basis, 0, u);
    Jet1 inner = jet_pow(uj + 1.0, 0.5 / s_) * std::pow(h_, 1.0 / s_);
    return jet_exp(inner);
  }
  std::string describe() const override {
    return "exp_gevrey(h=" + std::to_string(h_) + ",s=" + std::to_string(s_) + ")";
  }
  double h() const { return h_; }
  double s() const { return s_; }

 private:
  double h_, s_;
};

/// P(<w>) with P(z) = 1 + sum_n (hz)^n / n^{sn}, as a profile of u.
class EntireSeriesProfile : public RadialProfile {
 public:
  EntireSeriesProfile(double h, double s) : h_(h), s_(s) {
    if (!(h > 0.0) || !(s > 1.0)) throw InputError("EntireSeriesProfile: need h > 0, s > 1");
  }

  LogValue eval_log(double u) const override {
    const double logz = 0.5 * std::log1p(u);
    const double loghz = std::log(h_) + logz;
    // log-sum-exp over n of n*loghz - s n ln n, plus the constant 1
    double mx = 0.0;  // the n = 0 term: log 1
    std::vector<double> logs{0.0};
    double prev = -std::numeric_limits<double>::infinity();
    for (int n = 1;; ++n) {
      double t = n * loghz - s_ * n * std::log(double(n));
      logs.push_back(t);
      mx = std::max(mx, t);
      if (t < mx - 60.0 && t < prev) break;
      prev = t;
      if (n > 2000000) throw AccuracyError("EntireSeriesProfile: series did not localize");
    }
    double acc = 0.0;
    for (double t : logs) acc += std::exp(t - mx);
    LogValue r;
    r.sign = 1;
    r.log_mag = mx + std::log(acc);
    return r;
  }

  Jet1 jet(double u, int order) const override {
    LogValue v = eval_log(u);
    if (v.log_mag > 600.0)
      throw CapabilityError("EntireSeriesProfile::jet: value too large for linear-domain jets");
    auto basis = basis1(order);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(order + 1);
    acc[0] = 1.0;
    // term-wise: c_n (1+u)^{n/2}; Taylor coeff k = c_n binom(n/2, k) (1+u0)^{n/2-k}
    const double l1u = std::log1p(u);
    double max_lead = 0.0;
    double prev_lead = -std::numeric_limits<double>::infinity();
    for (int n = 1;; ++n) {
      double logc = n * std::log(h_) - s_ * n * std::log(double(n));
      double lead = logc + 0.5 * n * l1u;
      max_lead = std::max(max_lead, lead);
      if (lead < max_lead - 50.0 && lead < prev_lead) break;
      prev_lead = lead;
      double binom = 1.0;
      for (int k = 0; k <= order; ++k) {
        if (k > 0) binom *= (0.5 * n - (k - 1)) / double(k);
        acc[k] += std::exp(logc + (0.5 * n - k) * l1u) * binom;
      }
      if (n > 1000000) throw AccuracyError("EntireSeriesProfile::jet: series did not localize");
    }
    return Jet1(basis, acc);
  }

  std::string describe() const override {
    return "entire_series(h=" + std::to_string(h_) + ",s=" + std::to_string(s_) + ")";
  }

 private:
  double h_, s_;
};

/// Black-box profile; jets fall back to finite differences unless an exact
/// jet oracle is supplied.
class CustomProfile : public RadialProfile {
 public:
  using JetFn = std::function<Jet1(double, int)>;
  explicit CustomProfile(std::function<double(double)> f, JetFn jet_fn = nullptr,
                         std::string name = "custom")
      : f_(std::move(f)), jet_fn_(std::move(jet_fn)), name_(std::move(name)) {}

  LogValue eval_log(double u) const override { return LogValue::from(f_(u)); }
  Jet1 jet(double u, int order) const override {
    if (jet_fn_) return jet_fn_(u, order);
    return fd_profile_jet(f_, u, order);
  }
  bool has_exact_jet() const override { return bool(jet_fn_); }
  std::string describe() const override { return name_; }

 private:
  std::function<double(double)> f_;
  JetFn jet_fn_;
  std::string name_;
};

/// The C^inf bump exp(1 - 1/(1-s^2)) on (-1,1), rescaled as a monotone
/// cutoff: 1 at s <= 0, 0 at s >= 1.
inline double bump_cutoff(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

inline Jet1 bump_cutoff_jet(double s, int order) {
  auto basis = basis1(order);
  if (s <= 0.0) return Jet1::constant(basis, 1.0);
  if (s >= 1.0) return Jet1::constant(basis, 0.0);
  Jet1 sj = Jet1::variable(basis, 0, s);
  Jet1 denom = -(sj * sj) + 1.0;
  return jet_exp(-jet_recip(denom) + 1.0);
}

constexpr int kJetOrderCap = 12;

class Symbol;
Symbol positivize(const Symbol& sym, double r_in, double r_out);

/// Evaluable phase-space symbol with exact (or FD-fallback) derivative jets.
class Symbol {
 public:
  enum class Kind { Radial, Polynomial, SeparableSum, Shifted, Blended };

  static Symbol radial(std::shared_ptr<const RadialProfile> profile, int d = 1) {
    Symbol s;
    s.kind_ = Kind::Radial;
    s.d_ = d;
    s.profile_ = std::move(profile);
    return s;
  }
  static Symbol radial_poly(std::vector<double> coeffs, int d = 1, bool exp_wrapped = false) {
    return radial(std::make_shared<PolyProfile>(std::move(coeffs), exp_wrapped), d);
  }
  /// r^2 = |w|^2.
  static Symbol harmonic(int d = 1) { return radial_poly({0.0, 1.0}, d); }
  static Symbol exp_gevrey(double h, double s, int d = 1) {
    return radial(std::make_shared<ExpGevreyProfile>(h, s), d);
  }
  static Symbol entire_series(double h, double s, int d = 1) {
    return radial(std::make_shared<EntireSeriesProfile>(h, s), d);
  }
  static Symbol polynomial(std::map<MultiIndex, double> terms, int d) {
    Symbol s;
    s.kind_ = Kind::Polynomial;
    s.d_ = d;
    s.poly_ = std::move(terms);
    for (const auto& [mi, c] : s.poly_)
      if (int(mi.size()) != 2 * d) throw InputError("Symbol::polynomial: bad multi-index arity");
    return s;
  }
  /// Coordinate symbols, convenient in tests: x_i or xi_i.
  static Symbol coordinate(int var, int d = 1) {
    MultiIndex mi(std::size_t(2 * d), 0);
    mi[std::size_t(var)] = 1;
    return polynomial({{mi, 1.0}}, d);
  }
  static Symbol separable_sum(std::vector<Symbol> components) {
    Symbol s;
    s.kind_ = Kind::SeparableSum;
    s.d_ = 0;
    for (const auto& c : components) {
      if (c.kind_ == Kind::SeparableSum) throw InputError("separable_sum: no nesting");
      s.d_ += c.d_;
    }
    s.components_ = std::move(components);
    return s;
  }
  static Symbol shifted(Symbol base, std::complex<double> z) {
    Symbol s;
    s.kind_ = Kind::Shifted;
    s.d_ = base.d_;
    s.base_ = std::make_shared<Symbol>(std::move(base));
    s.z_ = z;
    return s;
  }

  Kind kind() const { return kind_; }
  int dim() const { return d_; }
  bool is_real() const { return kind_ != Kind::Shifted || z_.imag() == 0.0; }
  const RadialProfile& profile() const {
    if (!profile_) throw InputError("Symbol: not a radial-profile symbol");
    return *profile_;
  }
  std::shared_ptr<const RadialProfile> profile_ptr() const { return profile_; }
  bool is_radial() const { return kind_ == Kind::Radial; }

  LogValue evaluate(const PhasePoint& w) const {
    check_point(w);
    switch (kind_) {
      case Kind::Radial:
        return profile_->eval_log(w.norm_sq());
      case Kind::Polynomial: {
        std::vector<LogValue> terms;
        for (const auto& [mi, c] : poly_) {
          if (c == 0.0) continue;
          int sign = c > 0 ? 1 : -1;
          double lg = std::log(std::abs(c));
          bool zero = false;
          for (std::size_t i = 0; i < mi.size(); ++i) {
            if (mi[i] == 0) continue;
            double wi = w.w[Eigen::Index(i)];
            if (wi == 0.0) {
              zero = true;
              break;
            }
            if (wi < 0.0 && mi[i] % 2 == 1) sign = -sign;
            lg += mi[i] * std::log(std::abs(wi));
          }
          if (zero) continue;
          terms.push_back(LogValue{sign, lg});
        }
        return log_sum(terms);
      }
      case Kind::SeparableSum: {
        std::vector<LogValue> terms;
        int off = 0;
        for (const auto& c : components_) {
          terms.push_back(c.evaluate(block_point(w, off, c.d_)));
          off += c.d_;
        }
        return log_sum(terms);
      }
      case Kind::Shifted: {
        if (z_.imag() != 0.0)
          throw InputError("Symbol::evaluate: complex-shifted symbol has no real log value");
        std::vector<LogValue> terms{base_->evaluate(w), LogValue::from(z_.real())};
        return log_sum(terms);
      }
      case Kind::Blended: {
        double r = w.norm();
        if (r >= r_out_) return base_->evaluate(w);  // identical evaluation path outside
        double chi = bump_cutoff((r - r_in_) / (r_out_ - r_in_));
        if (chi >= 1.0) return LogValue::from(1.0);
        return LogValue::from((1.0 - chi) * base_->value(w) + chi);
      }
    }
    return LogValue{};
  }

  double value(const PhasePoint& w) const { return evaluate(w).value(); }

  std::complex<double> value_complex(const PhasePoint& w) const {
    if (kind_ == Kind::Shifted) return base_->value(w) + z_;
    return value(w);
  }

  /// Full derivative jet at w up to order D. Plain partials, no i-factors;
  /// the D-convention lives in the calculus formulas.
  TaylorJet<double> jet(const PhasePoint& w, int D) const {
    check_point(w);
    if (D > kJetOrderCap)
      throw CapabilityError("Symbol::jet: order " + std::to_string(D) + " above cap " +
                            std::to_string(kJetOrderCap));
    auto basis = MultiIndexSet::get(2 * d_, D);
    switch (kind_) {
      case Kind::Radial: {
        TaylorJet<double> u = norm_sq_jet(basis, w);
        Jet1 g = profile_->jet(w.norm_sq(), D);
        return u.compose(g.coeffs());
      }
      case Kind::Polynomial: {
        TaylorJet<double> acc = TaylorJet<double>::constant(basis, 0.0);
        for (const auto& [mi, c] : poly_) {
          TaylorJet<double> term = TaylorJet<double>::constant(basis, c);
          for (std::size_t i = 0; i < mi.size(); ++i)
            for (int k = 0; k < mi[i]; ++k)
              term = term * TaylorJet<double>::variable(basis, int(i), w.w[Eigen::Index(i)]);
          acc = acc + term;
        }
        return acc;
      }
      case Kind::SeparableSum: {
        TaylorJet<double> acc = TaylorJet<double>::constant(basis, 0.0);
        int off = 0;
        for (const auto& c : components_) {
          TaylorJet<double> cj = c.jet(block_point(w, off, c.d_), D);
          std::vector<int> var_map;
          for (int i = 0; i < c.d_; ++i) var_map.push_back(off + i);
          for (int i = 0; i < c.d_; ++i) var_map.push_back(d_ + off + i);
          acc = acc + cj.embed(basis, var_map);
          off += c.d_;
        }
        return acc;
      }
      case Kind::Shifted: {
        if (z_.imag() != 0.0)
          throw InputError("Symbol::jet: complex shift; use jet_complex");
        return base_->jet(w, D) + z_.real();
      }
      case Kind::Blended: {
        double r = w.norm();
        if (r >= r_out_) return base_->jet(w, D);
        if (r <= r_in_ * (1.0 - 1e-14)) return TaylorJet<double>::constant(basis, 1.0);
        TaylorJet<double> aj = base_->jet(w, D);
        // chi as a function of u = r^2 through r = sqrt(u), composed with u(w)
        TaylorJet<double> u = norm_sq_jet(basis, w);
        Jet1 uj = Jet1::variable(basis1(D), 0, w.norm_sq());
        Jet1 sj = (jet_pow(uj, 0.5) - r_in_) * (1.0 / (r_out_ - r_in_));
        Jet1 chi1 = sj.compose(bump_cutoff_jet(sj.value(), D).coeffs());
        TaylorJet<double> chi = u.compose(chi1.coeffs());
        return (TaylorJet<double>::constant(basis, 1.0) - chi) * aj + chi;
      }
    }
    throw InputError("Symbol::jet: unknown kind");
  }

  TaylorJet<std::complex<double>> jet_complex(const PhasePoint& w, int D) const {
    if (kind_ == Kind::Shifted)
      return promote_complex(base_->jet(w, D)) + z_;
    return promote_complex(jet(w, D));
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::Radial:
        return "radial{" + profile_->describe() + ",d=" + std::to_string(d_) + "}";
      case Kind::Polynomial:
        return "polynomial{d=" + std::to_string(d_) + "}";
      case Kind::SeparableSum:
        return "separable_sum{" + std::to_string(components_.size()) + "}";
      case Kind::Shifted:
        return "shifted{" + base_->describe() + "}";
      case Kind::Blended:
        return "positivized{" + base_->describe() + "}";
    }
    return "";
  }

  const std::vector<Symbol>& components() const { return components_; }
  const std::map<MultiIndex, double>& poly_terms() const { return poly_; }
  std::complex<double> shift() const { return z_; }
  const Symbol& base() const { return *base_; }

  friend Symbol positivize(const Symbol& sym, double r_in, double r_out);

 private:
  void check_point(const PhasePoint& w) const {
    if (w.dim() != d_) throw InputError("Symbol: phase point dimension mismatch");
  }
  static PhasePoint block_point(const PhasePoint& w, int off, int cd) {
    Eigen::VectorXd v(2 * cd);
    v.head(cd) = w.w.segment(off, cd);
    v.tail(cd) = w.w.segment(w.dim() + off, cd);
    return PhasePoint(v);
  }
  TaylorJet<double> norm_sq_jet(std::shared_ptr<const MultiIndexSet> basis,
                                const PhasePoint& w) const {
    TaylorJet<double> acc = TaylorJet<double>::constant(basis, 0.0);
    for (int i = 0; i < 2 * d_; ++i) {
      auto v = TaylorJet<double>::variable(basis, i, w.w[i]);
      acc = acc + v * v;
    }
    return acc;
  }

  Kind kind_ = Kind::Radial;
  int d_ = 1;
  std::shared_ptr<const RadialProfile> profile_;
  std::map<MultiIndex, double> poly_;
  std::vector<Symbol> components_;
  std::shared_ptr<Symbol> base_;
  std::complex<double> z_{0.0, 0.0};
  double r_in_ = 0.0, r_out_ = 0.0;
};

/// b = (1 - chi)a + chi: 1 near the origin, a outside r_out, positive
/// everywhere provided a > 0 on {|w| >= r_in}.
inline Symbol positivize(const Symbol& sym, double r_in, double r_out) {
  if (!(0.0 < r_in && r_in < r_out)) throw InputError("positivize: need 0 < r_in < r_out");
  // scan for positivity of a on {|w| >= r_in} (finite probe range)
  const int n_r = 160, n_th = 32;
  const double r_max = std::max(4.0 * r_out, 8.0 * r_in);
  for (int i = 0; i <= n_r; ++i) {
    double r = r_in + (r_max - r_in) * i / n_r;
    for (int j = 0; j < n_th; ++j) {
      double th = 2.0 * M_PI * j / n_th;
      if (sym.dim() != 1) break;  // probe on the d = 1 circle; higher d uses axes below
      PhasePoint w = PhasePoint::xp(r * std::cos(th), r * std::sin(th));
      if (sym.evaluate(w).sign <= 0)
        throw InputError("positivize: symbol not positive at |w|=" + std::to_string(r));
    }
    if (sym.dim() > 1) {
      for (int ax = 0; ax < 2 * sym.dim(); ++ax) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * sym.dim());
        v[ax] = r;
        if (sym.evaluate(PhasePoint(v)).sign <= 0)
          throw InputError("positivize: symbol not positive at |w|=" + std::to_string(r));
      }
    }
  }
  Symbol s;
  s.kind_ = Symbol::Kind::Blended;
  s.d_ = sym.dim();
  s.base_ = std::make_shared<Symbol>(sym);
  s.r_in_ = r_in;
  s.r_out_ = r_out;
  return s;
}

struct HypoellipticityReport {
  double B = 0.0;
  double R_out = 0.0;
  int D = 0;
  double rho = 1.0;
  std::vector<double> per_order;         // sup |d^a a| <w>^{rho k} / (|a| A_k), k = 0..D
  std::vector<double> growth_exponent;   // slope of log ring-sup vs log <r>, per order
  double lower_c = 0.0;                  // condition (i) fit
  double lower_m = 0.0;
  bool lower_fit_interior = false;       // arg-min away from the outer ring
};

/// Grid scan of the hypoellipticity conditions on {B <= |w| <= R_out}.
inline HypoellipticityReport hypoellipticity_report(const Symbol& sym, double B, double R_out,
                                                    int grid_n, int D, double rho,
                                                    const WeightSequence& A) {
  if (!(0.0 <= B && B < R_out)) throw InputError("hypoellipticity_report: need 0 <= B < R_out");
  if (grid_n < 8) throw InputError("hypoellipticity_report: grid_n >= 8");
  if (sym.dim() != 1)
    throw CapabilityError("hypoellipticity_report: implemented for d = 1 scans");
  HypoellipticityReport rep;
  rep.B = B;
  rep.R_out = R_out;
  rep.D = D;
  rep.rho = rho;
  rep.per_order.assign(std::size_t(D) + 1, 0.0);
  rep.growth_exponent.assign(std::size_t(D) + 1, 0.0);

  auto basis = MultiIndexSet::get(2, D);
  const int n_th = std::max(8, grid_n / 2);
  std::vector<double> radii;
  for (int i = 0; i < grid_n; ++i)
    radii.push_back(std::max(B, 1e-3) + (R_out - std::max(B, 1e-3)) * i / (grid_n - 1));

  std::vector<std::vector<double>> ring_sup(radii.size(),
                                            std::vector<double>(std::size_t(D) + 1, 0.0));
  std::vector<double> min_logabs(radii.size(), std::numeric_limits<double>::infinity());

  int sign_seen = 0;
  for (std::size_t ir = 0; ir < radii.size(); ++ir) {
    for (int j = 0; j < n_th; ++j) {
      double th = 2.0 * M_PI * j / n_th;
      PhasePoint w = PhasePoint::xp(radii[ir] * std::cos(th), radii[ir] * std::sin(th));
      auto J = sym.jet(w, D);
      double value = J.value();
      double av = std::abs(value);
      int sgn = value > 0.0 ? 1 : (value < 0.0 ? -1 : 0);
      if (sgn == 0 || !std::isfinite(av) || (sign_seen != 0 && sgn != sign_seen))
        throw DegenerateInputError("hypoellipticity_report: symbol vanishes near (x,xi)=(" +
                                   std::to_string(w.x(0)) + "," + std::to_string(w.xi(0)) + ")");
      sign_seen = sgn;
      min_logabs[ir] = std::min(min_logabs[ir], std::log(av));
      double lb = std::log(w.bracket());
      for (int i = 0; i < basis->size(); ++i) {
        int k = basis->degree(i);
        if (k == 0) continue;
        double pd = std::abs(J.partial(basis->at(i)));
        if (pd == 0.0) continue;
        double ratio = std::exp(std::log(pd) + rho * k * lb - std::log(av) - A.log_value(k));
        ring_sup[ir][std::size_t(k)] = std::max(ring_sup[ir][std::size_t(k)], ratio);
      }
    }
  }
  rep.per_order[0] = 1.0;
  for (int k = 1; k <= D; ++k) {
    double sup = 0.0;
    for (std::size_t ir = 0; ir < radii.size(); ++ir) sup = std::max(sup, ring_sup[ir][std::size_t(k)]);
    rep.per_order[std::size_t(k)] = sup;
    // envelope slope between the second and fourth radius quartile; windowed
    // sups are robust against oscillatory ratios on individual rings
    auto window_sup = [&](std::size_t lo, std::size_t hi) {
      double s = 0.0;
      for (std::size_t ir = lo; ir < hi; ++ir) s = std::max(s, ring_sup[ir][std::size_t(k)]);
      return s;
    };
    std::size_t nq = radii.size() / 4;
    double s2 = window_sup(nq, 2 * nq), s4 = window_sup(3 * nq, radii.size());
    double r2c = radii[nq + nq / 2], r4c = radii[3 * nq + nq / 2];
    if (s2 > 0.0 && s4 > 0.0 && r4c > r2c)
      rep.growth_exponent[std::size_t(k)] =
          std::log(s4 / s2) / std::log(std::sqrt(1.0 + r4c * r4c) / std::sqrt(1.0 + r2c * r2c));
  }

  // condition (i): smallest m (coarse grid) whose minimizing radius is interior
  const double m_grid[] = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  for (double m : m_grid) {
    double c = std::numeric_limits<double>::infinity();
    std::size_t argmin = 0;
    for (std::size_t ir = 0; ir < radii.size(); ++ir) {
      // on the d=1 circle |x| <= r, |xi| <= r; use the worst case M(mr) twice
      double bound = min_logabs[ir] + 2.0 * associated_function(A, std::max(m * radii[ir], 1e-12));
      if (bound < c) {
        c = bound;
        argmin = ir;
      }
    }
    rep.lower_c = std::exp(c);
    rep.lower_m = m;
    rep.lower_fit_interior = argmin + 1 < radii.size();
    if (rep.lower_fit_interior) break;
  }
  return rep;
}

}  // namespace weylab

#endif  // WEYLAB_SYMBOLS_HPP
