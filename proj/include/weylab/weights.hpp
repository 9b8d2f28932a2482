#ifndef WEYLAB_WEIGHTS_HPP
#define WEYLAB_WEIGHTS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "weylab/errors.hpp"

namespace weylab {

/// Weight sequences M_p with M_0 = 1: Gevrey p!^s, power sequences p^{sp}
/// (0^0 := 1), or a custom table. All arithmetic stays in the log domain;
/// M_p overflows doubles near p ~ 170 already for s = 1.
class WeightSequence {
 public:
  enum class Kind { Gevrey, PowerSequence, Custom };

  static WeightSequence gevrey(double s) {
    if (!(s > 0.0)) throw InputError("WeightSequence::gevrey: s must be > 0");
    WeightSequence w;
    w.kind_ = Kind::Gevrey;
    w.s_ = s;
    return w;
  }

  static WeightSequence power_sequence(double s) {
    WeightSequence w;
    w.kind_ = Kind::PowerSequence;
    w.s_ = s;
    return w;
  }

  static WeightSequence custom(std::vector<double> values) {
    if (values.empty() || values[0] != 1.0)
      throw InputError("WeightSequence::custom: sequence must start with M_0 = 1");
    for (double v : values)
      if (!(v > 0.0) || !std::isfinite(v))
        throw InputError("WeightSequence::custom: values must be positive and finite");
    WeightSequence w;
    w.kind_ = Kind::Custom;
    w.custom_ = std::move(values);
    return w;
  }

  Kind kind() const { return kind_; }
  double parameter() const { return s_; }

  int max_index() const {
    return kind_ == Kind::Custom ? int(custom_.size()) - 1 : 1 << 26;
  }

  double log_value(int p) const {
    if (p < 0) throw InputError("WeightSequence: negative index");
    switch (kind_) {
      case Kind::Gevrey:
        return s_ * std::lgamma(double(p) + 1.0);
      case Kind::PowerSequence:
        return p <= 1 ? 0.0 : s_ * double(p) * std::log(double(p));
      case Kind::Custom:
        if (p >= int(custom_.size()))
          throw InputError("WeightSequence: custom list shorter than requested index " +
                           std::to_string(p));
        return std::log(custom_[std::size_t(p)]);
    }
    return 0.0;
  }

  double value(int p) const {
    double lv = log_value(p);
    if (lv > 709.0) throw InputError("WeightSequence::value: overflow in linear domain at p = " +
                                     std::to_string(p) + ", use log_value");
    switch (kind_) {
      case Kind::Gevrey: {
        if (p <= 170) {  // exact factorial, exact for integer powers
          double fact = 1.0;
          for (int k = 2; k <= p; ++k) fact *= k;
          return std::pow(fact, s_);
        }
        break;
      }
      case Kind::PowerSequence:
        return p <= 1 ? 1.0 : std::pow(double(p), s_ * p);
      case Kind::Custom:
        return custom_[std::size_t(p)];
    }
    return std::exp(lv);
  }

  /// log of m_p = M_p / M_{p-1}, p >= 1.
  double log_ratio(int p) const { return log_value(p) - log_value(p - 1); }

  /// m_p with the paper's convention m_0 = 0 (so exclusion radius 0 at j = 0).
  double exclusion_ratio(int p) const { return p == 0 ? 0.0 : std::exp(log_ratio(p)); }

  std::string describe() const {
    switch (kind_) {
      case Kind::Gevrey:
        return "gevrey(" + std::to_string(s_) + ")";
      case Kind::PowerSequence:
        return "power_sequence(" + std::to_string(s_) + ")";
      case Kind::Custom:
        return "custom[" + std::to_string(custom_.size()) + "]";
    }
    return "";
  }

 private:
  Kind kind_ = Kind::Gevrey;
  double s_ = 1.0;
  std::vector<double> custom_;
};

/// M_0..M_P in the linear domain.
inline std::vector<double> weight_values(const WeightSequence& seq, int P) {
  if (P < 0) throw InputError("weight_values: P must be >= 0");
  std::vector<double> out(std::size_t(P) + 1);
  for (int p = 0; p <= P; ++p) out[std::size_t(p)] = seq.value(p);
  return out;
}

/// Associated function M(rho) = sup_p ln_+ rho^p / M_p. The scan extends past
/// P_max until the supremand has decreased for 8 consecutive indices (the
/// supremand is eventually unimodal for log-convex sequences).
inline double associated_function(const WeightSequence& seq, double rho, int P_max = 256) {
  if (!(rho > 0.0)) throw InputError("associated_function: rho must be > 0");
  const double lr = std::log(rho);
  double best = 0.0;
  double prev = -1e300;
  int decreasing = 0;
  int p = 0;
  const int hard_cap = std::min(seq.max_index(), 1 << 24);
  while (true) {
    double v = double(p) * lr - seq.log_value(p);
    best = std::max(best, v);
    if (v < prev)
      ++decreasing;
    else
      decreasing = 0;
    prev = v;
    ++p;
    if (p > P_max && decreasing >= 8) break;
    if (p > hard_cap) break;  // custom table exhausted: sup over available range
  }
  return std::max(0.0, best);
}

struct ConditionReport {
  bool m1 = false;                 // log convexity
  bool m2 = false;                 // stability under products
  double m2_c0 = 1.0;
  double m2_H = 1.0;
  bool m3prime = false;            // sum M_{p-1}/M_p convergence (indicated, not proved)
  double m3prime_partial_sum = 0.0;
  bool m4 = false;                 // quoted factorial-normalized convexity
  int checked_up_to = 0;
};

/// Finite scan of the structural conditions up to index P. The (M.3)'
/// verdict uses a Raabe-type index on the tail of m_p (a plain ratio
/// threshold cannot separate sum p^{-1/2} from sum p^{-2} at P ~ 50).
inline ConditionReport condition_report(const WeightSequence& seq, int P) {
  if (P < 3) throw InputError("condition_report: P must be >= 3");
  ConditionReport rep;
  rep.checked_up_to = P;
  std::vector<double> lm(std::size_t(P) + 2);
  for (int p = 0; p <= P + 1; ++p) lm[std::size_t(p)] = seq.log_value(p);
  const double eps = 1e-12;

  // (M.1): M_p^2 <= M_{p-1} M_{p+1}
  rep.m1 = true;
  for (int p = 1; p < P; ++p)
    if (2.0 * lm[std::size_t(p)] > lm[std::size_t(p - 1)] + lm[std::size_t(p + 1)] + eps) {
      rep.m1 = false;
      break;
    }

  // (M.2): search H on a coarse grid, then the minimal c0 >= 1 by direct
  // maximization of M_{p+q} / (H^{p+q} M_p M_q). The pair is reported
  // feasible when the maximizer is interior (the constant has stopped
  // growing at the scan boundary); existence is what the theory needs.
  {
    const double H_grid[] = {1.0, 1.25, 1.5, 2.0, 4.0};
    for (double H : H_grid) {
      double best = 0.0;
      int best_pq = 0;
      for (int p = 0; p <= P; ++p)
        for (int q = 0; p + q <= P; ++q) {
          double v = lm[std::size_t(p + q)] - (p + q) * std::log(H) - lm[std::size_t(p)] -
                     lm[std::size_t(q)];
          if (v > best) {
            best = v;
            best_pq = p + q;
          }
        }
      if (best_pq < P) {  // interior maximizer: (c0, H) accepted
        rep.m2 = true;
        rep.m2_H = H;
        rep.m2_c0 = std::max(1.0, std::exp(best));
        break;
      }
      rep.m2_H = H;
      rep.m2_c0 = std::exp(best);
    }
  }

  // (M.3)': partial sum of M_{p-1}/M_p plus a tail verdict.
  {
    double sum = 0.0;
    for (int p = 1; p <= P; ++p) sum += std::exp(-(lm[std::size_t(p)] - lm[std::size_t(p - 1)]));
    rep.m3prime_partial_sum = sum;
    // terms a_p = 1/m_p; geometric tail or Raabe index p*(a_p/a_{p+1} - 1) > 1
    double max_ratio = 0.0;
    double min_raabe = 1e300;
    for (int p = std::max(2, (3 * P) / 4); p < P; ++p) {
      double ratio = std::exp(-(lm[std::size_t(p + 1)] - lm[std::size_t(p)]) +
                              (lm[std::size_t(p)] - lm[std::size_t(p - 1)]));
      max_ratio = std::max(max_ratio, ratio);  // a_{p+1}/a_p
      double raabe = double(p) * (1.0 / ratio - 1.0);
      min_raabe = std::min(min_raabe, raabe);
    }
    rep.m3prime = (max_ratio <= 0.95) || (min_raabe >= 1.05);
  }

  // (M.4): M_p^2/p!^2 <= (M_{p-1}/(p-1)!)(M_{p+1}/(p+1)!)
  rep.m4 = true;
  for (int p = 1; p < P; ++p) {
    double lhs = 2.0 * (lm[std::size_t(p)] - std::lgamma(double(p) + 1.0));
    double rhs = (lm[std::size_t(p - 1)] - std::lgamma(double(p))) +
                 (lm[std::size_t(p + 1)] - std::lgamma(double(p) + 2.0));
    if (lhs > rhs + eps) {
      rep.m4 = false;
      break;
    }
  }
  return rep;
}

}  // namespace weylab

#endif  // WEYLAB_WEIGHTS_HPP
