#ifndef WEYLAB_MULTIINDEX_HPP
#define WEYLAB_MULTIINDEX_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "weylab/errors.hpp"

namespace weylab {

using MultiIndex = std::vector<int>;

inline int mi_degree(const MultiIndex& a) {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

inline double mi_log_factorial(const MultiIndex& a) {
  double s = 0.0;
  for (int v : a) s += std::lgamma(double(v) + 1.0);
  return s;
}

inline double mi_factorial(const MultiIndex& a) { return std::exp(mi_log_factorial(a)); }

inline MultiIndex mi_add(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

/// All multi-indices in `nvars` variables with |alpha| <= max_degree, graded
/// lexicographic order. Shared between jets so coefficient vectors line up.
class MultiIndexSet {
 public:
  MultiIndexSet(int nvars, int max_degree) : nvars_(nvars), max_degree_(max_degree) {
    if (nvars < 1) throw InputError("MultiIndexSet: nvars must be >= 1");
    if (max_degree < 0) throw InputError("MultiIndexSet: max_degree must be >= 0");
    MultiIndex cur(nvars, 0);
    for (int deg = 0; deg <= max_degree; ++deg) emit_degree(cur, 0, deg);
    log_fact_.resize(list_.size());
    for (std::size_t i = 0; i < list_.size(); ++i) log_fact_[i] = mi_log_factorial(list_[i]);
    build_sum_table();
  }

  int nvars() const { return nvars_; }
  int max_degree() const { return max_degree_; }
  int size() const { return int(list_.size()); }
  const MultiIndex& at(int i) const { return list_[std::size_t(i)]; }
  int degree(int i) const { return mi_degree(list_[std::size_t(i)]); }
  double log_factorial(int i) const { return log_fact_[std::size_t(i)]; }

  /// Index of a multi-index, or -1 when |alpha| exceeds max_degree.
  int index_of(const MultiIndex& a) const {
    if (int(a.size()) != nvars_) throw InputError("MultiIndexSet: wrong arity");
    if (mi_degree(a) > max_degree_) return -1;
    auto it = rank_.find(a);
    return it == rank_.end() ? -1 : it->second;
  }

  /// Index of at(i) + at(j), or -1 on degree overflow.
  int sum_index(int i, int j) const { return sum_table_[std::size_t(i) * list_.size() + j]; }

  static std::shared_ptr<const MultiIndexSet> get(int nvars, int max_degree);

 private:
  void emit_degree(MultiIndex& cur, int pos, int remaining) {
    if (pos == nvars_ - 1) {
      cur[pos] = remaining;
      rank_[cur] = int(list_.size());
      list_.push_back(cur);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      cur[pos] = v;
      emit_degree(cur, pos + 1, remaining - v);
    }
    cur[pos] = 0;
  }

  void build_sum_table() {
    const std::size_t n = list_.size();
    sum_table_.assign(n * n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (mi_degree(list_[i]) + mi_degree(list_[j]) > max_degree_) continue;
        sum_table_[i * n + j] = index_of(mi_add(list_[i], list_[j]));
      }
    }
  }

  int nvars_;
  int max_degree_;
  std::vector<MultiIndex> list_;
  std::map<MultiIndex, int> rank_;
  std::vector<double> log_fact_;
  std::vector<int> sum_table_;
};

inline std::shared_ptr<const MultiIndexSet> MultiIndexSet::get(int nvars, int max_degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MultiIndexSet>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nvars, max_degree);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto set = std::make_shared<const MultiIndexSet>(nvars, max_degree);
  cache[key] = set;
  return set;
}

/// Compositions of k into j parts, each part >= 1.
inline std::vector<std::vector<int>> compositions(int k, int j) {
  std::vector<std::vector<int>> out;
  if (j == 0) {
    if (k == 0) out.push_back({});
    return out;
  }
  std::vector<int> cur(std::size_t(j), 1);
  // recursive enumeration, small j only
  struct Rec {
    int j;
    std::vector<std::vector<int>>& out;
    std::vector<int>& cur;
    void go(int pos, int remaining) {
      if (pos == j - 1) {
        if (remaining >= 1) {
          cur[std::size_t(pos)] = remaining;
          out.push_back(cur);
        }
        return;
      }
      for (int v = 1; v <= remaining - (j - 1 - pos); ++v) {
        cur[std::size_t(pos)] = v;
        go(pos + 1, remaining - v);
      }
    }
  } rec{j, out, cur};
  rec.go(0, k);
  return out;
}

}  // namespace weylab

#endif  // WEYLAB_MULTIINDEX_HPP
