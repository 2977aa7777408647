#include "subnorm/setfn.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "subnorm/errors.hpp"

namespace subnorm {

namespace {

std::vector<int> checked_sorted(std::span<const int> a, int p, const char* who) {
  std::vector<int> s(a.begin(), a.end());
  std::sort(s.begin(), s.end());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] >= p)
      throw ArgumentError(std::string(who) + ": index " + std::to_string(s[i]) +
                          " outside ground set of size " + std::to_string(p));
    if (i > 0 && s[i] == s[i - 1])
      throw ArgumentError(std::string(who) + ": duplicate index " + std::to_string(s[i]));
  }
  return s;
}

// Fallback chain: keeps the sorted prefix and re-evaluates.
class GenericChain final : public ChainEvaluator {
 public:
  explicit GenericChain(const SetFunction& f) : f_(f) {}
  void reset() override { prefix_.clear(); }
  double extend(int j) override {
    prefix_.insert(std::upper_bound(prefix_.begin(), prefix_.end(), j), j);
    return eval_unchecked(f_, prefix_);
  }

 private:
  const SetFunction& f_;
  std::vector<int> prefix_;
};

}  // namespace

double SetFunction::operator()(std::span<const int> a) const {
  auto s = checked_sorted(a, p_, "SetFunction");
  return eval_sorted(s);
}

double eval_unchecked(const SetFunction& f, std::span<const int> a) {
  return f.eval_sorted(a);
}

std::unique_ptr<ChainEvaluator> SetFunction::chain() const {
  return std::make_unique<GenericChain>(*this);
}

// ---------------------------------------------------------------------------
// cardinality-type families

namespace {

class ConcaveCardinalityFn final : public SetFunction {
 public:
  ConcaveCardinalityFn(int p, Vector h, std::string label)
      : SetFunction(p), h_(std::move(h)), label_(std::move(label)) {}

  std::string describe() const override { return label_; }

  std::unique_ptr<ChainEvaluator> chain() const override {
    class Chain final : public ChainEvaluator {
     public:
      explicit Chain(const Vector& h) : h_(h) {}
      void reset() override { count_ = 0; }
      double extend(int) override { return h_[++count_]; }

     private:
      const Vector& h_;
      size_t count_ = 0;
    };
    return std::make_unique<Chain>(h_);
  }

 protected:
  double eval_sorted(std::span<const int> a) const override { return h_[a.size()]; }

 private:
  Vector h_;
  std::string label_;
};

class WeightedCardinalityFn final : public SetFunction {
 public:
  explicit WeightedCardinalityFn(Vector w)
      : SetFunction(static_cast<int>(w.size())), w_(std::move(w)) {}

  std::string describe() const override { return "weighted_cardinality"; }

  std::unique_ptr<ChainEvaluator> chain() const override {
    class Chain final : public ChainEvaluator {
     public:
      explicit Chain(const Vector& w) : w_(w) {}
      void reset() override { sum_ = 0.0; }
      double extend(int j) override { return sum_ += w_[j]; }

     private:
      const Vector& w_;
      double sum_ = 0.0;
    };
    return std::make_unique<Chain>(w_);
  }

 protected:
  double eval_sorted(std::span<const int> a) const override {
    double s = 0.0;
    for (int j : a) s += w_[j];
    return s;
  }

 private:
  Vector w_;
};

class GroupCoverFn final : public SetFunction {
 public:
  GroupCoverFn(int p, std::vector<std::vector<int>> groups, Vector d)
      : SetFunction(p), groups_(std::move(groups)), d_(std::move(d)), member_of_(p) {
    for (size_t g = 0; g < groups_.size(); ++g)
      for (int j : groups_[g]) member_of_[j].push_back(static_cast<int>(g));
  }

  std::string describe() const override { return "group_cover"; }

  std::unique_ptr<ChainEvaluator> chain() const override {
    class Chain final : public ChainEvaluator {
     public:
      explicit Chain(const GroupCoverFn& f) : f_(f), hit_(f.groups_.size(), 0) {}
      void reset() override {
        std::fill(hit_.begin(), hit_.end(), 0);
        value_ = 0.0;
      }
      double extend(int j) override {
        for (int g : f_.member_of_[j])
          if (hit_[g]++ == 0) value_ += f_.d_[g];
        return value_;
      }

     private:
      const GroupCoverFn& f_;
      std::vector<int> hit_;
      double value_ = 0.0;
    };
    return std::make_unique<Chain>(*this);
  }

 protected:
  double eval_sorted(std::span<const int> a) const override {
    double s = 0.0;
    std::vector<char> hit(groups_.size(), 0);
    for (int j : a)
      for (int g : member_of_[j])
        if (!hit[g]) {
          hit[g] = 1;
          s += d_[g];
        }
    return s;
  }

 private:
  std::vector<std::vector<int>> groups_;
  Vector d_;
  std::vector<std::vector<int>> member_of_;
};

class RangePlusConstantFn final : public SetFunction {
 public:
  explicit RangePlusConstantFn(int p) : SetFunction(p) {}
  std::string describe() const override { return "range_plus_constant"; }

  std::unique_ptr<ChainEvaluator> chain() const override {
    class Chain final : public ChainEvaluator {
     public:
      explicit Chain(int p) : p_(p) {}
      void reset() override { lo_ = -1; }
      double extend(int j) override {
        if (lo_ < 0) {
          lo_ = hi_ = j;
        } else {
          lo_ = std::min(lo_, j);
          hi_ = std::max(hi_, j);
        }
        return static_cast<double>(p_ - 2 + hi_ - lo_ + 1);
      }

     private:
      int p_, lo_ = -1, hi_ = -1;
    };
    return std::make_unique<Chain>(ground_size());
  }

 protected:
  double eval_sorted(std::span<const int> a) const override {
    if (a.empty()) return 0.0;
    return static_cast<double>(ground_size() - 2 + a.back() - a.front() + 1);
  }
};

class IntervalCountFn final : public SetFunction {
 public:
  explicit IntervalCountFn(int p) : SetFunction(p) {}
  std::string describe() const override { return "interval_count"; }

  std::unique_ptr<ChainEvaluator> chain() const override {
    class Chain final : public ChainEvaluator {
     public:
      explicit Chain(int p) : occupied_(p, 0) {}
      void reset() override {
        std::fill(occupied_.begin(), occupied_.end(), 0);
        count_ = intervals_ = 0;
      }
      double extend(int j) override {
        const int p = static_cast<int>(occupied_.size());
        const int left = (j > 0 && occupied_[j - 1]) ? 1 : 0;
        const int right = (j + 1 < p && occupied_[j + 1]) ? 1 : 0;
        intervals_ += 1 - left - right;
        occupied_[j] = 1;
        ++count_;
        return static_cast<double>(count_ + intervals_);
      }

     private:
      std::vector<char> occupied_;
      int count_ = 0, intervals_ = 0;
    };
    return std::make_unique<Chain>(ground_size());
  }

 protected:
  double eval_sorted(std::span<const int> a) const override {
    if (a.empty()) return 0.0;
    int intervals = 1;
    for (size_t i = 1; i < a.size(); ++i)
      if (a[i] != a[i - 1] + 1) ++intervals;
    return static_cast<double>(a.size() + intervals);
  }
};

// ---------------------------------------------------------------------------
// spectral functions of submatrices

struct SubsetKey {
  std::vector<uint64_t> words;
  bool operator==(const SubsetKey& o) const { return words == o.words; }
};

struct SubsetKeyHash {
  size_t operator()(const SubsetKey& k) const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (uint64_t w : k.words) {
      h ^= w;
      h *= 0x100000001b3ULL;
    }
    return static_cast<size_t>(h);
  }
};

class SpectralFn final : public SetFunction {
 public:
  SpectralFn(Matrix q, std::optional<Matrix> x, SpectralH h)
      : SetFunction(q.rows()), q_(std::move(q)), x_(std::move(x)), h_(h) {
    for (int i = 0; i < q_.rows(); ++i) diag_scale_ = std::max(diag_scale_, q_(i, i));
  }

  std::string describe() const override {
    return h_.kind == SpectralH::kPower ? "spectral(power)" : "spectral(log_shift)";
  }

  std::unique_ptr<ChainEvaluator> chain() const override;

  double value_from_eigs(Vector eigs, int set_size) const {
    enforce_nonnegative(eigs, diag_scale_);
    // snap numerically-zero eigenvalues: h may have infinite slope at 0
    // (power kind), which would amplify solver noise on rank-deficient blocks
    const double snap = 1e-12 * std::max(diag_scale_, 1e-300);
    double s = 0.0;
    for (double lam : eigs) s += h_(lam < snap ? 0.0 : lam);
    // eigenvalues beyond the small side of the Gram pair are structural zeros
    const int extra = set_size - static_cast<int>(eigs.size());
    if (extra > 0) s += extra * h_(0.0);
    return s;
  }

  double cached_or_compute(const SubsetKey& key, const std::function<double()>& compute) const {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    const double v = compute();
    std::lock_guard<std::mutex> lock(mutex_);
    if (cache_.size() > kCacheCap) cache_.clear();
    cache_.emplace(key, v);
    return v;
  }

  const Matrix& q() const { return q_; }
  const std::optional<Matrix>& x() const { return x_; }
  bool use_sample_side(size_t set_size) const {
    return x_ && x_->rows() < static_cast<int>(set_size);
  }

 protected:
  double eval_sorted(std::span<const int> a) const override {
    if (a.empty()) return 0.0;
    SubsetKey key;
    key.words.assign((ground_size() + 63) / 64, 0);
    for (int j : a) key.words[j >> 6] |= (1ULL << (j & 63));
    return cached_or_compute(key, [&] {
      if (use_sample_side(a.size())) {
        const Matrix& x = *x_;
        const int n = x.rows();
        Matrix m(n, n);
        for (int j : a)
          for (int r = 0; r < n; ++r) {
            const double xr = x(r, j);
            if (xr == 0.0) continue;
            for (int c = r; c < n; ++c) m(r, c) += xr * x(c, j);
          }
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < r; ++c) m(r, c) = m(c, r);
        return value_from_eigs(sym_eigvalues(m), static_cast<int>(a.size()));
      }
      Matrix sub = submatrix(q_, a, a);
      return value_from_eigs(sym_eigvalues(sub), static_cast<int>(a.size()));
    });
  }

 private:
  static constexpr size_t kCacheCap = 1u << 21;
  Matrix q_;
  std::optional<Matrix> x_;
  SpectralH h_;
  double diag_scale_ = 0.0;
  mutable std::mutex mutex_;
  mutable std::unordered_map<SubsetKey, double, SubsetKeyHash> cache_;
};

class SpectralChain final : public ChainEvaluator {
 public:
  explicit SpectralChain(const SpectralFn& f) : f_(f) {
    const int p = f_.ground_size();
    key_.words.assign((p + 63) / 64, 0);
    track_sample_side_ = f_.x() && f_.x()->rows() < p;
    if (track_sample_side_) {
      const int n = f_.x()->rows();
      m_ = Matrix(n, n);
    }
    gram_.reserve(64);
  }

  void reset() override {
    idx_.clear();
    std::fill(key_.words.begin(), key_.words.end(), 0);
    gram_.clear();
    if (track_sample_side_) m_ = Matrix(m_.rows(), m_.cols());
  }

  double extend(int j) override {
    // grow the subset-side Gram row (Q lookups)
    const size_t k = idx_.size();
    gram_.emplace_back(k + 1);
    for (size_t i = 0; i < k; ++i) gram_[k][i] = f_.q()(idx_[i], j);
    gram_[k][k] = f_.q()(j, j);
    idx_.push_back(j);
    if (track_sample_side_) {
      const Matrix& x = *f_.x();
      const int n = x.rows();
      for (int r = 0; r < n; ++r) {
        const double xr = x(r, j);
        if (xr == 0.0) continue;
        for (int c = 0; c < n; ++c) m_(r, c) += xr * x(c, j);
      }
    }
    key_.words[j >> 6] |= (1ULL << (j & 63));
    return f_.cached_or_compute(key_, [&] { return compute(); });
  }

 private:
  double compute() const {
    const size_t k = idx_.size();
    if (f_.use_sample_side(k)) {
      return f_.value_from_eigs(sym_eigvalues(m_), static_cast<int>(k));
    }
    Matrix sub(static_cast<int>(k), static_cast<int>(k));
    for (size_t i = 0; i < k; ++i)
      for (size_t l = 0; l <= i; ++l) {
        sub(static_cast<int>(i), static_cast<int>(l)) = gram_[i][l];
        sub(static_cast<int>(l), static_cast<int>(i)) = gram_[i][l];
      }
    return f_.value_from_eigs(sym_eigvalues(sub), static_cast<int>(k));
  }

  const SpectralFn& f_;
  std::vector<int> idx_;
  std::vector<std::vector<double>> gram_;  // lower-triangular rows of Q_AA
  Matrix m_;                               // X_A X_A^T accumulator
  bool track_sample_side_ = false;
  SubsetKey key_;
};

std::unique_ptr<ChainEvaluator> SpectralFn::chain() const {
  return std::make_unique<SpectralChain>(*this);
}

// ---------------------------------------------------------------------------
// combinators

class SumFn final : public SetFunction {
 public:
  SumFn(int p, std::vector<SetFunctionPtr> terms, Vector coeffs)
      : SetFunction(p), terms_(std::move(terms)), coeffs_(std::move(coeffs)) {}

  std::string describe() const override { return "sum"; }

  std::unique_ptr<ChainEvaluator> chain() const override {
    class Chain final : public ChainEvaluator {
     public:
      Chain(const SumFn& f) : f_(f) {
        for (const auto& t : f.terms_) chains_.push_back(t->chain());
      }
      void reset() override {
        for (auto& c : chains_) c->reset();
      }
      double extend(int j) override {
        double s = 0.0;
        for (size_t i = 0; i < chains_.size(); ++i) s += f_.coeffs_[i] * chains_[i]->extend(j);
        return s;
      }

     private:
      const SumFn& f_;
      std::vector<std::unique_ptr<ChainEvaluator>> chains_;
    };
    return std::make_unique<Chain>(*this);
  }

 protected:
  double eval_sorted(std::span<const int> a) const override {
    double s = 0.0;
    for (size_t i = 0; i < terms_.size(); ++i) s += coeffs_[i] * eval_unchecked(*terms_[i], a);
    return s;
  }

 private:
  std::vector<SetFunctionPtr> terms_;
  Vector coeffs_;
};

class CustomFn final : public SetFunction {
 public:
  CustomFn(int p, std::function<double(std::span<const int>)> fn, std::string label)
      : SetFunction(p), fn_(std::move(fn)), label_(std::move(label)) {}
  std::string describe() const override { return label_; }

 protected:
  double eval_sorted(std::span<const int> a) const override { return fn_(a); }

 private:
  std::function<double(std::span<const int>)> fn_;
  std::string label_;
};

class ModularShiftFn final : public SetFunction {
 public:
  ModularShiftFn(SetFunctionPtr base, double scale, Vector shift)
      : SetFunction(base->ground_size()),
        base_(std::move(base)),
        scale_(scale),
        shift_(std::move(shift)) {}

  std::string describe() const override { return "shifted(" + base_->describe() + ")"; }

  std::unique_ptr<ChainEvaluator> chain() const override {
    class Chain final : public ChainEvaluator {
     public:
      explicit Chain(const ModularShiftFn& f) : f_(f), inner_(f.base_->chain()) {}
      void reset() override {
        inner_->reset();
        acc_ = 0.0;
      }
      double extend(int j) override {
        const double base = inner_->extend(j);
        acc_ += f_.shift_[j];
        return f_.scale_ * base - acc_;
      }

     private:
      const ModularShiftFn& f_;
      std::unique_ptr<ChainEvaluator> inner_;
      double acc_ = 0.0;
    };
    return std::make_unique<Chain>(*this);
  }

 protected:
  double eval_sorted(std::span<const int> a) const override {
    double acc = 0.0;
    for (int j : a) acc += shift_[j];
    return scale_ * eval_unchecked(*base_, a) - acc;
  }

 private:
  SetFunctionPtr base_;
  double scale_;
  Vector shift_;
};

class ReindexedFn final : public SetFunction {
 public:
  // F'(A) = F(map(A) u fixed) - offset on a ground set of map.size()
  ReindexedFn(SetFunctionPtr base, std::vector<int> map, std::vector<int> fixed, double offset,
              std::string label)
      : SetFunction(static_cast<int>(map.size())),
        base_(std::move(base)),
        map_(std::move(map)),
        fixed_(std::move(fixed)),
        offset_(offset),
        label_(std::move(label)) {}

  std::string describe() const override { return label_ + "(" + base_->describe() + ")"; }

 protected:
  double eval_sorted(std::span<const int> a) const override {
    if (a.empty()) return 0.0;
    std::vector<int> global;
    global.reserve(a.size() + fixed_.size());
    for (int j : a) global.push_back(map_[j]);
    global.insert(global.end(), fixed_.begin(), fixed_.end());
    std::sort(global.begin(), global.end());
    return eval_unchecked(*base_, global) - offset_;
  }

 private:
  SetFunctionPtr base_;
  std::vector<int> map_;
  std::vector<int> fixed_;
  double offset_;
  std::string label_;
};

void check_singletons(const SetFunction& f, const char* who) {
  for (int k = 0; k < f.ground_size(); ++k) {
    const int idx[1] = {k};
    if (!(eval_unchecked(f, idx) > 0.0))
      throw ArgumentError(std::string(who) + ": F({" + std::to_string(k + 1) +
                          "}) must be strictly positive");
  }
}

}  // namespace

double SpectralH::operator()(double lambda) const {
  if (kind == kPower) return lambda <= 0.0 ? 0.0 : std::pow(lambda, param);
  return std::log(lambda + param);
}

SetFunctionPtr cardinality(int p) {
  if (p < 1) throw ArgumentError("cardinality: p must be >= 1");
  Vector h(p + 1);
  for (int k = 0; k <= p; ++k) h[k] = static_cast<double>(k);
  return std::make_shared<ConcaveCardinalityFn>(p, std::move(h), "cardinality");
}

SetFunctionPtr weighted_cardinality(Vector weights) {
  if (weights.empty()) throw ArgumentError("weighted_cardinality: empty weights");
  for (double w : weights)
    if (!(w > 0.0)) throw ArgumentError("weighted_cardinality: weights must be positive");
  return std::make_shared<WeightedCardinalityFn>(std::move(weights));
}

SetFunctionPtr concave_cardinality(Vector h) {
  if (h.size() < 2) throw ArgumentError("concave_cardinality: need h(0..p), p >= 1");
  const int p = static_cast<int>(h.size()) - 1;
  if (h[0] != 0.0) throw ArgumentError("concave_cardinality: h(0) must be 0");
  for (int k = 1; k <= p; ++k)
    if (h[k] < h[k - 1] - 1e-15)
      throw ArgumentError("concave_cardinality: h must be nondecreasing");
  for (int k = 1; k < p; ++k)
    if (h[k + 1] - h[k] > h[k] - h[k - 1] + 1e-12 * (1.0 + std::fabs(h[k])))
      throw ArgumentError("concave_cardinality: h must be concave");
  if (!(h[1] > 0.0)) throw ArgumentError("concave_cardinality: h(1) must be positive");
  return std::make_shared<ConcaveCardinalityFn>(p, std::move(h), "concave_cardinality");
}

SetFunctionPtr group_cover(int p, std::vector<std::vector<int>> groups, Vector weights) {
  if (p < 1) throw ArgumentError("group_cover: p must be >= 1");
  if (groups.size() != weights.size())
    throw ArgumentError("group_cover: one weight per group required");
  for (auto& g : groups) {
    if (g.empty()) throw ArgumentError("group_cover: empty group");
    std::sort(g.begin(), g.end());
    for (size_t i = 0; i < g.size(); ++i) {
      if (g[i] < 0 || g[i] >= p) throw ArgumentError("group_cover: group index out of range");
      if (i > 0 && g[i] == g[i - 1]) throw ArgumentError("group_cover: duplicate index in group");
    }
  }
  for (double d : weights)
    if (d < 0.0) throw ArgumentError("group_cover: weights must be nonnegative");
  auto fn = std::make_shared<GroupCoverFn>(p, std::move(groups), std::move(weights));
  check_singletons(*fn, "group_cover");
  return fn;
}

SetFunctionPtr range_plus_constant(int p) {
  if (p < 2) throw ArgumentError("range_plus_constant: p must be >= 2");
  return std::make_shared<RangePlusConstantFn>(p);
}

SetFunctionPtr interval_count(int p) {
  if (p < 1) throw ArgumentError("interval_count: p must be >= 1");
  return std::make_shared<IntervalCountFn>(p);
}

namespace {
SetFunctionPtr make_spectral(Matrix q, std::optional<Matrix> x, SpectralH h) {
  if (q.rows() != q.cols()) throw ArgumentError("spectral: Q must be square");
  if (q.asymmetry() > 1e-12) throw ArgumentError("spectral: Q asymmetry above 1e-12");
  if (h.kind == SpectralH::kPower && !(h.param > 0.0 && h.param <= 1.0))
    throw ArgumentError("spectral: power exponent must lie in (0, 1]");
  if (h.kind == SpectralH::kLogShift && h.param < 0.0)
    throw ArgumentError("spectral: log shift must be nonnegative");
  // PSD to tolerance
  if (q.rows() > 0) {
    Vector eigs = sym_eigvalues(q);
    double scale = 0.0;
    for (int i = 0; i < q.rows(); ++i) scale = std::max(scale, std::fabs(q(i, i)));
    if (eigs.front() < -1e-10 * std::max(1.0, scale))
      throw ArgumentError("spectral: Q is not positive semidefinite to tolerance");
  }
  auto fn = std::make_shared<SpectralFn>(std::move(q), std::move(x), h);
  check_singletons(*fn, "spectral");
  return fn;
}
}  // namespace

SetFunctionPtr spectral_from_q(Matrix q, SpectralH h) {
  return make_spectral(std::move(q), std::nullopt, h);
}

SetFunctionPtr spectral_from_x(Matrix x, SpectralH h) {
  Matrix q = gram(x);
  return make_spectral(std::move(q), std::move(x), h);
}

SetFunctionPtr sum_of(std::vector<SetFunctionPtr> terms, Vector coefficients) {
  if (terms.empty() || terms.size() != coefficients.size())
    throw ArgumentError("sum_of: need matching nonempty terms and coefficients");
  const int p = terms[0]->ground_size();
  for (const auto& t : terms)
    if (t->ground_size() != p) throw ArgumentError("sum_of: mismatched ground sets");
  for (double c : coefficients)
    if (c < 0.0) throw ArgumentError("sum_of: coefficients must be nonnegative");
  auto fn = std::make_shared<SumFn>(p, std::move(terms), std::move(coefficients));
  check_singletons(*fn, "sum_of");
  return fn;
}

SetFunctionPtr custom(int p, std::function<double(std::span<const int>)> fn, std::string label) {
  return std::make_shared<CustomFn>(p, std::move(fn), std::move(label));
}

SetFunctionPtr modular_shift(SetFunctionPtr base, double scale, Vector shift) {
  if (static_cast<int>(shift.size()) != base->ground_size())
    throw ArgumentError("modular_shift: shift size mismatch");
  return std::make_shared<ModularShiftFn>(std::move(base), scale, std::move(shift));
}

SetFunctionPtr restrict_to(SetFunctionPtr f, std::span<const int> j) {
  auto map = checked_sorted(j, f->ground_size(), "restrict_to");
  return std::make_shared<ReindexedFn>(std::move(f), std::move(map), std::vector<int>{}, 0.0,
                                       "restriction");
}

SetFunctionPtr contract_by(SetFunctionPtr f, std::span<const int> j) {
  auto fixed = checked_sorted(j, f->ground_size(), "contract_by");
  std::vector<int> map = complement_of(fixed, f->ground_size());
  const double offset = fixed.empty() ? 0.0 : eval_unchecked(*f, fixed);
  return std::make_shared<ReindexedFn>(std::move(f), std::move(map), std::move(fixed), offset,
                                       "contraction");
}

std::vector<int> vanishing_singletons(const SetFunction& f, double tol) {
  std::vector<int> out;
  for (int k = 0; k < f.ground_size(); ++k) {
    const int idx[1] = {k};
    if (eval_unchecked(f, idx) <= tol) out.push_back(k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// brute-force structure queries

std::vector<int> mask_to_indices(uint32_t mask, int p) {
  std::vector<int> out;
  for (int k = 0; k < p; ++k)
    if (mask & (1u << k)) out.push_back(k);
  return out;
}

uint32_t indices_to_mask(std::span<const int> a) {
  uint32_t m = 0;
  for (int j : a) m |= (1u << j);
  return m;
}

std::vector<int> complement_of(std::span<const int> a, int p) {
  std::vector<char> in(p, 0);
  for (int j : a) in[j] = 1;
  std::vector<int> out;
  for (int k = 0; k < p; ++k)
    if (!in[k]) out.push_back(k);
  return out;
}

Vector eval_all(const SetFunction& f) {
  const int p = f.ground_size();
  if (p > kValueTableCap)
    throw CapabilityError("eval_all: p = " + std::to_string(p) + " exceeds cap " +
                          std::to_string(kValueTableCap));
  const uint32_t n = 1u << p;
  Vector table(n, 0.0);
  std::vector<int> idx;
  for (uint32_t mask = 1; mask < n; ++mask) {
    idx.clear();
    for (int k = 0; k < p; ++k)
      if (mask & (1u << k)) idx.push_back(k);
    table[mask] = eval_unchecked(f, idx);
  }
  return table;
}

namespace {
void require_brute(const SetFunction& f, const char* who) {
  if (f.ground_size() > kBruteForceCap)
    throw CapabilityError(std::string(who) + ": brute force capped at p = " +
                          std::to_string(kBruteForceCap) + ", got " +
                          std::to_string(f.ground_size()));
}
}  // namespace

bool is_submodular(const SetFunction& f, double tol) {
  require_brute(f, "is_submodular");
  const int p = f.ground_size();
  const Vector t = eval_all(f);
  const uint32_t n = 1u << p;
  for (uint32_t a = 0; a < n; ++a) {
    const double slack = tol * (1.0 + std::fabs(t[a]));
    for (uint32_t b = a + 1; b < n; ++b)
      if (t[a] + t[b] < t[a | b] + t[a & b] - slack) return false;
  }
  return true;
}

bool is_nondecreasing(const SetFunction& f, double tol) {
  require_brute(f, "is_nondecreasing");
  const int p = f.ground_size();
  const Vector t = eval_all(f);
  const uint32_t n = 1u << p;
  for (uint32_t a = 0; a < n; ++a)
    for (int k = 0; k < p; ++k) {
      if (a & (1u << k)) continue;
      if (t[a | (1u << k)] < t[a] - tol * (1.0 + std::fabs(t[a]))) return false;
    }
  return true;
}

bool is_stable(const SetFunction& f, std::span<const int> a, double tol) {
  auto s = checked_sorted(a, f.ground_size(), "is_stable");
  const double base = s.empty() ? 0.0 : eval_unchecked(f, s);
  std::vector<char> in(f.ground_size(), 0);
  for (int j : s) in[j] = 1;
  for (int k = 0; k < f.ground_size(); ++k) {
    if (in[k]) continue;
    std::vector<int> grown = s;
    grown.insert(std::upper_bound(grown.begin(), grown.end(), k), k);
    if (eval_unchecked(f, grown) <= base + tol * (1.0 + std::fabs(base))) return false;
  }
  return true;
}

bool is_separable(const SetFunction& f, std::span<const int> a, double tol) {
  auto s = checked_sorted(a, f.ground_size(), "is_separable");
  const int m = static_cast<int>(s.size());
  if (m > kBruteForceCap)
    throw CapabilityError("is_separable: |A| capped at " + std::to_string(kBruteForceCap));
  if (m < 2) return false;
  const double whole = eval_unchecked(f, s);
  const double slack = tol * (1.0 + std::fabs(whole));
  const uint32_t full = (1u << m) - 1;
  std::vector<int> left, right;
  // proper nonempty submasks up to complement symmetry
  for (uint32_t bm = 1; bm < full; ++bm) {
    if (!(bm & 1u)) continue;  // fix element s[0] on the left side
    left.clear();
    right.clear();
    for (int i = 0; i < m; ++i)
      ((bm >> i) & 1u ? left : right).push_back(s[i]);
    if (std::fabs(eval_unchecked(f, left) + eval_unchecked(f, right) - whole) <= slack)
      return true;
  }
  return false;
}

StructureReport stable_inseparable_sets(const SetFunction& f, double tol) {
  require_brute(f, "stable_inseparable_sets");
  const int p = f.ground_size();
  const Vector t = eval_all(f);
  const uint32_t n = 1u << p;

  StructureReport rep;
  rep.singleton_values.resize(p);
  for (int k = 0; k < p; ++k) rep.singleton_values[k] = t[1u << k];

  std::vector<char> stable(n, 0);
  for (uint32_t a = 0; a < n; ++a) {
    bool ok = true;
    const double slack = tol * (1.0 + std::fabs(t[a]));
    for (int k = 0; k < p && ok; ++k)
      if (!(a & (1u << k)) && t[a | (1u << k)] <= t[a] + slack) ok = false;
    stable[a] = ok;
  }
  for (uint32_t a = 1; a < n; ++a) {
    if (!stable[a]) continue;
    rep.stable_sets.push_back(mask_to_indices(a, p));
    // inseparable: no proper nonempty binary split with additive values
    bool separable = false;
    const double slack = tol * (1.0 + std::fabs(t[a]));
    for (uint32_t b = (a - 1) & a; b > 0; b = (b - 1) & a) {
      if (std::fabs(t[b] + t[a ^ b] - t[a]) <= slack) {
        separable = true;
        break;
      }
    }
    if (!separable) rep.stable_inseparable.push_back(mask_to_indices(a, p));
  }
  return rep;
}

std::vector<int> smallest_stable_superset(const SetFunction& f, std::span<const int> j,
                                          double tol) {
  auto s = checked_sorted(j, f.ground_size(), "smallest_stable_superset");
  std::vector<char> in(f.ground_size(), 0);
  for (int k : s) in[k] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    const double base = s.empty() ? 0.0 : eval_unchecked(f, s);
    const double slack = tol * (1.0 + std::fabs(base));
    for (int k = 0; k < f.ground_size(); ++k) {
      if (in[k]) continue;
      std::vector<int> grown = s;
      grown.insert(std::upper_bound(grown.begin(), grown.end(), k), k);
      if (eval_unchecked(f, grown) <= base + slack) {
        s = std::move(grown);
        in[k] = 1;
        changed = true;
        break;
      }
    }
  }
  return s;
}

}  // namespace subnorm
