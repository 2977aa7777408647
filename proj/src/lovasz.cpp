#include "subnorm/lovasz.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "subnorm/errors.hpp"

namespace subnorm {

struct NormContext::Lazy {
  std::mutex mutex;
  std::optional<StructureReport> structure;
  std::optional<Vector> table;  // all 2^p values, p <= kDualBruteForceCap
};

NormContext NormContext::create(SetFunctionPtr f, bool require_positive_singletons) {
  NormContext ctx;
  ctx.f_ = std::move(f);
  ctx.p_ = ctx.f_->ground_size();
  ctx.singletons_.resize(ctx.p_);
  for (int k = 0; k < ctx.p_; ++k) {
    const int idx[1] = {k};
    ctx.singletons_[k] = eval_unchecked(*ctx.f_, idx);
    if (require_positive_singletons && !(ctx.singletons_[k] > 0.0))
      throw ArgumentError("NormContext: F must be strictly positive on singletons");
  }
  ctx.min_singleton_ =
      ctx.p_ ? *std::min_element(ctx.singletons_.begin(), ctx.singletons_.end()) : 0.0;
  ctx.lazy_ = std::make_shared<Lazy>();
  return ctx;
}

namespace {

std::vector<int> decreasing_order(const Vector& w) {
  std::vector<int> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return w[i] > w[j]; });
  return order;
}

}  // namespace

OrderedEvaluation NormContext::lovasz_extension(const Vector& w) const {
  if (static_cast<int>(w.size()) != p_)
    throw ArgumentError("lovasz_extension: dimension mismatch");
  for (double v : w)
    if (v < 0.0) throw ArgumentError("lovasz_extension: w must be componentwise nonnegative");

  OrderedEvaluation ev;
  ev.order = decreasing_order(w);
  ev.gains.resize(p_);
  auto chain = f_->chain();
  chain->reset();
  double prev = 0.0;
  double value = 0.0;
  for (int k = 0; k < p_; ++k) {
    const double cur = chain->extend(ev.order[k]);
    ev.gains[k] = cur - prev;
    const double next_w = (k + 1 < p_) ? w[ev.order[k + 1]] : 0.0;
    value += cur * (w[ev.order[k]] - next_w);  // summation by parts
    prev = cur;
  }
  ev.value = value;
  return ev;
}

double NormContext::omega(const Vector& w) const { return lovasz_extension(abs(w)).value; }

Vector NormContext::greedy_maximizer(const Vector& w) const {
  OrderedEvaluation ev = lovasz_extension(abs(w));
  Vector s(p_);
  for (int k = 0; k < p_; ++k) s[ev.order[k]] = ev.gains[k];
  return s;
}

Vector NormContext::subgradient(const Vector& w) const {
  Vector s = greedy_maximizer(w);
  for (int k = 0; k < p_; ++k)
    if (w[k] < 0.0) s[k] = -s[k];
  return s;
}

const StructureReport& NormContext::structure() const {
  std::lock_guard<std::mutex> lock(lazy_->mutex);
  if (!lazy_->structure) lazy_->structure = stable_inseparable_sets(*f_);
  return *lazy_->structure;
}

namespace {
const Vector& value_table(const SetFunction& f, std::optional<Vector>& slot) {
  if (!slot) slot = eval_all(f);
  return *slot;
}
}  // namespace

double NormContext::dual_norm_bruteforce(const Vector& s) const {
  if (p_ > kDualBruteForceCap)
    throw CapabilityError("dual_norm_bruteforce: capped at p = " +
                          std::to_string(kDualBruteForceCap));
  std::lock_guard<std::mutex> lock(lazy_->mutex);
  const Vector& table = value_table(*f_, lazy_->table);
  const uint32_t n = 1u << p_;
  // |s|(mask) by lowest-bit recursion
  Vector l1(n, 0.0);
  double best = 0.0;
  for (uint32_t mask = 1; mask < n; ++mask) {
    const uint32_t low = mask & (~mask + 1);
    const int k = std::countr_zero(low);
    l1[mask] = l1[mask ^ low] + std::fabs(s[k]);
    best = std::max(best, l1[mask] / table[mask]);
  }
  return best;
}

double NormContext::dual_norm_over_inseparable(const Vector& s) const {
  const StructureReport& rep = structure();
  double best = 0.0;
  for (const auto& a : rep.stable_inseparable) {
    double l1 = 0.0;
    for (int k : a) l1 += std::fabs(s[k]);
    best = std::max(best, l1 / eval_unchecked(*f_, a));
  }
  return best;
}

double NormContext::dual_norm_dinkelbach(const Vector& s, double tol) const {
  Vector a = abs(s);
  double t = 0.0;
  for (int k = 0; k < p_; ++k) t = std::max(t, a[k] / singletons_[k]);
  if (t == 0.0) return 0.0;
  // raise t while some set A has |s|(A) > t F(A); the minimum of tF - |s|
  // detects the violation and its argmin provides the next ratio
  for (int iter = 0; iter < 200; ++iter) {
    auto g = modular_shift(f_, t, a);
    MinimizationResult res = minimize(*g);
    const double scale = 1.0 + std::fabs(t) * (1.0 + norm1(a));
    if (res.value >= -std::max(tol, 1e-12) * scale || res.argmin.empty()) return t;
    double num = 0.0;
    for (int k : res.argmin) num += a[k];
    const double denom = eval_unchecked(*f_, res.argmin);
    const double next = num / denom;
    if (!(next > t * (1.0 + 1e-15))) return t;
    t = next;
  }
  return t;
}

double NormContext::dual_norm(const Vector& s) const {
  if (static_cast<int>(s.size()) != p_) throw ArgumentError("dual_norm: dimension mismatch");
  if (norm_inf(s) == 0.0) return 0.0;
  if (p_ <= kDualBruteForceCap) return dual_norm_bruteforce(s);
  return dual_norm_dinkelbach(s);
}

std::vector<Vector> NormContext::extreme_points() const {
  const StructureReport& rep = structure();
  std::vector<Vector> points;
  for (const auto& a : rep.stable_inseparable) {
    const double value = eval_unchecked(*f_, a);
    const int m = static_cast<int>(a.size());
    for (uint32_t signs = 0; signs < (1u << m); ++signs) {
      Vector pt(p_, 0.0);
      for (int i = 0; i < m; ++i) pt[a[i]] = ((signs >> i) & 1u) ? -1.0 / value : 1.0 / value;
      points.push_back(std::move(pt));
    }
  }
  return points;
}

}  // namespace subnorm
