#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "subnorm/linalg.hpp"

namespace subnorm {

// Incremental evaluator for one growing chain of subsets
// {j_1} c {j_1,j_2} c ... Used by the greedy algorithm, where a fresh
// evaluation per prefix would be wasteful for structured families.
class ChainEvaluator {
 public:
  virtual ~ChainEvaluator() = default;
  virtual void reset() = 0;
  // Adds element j to the prefix and returns F(prefix). Elements must be
  // distinct and in range; not checked on this hot path.
  virtual double extend(int j) = 0;
};

// A real-valued set function on subsets of {0,...,p-1} with F(empty) = 0.
// Built-in families are nondecreasing submodular with F({k}) > 0 (checked at
// construction); derived functions (shifts, contractions) may be neither.
class SetFunction {
 public:
  virtual ~SetFunction() = default;

  int ground_size() const { return p_; }

  // Validated evaluation: indices in range, duplicates rejected.
  double operator()(std::span<const int> a) const;
  double operator()(std::initializer_list<int> a) const {
    return (*this)(std::span<const int>(a.begin(), a.size()));
  }

  virtual std::unique_ptr<ChainEvaluator> chain() const;
  virtual std::string describe() const = 0;

 protected:
  explicit SetFunction(int p) : p_(p) {}
  // a is sorted, deduplicated and in range.
  virtual double eval_sorted(std::span<const int> a) const = 0;

 private:
  int p_ = 0;
  friend double eval_unchecked(const SetFunction& f, std::span<const int> a);
};

using SetFunctionPtr = std::shared_ptr<const SetFunction>;

// fast path used by chains/brute force (a sorted, in range)
double eval_unchecked(const SetFunction& f, std::span<const int> a);

// ---- built-in families (construction throws ArgumentError when the
// ---- polymatroid requirements fail: F(empty)=0, F({k}) > 0, valid params)

SetFunctionPtr cardinality(int p);
SetFunctionPtr weighted_cardinality(Vector weights);
// h tabulated at 0..p with h(0)=0, nondecreasing, concave; F(A) = h(|A|)
SetFunctionPtr concave_cardinality(Vector h);
// F(A) = sum of d(G) over groups G intersecting A; groups given as index lists
SetFunctionPtr group_cover(int p, std::vector<std::vector<int>> groups, Vector weights);
// F(A) = p - 2 + max(A) - min(A) + 1 for nonempty A (1D contiguous prior)
SetFunctionPtr range_plus_constant(int p);
// F(A) = |A| + number of maximal intervals of consecutive indices in A
SetFunctionPtr interval_count(int p);

struct SpectralH {
  enum Kind { kPower, kLogShift } kind = kPower;
  double param = 0.5;  // q in (0,1] for kPower, t >= 0 for kLogShift
  double operator()(double lambda) const;
};
// F(A) = sum_i h(lambda_i(Q_AA)); Q symmetric PSD.
SetFunctionPtr spectral_from_q(Matrix q, SpectralH h);
// Same with Q = X^T X; keeps X so that submatrix spectra can be computed on
// the smaller side when |A| > n.
SetFunctionPtr spectral_from_x(Matrix x, SpectralH h);
// Nonnegative combination sum_i c_i F_i (same ground set).
SetFunctionPtr sum_of(std::vector<SetFunctionPtr> terms, Vector coefficients);

// Arbitrary callable, used by tests and internal reductions. No
// polymatroid checks.
SetFunctionPtr custom(int p, std::function<double(std::span<const int>)> fn,
                      std::string label = "custom");

// G(A) = scale * F(A) - sum_{k in A} shift_k. The workhorse reduction for
// proximal operators, dual norms and SFM instances.
SetFunctionPtr modular_shift(SetFunctionPtr base, double scale, Vector shift);

// F restricted to J (ground set re-indexed to 0..|J|-1 in sorted J order)
SetFunctionPtr restrict_to(SetFunctionPtr f, std::span<const int> j);
// Contraction by J on the complement: A -> F(A u J) - F(J), re-indexed. May
// vanish on singletons when J is not stable; query with vanishing_singletons.
SetFunctionPtr contract_by(SetFunctionPtr f, std::span<const int> j);

std::vector<int> vanishing_singletons(const SetFunction& f, double tol = 1e-9);

// ---- combinatorial structure queries (brute force, capped) ----

inline constexpr int kBruteForceCap = 12;   // 2^p enumeration cap
inline constexpr int kValueTableCap = 20;   // memory cap for eval_all

// F values for all 2^p subsets, indexed by bitmask.
Vector eval_all(const SetFunction& f);

bool is_submodular(const SetFunction& f, double tol = 1e-9);
bool is_nondecreasing(const SetFunction& f, double tol = 1e-9);

// Stability via the single-element test: A is stable iff no single k outside
// A leaves F unchanged. For nondecreasing submodular F this matches the
// all-supersets definition: if F(A u {k}) = F(A) for each k in B \ A then
// repeated application of submodularity gives F(A u B) = F(A).
bool is_stable(const SetFunction& f, std::span<const int> a, double tol = 1e-9);

// Separability via binary splits: F superadditive on disjoint sets (from
// submodularity and F(empty)=0) makes a multi-part additive partition imply
// an additive binary split. |A| <= kBruteForceCap.
bool is_separable(const SetFunction& f, std::span<const int> a, double tol = 1e-9);

struct StructureReport {
  std::vector<std::vector<int>> stable_sets;         // nonempty stable sets
  std::vector<std::vector<int>> stable_inseparable;  // the family indexing faces
  Vector singleton_values;
};

// Enumerates nonempty stable sets and stable inseparable sets. p <= cap.
StructureReport stable_inseparable_sets(const SetFunction& f, double tol = 1e-9);

// Closure: repeatedly add any k with F(J u {k}) = F(J) until none remains.
// Order-independent (the flat elements of a submodular function form a
// closure operator); returns sorted indices.
std::vector<int> smallest_stable_superset(const SetFunction& f, std::span<const int> j,
                                          double tol = 1e-9);

// ---- small subset utilities shared across modules ----
std::vector<int> mask_to_indices(uint32_t mask, int p);
uint32_t indices_to_mask(std::span<const int> a);
std::vector<int> complement_of(std::span<const int> a, int p);

}  // namespace subnorm
