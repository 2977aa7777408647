#pragma once

#include <memory>
#include <optional>

#include "subnorm/setfn.hpp"
#include "subnorm/sfm.hpp"

namespace subnorm {

// One evaluation of the extension: visiting order (decreasing |w|, ties by
// ascending index), marginal gains along the chain, and the value.
struct OrderedEvaluation {
  std::vector<int> order;
  Vector gains;
  double value = 0.0;
};

// The polyhedral norm Omega(w) = f(|w|) built from a nondecreasing submodular
// F with F({k}) > 0, together with its dual norm, subgradients and unit-ball
// extreme points. Immutable after creation; lazy caches are mutex-guarded so
// concurrent reads are safe.
class NormContext {
 public:
  // require_positive_singletons = false admits contractions by non-stable
  // sets, which define a pseudo-norm only.
  static NormContext create(SetFunctionPtr f, bool require_positive_singletons = true);

  const SetFunction& set_function() const { return *f_; }
  SetFunctionPtr set_function_ptr() const { return f_; }
  int dimension() const { return p_; }
  const Vector& singleton_values() const { return singletons_; }
  double min_singleton() const { return min_singleton_; }

  // Lovász extension at w >= 0 (ArgumentError otherwise). The value is
  // accumulated in summation-by-parts form sum_k F(prefix_k) (w_k - w_{k+1}),
  // which makes f(1_A) = F(A) hold exactly.
  OrderedEvaluation lovasz_extension(const Vector& w) const;

  double omega(const Vector& w) const;  // f(|w|)

  // Greedy maximizer of s^T |w| over the submodular polyhedron.
  Vector greedy_maximizer(const Vector& w) const;

  // A subgradient of Omega at w: greedy gains with the signs of w reattached
  // (zero components keep their nonnegative gain). One valid choice; the
  // tie-break is decreasing |w| with ascending index.
  Vector subgradient(const Vector& w) const;

  // Dual norm max_A ||s_A||_1 / F(A): exact enumeration for p <= 15,
  // Dinkelbach iteration through SFM beyond.
  double dual_norm(const Vector& s) const;

  // diagnostics / test routes
  double dual_norm_bruteforce(const Vector& s) const;            // all subsets, p <= 15
  double dual_norm_over_inseparable(const Vector& s) const;      // restricted to T, p <= 12
  double dual_norm_dinkelbach(const Vector& s, double tol = 1e-12) const;

  const StructureReport& structure() const;  // p <= 12

  // Prop.-2 candidate set: sign patterns on stable inseparable supports,
  // scaled by 1/F(A). p <= 12.
  std::vector<Vector> extreme_points() const;

 private:
  NormContext() = default;

  SetFunctionPtr f_;
  int p_ = 0;
  Vector singletons_;
  double min_singleton_ = 0.0;

  struct Lazy;
  std::shared_ptr<Lazy> lazy_;
};

inline constexpr int kDualBruteForceCap = 15;

}  // namespace subnorm
