#pragma once

#include <optional>
#include <vector>

#include "subnorm/setfn.hpp"

namespace subnorm {

// Submodular function minimization over the base polytope
// B(G) = { s : s(A) <= G(A) for all A, s(V) = G(V) }.

// Greedy vertex of B(G) for a given visiting order.
Vector base_vertex(const SetFunction& g, std::span<const int> order);

// Vertex minimizing d^T s over B(G): greedy along d sorted ascending,
// ties broken by ascending index.
Vector linear_oracle(const SetFunction& g, const Vector& d);

struct MnpOptions {
  double tolerance = 1e-10;  // Wolfe gap ||x||^2 - x^T v, relative to 1 + ||x||^2
  int max_major_cycles = 0;  // 0 = default 100 * p^2
};

// Warm start: regenerate a previous corral (stored as the generating orders)
// against the new polytope. Weights are reused after renormalization.
struct MnpWarmStart {
  std::vector<std::vector<int>> orders;
  Vector weights;
};

struct MnpState {
  Vector x;                             // current (final) point
  std::vector<Vector> corral;           // affinely independent vertices
  std::vector<std::vector<int>> orders; // generating order per corral vertex
  Vector weights;                       // convex weights over the corral
  int major_cycles = 0;
  int minor_cycles = 0;
  double gap = 0.0;   // last Wolfe gap
  double tolerance = 0.0;
  bool converged = false;

  MnpWarmStart warm_start() const { return {orders, weights}; }
};

// Wolfe's minimum-norm-point algorithm on B(G). Throws DiagnosticError
// (carrying the best iterate data in the message) if the major-cycle budget
// is exhausted before the gap criterion holds.
MnpState min_norm_point(const SetFunction& g, const MnpOptions& opts = {},
                        const MnpWarmStart* warm = nullptr);

struct MinimizeOptions {
  int brute_force_cap = kBruteForceCap;  // exhaustive route for p <= cap
  double mnp_tolerance = 1e-10;
  double gap_tolerance = 1e-6;  // required: gap <= gap_tolerance * (1 + |G(A)|)
};

struct MinimizationResult {
  std::vector<int> argmin;       // minimizing set (sorted)
  std::vector<int> argmin_min;   // smallest minimizer candidate {x* < 0}
  std::vector<int> argmin_max;   // largest minimizer candidate {x* <= 0}
  double value = 0.0;            // G(argmin)
  Vector certificate;            // s in B(G)
  double gap = 0.0;              // G(argmin) - sum_k min(0, s_k)
  int mnp_major_cycles = 0;
};

// Strong-duality based minimization: brute force for small p (with an MNP
// certificate), min-norm-point thresholding otherwise. Throws
// DiagnosticError when the duality gap stays above tolerance.
MinimizationResult minimize(const SetFunction& g, const MinimizeOptions& opts = {},
                            const MnpWarmStart* warm = nullptr);

}  // namespace subnorm
