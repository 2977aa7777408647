#pragma once

#include "subnorm/lovasz.hpp"
#include "subnorm/rng.hpp"
#include "subnorm/solvers.hpp"

namespace subnorm {

// rho(J) = min over nonempty B in J^c of [F(B u J) - F(J)] / F(B).
// In (0, 1] when J is stable; may reach 0 otherwise (flagged by value, not an
// error). Exact enumeration for |J^c| <= 15; beyond that an alternating
// ratio-improvement heuristic gives an upper-bound estimate (the inner
// problem is a difference of submodular functions, so no exact SFM route
// exists; see rho_is_exact).
double rho(const SetFunction& f, std::span<const int> j);
bool rho_is_exact(const SetFunction& f, std::span<const int> j);

// c(J) = sup_{w != 0} Omega_J(w_J) / ||w_J||_2: the largest l2 norm over the
// greedy vertices of the restricted polytope (the sup of a support function
// over the l2 ball is attained at a vertex). Exact for |J| <= 8 by
// permutation enumeration; the upper bound sqrt(|J|) max_k F({k}) otherwise.
double equivalence_constant(const SetFunction& f, std::span<const int> j);
inline constexpr int kEquivalenceExactCap = 8;

struct ConcentrationBound {
  double raw = 0.0;      // sum over stable inseparable A of 2^|A| exp(-t^2 F(A)^2 / (2 1^T Q_AA 1))
  double clipped = 0.0;  // min(raw, 1)
};
// Tail bound for P(Omega*(z) > t), z ~ N(0, Q). Requires the stable
// inseparable family (p <= 12).
ConcentrationBound concentration_bound(const NormContext& ctx, const Matrix& q, double t);

struct RecoveryReport {
  std::vector<int> stable_support;  // J: smallest stable superset of Supp(w*)
  double rho = 0.0;
  double equivalence = 0.0;          // c(J)
  double kappa = 0.0;                // lambda_min(Q_JJ)
  bool q_jj_invertible = false;
  double irrepresentability = 0.0;   // (Omega^J)*[(Omega_J(Q_JJ^{-1} Q_Jj))_j]
  double eta = 0.0;                  // 1 - irrepresentability
  double nu = 0.0;                   // min nonzero |w*_j|
  double lambda = 0.0;
  double lambda_threshold = 0.0;     // kappa nu / (2 c(J))
  double sigma = 0.0;
  int n = 0;
  bool condition_holds = false;
  double failure_probability = 1.0;  // concentration bound at lambda eta rho sqrt(n) / (2 sigma)
};

RecoveryReport support_recovery_condition(const LeastSquaresProblem& prob,
                                          const NormContext& ctx, const Vector& w_star,
                                          double sigma, double lambda);

struct ConsistencyBound {
  std::vector<int> stable_support;
  double kappa_estimate = 0.0;  // sampled restricted eigenvalue (upper-bound estimate)
  double rho = 0.0;
  double equivalence = 0.0;
  double omega_error_bound = 0.0;       // 24 c(J)^2 lambda / (kappa rho^2)
  double prediction_error_bound = 0.0;  // 36 c(J)^2 lambda^2 / (kappa rho^2)
  int samples = 0;
};

// Restricted eigenvalue over the cone {Omega^J(D_{J^c}) <= 3 Omega_J(D_J)}
// estimated by sampled minimization with local refinement.
ConsistencyBound consistency_bounds(const LeastSquaresProblem& prob, const NormContext& ctx,
                                    const Vector& w_star, double lambda, int sample_count = 500,
                                    uint64_t seed = 7);

struct NormDecomposition {
  double omega = 0.0;       // Omega(w)
  double decomposed = 0.0;  // Omega_J(w_J) + Omega^J(w_{J^c})
  bool equality_certified = false;  // min_J |w_j| >= max_{J^c} |w_j|
};
NormDecomposition decompose_norm(const NormContext& ctx, std::span<const int> j,
                                 const Vector& w);

struct StablePatternReport {
  int trials = 0;
  int violations = 0;
  std::vector<int> support_size_histogram;  // index = support size
  std::string first_offender;               // serialized failing instance, if any
};

// Solves `trials` random penalized least-squares problems (X Gaussian with
// unit columns, y standard normal, n >= p) at the given lambda and checks
// that every recovered support (|w| > 1e-8) is stable.
StablePatternReport verify_stable_patterns(const SetFunctionPtr& f, int trials, int n,
                                           double lambda, uint64_t seed);

}  // namespace subnorm
