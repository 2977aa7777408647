#pragma once

#include <string>

#include "subnorm/lovasz.hpp"
#include "subnorm/prox.hpp"

namespace subnorm {

// min_w (1/2n) ||y - X w||^2 + lambda * Omega(w)
struct LeastSquaresProblem {
  Matrix x;
  Vector y;
  int n = 0;
  int p = 0;
  Matrix q;        // X^T X / n
  Vector r;        // X^T y / n
  double lipschitz = 0.0;  // lambda_max(q), power-iteration estimate

  static LeastSquaresProblem create(Matrix x, Vector y);
};

double objective(const LeastSquaresProblem& prob, const NormContext& ctx, const Vector& w,
                 double lambda);

struct SolveOptions {
  int max_iter = 20000;
  double rel_tol = 1e-10;        // relative objective change
  // Dual-feasibility control: after the step w+ = prox(y - grad/L) the
  // negative gradient decomposes as r - Q w+ = lambda s + (Q - L I)(y - w+)
  // with Omega*(s) <= 1, so ||e||_1 / min_k F({k}) bounds the residual
  // Omega*(e). Termination additionally requires this bound <= slack *
  // lambda. 0 disables (used by the studies, which only need objectives).
  double fermat_slack = 1e-7;
  double prox_mnp_tol = 1e-10;
  double subgradient_scale = 0;  // 0 = objective(0) / (1 + Omega*(r))
  Vector w0;                     // empty = zero start
};

struct SolverTrace {
  Vector objectives;            // objective after each iteration
  std::vector<double> seconds;  // wall clock elapsed at each iteration
  Vector w;                     // final iterate (best iterate for subgradient)
  int iterations = 0;
  std::string termination;
};

SolverTrace ista(const LeastSquaresProblem& prob, const NormContext& ctx, double lambda,
                 const SolveOptions& opts = {});
// Accelerated scheme t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2 with a
// function-value restart when the objective increases.
SolverTrace fista(const LeastSquaresProblem& prob, const NormContext& ctx, double lambda,
                  const SolveOptions& opts = {});
// Step a / sqrt(k); best-iterate tracking, no monotonicity.
SolverTrace subgradient_descent(const LeastSquaresProblem& prob, const NormContext& ctx,
                                double lambda, const SolveOptions& opts = {});

// Fermat optimality residuals at w:
//   first  = max(0, Omega*(r - Q w) / lambda - 1)
//   second = |(r - Q w)^T w - lambda Omega(w)| / (1 + lambda Omega(w))
std::pair<double, double> fermat_residuals(const LeastSquaresProblem& prob,
                                           const NormContext& ctx, const Vector& w,
                                           double lambda);

// Smallest lambda with solution w = 0.
double lambda_max(const LeastSquaresProblem& prob, const NormContext& ctx);

// count log-spaced values from lmax down to lmax / 10^decades
Vector log_grid(double lmax, int count = 50, double decades = 3.0);

struct PathPoint {
  double lambda = 0.0;
  Vector w;
  std::vector<int> support;  // components with |w| > 1e-8
  double objective = 0.0;
  int iterations = 0;
};

// Warm-started FISTA along a descending grid.
std::vector<PathPoint> regularization_path(const LeastSquaresProblem& prob,
                                           const NormContext& ctx, const Vector& lambdas,
                                           const SolveOptions& opts = {});

}  // namespace subnorm
