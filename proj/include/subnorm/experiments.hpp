#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "subnorm/analysis.hpp"
#include "subnorm/rng.hpp"
#include "subnorm/solvers.hpp"

namespace subnorm {

// Synthetic regression instance: X Gaussian with unit l2 columns, support of
// size k chosen at random, Gaussian weights on the support,
// y = X w* + n^{-1/2} ||X w*|| eps (unit signal-to-noise ratio).
struct SyntheticProblem {
  int p = 0, n = 0, k = 0;
  uint64_t seed = 0;
  Matrix x;
  std::vector<int> support;
  Vector w_star;
  Vector y;
  double noise_scale = 0.0;  // per-component noise sd = n^{-1/2} ||X w*||
};

SyntheticProblem generate(int p, int n, int k, uint64_t seed);

// One point of a selection path: support, in-sample residual (1/n)||y-Xw||^2
// after an ordinary-least-squares refit, and the penalty F(support).
struct SelectionStep {
  std::vector<int> support;
  double residual = 0.0;
  double penalty = 0.0;
};

// OLS refit on a fixed support (ridge jitter 1e-10 when rank deficient);
// returns a full p-vector with zeros off the support.
Vector ols_refit(const Matrix& x, const Vector& y, std::span<const int> support);

// Forward selection: repeatedly add the column giving the largest residual
// decrease, refitting per step. Steps include the empty model.
std::vector<SelectionStep> greedy_forward_selection(const Matrix& x, const Vector& y,
                                                    const SetFunction& f, int max_size);

// Supports from thresholding |w_OLS| at each distinct magnitude (minimum-norm
// / ridge fallback when n < p), refit per support.
std::vector<SelectionStep> ols_threshold_path(const Matrix& x, const Vector& y,
                                              const SetFunction& f);

// ---- study 1: optimizer benchmark ----

struct OptimizerBenchmarkConfig {
  int p = 200, n = 200, k = 20;
  double lambda = 0.1;
  int runs = 10;
  uint64_t seed = 2010;
  double gap = 1e-4;          // objective gap defining "reached"
  int proximal_max_iter = 4000;
  int subgradient_max_iter = 40000;
};

struct OptimizerRun {
  uint64_t seed = 0;
  double best_objective = 0.0;
  // first iteration with best-so-far objective within gap of the optimum;
  // INT_MAX when never reached
  int ista_iters = 0, fista_iters = 0, subgradient_iters = 0;
};

struct OptimizerBenchmarkResult {
  OptimizerBenchmarkConfig config;
  std::vector<OptimizerRun> runs;
  SolverTrace ista_trace, fista_trace, subgradient_trace;  // first run, for plots
};

OptimizerBenchmarkResult run_optimizer_benchmark(const OptimizerBenchmarkConfig& cfg);

// ---- study 2: combinatorial relaxation trade-off ----

struct TradeoffConfig {
  int p = 120, n = 20, k = 40;
  int seeds = 10;
  uint64_t seed0 = 31;
  int grid_size = 30;
  double grid_decades = 3.0;
  double rel_tol = 1e-7;
  int max_iter = 500;
};

struct TradeoffCurves {
  uint64_t seed = 0;
  std::vector<SelectionStep> convex;     // relaxation path supports, refit
  std::vector<SelectionStep> greedy;     // forward selection
  std::vector<SelectionStep> threshold;  // thresholded OLS
};

struct TradeoffResult {
  TradeoffConfig config;
  std::vector<TradeoffCurves> curves;
};

TradeoffResult run_tradeoff_study(const TradeoffConfig& cfg);

// lower envelope of (penalty, residual) points: best residual attainable at
// penalty budget <= x, evaluated on the given budgets
Vector lower_envelope(const std::vector<SelectionStep>& steps, const Vector& budgets);

// ---- study 3: non-factorial prior comparison ----

struct PriorComparisonConfig {
  std::vector<std::array<int, 3>> rows;  // (p, n, k)
  int replications = 10;
  uint64_t seed = 1789;
  int grid_size = 30;
  double grid_decades = 3.0;
  double rel_tol = 1e-7;
  int max_iter = 400;
  int threads = 0;  // 0 = SUBNORM_THREADS env or hardware
};

struct PairedDifference {
  double mean = 0.0;
  double stderror = 0.0;
  double t_statistic = 0.0;
  bool significant = false;  // one-sided paired t-test at level 5%
};

struct PriorComparisonRow {
  int p = 0, n = 0, k = 0;
  int replications = 0;
  // normalized mean-square prediction errors x100: per-replication values
  Vector submodular, l1, l2, greedy;
  double submodular_mean = 0.0, submodular_stderr = 0.0;
  PairedDifference l2_vs_submodular, l1_vs_submodular, greedy_vs_submodular;
};

struct PriorComparisonResult {
  PriorComparisonConfig config;
  std::vector<PriorComparisonRow> rows;
};

PriorComparisonResult run_prior_comparison(const PriorComparisonConfig& cfg);

std::vector<std::array<int, 3>> default_table_rows();  // (120, {120,20}, {80..4})

// thread count honored by the studies: explicit > SUBNORM_THREADS > hardware
int resolve_threads(int requested, int jobs);

double student_t_quantile_95(int dof);  // one-sided 5% critical value

}  // namespace subnorm
