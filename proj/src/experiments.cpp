#include "subnorm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "subnorm/errors.hpp"

namespace subnorm {

SyntheticProblem generate(int p, int n, int k, uint64_t seed) {
  if (p < 1 || n < 1) throw ArgumentError("generate: p and n must be positive");
  if (k < 0 || k > p) throw ArgumentError("generate: need 0 <= k <= p");
  SyntheticProblem sp;
  sp.p = p;
  sp.n = n;
  sp.k = k;
  sp.seed = seed;
  RngStream rng(seed);
  sp.x = rng.gaussian_matrix(n, p);
  for (int j = 0; j < p; ++j) {
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) nrm += sp.x(i, j) * sp.x(i, j);
    nrm = std::sqrt(nrm);
    for (int i = 0; i < n; ++i) sp.x(i, j) /= nrm;
  }
  sp.support = rng.sample_subset(p, k);
  sp.w_star.assign(p, 0.0);
  for (int j : sp.support) sp.w_star[j] = rng.gaussian();
  Vector xw = matvec(sp.x, sp.w_star);
  sp.noise_scale = norm2(xw) / std::sqrt(static_cast<double>(n));
  sp.y = xw;
  for (int i = 0; i < n; ++i) sp.y[i] += sp.noise_scale * rng.gaussian();
  return sp;
}

Vector ols_refit(const Matrix& x, const Vector& y, std::span<const int> support) {
  Vector w(x.cols(), 0.0);
  if (support.empty()) return w;
  std::vector<int> rows(x.rows());
  for (int i = 0; i < x.rows(); ++i) rows[i] = i;
  Matrix xs = submatrix(x, rows, support);
  Vector ws;
  try {
    ws = lstsq(xs, y);
  } catch (const DiagnosticError&) {
    ws = lstsq(xs, y, 1e-10);
  }
  for (size_t i = 0; i < support.size(); ++i) w[support[i]] = ws[i];
  return w;
}

namespace {

double mean_residual(const Matrix& x, const Vector& y, const Vector& w) {
  Vector xw = matvec(x, w);
  double s = 0.0;
  for (size_t i = 0; i < y.size(); ++i) s += (y[i] - xw[i]) * (y[i] - xw[i]);
  return s / static_cast<double>(y.size());
}

double penalty_of(const SetFunction& f, std::span<const int> support) {
  return support.empty() ? 0.0 : eval_unchecked(f, support);
}

}  // namespace

std::vector<SelectionStep> greedy_forward_selection(const Matrix& x, const Vector& y,
                                                    const SetFunction& f, int max_size) {
  const int n = x.rows(), p = x.cols();
  max_size = std::min(max_size, std::min(n, p));
  std::vector<SelectionStep> steps;

  // orthonormal basis of the selected columns; candidate scores from the
  // residual projection
  std::vector<Vector> basis;
  Vector resid = y;
  std::vector<char> chosen(p, 0);
  std::vector<int> support;

  double y_sq = dot(y, y);
  steps.push_back({{}, y_sq / n, 0.0});

  for (int step = 0; step < max_size; ++step) {
    int best = -1;
    double best_gain = 0.0;
    for (int j = 0; j < p; ++j) {
      if (chosen[j]) continue;
      Vector xj = x.col(j);
      for (const auto& b : basis) axpy(-dot(b, xj), b, xj);
      const double nn = dot(xj, xj);
      if (nn <= 1e-10) continue;  // in the span: no refit improvement
      const double g = dot(xj, resid);
      const double gain = g * g / nn;
      if (gain > best_gain) {
        best_gain = gain;
        best = j;
      }
    }
    if (best < 0) break;
    Vector xb = x.col(best);
    for (const auto& b : basis) axpy(-dot(b, xb), b, xb);
    const double nrm = norm2(xb);
    for (double& v : xb) v /= nrm;
    axpy(-dot(xb, resid), xb, resid);
    basis.push_back(std::move(xb));
    chosen[best] = 1;
    support.insert(std::upper_bound(support.begin(), support.end(), best), best);
    steps.push_back({support, dot(resid, resid) / n, penalty_of(f, support)});
  }
  return steps;
}

std::vector<SelectionStep> ols_threshold_path(const Matrix& x, const Vector& y,
                                              const SetFunction& f) {
  const int n = x.rows(), p = x.cols();
  Vector w_full;
  if (n >= p) {
    w_full = lstsq(x, y, 0.0);
  } else {
    // ridge fallback: w = X^T (X X^T + delta I)^{-1} y (minimum-norm limit)
    Matrix k(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int c = 0; c < p; ++c) s += x(i, c) * x(j, c);
        k(i, j) = s;
      }
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, k(i, i));
    for (int i = 0; i < n; ++i) k(i, i) += 1e-10 * std::max(scale, 1.0);
    Vector alpha = solve_spd(k, y);
    w_full = matvec_t(x, alpha);
  }

  std::vector<int> order(p);
  for (int j = 0; j < p; ++j) order[j] = j;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::fabs(w_full[a]) > std::fabs(w_full[b]); });

  std::vector<SelectionStep> steps;
  steps.push_back({{}, dot(y, y) / n, 0.0});
  std::vector<int> support;
  const int cap = std::min(n, p);  // refits beyond n columns interpolate anyway
  for (int m = 0; m < cap; ++m) {
    if (std::fabs(w_full[order[m]]) == 0.0) break;
    support.insert(std::upper_bound(support.begin(), support.end(), order[m]), order[m]);
    Vector w = ols_refit(x, y, support);
    steps.push_back({support, mean_residual(x, y, w), penalty_of(f, support)});
  }
  return steps;
}

// ---------------------------------------------------------------------------

namespace {

int iterations_to_gap(const Vector& objectives, double target) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < objectives.size(); ++i) {
    best = std::min(best, objectives[i]);
    if (best <= target) return static_cast<int>(i) + 1;
  }
  return std::numeric_limits<int>::max();
}

SetFunctionPtr sqrt_cardinality(int p) {
  Vector h(p + 1);
  for (int k = 0; k <= p; ++k) h[k] = std::sqrt(static_cast<double>(k));
  return concave_cardinality(std::move(h));
}

}  // namespace

OptimizerBenchmarkResult run_optimizer_benchmark(const OptimizerBenchmarkConfig& cfg) {
  OptimizerBenchmarkResult out;
  out.config = cfg;
  for (int run = 0; run < cfg.runs; ++run) {
    const uint64_t seed = RngStream::stream(cfg.seed, run).seed();
    SyntheticProblem sp = generate(cfg.p, cfg.n, cfg.k, seed);
    LeastSquaresProblem prob = LeastSquaresProblem::create(sp.x, sp.y);
    NormContext ctx = NormContext::create(sqrt_cardinality(cfg.p));

    SolveOptions popts;
    popts.max_iter = cfg.proximal_max_iter;
    popts.rel_tol = 1e-13;
    SolverTrace tr_fista = fista(prob, ctx, cfg.lambda, popts);
    SolverTrace tr_ista = ista(prob, ctx, cfg.lambda, popts);

    SolveOptions sopts;
    sopts.max_iter = cfg.subgradient_max_iter;
    SolverTrace tr_sub = subgradient_descent(prob, ctx, cfg.lambda, sopts);

    OptimizerRun r;
    r.seed = seed;
    double best = std::numeric_limits<double>::infinity();
    for (const auto* tr : {&tr_fista, &tr_ista, &tr_sub})
      for (double v : tr->objectives) best = std::min(best, v);
    r.best_objective = best;
    const double target = best + cfg.gap * (1.0 + std::fabs(best));
    r.fista_iters = iterations_to_gap(tr_fista.objectives, target);
    r.ista_iters = iterations_to_gap(tr_ista.objectives, target);
    r.subgradient_iters = iterations_to_gap(tr_sub.objectives, target);
    out.runs.push_back(r);
    if (run == 0) {
      out.fista_trace = std::move(tr_fista);
      out.ista_trace = std::move(tr_ista);
      out.subgradient_trace = std::move(tr_sub);
    }
  }
  return out;
}

TradeoffResult run_tradeoff_study(const TradeoffConfig& cfg) {
  TradeoffResult out;
  out.config = cfg;
  for (int s = 0; s < cfg.seeds; ++s) {
    const uint64_t seed = RngStream::stream(cfg.seed0, s).seed();
    SyntheticProblem sp = generate(cfg.p, cfg.n, cfg.k, seed);
    auto f = spectral_from_x(sp.x, {SpectralH::kPower, 0.5});
    NormContext ctx = NormContext::create(f);
    LeastSquaresProblem prob = LeastSquaresProblem::create(sp.x, sp.y);

    TradeoffCurves curves;
    curves.seed = seed;

    const double lmax = lambda_max(prob, ctx);
    Vector grid = log_grid(lmax, cfg.grid_size, cfg.grid_decades);
    SolveOptions opts;
    opts.rel_tol = cfg.rel_tol;
    opts.max_iter = cfg.max_iter;
    auto path = regularization_path(prob, ctx, grid, opts);
    for (const auto& pt : path) {
      Vector w = ols_refit(sp.x, sp.y, pt.support);
      curves.convex.push_back(
          {pt.support, mean_residual(sp.x, sp.y, w), penalty_of(*f, pt.support)});
    }
    curves.greedy = greedy_forward_selection(sp.x, sp.y, *f, std::min(sp.n, sp.p));
    curves.threshold = ols_threshold_path(sp.x, sp.y, *f);
    out.curves.push_back(std::move(curves));
  }
  return out;
}

Vector lower_envelope(const std::vector<SelectionStep>& steps, const Vector& budgets) {
  // best residual with penalty <= budget
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : steps) pts.push_back({s.penalty, s.residual});
  std::sort(pts.begin(), pts.end());
  Vector out(budgets.size(), std::numeric_limits<double>::infinity());
  for (size_t b = 0; b < budgets.size(); ++b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [pen, res] : pts) {
      if (pen > budgets[b]) break;
      best = std::min(best, res);
    }
    out[b] = best;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::array<int, 3>> default_table_rows() {
  std::vector<std::array<int, 3>> rows;
  for (int n : {120, 20})
    for (int k : {80, 40, 20, 10, 6, 4}) rows.push_back({120, n, k});
  return rows;
}

int resolve_threads(int requested, int jobs) {
  int t = requested;
  if (t <= 0) {
    if (const char* env = std::getenv("SUBNORM_THREADS")) t = std::atoi(env);
  }
  if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
  if (t <= 0) t = 1;
  return std::max(1, std::min(t, jobs));
}

double student_t_quantile_95(int dof) {
  // one-sided 95% critical values; dense for small dof, asymptotic tail
  static const double table[] = {6.314, 2.920, 2.353, 2.132, 2.015, 1.943, 1.895,
                                 1.860, 1.833, 1.812, 1.796, 1.782, 1.771, 1.761,
                                 1.753, 1.746, 1.740, 1.734, 1.729, 1.725};
  if (dof < 1) throw ArgumentError("student_t_quantile_95: dof must be >= 1");
  if (dof <= 20) return table[dof - 1];
  if (dof <= 30) return 1.725 - (1.725 - 1.697) * (dof - 20) / 10.0;
  if (dof <= 60) return 1.697 - (1.697 - 1.671) * (dof - 30) / 30.0;
  if (dof <= 120) return 1.671 - (1.671 - 1.658) * (dof - 60) / 60.0;
  return 1.645;
}

namespace {

struct MethodErrors {
  double submodular = 0.0, l1 = 0.0, l2 = 0.0, greedy = 0.0;
};

double normalized_error(const SyntheticProblem& sp, const Vector& w) {
  Vector d(w.size());
  for (size_t i = 0; i < w.size(); ++i) d[i] = w[i] - sp.w_star[i];
  Vector xd = matvec(sp.x, d);
  Vector xs = matvec(sp.x, sp.w_star);
  return 100.0 * dot(xd, xd) / dot(xs, xs);
}

double best_path_error(const SyntheticProblem& sp, const LeastSquaresProblem& prob,
                       const NormContext& ctx, const PriorComparisonConfig& cfg) {
  const double lmax = lambda_max(prob, ctx);
  Vector grid = log_grid(lmax, cfg.grid_size, cfg.grid_decades);
  SolveOptions opts;
  opts.rel_tol = cfg.rel_tol;
  opts.max_iter = cfg.max_iter;
  double best = std::numeric_limits<double>::infinity();
  SolveOptions local = opts;
  for (double lambda : grid) {
    SolverTrace tr = fista(prob, ctx, lambda, local);
    best = std::min(best, normalized_error(sp, tr.w));
    local.w0 = tr.w;
  }
  return best;
}

double best_ridge_error(const SyntheticProblem& sp, const LeastSquaresProblem& prob,
                        const PriorComparisonConfig& cfg) {
  EigResult eig = sym_eig(prob.q, true);
  Vector vt_r = matvec_t(eig.vectors, prob.r);
  const double top = std::max(eig.values.back(), 1e-12);
  Vector grid = log_grid(top * 10.0, cfg.grid_size, 6.0);
  double best = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    Vector scaled(vt_r.size());
    for (size_t i = 0; i < vt_r.size(); ++i) scaled[i] = vt_r[i] / (eig.values[i] + lambda);
    Vector w = matvec(eig.vectors, scaled);
    best = std::min(best, normalized_error(sp, w));
  }
  return best;
}

double best_greedy_error(const SyntheticProblem& sp, const SetFunction& f) {
  auto steps = greedy_forward_selection(sp.x, sp.y, f, std::min(sp.n, sp.p));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& st : steps) {
    Vector w = ols_refit(sp.x, sp.y, st.support);
    best = std::min(best, normalized_error(sp, w));
  }
  return best;
}

MethodErrors one_replication(int p, int n, int k, uint64_t seed,
                             const PriorComparisonConfig& cfg) {
  SyntheticProblem sp = generate(p, n, k, seed);
  LeastSquaresProblem prob = LeastSquaresProblem::create(sp.x, sp.y);

  MethodErrors err;
  {
    auto f = spectral_from_x(sp.x, {SpectralH::kPower, 0.5});
    NormContext ctx = NormContext::create(f);
    err.submodular = best_path_error(sp, prob, ctx, cfg);
    err.greedy = best_greedy_error(sp, *f);
  }
  {
    NormContext ctx = NormContext::create(cardinality(p));
    err.l1 = best_path_error(sp, prob, ctx, cfg);
  }
  err.l2 = best_ridge_error(sp, prob, cfg);
  return err;
}

PairedDifference paired_difference(const Vector& a, const Vector& b) {
  // per-replication differences a - b, one-sided t-test at 5%
  PairedDifference d;
  const int n = static_cast<int>(a.size());
  Vector diff(n);
  for (int i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  double mean = 0.0;
  for (double v : diff) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : diff) var += (v - mean) * (v - mean);
  var = n > 1 ? var / (n - 1) : 0.0;
  d.mean = mean;
  d.stderror = std::sqrt(var / n);
  d.t_statistic = d.stderror > 0.0 ? mean / d.stderror : 0.0;
  d.significant = n > 1 && d.t_statistic > student_t_quantile_95(n - 1);
  return d;
}

}  // namespace

PriorComparisonResult run_prior_comparison(const PriorComparisonConfig& cfg) {
  PriorComparisonResult out;
  out.config = cfg;
  for (const auto& [p, n, k] : cfg.rows) {
    PriorComparisonRow row;
    row.p = p;
    row.n = n;
    row.k = k;
    row.replications = cfg.replications;
    row.submodular.resize(cfg.replications);
    row.l1.resize(cfg.replications);
    row.l2.resize(cfg.replications);
    row.greedy.resize(cfg.replications);

    const uint64_t row_seed =
        cfg.seed ^ (static_cast<uint64_t>(p) << 40) ^ (static_cast<uint64_t>(n) << 20) ^
        static_cast<uint64_t>(k);
    const int threads = resolve_threads(cfg.threads, cfg.replications);
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int rep = next.fetch_add(1); rep < cfg.replications; rep = next.fetch_add(1)) {
        const uint64_t seed = RngStream::stream(row_seed, rep).seed();
        MethodErrors err = one_replication(p, n, k, seed, cfg);
        row.submodular[rep] = err.submodular;
        row.l1[rep] = err.l1;
        row.l2[rep] = err.l2;
        row.greedy[rep] = err.greedy;
      }
    };
    if (threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    double mean = 0.0;
    for (double v : row.submodular) mean += v;
    mean /= cfg.replications;
    double var = 0.0;
    for (double v : row.submodular) var += (v - mean) * (v - mean);
    var = cfg.replications > 1 ? var / (cfg.replications - 1) : 0.0;
    row.submodular_mean = mean;
    row.submodular_stderr = std::sqrt(var / cfg.replications);
    row.l2_vs_submodular = paired_difference(row.l2, row.submodular);
    row.l1_vs_submodular = paired_difference(row.l1, row.submodular);
    row.greedy_vs_submodular = paired_difference(row.greedy, row.submodular);
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace subnorm
