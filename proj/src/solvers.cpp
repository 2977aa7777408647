#include "subnorm/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "subnorm/errors.hpp"

namespace subnorm {

LeastSquaresProblem LeastSquaresProblem::create(Matrix x, Vector y) {
  if (static_cast<int>(y.size()) != x.rows())
    throw ArgumentError("LeastSquaresProblem: X and y dimensions disagree");
  LeastSquaresProblem prob;
  prob.n = x.rows();
  prob.p = x.cols();
  if (prob.n < 1 || prob.p < 1) throw ArgumentError("LeastSquaresProblem: empty data");
  prob.q = gram(x);
  for (double& v : prob.q.data()) v /= prob.n;
  prob.r = matvec_t(x, y);
  for (double& v : prob.r) v /= prob.n;
  prob.x = std::move(x);
  prob.y = std::move(y);
  prob.lipschitz = power_iteration_lmax(prob.q);
  return prob;
}

double objective(const LeastSquaresProblem& prob, const NormContext& ctx, const Vector& w,
                 double lambda) {
  Vector xw = matvec(prob.x, w);
  double rss = 0.0;
  for (int i = 0; i < prob.n; ++i) {
    const double d = prob.y[i] - xw[i];
    rss += d * d;
  }
  return 0.5 * rss / prob.n + lambda * ctx.omega(w);
}

namespace {

Vector gradient(const LeastSquaresProblem& prob, const Vector& w) {
  Vector g = matvec(prob.q, w);
  for (int k = 0; k < prob.p; ++k) g[k] -= prob.r[k];
  return g;
}

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

Vector start_point(const LeastSquaresProblem& prob, const SolveOptions& opts) {
  if (opts.w0.empty()) return Vector(prob.p, 0.0);
  if (static_cast<int>(opts.w0.size()) != prob.p)
    throw ArgumentError("solver: w0 dimension mismatch");
  return opts.w0;
}

Vector prox_step(const NormContext& ctx, const Vector& w, const Vector& grad, double step,
                 double lambda, double mnp_tol, MnpWarmStart* warm) {
  Vector z(w.size());
  for (size_t k = 0; k < w.size(); ++k) z[k] = w[k] - step * grad[k];
  ProxOptions popts;
  popts.check_kkt = false;
  popts.mnp_tolerance = mnp_tol;
  popts.warm = warm;
  return prox(ctx, z, lambda * step, popts).w;
}

// upper bound on Omega*(r - Q w+)/lambda - 1 from the prox step taken at y
double dual_residual_bound(const LeastSquaresProblem& prob, const NormContext& ctx,
                           const Vector& y, const Vector& next, double lip, double lambda) {
  Vector d(prob.p);
  for (int k = 0; k < prob.p; ++k) d[k] = y[k] - next[k];
  Vector e = matvec(prob.q, d);
  for (int k = 0; k < prob.p; ++k) e[k] -= lip * d[k];
  return norm1(e) / (ctx.min_singleton() * lambda);
}

}  // namespace

SolverTrace ista(const LeastSquaresProblem& prob, const NormContext& ctx, double lambda,
                 const SolveOptions& opts) {
  if (!(prob.lipschitz > 0.0)) throw ArgumentError("ista: zero Lipschitz constant");
  SolverTrace tr;
  Clock clock;
  MnpWarmStart warm;
  Vector w = start_point(prob, opts);
  double obj = objective(prob, ctx, w, lambda);
  double lip = prob.lipschitz;
  tr.termination = "max_iter";
  for (int it = 0; it < opts.max_iter; ++it) {
    const Vector grad = gradient(prob, w);
    Vector next;
    double obj_next = 0.0;
    // monotone by construction: halve the step until the objective decreases
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      next = prox_step(ctx, w, grad, 1.0 / lip, lambda, opts.prox_mnp_tol, &warm);
      obj_next = objective(prob, ctx, next, lambda);
      if (obj_next <= obj + 1e-12 * (1.0 + std::fabs(obj))) {
        accepted = true;
        break;
      }
      lip *= 2.0;
    }
    if (!accepted) {
      tr.termination = "stalled";
      break;
    }
    const double residual_bound =
        opts.fermat_slack > 0.0 ? dual_residual_bound(prob, ctx, w, next, lip, lambda) : 0.0;
    w = std::move(next);
    tr.objectives.push_back(obj_next);
    tr.seconds.push_back(clock.seconds());
    ++tr.iterations;
    if (std::fabs(obj - obj_next) <= opts.rel_tol * (1.0 + std::fabs(obj_next)) &&
        residual_bound <= opts.fermat_slack) {
      obj = obj_next;
      tr.termination = "objective_stationary";
      break;
    }
    obj = obj_next;
  }
  tr.w = std::move(w);
  return tr;
}

SolverTrace fista(const LeastSquaresProblem& prob, const NormContext& ctx, double lambda,
                  const SolveOptions& opts) {
  if (!(prob.lipschitz > 0.0)) throw ArgumentError("fista: zero Lipschitz constant");
  SolverTrace tr;
  Clock clock;
  MnpWarmStart warm;
  Vector w = start_point(prob, opts);
  Vector y = w;
  double t = 1.0;
  double obj = objective(prob, ctx, w, lambda);
  double lip = prob.lipschitz;
  tr.termination = "max_iter";
  for (int it = 0; it < opts.max_iter; ++it) {
    Vector grad = gradient(prob, y);
    Vector next = prox_step(ctx, y, grad, 1.0 / lip, lambda, opts.prox_mnp_tol, &warm);
    double obj_next = objective(prob, ctx, next, lambda);
    Vector base = y;  // point the accepted prox step was taken from
    if (obj_next > obj) {
      // restart momentum and fall back to a plain proximal step from w
      t = 1.0;
      base = w;
      for (int bt = 0; bt < 40; ++bt) {
        grad = gradient(prob, w);
        next = prox_step(ctx, w, grad, 1.0 / lip, lambda, opts.prox_mnp_tol, &warm);
        obj_next = objective(prob, ctx, next, lambda);
        if (obj_next <= obj + 1e-12 * (1.0 + std::fabs(obj))) break;
        lip *= 2.0;
      }
    }
    const double residual_bound =
        opts.fermat_slack > 0.0 ? dual_residual_bound(prob, ctx, base, next, lip, lambda) : 0.0;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y.resize(prob.p);
    for (int k = 0; k < prob.p; ++k) y[k] = next[k] + ((t - 1.0) / t_next) * (next[k] - w[k]);
    t = t_next;
    const double prev = obj;
    w = std::move(next);
    obj = obj_next;
    tr.objectives.push_back(obj);
    tr.seconds.push_back(clock.seconds());
    ++tr.iterations;
    if (std::fabs(prev - obj) <= opts.rel_tol * (1.0 + std::fabs(obj)) &&
        residual_bound <= opts.fermat_slack) {
      tr.termination = "objective_stationary";
      break;
    }
  }
  tr.w = std::move(w);
  return tr;
}

SolverTrace subgradient_descent(const LeastSquaresProblem& prob, const NormContext& ctx,
                                double lambda, const SolveOptions& opts) {
  SolverTrace tr;
  Clock clock;
  Vector w = start_point(prob, opts);
  double scale = opts.subgradient_scale;
  if (scale <= 0.0) {
    const double dual_r = ctx.dual_norm(prob.r);
    scale = objective(prob, ctx, Vector(prob.p, 0.0), lambda) / (1.0 + dual_r);
  }
  double best_obj = objective(prob, ctx, w, lambda);
  Vector best_w = w;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Vector grad = gradient(prob, w);
    const Vector sub = ctx.subgradient(w);
    const double step = scale / std::sqrt(static_cast<double>(it));
    for (int k = 0; k < prob.p; ++k) w[k] -= step * (grad[k] + lambda * sub[k]);
    const double obj = objective(prob, ctx, w, lambda);
    if (obj < best_obj) {
      best_obj = obj;
      best_w = w;
    }
    tr.objectives.push_back(obj);
    tr.seconds.push_back(clock.seconds());
    ++tr.iterations;
  }
  tr.termination = "max_iter";
  tr.w = std::move(best_w);
  return tr;
}

std::pair<double, double> fermat_residuals(const LeastSquaresProblem& prob,
                                           const NormContext& ctx, const Vector& w,
                                           double lambda) {
  Vector neg_grad = gradient(prob, w);
  for (double& v : neg_grad) v = -v;  // r - Q w
  const double dual = ctx.dual_norm(neg_grad);
  const double omega_w = ctx.omega(w);
  const double feas = std::max(0.0, dual / lambda - 1.0);
  const double comp = std::fabs(dot(neg_grad, w) - lambda * omega_w) / (1.0 + lambda * omega_w);
  return {feas, comp};
}

double lambda_max(const LeastSquaresProblem& prob, const NormContext& ctx) {
  return ctx.dual_norm(prob.r);
}

Vector log_grid(double lmax, int count, double decades) {
  if (!(lmax > 0.0)) throw ArgumentError("log_grid: lmax must be positive");
  if (count < 1) throw ArgumentError("log_grid: count must be >= 1");
  Vector grid(count);
  if (count == 1) {
    grid[0] = lmax;
    return grid;
  }
  for (int i = 0; i < count; ++i)
    grid[i] = lmax * std::pow(10.0, -decades * i / (count - 1));
  return grid;
}

std::vector<PathPoint> regularization_path(const LeastSquaresProblem& prob,
                                           const NormContext& ctx, const Vector& lambdas,
                                           const SolveOptions& opts) {
  for (size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw ArgumentError("regularization_path: lambdas must be positive");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1]))
      throw ArgumentError("regularization_path: grid must be strictly descending");
  }
  std::vector<PathPoint> path;
  SolveOptions local = opts;
  for (double lambda : lambdas) {
    SolverTrace tr = fista(prob, ctx, lambda, local);
    PathPoint pt;
    pt.lambda = lambda;
    pt.w = tr.w;
    for (int k = 0; k < prob.p; ++k)
      if (std::fabs(tr.w[k]) > 1e-8) pt.support.push_back(k);
    pt.objective = tr.objectives.empty() ? objective(prob, ctx, tr.w, lambda)
                                         : tr.objectives.back();
    pt.iterations = tr.iterations;
    path.push_back(std::move(pt));
    local.w0 = path.back().w;  // warm start
  }
  return path;
}

}  // namespace subnorm
