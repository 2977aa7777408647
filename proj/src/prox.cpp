#include "subnorm/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "subnorm/errors.hpp"

namespace subnorm {

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0)) throw ArgumentError("prox: lambda must be positive");
}

std::vector<int> nonzero_support(const Vector& w) {
  std::vector<int> s;
  for (size_t k = 0; k < w.size(); ++k)
    if (w[k] != 0.0) s.push_back(static_cast<int>(k));
  return s;
}

void attach_kkt(const NormContext& ctx, const Vector& z, double lambda, ProxResult& res,
                double tol, bool enforce) {
  Vector residual(z.size());
  for (size_t k = 0; k < z.size(); ++k) residual[k] = z[k] - res.w[k];
  const double dual_norm = ctx.dual_norm(residual);
  const double omega_w = ctx.omega(res.w);
  res.kkt_dual_feasibility = std::max(0.0, dual_norm / lambda - 1.0);
  res.kkt_complementarity =
      std::fabs(dot(residual, res.w) - lambda * omega_w) / (1.0 + lambda * omega_w);
  res.kkt_checked = true;
  if (enforce && (res.kkt_dual_feasibility > tol || res.kkt_complementarity > tol)) {
    std::ostringstream msg;
    msg << "prox: KKT residuals above tolerance " << tol << " (dual feasibility "
        << res.kkt_dual_feasibility << ", complementarity " << res.kkt_complementarity << ")";
    throw DiagnosticError(msg.str());
  }
}

}  // namespace

ProxResult prox(const NormContext& ctx, const Vector& z, double lambda, const ProxOptions& opts) {
  check_lambda(lambda);
  const int p = ctx.dimension();
  if (static_cast<int>(z.size()) != p) throw ArgumentError("prox: dimension mismatch");

  ProxResult res;
  res.method = ProxResult::kMinNormPoint;
  res.w.assign(p, 0.0);
  res.dual.assign(p, 0.0);

  const Vector a = abs(z);
  if (norm_inf(a) == 0.0) {
    if (opts.check_kkt) attach_kkt(ctx, z, lambda, res, opts.kkt_tolerance, true);
    return res;
  }

  Vector shift = a;
  for (double& v : shift) v /= lambda;
  auto g = modular_shift(ctx.set_function_ptr(), 1.0, shift);

  MnpOptions mnp;
  mnp.tolerance = opts.mnp_tolerance;
  MnpState st = min_norm_point(*g, mnp, opts.warm);
  if (opts.warm) *opts.warm = st.warm_start();

  for (int k = 0; k < p; ++k) {
    double wk = lambda * std::max(-st.x[k], 0.0);
    wk = std::min(wk, a[k]);               // shrinkage cannot overshoot
    if (a[k] == 0.0) wk = 0.0;
    res.w[k] = std::copysign(wk, z[k]);
    if (z[k] == 0.0) res.w[k] = 0.0;
    res.dual[k] = (z[k] - res.w[k]) / lambda;
  }
  res.support = nonzero_support(res.w);
  if (opts.check_kkt) attach_kkt(ctx, z, lambda, res, opts.kkt_tolerance, true);
  return res;
}

namespace {

// Projection onto { v : v_1 >= v_2 >= ... >= v_m >= 0 }: isotonic regression
// by pool-adjacent-violators, then clipping at zero.
void project_monotone_nonneg(Vector& b) {
  const size_t m = b.size();
  std::vector<double> value(m), weight(m);
  std::vector<size_t> size(m);
  size_t blocks = 0;
  for (size_t i = 0; i < m; ++i) {
    value[blocks] = b[i];
    weight[blocks] = 1.0;
    size[blocks] = 1;
    ++blocks;
    while (blocks > 1 && value[blocks - 2] < value[blocks - 1]) {
      const double w = weight[blocks - 2] + weight[blocks - 1];
      value[blocks - 2] =
          (weight[blocks - 2] * value[blocks - 2] + weight[blocks - 1] * value[blocks - 1]) / w;
      weight[blocks - 2] = w;
      size[blocks - 2] += size[blocks - 1];
      --blocks;
    }
  }
  size_t pos = 0;
  for (size_t blk = 0; blk < blocks; ++blk)
    for (size_t i = 0; i < size[blk]; ++i) b[pos++] = std::max(value[blk], 0.0);
}

}  // namespace

ProxResult prox_bruteforce(const NormContext& ctx, const Vector& z, double lambda) {
  check_lambda(lambda);
  const int p = ctx.dimension();
  if (static_cast<int>(z.size()) != p) throw ArgumentError("prox_bruteforce: dimension mismatch");
  if (p > kProxBruteForceCap)
    throw CapabilityError("prox_bruteforce: capped at p = " + std::to_string(kProxBruteForceCap));

  const Vector a = abs(z);
  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);

  Vector best_w;  // in |z| space
  double best_obj = std::numeric_limits<double>::infinity();
  auto chain = ctx.set_function().chain();
  Vector gains(p), b(p), u(p);

  do {
    chain->reset();
    double prev = 0.0;
    for (int k = 0; k < p; ++k) {
      const double cur = chain->extend(perm[k]);
      gains[k] = cur - prev;
      prev = cur;
    }
    // on the cone u_{perm_1} >= ... >= u_{perm_p} >= 0 the objective is
    // 1/2 ||u - a||^2 + lambda * gains^T u_perm: project a - lambda*gains
    for (int k = 0; k < p; ++k) b[k] = a[perm[k]] - lambda * gains[k];
    project_monotone_nonneg(b);
    for (int k = 0; k < p; ++k) u[perm[k]] = b[k];
    // evaluate the true objective (the cone-local linearization only upper
    // bounds it off the cone's interior ordering)
    double obj = 0.0;
    for (int k = 0; k < p; ++k) obj += 0.5 * (u[k] - a[k]) * (u[k] - a[k]);
    obj += lambda * ctx.omega(u);
    if (obj < best_obj) {
      best_obj = obj;
      best_w = u;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  ProxResult res;
  res.method = ProxResult::kBruteForce;
  res.w.assign(p, 0.0);
  res.dual.assign(p, 0.0);
  for (int k = 0; k < p; ++k) {
    res.w[k] = std::copysign(best_w[k], z[k]);
    if (z[k] == 0.0) res.w[k] = 0.0;
    res.dual[k] = (z[k] - res.w[k]) / lambda;
  }
  res.support = nonzero_support(res.w);
  attach_kkt(ctx, z, lambda, res, 1e-8, false);
  return res;
}

std::vector<int> prox_support(const NormContext& ctx, const Vector& z, double lambda) {
  check_lambda(lambda);
  const int p = ctx.dimension();
  if (static_cast<int>(z.size()) != p) throw ArgumentError("prox_support: dimension mismatch");
  auto g = modular_shift(ctx.set_function_ptr(), lambda, abs(z));
  MinimizationResult res = minimize(*g);
  // the support of the prox equals the smallest minimizer {t* < 0}
  return res.argmin_min;
}

Vector prox_by_levelsets(const NormContext& ctx, const Vector& z, double lambda,
                         const Vector& alpha_grid) {
  check_lambda(lambda);
  const int p = ctx.dimension();
  if (static_cast<int>(z.size()) != p)
    throw ArgumentError("prox_by_levelsets: dimension mismatch");
  if (alpha_grid.empty()) throw ArgumentError("prox_by_levelsets: empty grid");
  for (size_t i = 0; i < alpha_grid.size(); ++i) {
    if (!(alpha_grid[i] > 0.0))
      throw ArgumentError("prox_by_levelsets: grid values must be positive");
    if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1]))
      throw ArgumentError("prox_by_levelsets: grid must be strictly increasing");
  }

  const Vector a = abs(z);
  Vector recon(p, 0.0);
  std::vector<char> previous(p, 1);
  for (double alpha : alpha_grid) {
    // level set {|w*| > alpha} is the smallest minimizer of
    // lambda F(A) - (|z| - alpha)(A)
    Vector shifted = a;
    for (double& v : shifted) v -= alpha;
    auto g = modular_shift(ctx.set_function_ptr(), lambda, shifted);
    MinimizationResult res = minimize(*g);
    std::vector<char> level(p, 0);
    for (int k : res.argmin_min) level[k] = 1;
    for (int k = 0; k < p; ++k) {
      if (level[k] && !previous[k])
        throw DiagnosticError("prox_by_levelsets: level sets failed to nest at alpha = " +
                              std::to_string(alpha));
      if (level[k]) recon[k] = alpha;
    }
    previous = level;
  }
  for (int k = 0; k < p; ++k) {
    recon[k] = std::copysign(recon[k], z[k]);
    if (z[k] == 0.0) recon[k] = 0.0;
  }
  return recon;
}

}  // namespace subnorm
