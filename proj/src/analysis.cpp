#include "subnorm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "subnorm/csv.hpp"
#include "subnorm/errors.hpp"

namespace subnorm {

namespace {

std::vector<int> sorted_subset(std::span<const int> j, int p, const char* who) {
  std::vector<int> s(j.begin(), j.end());
  std::sort(s.begin(), s.end());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] >= p) throw ArgumentError(std::string(who) + ": index out of range");
    if (i > 0 && s[i] == s[i - 1]) throw ArgumentError(std::string(who) + ": duplicate index");
  }
  return s;
}

}  // namespace

bool rho_is_exact(const SetFunction& f, std::span<const int> j) {
  return f.ground_size() - static_cast<int>(j.size()) <= kDualBruteForceCap;
}

double rho(const SetFunction& f, std::span<const int> j) {
  const int p = f.ground_size();
  auto jj = sorted_subset(j, p, "rho");
  const std::vector<int> comp = complement_of(jj, p);
  const int m = static_cast<int>(comp.size());
  if (m == 0) throw ArgumentError("rho: J^c must be nonempty");
  const double fj = jj.empty() ? 0.0 : eval_unchecked(f, jj);

  auto gain_over = [&](const std::vector<int>& b_local) {
    // F(B u J) - F(J) over F(B), B given as indices into comp
    std::vector<int> bu = jj;
    std::vector<int> b;
    b.reserve(b_local.size());
    for (int i : b_local) b.push_back(comp[i]);
    bu.insert(bu.end(), b.begin(), b.end());
    std::sort(bu.begin(), bu.end());
    std::sort(b.begin(), b.end());
    return (eval_unchecked(f, bu) - fj) / eval_unchecked(f, b);
  };

  if (m <= kDualBruteForceCap) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> b_local;
    for (uint32_t mask = 1; mask < (1u << m); ++mask) {
      b_local.clear();
      for (int i = 0; i < m; ++i)
        if (mask & (1u << i)) b_local.push_back(i);
      best = std::min(best, gain_over(b_local));
    }
    return best;
  }

  // Heuristic beyond the cap: alternate greedy element swaps improving the
  // ratio, from singleton starts. Upper-bound estimate only.
  double best = std::numeric_limits<double>::infinity();
  for (int start = 0; start < m; ++start) {
    std::vector<char> in(m, 0);
    in[start] = 1;
    std::vector<int> cur{start};
    double cur_ratio = gain_over(cur);
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < m; ++i) {
        std::vector<int> cand;
        for (int k = 0; k < m; ++k)
          if ((k == i) != static_cast<bool>(in[k])) cand.push_back(k);
        if (cand.empty()) continue;
        const double r = gain_over(cand);
        if (r < cur_ratio - 1e-14) {
          cur_ratio = r;
          in[i] ^= 1;
          improved = true;
        }
      }
    }
    best = std::min(best, cur_ratio);
  }
  return best;
}

double equivalence_constant(const SetFunction& f, std::span<const int> j) {
  auto jj = sorted_subset(j, f.ground_size(), "equivalence_constant");
  if (jj.empty()) throw ArgumentError("equivalence_constant: J must be nonempty");
  const int m = static_cast<int>(jj.size());
  double max_singleton = 0.0;
  for (int k = 0; k < f.ground_size(); ++k) {
    const int idx[1] = {k};
    max_singleton = std::max(max_singleton, eval_unchecked(f, idx));
  }
  if (m > kEquivalenceExactCap) return std::sqrt(static_cast<double>(m)) * max_singleton;

  auto fj = restrict_to(
      std::shared_ptr<const SetFunction>(&f, [](const SetFunction*) {}), jj);
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  auto chain = fj->chain();
  do {
    chain->reset();
    double prev = 0.0, sq = 0.0;
    for (int k = 0; k < m; ++k) {
      const double cur = chain->extend(perm[k]);
      sq += (cur - prev) * (cur - prev);
      prev = cur;
    }
    best = std::max(best, sq);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best);
}

ConcentrationBound concentration_bound(const NormContext& ctx, const Matrix& q, double t) {
  if (q.rows() != ctx.dimension() || q.cols() != ctx.dimension())
    throw ArgumentError("concentration_bound: Q dimension mismatch");
  const StructureReport& rep = ctx.structure();
  ConcentrationBound bound;
  for (const auto& a : rep.stable_inseparable) {
    const double fa = eval_unchecked(ctx.set_function(), a);
    double ones_q_ones = 0.0;
    for (int i : a)
      for (int k : a) ones_q_ones += q(i, k);
    const double weight = std::ldexp(1.0, static_cast<int>(a.size()));
    if (ones_q_ones <= 0.0) {
      // degenerate block: the linear form is almost surely 0
      if (t <= 0.0) bound.raw += weight;
      continue;
    }
    const double exponent = -0.5 * t * t * fa * fa / ones_q_ones;
    bound.raw += weight * std::exp(exponent);
  }
  bound.clipped = std::min(bound.raw, 1.0);
  return bound;
}

RecoveryReport support_recovery_condition(const LeastSquaresProblem& prob,
                                          const NormContext& ctx, const Vector& w_star,
                                          double sigma, double lambda) {
  const int p = ctx.dimension();
  if (static_cast<int>(w_star.size()) != p || prob.p != p)
    throw ArgumentError("support_recovery_condition: dimension mismatch");

  RecoveryReport rep;
  rep.lambda = lambda;
  rep.sigma = sigma;
  rep.n = prob.n;

  std::vector<int> supp;
  double nu = std::numeric_limits<double>::infinity();
  for (int k = 0; k < p; ++k)
    if (w_star[k] != 0.0) {
      supp.push_back(k);
      nu = std::min(nu, std::fabs(w_star[k]));
    }
  if (supp.empty()) throw ArgumentError("support_recovery_condition: w* must be nonzero");
  rep.nu = nu;

  rep.stable_support = smallest_stable_superset(ctx.set_function(), supp);
  const auto& jj = rep.stable_support;
  std::vector<int> comp = complement_of(jj, p);

  rep.rho = comp.empty() ? 1.0 : rho(ctx.set_function(), jj);
  rep.equivalence = equivalence_constant(ctx.set_function(), jj);

  Matrix q_jj = submatrix(prob.q, jj, jj);
  const double kappa = lambda_min_spd(q_jj);
  rep.kappa = std::max(kappa, 0.0);
  rep.q_jj_invertible = kappa > 1e-12 * std::max(1.0, q_jj(0, 0));
  if (!rep.q_jj_invertible) {
    rep.kappa = 0.0;
    rep.irrepresentability = std::numeric_limits<double>::infinity();
    rep.eta = -std::numeric_limits<double>::infinity();
    rep.condition_holds = false;
    return rep;
  }

  auto f_j = restrict_to(ctx.set_function_ptr(), jj);
  NormContext ctx_j = NormContext::create(f_j);
  auto f_contr = contract_by(ctx.set_function_ptr(), jj);
  NormContext ctx_contr = NormContext::create(f_contr);  // J stable: proper norm

  Vector u(comp.size(), 0.0);
  for (size_t idx = 0; idx < comp.size(); ++idx) {
    Vector q_jc(jj.size());
    for (size_t i = 0; i < jj.size(); ++i) q_jc[i] = prob.q(jj[i], comp[idx]);
    Vector solved = solve_spd(q_jj, q_jc);
    u[idx] = ctx_j.omega(solved);
  }
  rep.irrepresentability = comp.empty() ? 0.0 : ctx_contr.dual_norm(u);
  rep.eta = 1.0 - rep.irrepresentability;
  rep.lambda_threshold = rep.kappa * rep.nu / (2.0 * rep.equivalence);
  rep.condition_holds = rep.eta > 0.0 && lambda <= rep.lambda_threshold * (1.0 + 1e-12);

  if (rep.eta > 0.0 && sigma > 0.0) {
    const double t =
        lambda * rep.eta * rep.rho * std::sqrt(static_cast<double>(prob.n)) / (2.0 * sigma);
    rep.failure_probability = concentration_bound(ctx, prob.q, t).clipped;
  }
  return rep;
}

ConsistencyBound consistency_bounds(const LeastSquaresProblem& prob, const NormContext& ctx,
                                    const Vector& w_star, double lambda, int sample_count,
                                    uint64_t seed) {
  const int p = ctx.dimension();
  ConsistencyBound out;
  std::vector<int> supp;
  for (int k = 0; k < p; ++k)
    if (w_star[k] != 0.0) supp.push_back(k);
  out.stable_support = smallest_stable_superset(ctx.set_function(), supp);
  const auto& jj = out.stable_support;
  std::vector<int> comp = complement_of(jj, p);
  out.rho = comp.empty() ? 1.0 : rho(ctx.set_function(), jj);
  out.equivalence = equivalence_constant(ctx.set_function(), jj);
  out.samples = sample_count;

  NormContext ctx_j = NormContext::create(restrict_to(ctx.set_function_ptr(), jj));
  NormContext ctx_contr =
      NormContext::create(contract_by(ctx.set_function_ptr(), jj), false);

  RngStream rng(seed);
  auto ratio_of = [&](const Vector& delta) {
    double num = dot(delta, matvec(prob.q, delta));
    double den = 0.0;
    for (size_t i = 0; i < jj.size(); ++i) den += delta[jj[i]] * delta[jj[i]];
    return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
  };
  auto assemble = [&](const Vector& dj, const Vector& dc, double cone_fraction) {
    // scale the off-support block onto the cone boundary fraction
    Vector delta(p, 0.0);
    for (size_t i = 0; i < jj.size(); ++i) delta[jj[i]] = dj[i];
    if (!comp.empty() && norm_inf(dc) > 0.0) {
      const double omega_j = ctx_j.omega(dj);
      const double omega_c = ctx_contr.omega(dc);
      const double target = 3.0 * cone_fraction * omega_j;
      const double scale = omega_c > 0.0 ? target / omega_c : 0.0;
      for (size_t i = 0; i < comp.size(); ++i) delta[comp[i]] = scale * dc[i];
    }
    return delta;
  };

  double best = std::numeric_limits<double>::infinity();
  Vector best_delta;
  for (int s = 0; s < sample_count; ++s) {
    Vector dj = rng.gaussian_vector(static_cast<int>(jj.size()));
    Vector dc = rng.gaussian_vector(static_cast<int>(comp.size()));
    const double frac = (s % 4 == 0) ? 0.0 : rng.uniform();
    Vector delta = assemble(dj, dc, frac);
    const double r = ratio_of(delta);
    if (r < best) {
      best = r;
      best_delta = delta;
    }
  }
  // local refinement around the best sample
  double step = 0.5;
  for (int it = 0; it < 200 && !best_delta.empty(); ++it) {
    Vector dj(jj.size()), dc(comp.size());
    for (size_t i = 0; i < jj.size(); ++i)
      dj[i] = best_delta[jj[i]] + step * rng.gaussian();
    for (size_t i = 0; i < comp.size(); ++i)
      dc[i] = best_delta[comp[i]] + step * rng.gaussian();
    const double frac = std::min(1.0, std::fabs(rng.gaussian()));
    Vector delta = assemble(dj, dc, frac);
    const double r = ratio_of(delta);
    if (r < best) {
      best = r;
      best_delta = delta;
    } else {
      step *= 0.97;
    }
  }
  out.kappa_estimate = best;
  const double denom = best * out.rho * out.rho;
  out.omega_error_bound = 24.0 * out.equivalence * out.equivalence * lambda / denom;
  out.prediction_error_bound =
      36.0 * out.equivalence * out.equivalence * lambda * lambda / denom;
  return out;
}

NormDecomposition decompose_norm(const NormContext& ctx, std::span<const int> j,
                                 const Vector& w) {
  const int p = ctx.dimension();
  auto jj = sorted_subset(j, p, "decompose_norm");
  std::vector<int> comp = complement_of(jj, p);
  NormDecomposition out;
  out.omega = ctx.omega(w);

  double part = 0.0;
  if (!jj.empty()) {
    NormContext ctx_j = NormContext::create(restrict_to(ctx.set_function_ptr(), jj));
    Vector wj(jj.size());
    for (size_t i = 0; i < jj.size(); ++i) wj[i] = w[jj[i]];
    part += ctx_j.omega(wj);
  }
  if (!comp.empty()) {
    NormContext ctx_c = NormContext::create(contract_by(ctx.set_function_ptr(), jj), false);
    Vector wc(comp.size());
    for (size_t i = 0; i < comp.size(); ++i) wc[i] = w[comp[i]];
    part += ctx_c.omega(wc);
  }
  out.decomposed = part;

  double min_j = std::numeric_limits<double>::infinity(), max_c = 0.0;
  for (int k : jj) min_j = std::min(min_j, std::fabs(w[k]));
  for (int k : comp) max_c = std::max(max_c, std::fabs(w[k]));
  out.equality_certified = min_j >= max_c;
  return out;
}

StablePatternReport verify_stable_patterns(const SetFunctionPtr& f, int trials, int n,
                                           double lambda, uint64_t seed) {
  const int p = f->ground_size();
  if (n < p) throw ArgumentError("verify_stable_patterns: requires n >= p");
  if (!(lambda > 0.0)) throw ArgumentError("verify_stable_patterns: lambda must be positive");
  NormContext ctx = NormContext::create(f);

  StablePatternReport rep;
  rep.trials = trials;
  rep.support_size_histogram.assign(p + 1, 0);
  for (int trial = 0; trial < trials; ++trial) {
    RngStream rng = RngStream::stream(seed, static_cast<uint64_t>(trial));
    Matrix x = rng.gaussian_matrix(n, p);
    for (int jcol = 0; jcol < p; ++jcol) {
      double nrm = 0.0;
      for (int i = 0; i < n; ++i) nrm += x(i, jcol) * x(i, jcol);
      nrm = std::sqrt(nrm);
      for (int i = 0; i < n; ++i) x(i, jcol) /= nrm;
    }
    Vector y = rng.gaussian_vector(n);
    LeastSquaresProblem prob = LeastSquaresProblem::create(std::move(x), std::move(y));

    SolveOptions opts;
    opts.rel_tol = 1e-12;  // avoid spurious tiny support entries
    opts.max_iter = 50000;
    SolverTrace tr = fista(prob, ctx, lambda, opts);

    std::vector<int> supp;
    for (int k = 0; k < p; ++k)
      if (std::fabs(tr.w[k]) > 1e-8) supp.push_back(k);
    ++rep.support_size_histogram[supp.size()];
    if (!is_stable(*f, supp)) {
      ++rep.violations;
      if (rep.first_offender.empty()) {
        std::ostringstream os;
        os << "trial=" << trial << " seed=" << seed << " lambda=" << lambda << " support={";
        for (size_t i = 0; i < supp.size(); ++i) os << (i ? "," : "") << supp[i] + 1;
        os << "} w=[";
        for (int k = 0; k < p; ++k) os << (k ? "," : "") << format_double(tr.w[k]);
        os << "]";
        rep.first_offender = os.str();
      }
    }
  }
  return rep;
}

}  // namespace subnorm
