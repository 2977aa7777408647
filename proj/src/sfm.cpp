#include "subnorm/sfm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "subnorm/errors.hpp"

namespace subnorm {

Vector base_vertex(const SetFunction& g, std::span<const int> order) {
  const int p = g.ground_size();
  if (static_cast<int>(order.size()) != p)
    throw ArgumentError("base_vertex: order must be a permutation of the ground set");
  Vector s(p, 0.0);
  auto chain = g.chain();
  chain->reset();
  double prev = 0.0;
  for (int j : order) {
    const double cur = chain->extend(j);
    s[j] = cur - prev;
    prev = cur;
  }
  return s;
}

Vector linear_oracle(const SetFunction& g, const Vector& d) {
  const int p = g.ground_size();
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (d[i] != d[j]) return d[i] < d[j];
    return i < j;
  });
  return base_vertex(g, order);
}

namespace {

// Corral bookkeeping: Gram matrix of the vertices with an incrementally
// maintained Cholesky factor of (Gram + jitter).
class Corral {
 public:
  explicit Corral(int p) : p_(p) {}

  int size() const { return static_cast<int>(verts_.size()); }
  const std::vector<Vector>& vertices() const { return verts_; }
  const std::vector<std::vector<int>>& orders() const { return orders_; }

  bool contains(const Vector& v) const {
    for (const auto& u : verts_) {
      bool same = true;
      for (int i = 0; i < p_ && same; ++i)
        if (std::fabs(u[i] - v[i]) > 1e-13 * (1.0 + std::fabs(u[i]))) same = false;
      if (same) return true;
    }
    return false;
  }

  void add(Vector v, std::vector<int> order) {
    const int m = size();
    gram_.resize(m + 1);
    gram_[m].resize(m + 1);
    for (int i = 0; i < m; ++i) gram_[m][i] = dot(v, verts_[i]);
    gram_[m][m] = dot(v, v);
    verts_.push_back(std::move(v));
    orders_.push_back(std::move(order));
    extend_cholesky();
  }

  void remove(int idx) {
    verts_.erase(verts_.begin() + idx);
    orders_.erase(orders_.begin() + idx);
    gram_.erase(gram_.begin() + idx);
    for (auto& row : gram_)
      if (static_cast<int>(row.size()) > idx) row.erase(row.begin() + idx);
    refactor_from(idx);
  }

  // Affine minimizer coefficients: solve (Gram) beta = 1, alpha = beta / sum.
  Vector affine_coefficients() const {
    const int m = size();
    Vector beta = solve_lower(Vector(m, 1.0));
    const double total = std::accumulate(beta.begin(), beta.end(), 0.0);
    if (total == 0.0) throw DiagnosticError("min_norm_point: degenerate corral system");
    for (double& b : beta) b /= total;
    return beta;
  }

  Vector combine(const Vector& alpha) const {
    Vector y(p_, 0.0);
    for (int i = 0; i < size(); ++i) axpy(alpha[i], verts_[i], y);
    return y;
  }

 private:
  // Cholesky of the corral Gram with escalating Tikhonov jitter on breakdown.
  void extend_cholesky() {
    const int m = size() - 1;
    chol_.resize(m + 1);
    chol_[m].assign(m + 1, 0.0);
    if (!append_row(m)) refactor_from(0);
  }

  bool append_row(int r) {
    double diag_scale = 1e-300;
    for (int i = 0; i <= r; ++i) diag_scale = std::max(diag_scale, gram_[i][i]);
    for (int k = 0; k < r; ++k) {
      double s = gram_[r][k];
      for (int i = 0; i < k; ++i) s -= chol_[r][i] * chol_[k][i];
      chol_[r][k] = s / chol_[k][k];
    }
    double d = gram_[r][r] + jitter_ * diag_scale;
    for (int i = 0; i < r; ++i) d -= chol_[r][i] * chol_[r][i];
    if (d <= 1e-15 * diag_scale) return false;
    chol_[r][r] = std::sqrt(d);
    return true;
  }

  void refactor_from(int start) {
    const int m = size();
    chol_.resize(m);
    for (int r = 0; r < m; ++r) chol_[r].assign(r + 1, 0.0);
    jitter_ = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      bool ok = true;
      for (int r = 0; r < m && ok; ++r) ok = append_row(r);
      if (ok) return;
      jitter_ = (jitter_ == 0.0) ? 1e-12 : jitter_ * 100.0;
    }
    throw DiagnosticError("min_norm_point: corral Gram factorization failed");
    (void)start;
  }

  Vector solve_lower(Vector b) const {
    const int m = size();
    Vector y(m);
    for (int i = 0; i < m; ++i) {
      double s = b[i];
      for (int k = 0; k < i; ++k) s -= chol_[i][k] * y[k];
      y[i] = s / chol_[i][i];
    }
    Vector x(m);
    for (int i = m - 1; i >= 0; --i) {
      double s = y[i];
      for (int k = i + 1; k < m; ++k) s -= chol_[k][i] * x[k];
      x[i] = s / chol_[i][i];
    }
    return x;
  }

  int p_;
  std::vector<Vector> verts_;
  std::vector<std::vector<int>> orders_;
  std::vector<std::vector<double>> gram_;
  std::vector<std::vector<double>> chol_;
  double jitter_ = 0.0;
};

std::vector<int> identity_order(int p) {
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

std::vector<int> order_of_sorted(const Vector& d) {
  std::vector<int> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (d[i] != d[j]) return d[i] < d[j];
    return i < j;
  });
  return order;
}

}  // namespace

MnpState min_norm_point(const SetFunction& g, const MnpOptions& opts, const MnpWarmStart* warm) {
  const int p = g.ground_size();
  MnpState st;
  st.tolerance = opts.tolerance;
  const int max_major = opts.max_major_cycles > 0 ? opts.max_major_cycles : 100 * p * p + 100;

  Corral corral(p);
  Vector weights;

  if (warm && !warm->orders.empty()) {
    for (size_t i = 0; i < warm->orders.size(); ++i) {
      Vector v = base_vertex(g, warm->orders[i]);
      if (corral.contains(v)) continue;
      corral.add(std::move(v), warm->orders[i]);
      weights.push_back(i < warm->weights.size() ? std::max(warm->weights[i], 0.0) : 0.0);
    }
  }
  if (corral.size() == 0) {
    auto order = identity_order(p);
    corral.add(base_vertex(g, order), order);
    weights.assign(1, 1.0);
  }
  double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (wsum <= 0.0) {
    weights.assign(corral.size(), 1.0 / corral.size());
  } else {
    for (double& w : weights) w /= wsum;
  }

  Vector x;
  double x_norm2 = 0.0;

  // minor cycles: move to the affine minimizer over the corral, dropping
  // vertices that leave the simplex, until x is corral-optimal
  auto minor_optimize = [&]() {
    for (int minor = 0; minor < 10 * p + 100; ++minor) {
      ++st.minor_cycles;
      Vector alpha = corral.affine_coefficients();
      double amin = *std::min_element(alpha.begin(), alpha.end());
      if (amin > -1e-12) {
        weights = alpha;
        for (double& w : weights) w = std::max(w, 0.0);
        break;
      }
      // largest step toward alpha staying inside the simplex
      double theta = 1.0;
      for (int i = 0; i < corral.size(); ++i)
        if (alpha[i] < 0.0 && weights[i] - alpha[i] > 0.0)
          theta = std::min(theta, weights[i] / (weights[i] - alpha[i]));
      for (int i = 0; i < corral.size(); ++i)
        weights[i] = (1.0 - theta) * weights[i] + theta * alpha[i];
      // drop one zeroed vertex per pass (ties: smallest weight)
      int drop = -1;
      double wmin = 1e-10;
      for (int i = 0; i < corral.size(); ++i)
        if (weights[i] <= wmin) {
          wmin = weights[i];
          drop = i;
        }
      if (drop < 0) break;  // numerical safeguard: accept the interior point
      corral.remove(drop);
      weights.erase(weights.begin() + drop);
    }
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total <= 0.0) throw DiagnosticError("min_norm_point: corral weights collapsed");
    for (double& w : weights) w /= total;
    x = corral.combine(weights);
    x_norm2 = dot(x, x);
  };

  minor_optimize();  // establish corral optimality before the first oracle call
  double prev_norm2 = std::numeric_limits<double>::infinity();

  for (st.major_cycles = 1; st.major_cycles <= max_major; ++st.major_cycles) {
    // ||x||^2 must not increase across major cycles
    if (x_norm2 > prev_norm2 + 1e-9 * (1.0 + prev_norm2))
      throw DiagnosticError("min_norm_point: ||x||^2 increased across major cycles");
    prev_norm2 = x_norm2;

    auto order = order_of_sorted(x);
    Vector v = base_vertex(g, order);
    st.gap = x_norm2 - dot(x, v);
    if (st.gap <= opts.tolerance * (1.0 + x_norm2)) {
      st.converged = true;
      break;
    }
    if (corral.contains(v)) {
      // x is corral-optimal, so a corral vertex cannot improve: numerically
      // converged at this gap
      st.converged = true;
      break;
    }
    corral.add(std::move(v), std::move(order));
    weights.push_back(0.0);
    minor_optimize();
  }

  st.x = std::move(x);
  st.corral = corral.vertices();
  st.orders = corral.orders();
  st.weights = weights;
  if (!st.converged) {
    std::ostringstream msg;
    msg << "min_norm_point: no convergence after " << max_major
        << " major cycles (gap " << st.gap << ", tol " << opts.tolerance << ")";
    throw DiagnosticError(msg.str());
  }
  return st;
}

namespace {

double set_value(const SetFunction& g, const std::vector<int>& a) {
  return a.empty() ? 0.0 : eval_unchecked(g, a);
}

double certificate_value(const Vector& s) {
  double v = 0.0;
  for (double c : s) v += std::min(0.0, c);
  return v;
}

}  // namespace

MinimizationResult minimize(const SetFunction& g, const MinimizeOptions& opts,
                            const MnpWarmStart* warm) {
  const int p = g.ground_size();
  MinimizationResult res;

  MnpOptions mnp_opts;
  mnp_opts.tolerance = opts.mnp_tolerance;
  MnpState st = min_norm_point(g, mnp_opts, warm);
  res.certificate = st.x;
  res.mnp_major_cycles = st.major_cycles;

  // threshold the min-norm point, resolving the 0-boundary by value
  const double band = 1e-9 * (1.0 + norm_inf(st.x));
  std::vector<int> neg, nonpos;
  for (int k = 0; k < p; ++k) {
    if (st.x[k] < -band) neg.push_back(k);
    if (st.x[k] <= band) nonpos.push_back(k);
  }
  res.argmin_min = neg;
  res.argmin_max = nonpos;

  if (p <= opts.brute_force_cap) {
    const Vector table = eval_all(g);
    uint32_t best = 0;
    for (uint32_t mask = 1; mask < table.size(); ++mask)
      if (table[mask] < table[best]) best = mask;
    res.argmin = mask_to_indices(best, p);
    res.value = table[best];
    // minimizers form a lattice; report its bottom and top exactly
    const double tie = 1e-12 * (1.0 + std::fabs(res.value));
    uint32_t meet = 0xffffffffu, join = 0;
    for (uint32_t mask = 0; mask < table.size(); ++mask)
      if (table[mask] <= res.value + tie) {
        meet &= mask;
        join |= mask;
      }
    res.argmin_min = mask_to_indices(meet, p);
    res.argmin_max = mask_to_indices(join, p);
  } else {
    const double v_neg = set_value(g, neg);
    const double v_nonpos = set_value(g, nonpos);
    if (v_neg <= v_nonpos) {
      res.argmin = neg;
      res.value = v_neg;
    } else {
      res.argmin = nonpos;
      res.value = v_nonpos;
    }
  }

  res.gap = res.value - certificate_value(res.certificate);
  if (res.gap > opts.gap_tolerance * (1.0 + std::fabs(res.value))) {
    std::ostringstream msg;
    msg << "minimize: duality gap " << res.gap << " above tolerance; candidates {x<0} -> "
        << set_value(g, neg) << ", {x<=0} -> " << set_value(g, nonpos);
    throw DiagnosticError(msg.str());
  }
  return res;
}

}  // namespace subnorm
