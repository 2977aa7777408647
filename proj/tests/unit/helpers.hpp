#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "subnorm/lovasz.hpp"
#include "subnorm/rng.hpp"
#include "subnorm/setfn.hpp"

namespace subnorm::testing {

inline SetFunctionPtr sqrt_cardinality(int p) {
  Vector h(p + 1);
  for (int k = 0; k <= p; ++k) h[k] = std::sqrt(static_cast<double>(k));
  return concave_cardinality(std::move(h));
}

// F(A) = min(|A|, 1), the l_infinity norm seed
inline SetFunctionPtr min_card_one(int p) {
  Vector h(p + 1, 1.0);
  h[0] = 0.0;
  return concave_cardinality(std::move(h));
}

// F(A) = 1/2 * 1{A cap {2} != 0} + 1{A != 0} on p = 2 (0-based element 1),
// the mixed norm 1/2|w_2| + ||w||_inf
inline SetFunctionPtr mixed_fig_norm() {
  return group_cover(2, {{1}, {0, 1}}, {0.5, 1.0});
}

// Random instance from the built-in families, polymatroid by construction.
inline SetFunctionPtr random_builtin(RngStream& rng, int p) {
  switch (rng.below(7)) {
    case 0:
      return cardinality(p);
    case 1: {
      Vector w(p);
      for (double& v : w) v = 0.2 + rng.uniform();
      return weighted_cardinality(std::move(w));
    }
    case 2: {
      // random concave nondecreasing table via decreasing positive increments
      Vector h(p + 1, 0.0);
      double inc = 0.5 + rng.uniform();
      for (int k = 1; k <= p; ++k) {
        h[k] = h[k - 1] + inc;
        inc *= 0.55 + 0.45 * rng.uniform();
      }
      return concave_cardinality(std::move(h));
    }
    case 3: {
      // random covering groups; ensure every element is covered
      std::vector<std::vector<int>> groups;
      Vector d;
      std::vector<char> covered(p, 0);
      const int extra = 1 + static_cast<int>(rng.below(3));
      for (int g = 0; g < extra; ++g) {
        const int size = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(p)));
        groups.push_back(rng.sample_subset(p, size));
        d.push_back(0.25 + rng.uniform());
        for (int j : groups.back()) covered[j] = 1;
      }
      std::vector<int> rest;
      for (int j = 0; j < p; ++j)
        if (!covered[j]) rest.push_back(j);
      if (!rest.empty()) {
        groups.push_back(rest);
        d.push_back(0.25 + rng.uniform());
      }
      return group_cover(p, std::move(groups), std::move(d));
    }
    case 4:
      return p >= 2 ? range_plus_constant(p) : cardinality(p);
    case 5:
      return interval_count(p);
    default: {
      Matrix x = rng.gaussian_matrix(p + 2, p);
      SpectralH h;
      if (rng.below(2) == 0) {
        h.kind = SpectralH::kPower;
        h.param = 0.25 + 0.75 * rng.uniform();
      } else {
        h.kind = SpectralH::kLogShift;
        h.param = 1.0 + rng.uniform();
      }
      return spectral_from_x(std::move(x), h);
    }
  }
}

inline Vector random_vector(RngStream& rng, int p, double scale = 1.0) {
  Vector v(p);
  for (double& x : v) x = scale * rng.gaussian();
  return v;
}

// all 2^p - 1 submodular polyhedron constraints plus nonnegativity
inline bool in_submodular_polyhedron(const SetFunction& f, const Vector& s, double tol) {
  const int p = f.ground_size();
  const Vector table = eval_all(f);
  for (double v : s)
    if (v < -tol) return false;
  for (uint32_t mask = 1; mask < (1u << p); ++mask) {
    double sum = 0.0;
    for (int k = 0; k < p; ++k)
      if (mask & (1u << k)) sum += s[k];
    if (sum > table[mask] + tol * (1.0 + std::fabs(table[mask]))) return false;
  }
  return true;
}

// minimum distance from target to the convex hull of the given points
// (small vertex-list analogue of the min-norm-point computation, used to
// certify extremality)
inline double hull_distance(const std::vector<Vector>& points, const Vector& target) {
  const int m = static_cast<int>(points.size());
  if (m == 0) return norm2(target);
  Vector weights(m, 0.0);
  weights[0] = 1.0;
  Vector x = points[0];
  for (size_t i = 0; i < x.size(); ++i) x[i] -= target[i];
  // Frank-Wolfe with exact line search; ample iterations at these sizes
  for (int it = 0; it < 20000; ++it) {
    int best = 0;
    double best_dot = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      double d = 0.0;
      for (size_t i = 0; i < x.size(); ++i) d += (points[j][i] - target[i]) * x[i];
      if (d < best_dot) {
        best_dot = d;
        best = j;
      }
    }
    Vector dir(x.size());
    for (size_t i = 0; i < x.size(); ++i) dir[i] = points[best][i] - target[i] - x[i];
    const double dd = dot(dir, dir);
    if (dd <= 1e-18) break;
    double step = -dot(x, dir) / dd;
    step = std::clamp(step, 0.0, 1.0);
    if (step <= 0.0) break;
    for (size_t i = 0; i < x.size(); ++i) x[i] += step * dir[i];
  }
  return norm2(x);
}

}  // namespace subnorm::testing
