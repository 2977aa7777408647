#pragma once

#include "subnorm/lovasz.hpp"
#include "subnorm/sfm.hpp"

namespace subnorm {

struct ProxOptions {
  double kkt_tolerance = 1e-9;
  bool check_kkt = true;       // verify and throw DiagnosticError on failure
  double mnp_tolerance = 1e-10;
  MnpWarmStart* warm = nullptr;  // in/out: reused across repeated calls
};

struct ProxResult {
  Vector w;
  std::vector<int> support;
  Vector dual;  // s with w = z - lambda * s
  double kkt_dual_feasibility = 0.0;   // max(0, Omega*(z - w)/lambda - 1)
  double kkt_complementarity = 0.0;    // |(z-w)^T w - lambda Omega(w)| / (1 + lambda Omega(w))
  bool kkt_checked = false;
  enum Method { kMinNormPoint, kBruteForce } method = kMinNormPoint;
};

// argmin_w 1/2 ||w - z||^2 + lambda Omega(w), computed on |z| through the
// min-norm point of the base polytope of A -> F(A) - |z|(A)/lambda, then
// w = lambda * max(-t*, 0) with the signs of z reattached.
ProxResult prox(const NormContext& ctx, const Vector& z, double lambda,
                const ProxOptions& opts = {});

// Independent oracle (p <= 10): enumerate all p! visiting orders; on the
// monotone cone of each order the objective is quadratic and the minimizer is
// an isotonic projection (pool-adjacent-violators + clipping). Exact up to
// floating point; used only to validate prox.
ProxResult prox_bruteforce(const NormContext& ctx, const Vector& z, double lambda);

inline constexpr int kProxBruteForceCap = 10;

// Support of prox(z, lambda) without the full min-norm point: the smallest
// minimizer of A -> lambda F(A) - |z|(A).
std::vector<int> prox_support(const NormContext& ctx, const Vector& z, double lambda);

// Reconstruction through level sets: one SFM per grid value alpha > 0 gives
// {|w*| > alpha}; the stacked (nested) level sets approximate w* to within
// the grid spacing. Throws DiagnosticError if the recovered level sets fail
// to nest.
Vector prox_by_levelsets(const NormContext& ctx, const Vector& z, double lambda,
                         const Vector& alpha_grid);

}  // namespace subnorm
