#include "subnorm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subnorm {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::col(int j) const {
  Vector v(rows_);
  for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

Vector Matrix::row(int i) const {
  Vector v(cols_);
  for (int j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
  return v;
}

double Matrix::asymmetry() const {
  if (rows_ != cols_) return std::numeric_limits<double>::infinity();
  double scale = 0.0, worst = 0.0;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) {
      scale = std::max(scale, std::fabs((*this)(i, j)));
      if (j > i) worst = std::max(worst, std::fabs((*this)(i, j) - (*this)(j, i)));
    }
  return scale > 0 ? worst / scale : worst;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

double norm1(const Vector& a) {
  double s = 0.0;
  for (double v : a) s += std::fabs(v);
  return s;
}

Vector abs(const Vector& a) {
  Vector r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = std::fabs(a[i]);
  return r;
}

void axpy(double alpha, const Vector& x, Vector& y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector matvec(const Matrix& m, const Vector& x) {
  Vector y(m.rows(), 0.0);
  for (int i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Vector matvec_t(const Matrix& m, const Vector& x) {
  Vector y(m.cols(), 0.0);
  for (int i = 0; i < m.rows(); ++i) {
    const double xi = x[i];
    for (int j = 0; j < m.cols(); ++j) y[j] += m(i, j) * xi;
  }
  return y;
}

Matrix gram(const Matrix& x) {
  const int n = x.rows(), p = x.cols();
  Matrix g(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = i; j < p; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += x(k, i) * x(k, j);
      g(i, j) = s;
      g(j, i) = s;
    }
  return g;
}

Matrix submatrix(const Matrix& m, std::span<const int> rows, std::span<const int> cols) {
  Matrix s(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) s(static_cast<int>(i), static_cast<int>(j)) = m(rows[i], cols[j]);
  return s;
}

namespace {

double frobenius(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

void check_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) throw ArgumentError("sym_eig: matrix is not square");
  if (m.asymmetry() > 1e-12)
    throw ArgumentError("sym_eig: matrix asymmetry above 1e-12 relative");
}

// Householder reduction of a symmetric matrix to tridiagonal form,
// eigenvalues only (no accumulation of transforms). Classic tred + tql.
void tridiagonalize(Matrix& a, Vector& d, Vector& e) {
  const int n = a.rows();
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (int i = n - 1; i >= 1; --i) {
    const int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::fabs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (int k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  for (int i = 0; i < n; ++i) d[i] = a(i, i);
}

// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
void tql_eigenvalues(Vector& d, Vector& e) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return;
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iter == 50) throw DiagnosticError("sym_eigvalues: QL failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
}

}  // namespace

EigResult sym_eig(const Matrix& m, bool want_vectors) {
  check_symmetric(m);
  const int n = m.rows();
  EigResult res;
  res.values.assign(n, 0.0);
  Matrix a = m;
  Matrix v = want_vectors ? Matrix::identity(n) : Matrix();

  const double norm = frobenius(m);
  const double target = 1e-12 * std::max(norm, std::numeric_limits<double>::min());
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) <= target) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p), aqq = a(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        double t;
        if (tau >= 0.0)
          t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        else
          t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        if (want_vectors) {
          for (int k = 0; k < n; ++k) {
            const double vkp = v(k, p), vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  Vector diag(n);
  for (int i = 0; i < n; ++i) diag[i] = a(i, i);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return diag[i] < diag[j]; });
  for (int i = 0; i < n; ++i) res.values[i] = diag[order[i]];
  if (want_vectors) {
    res.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) res.vectors(i, j) = v(i, order[j]);
  }
  return res;
}

Vector sym_eigvalues(const Matrix& m) {
  check_symmetric(m);
  const int n = m.rows();
  if (n == 0) return {};
  if (n == 1) return {m(0, 0)};
  if (n == 2) {
    // closed form, saves the tridiagonal machinery on the hottest sizes
    const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
    const double tr = a + c;
    const double disc = std::sqrt(std::max(0.0, (a - c) * (a - c) + 4.0 * b * b));
    return {0.5 * (tr - disc), 0.5 * (tr + disc)};
  }
  Matrix a = m;
  Vector d, e;
  tridiagonalize(a, d, e);
  tql_eigenvalues(d, e);
  return d;
}

void enforce_nonnegative(Vector& eigvals, double scale) {
  const double floor = -1e-10 * std::max(1.0, scale);
  for (double& v : eigvals) {
    if (v < floor)
      throw DiagnosticError("eigenvalue " + std::to_string(v) +
                            " below PSD tolerance (scale " + std::to_string(scale) + ")");
    if (v < 0.0) v = 0.0;
  }
}

namespace {

// In-place Cholesky; returns false when a pivot drops below tol.
bool cholesky(Matrix& a, double tol) {
  const int n = a.rows();
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (d <= tol) return false;
    const double l = std::sqrt(d);
    a(j, j) = l;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / l;
    }
  }
  return true;
}

Vector cholesky_solve(const Matrix& l, const Vector& b) {
  const int n = l.rows();
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  Vector x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

}  // namespace

Vector solve_spd(const Matrix& m, const Vector& b) {
  if (m.rows() != m.cols() || static_cast<int>(b.size()) != m.rows())
    throw ArgumentError("solve_spd: dimension mismatch");
  double scale = 0.0;
  for (int i = 0; i < m.rows(); ++i) scale = std::max(scale, std::fabs(m(i, i)));
  Matrix l = m;
  if (!cholesky(l, 1e-14 * std::max(scale, 1e-300)))
    throw DiagnosticError("solve_spd: matrix singular to tolerance");
  return cholesky_solve(l, b);
}

Vector lstsq(const Matrix& x, const Vector& y, double jitter) {
  if (static_cast<int>(y.size()) != x.rows()) throw ArgumentError("lstsq: dimension mismatch");
  Matrix g = gram(x);
  Vector rhs = matvec_t(x, y);
  double scale = 0.0;
  for (int i = 0; i < g.rows(); ++i) scale = std::max(scale, g(i, i));
  double j = jitter;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Matrix a = g;
    for (int i = 0; i < a.rows(); ++i) a(i, i) += j * std::max(scale, 1.0);
    Matrix l = a;
    if (cholesky(l, 1e-14 * std::max(scale, 1e-300))) return cholesky_solve(l, rhs);
    if (jitter == 0.0)
      throw DiagnosticError("lstsq: system singular to tolerance (no jitter requested)");
    j *= 100.0;
  }
  throw DiagnosticError("lstsq: rank-deficient system, jitter escalation failed");
}

double power_iteration_lmax(const Matrix& q, int max_iter, double rel_tol) {
  const int n = q.rows();
  if (n == 0) return 0.0;
  Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = matvec(q, v);
    const double nw = norm2(w);
    if (nw == 0.0) return 0.0;
    for (double& c : w) c /= nw;
    const double next = dot(w, matvec(q, w));
    const bool done = std::fabs(next - lambda) <= rel_tol * std::max(1.0, std::fabs(next));
    lambda = next;
    v = std::move(w);
    if (done) break;
  }
  return lambda;
}

double lambda_min_spd(const Matrix& q) {
  EigResult e = sym_eig(q, false);
  return e.values.empty() ? 0.0 : e.values.front();
}

}  // namespace subnorm
