#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "subnorm/errors.hpp"

namespace subnorm {

using Vector = std::vector<double>;

// Dense row-major matrix. Small sizes only (desk scale); no views, no
// expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

  Vector col(int j) const;
  Vector row(int i) const;

  // max |a_ij - a_ji| relative to the largest entry.
  double asymmetry() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

// ---- vector helpers ----
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double norm_inf(const Vector& a);
double norm1(const Vector& a);
Vector abs(const Vector& a);
// y += alpha * x
void axpy(double alpha, const Vector& x, Vector& y);

Vector matvec(const Matrix& m, const Vector& x);
Vector matvec_t(const Matrix& m, const Vector& x);  // m^T x
Matrix gram(const Matrix& x);                       // X^T X
Matrix submatrix(const Matrix& m, std::span<const int> rows, std::span<const int> cols);

struct EigResult {
  Vector values;  // ascending
  Matrix vectors; // columns are eigenvectors, empty unless requested
};

// Cyclic Jacobi rotations; iterates until the off-diagonal Frobenius norm is
// below 1e-12 * ||M||_F. Throws ArgumentError for non-symmetric input
// (asymmetry above 1e-12 relative).
EigResult sym_eig(const Matrix& m, bool want_vectors = true);

// Eigenvalues only, via Householder tridiagonalization + implicit QL.
// Used on the hot path (spectral set-function chains); cross-checked against
// sym_eig in tests. Ascending order.
Vector sym_eigvalues(const Matrix& m);

// Clip tiny negative eigenvalues of a PSD matrix to zero. Values below
// -1e-10 * scale are an error (matrix not PSD to tolerance).
void enforce_nonnegative(Vector& eigvals, double scale);

// Cholesky solve for symmetric positive definite systems.
// Throws DiagnosticError when the matrix is singular to tolerance.
Vector solve_spd(const Matrix& m, const Vector& b);

// Least squares via normal equations with escalating ridge jitter when the
// Gram matrix is singular. jitter = 0 requests plain normal equations first.
Vector lstsq(const Matrix& x, const Vector& y, double jitter = 0.0);

// Largest eigenvalue of a symmetric PSD matrix by power iteration
// (max_iter sweeps, relative tolerance rel_tol).
double power_iteration_lmax(const Matrix& q, int max_iter = 50, double rel_tol = 1e-8);

double lambda_min_spd(const Matrix& q);  // smallest eigenvalue via sym_eig

}  // namespace subnorm
