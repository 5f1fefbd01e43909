#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "llslp/errors.hpp"

namespace llslp {

using Vec = std::vector<double>;

// Dense row-major matrix of doubles. Small sizes only; no views, no sparsity.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}
  Matrix(std::initializer_list<std::initializer_list<double>> init);

  static Matrix identity(int n);
  static Matrix fromColumns(int rows, const std::vector<Vec>& cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  Vec row(int r) const;
  Vec column(int c) const;

  Matrix transposed() const;
  Matrix times(const Matrix& other) const;
  Vec apply(const Vec& x) const;            // A x
  Vec applyTransposed(const Vec& y) const;  // A^T y

  Matrix selectColumns(const std::vector<int>& idx) const;
  Matrix selectRows(const std::vector<int>& idx) const;
  Matrix scaledColumns(const Vec& d) const;  // A Diag(d)
  Matrix scaledRows(const Vec& d) const;     // Diag(d) A

  double maxAbs() const;
  bool allFinite() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Small vector helpers used throughout.
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double normInf(const Vec& a);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& a, double t);
Vec hadamard(const Vec& a, const Vec& b);
Vec divide(const Vec& a, const Vec& b);
Vec constantVec(int n, double value);
Vec gather(const Vec& a, const std::vector<int>& idx);

// Orthonormal basis of a subspace of R^n, vectors as columns (n x k).
struct OrthonormalBasis {
  int ambientDim = 0;
  Matrix vectors;

  int dim() const { return vectors.cols(); }
};

// Result of Gauss-Jordan elimination to (I | H) form up to column permutation.
struct EliminationResult {
  std::vector<int> basisColumns;               // pivot columns, in pivot order
  Matrix reduced;                              // m x n, identity on basisColumns
  std::vector<std::pair<int, int>> pivotLog;   // (row, column) per step
};

// Default relative threshold below which a pivot candidate counts as zero.
inline constexpr double kPivotTolDefault = 1e-11;

// Process-wide pivot tolerance; set once at startup if overriding.
double pivot_tolerance();
void set_pivot_tolerance(double tol);

// Orthonormal basis of ker(A) for full row rank A; throws RankDeficient otherwise.
OrthonormalBasis kernel_basis(const Matrix& A);

// Orthonormal basis of ker(M) for an arbitrary matrix (no rank requirement).
OrthonormalBasis orthonormal_nullspace(const Matrix& M);

// Orthonormal basis of range(M).
OrthonormalBasis orthonormal_range(const Matrix& M);

// Orthonormal basis of range(M) for M of full column rank: thin QR without
// pivoting, so no rank decision is made even under extreme row scaling.
OrthonormalBasis orthonormal_columns(const Matrix& M);

// Gauss-Jordan with scale-invariant pivoting: each step picks the column whose
// best eligible entry maximizes |entry| / (2-norm of the eligible part of the
// column), ties to the smallest index.
EliminationResult row_reduce(const Matrix& A);

// Largest singular value via power iteration on the Gram matrix.
double spectral_norm(const Matrix& M);

// Top-k eigenvalues of a symmetric PSD matrix by power iteration with deflation.
std::vector<double> gram_eigenvalues(const Matrix& G, int k);

// d with A d = b and d orthogonal to ker(A).
Vec min_norm_solution(const Matrix& A, const Vec& b);

// Minimum-norm x minimizing ||A x - b||.
Vec least_squares(const Matrix& A, const Vec& b);

// Least squares for A of full column rank: no pivoting and no rank decision,
// so extreme row scaling cannot silently drop directions.
Vec least_squares_full_rank(const Matrix& A, const Vec& b);

// Indices of a maximal independent column set, sorted ascending.
std::vector<int> independent_columns(const Matrix& M);

// z minimizing ||Diag(weight) (target + fixedPart + freeBasis z)||.
// Throws DegenerateBasis when the weighted basis columns are numerically dependent.
Vec constrained_least_squares(const Vec& weight, const Vec& target, const Matrix& freeBasis,
                              const Vec& fixedPart);

}  // namespace llslp
