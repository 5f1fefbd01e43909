#include "llslp/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace llslp {

namespace {
double g_pivotTol = kPivotTolDefault;
}

double pivot_tolerance() { return g_pivotTol; }

void set_pivot_tolerance(double tol) {
  if (!(tol > 0.0) || !(tol < 1.0)) throw Error("pivot tolerance must be in (0, 1)");
  g_pivotTol = tol;
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init) {
  rows_ = static_cast<int>(init.size());
  cols_ = rows_ > 0 ? static_cast<int>(init.begin()->size()) : 0;
  data_.reserve(static_cast<size_t>(rows_) * cols_);
  for (const auto& r : init) {
    if (static_cast<int>(r.size()) != cols_) throw DimensionMismatch("ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(int n) {
  Matrix I(n, n);
  for (int i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

Matrix Matrix::fromColumns(int rows, const std::vector<Vec>& cols) {
  Matrix M(rows, static_cast<int>(cols.size()));
  for (int j = 0; j < M.cols(); ++j) {
    if (static_cast<int>(cols[j].size()) != rows) throw DimensionMismatch("column length mismatch");
    for (int i = 0; i < rows; ++i) M(i, j) = cols[j][i];
  }
  return M;
}

Vec Matrix::row(int r) const {
  Vec out(cols_);
  for (int j = 0; j < cols_; ++j) out[j] = (*this)(r, j);
  return out;
}

Vec Matrix::column(int c) const {
  Vec out(rows_);
  for (int i = 0; i < rows_; ++i) out[i] = (*this)(i, c);
  return out;
}

Matrix Matrix::transposed() const {
  Matrix T(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
  return T;
}

Matrix Matrix::times(const Matrix& other) const {
  if (cols_ != other.rows()) throw DimensionMismatch("matrix product shape");
  Matrix P(rows_, other.cols());
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (int j = 0; j < other.cols(); ++j) P(i, j) += a * other(k, j);
    }
  return P;
}

Vec Matrix::apply(const Vec& x) const {
  if (static_cast<int>(x.size()) != cols_) throw DimensionMismatch("apply shape");
  Vec y(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

Vec Matrix::applyTransposed(const Vec& y) const {
  if (static_cast<int>(y.size()) != rows_) throw DimensionMismatch("applyTransposed shape");
  Vec x(cols_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    const double yi = y[i];
    if (yi == 0.0) continue;
    for (int j = 0; j < cols_; ++j) x[j] += (*this)(i, j) * yi;
  }
  return x;
}

Matrix Matrix::selectColumns(const std::vector<int>& idx) const {
  Matrix S(rows_, static_cast<int>(idx.size()));
  for (int j = 0; j < S.cols(); ++j)
    for (int i = 0; i < rows_; ++i) S(i, j) = (*this)(i, idx[j]);
  return S;
}

Matrix Matrix::selectRows(const std::vector<int>& idx) const {
  Matrix S(static_cast<int>(idx.size()), cols_);
  for (int i = 0; i < S.rows(); ++i)
    for (int j = 0; j < cols_; ++j) S(i, j) = (*this)(idx[i], j);
  return S;
}

Matrix Matrix::scaledColumns(const Vec& d) const {
  if (static_cast<int>(d.size()) != cols_) throw DimensionMismatch("scaledColumns shape");
  Matrix S(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) S(i, j) = (*this)(i, j) * d[j];
  return S;
}

Matrix Matrix::scaledRows(const Vec& d) const {
  if (static_cast<int>(d.size()) != rows_) throw DimensionMismatch("scaledRows shape");
  Matrix S(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) S(i, j) = (*this)(i, j) * d[i];
  return S;
}

double Matrix::maxAbs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::fabs(v));
  return m;
}

bool Matrix::allFinite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

double dot(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double normInf(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

Vec add(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vec sub(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vec scale(const Vec& a, double t) {
  Vec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] * t;
  return out;
}

Vec hadamard(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Vec divide(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] / b[i];
  return out;
}

Vec constantVec(int n, double value) { return Vec(static_cast<size_t>(n), value); }

Vec gather(const Vec& a, const std::vector<int>& idx) {
  Vec out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out[i] = a[idx[i]];
  return out;
}

namespace {

// Householder QR with optional column pivoting: A P = Q R, Q accumulated
// explicitly (m x m). Rank decided against pivot_tolerance() relative to the largest
// original column norm.
struct QrFactors {
  Matrix Q;               // m x m orthogonal
  Matrix R;               // m x n upper triangular (column-permuted input)
  std::vector<int> perm;  // R's column j corresponds to input column perm[j]
  int rank = 0;
};

QrFactors householder_qr(const Matrix& A, bool pivot) {
  const int m = A.rows(), n = A.cols();
  QrFactors f;
  f.Q = Matrix::identity(m);
  f.R = A;
  f.perm.resize(n);
  for (int j = 0; j < n; ++j) f.perm[j] = j;

  double maxOrigNorm = 0.0;
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += f.R(i, j) * f.R(i, j);
    maxOrigNorm = std::max(maxOrigNorm, std::sqrt(acc));
  }

  const int steps = std::min(m, n);
  int k = 0;
  for (; k < steps; ++k) {
    if (pivot) {
      int best = k;
      double bestNorm = -1.0;
      for (int j = k; j < n; ++j) {
        double acc = 0.0;
        for (int i = k; i < m; ++i) acc += f.R(i, j) * f.R(i, j);
        if (acc > bestNorm) {
          bestNorm = acc;
          best = j;
        }
      }
      if (std::sqrt(std::max(bestNorm, 0.0)) <= pivot_tolerance() * std::max(maxOrigNorm, 1e-300)) break;
      if (best != k) {
        for (int i = 0; i < m; ++i) std::swap(f.R(i, k), f.R(i, best));
        std::swap(f.perm[k], f.perm[best]);
      }
    }
    double alpha = 0.0;
    for (int i = k; i < m; ++i) alpha += f.R(i, k) * f.R(i, k);
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    if (f.R(k, k) > 0) alpha = -alpha;
    Vec v(m - k, 0.0);
    v[0] = f.R(k, k) - alpha;
    for (int i = k + 1; i < m; ++i) v[i - k] = f.R(i, k);
    const double vnorm2 = dot(v, v);
    if (vnorm2 == 0.0) continue;
    const double beta = 2.0 / vnorm2;
    for (int j = k; j < n; ++j) {
      double s = 0.0;
      for (int i = k; i < m; ++i) s += v[i - k] * f.R(i, j);
      s *= beta;
      for (int i = k; i < m; ++i) f.R(i, j) -= s * v[i - k];
    }
    f.R(k, k) = alpha;
    for (int i = k + 1; i < m; ++i) f.R(i, k) = 0.0;
    // Q <- Q H_k with H_k = I - beta v v^T acting on rows k..m-1.
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int r = k; r < m; ++r) s += f.Q(i, r) * v[r - k];
      s *= beta;
      for (int r = k; r < m; ++r) f.Q(i, r) -= s * v[r - k];
    }
  }

  const double diagTol = std::max(pivot_tolerance() * maxOrigNorm, 1e-300);
  f.rank = 0;
  for (int j = 0; j < std::min(m, n); ++j)
    if (std::fabs(f.R(j, j)) > diagTol) ++f.rank;
  if (pivot) f.rank = std::min(f.rank, k);
  return f;
}

Vec backSubstitute(const Matrix& R, const Vec& rhs, int r) {
  Vec z(r, 0.0);
  for (int i = r - 1; i >= 0; --i) {
    double acc = rhs[i];
    for (int j = i + 1; j < r; ++j) acc -= R(i, j) * z[j];
    z[i] = acc / R(i, i);
  }
  return z;
}

}  // namespace

OrthonormalBasis orthonormal_nullspace(const Matrix& M) {
  // QR of M^T with column pivoting; the trailing columns of Q span ker(M).
  const Matrix Mt = M.transposed();
  QrFactors f = householder_qr(Mt, true);
  const int n = M.cols();
  const int r = f.rank;
  OrthonormalBasis basis;
  basis.ambientDim = n;
  basis.vectors = Matrix(n, n - r);
  for (int j = r; j < n; ++j)
    for (int i = 0; i < n; ++i) basis.vectors(i, j - r) = f.Q(i, j);
  return basis;
}

OrthonormalBasis orthonormal_range(const Matrix& M) {
  QrFactors f = householder_qr(M, true);
  OrthonormalBasis basis;
  basis.ambientDim = M.rows();
  basis.vectors = Matrix(M.rows(), f.rank);
  for (int j = 0; j < f.rank; ++j)
    for (int i = 0; i < M.rows(); ++i) basis.vectors(i, j) = f.Q(i, j);
  return basis;
}

OrthonormalBasis orthonormal_columns(const Matrix& M) {
  QrFactors f = householder_qr(M, false);
  OrthonormalBasis basis;
  basis.ambientDim = M.rows();
  basis.vectors = Matrix(M.rows(), M.cols());
  for (int j = 0; j < M.cols(); ++j)
    for (int i = 0; i < M.rows(); ++i) basis.vectors(i, j) = f.Q(i, j);
  return basis;
}

OrthonormalBasis kernel_basis(const Matrix& A) {
  if (!A.allFinite()) throw Error("kernel_basis: non-finite entries");
  const Matrix At = A.transposed();
  QrFactors f = householder_qr(At, true);
  if (f.rank < A.rows())
    throw RankDeficient("kernel_basis: numerical rank " + std::to_string(f.rank) + " < " +
                        std::to_string(A.rows()) + " rows");
  OrthonormalBasis basis;
  basis.ambientDim = A.cols();
  basis.vectors = Matrix(A.cols(), A.cols() - A.rows());
  for (int j = A.rows(); j < A.cols(); ++j)
    for (int i = 0; i < A.cols(); ++i) basis.vectors(i, j - A.rows()) = f.Q(i, j);
  return basis;
}

EliminationResult row_reduce(const Matrix& A) {
  const int m = A.rows(), n = A.cols();
  EliminationResult res;
  Matrix M = A;
  std::vector<bool> rowUsed(m, false), colUsed(n, false);

  // Pivot rows are not normalized during elimination, so the working matrix
  // stays exactly columnwise-scaled under a column rescaling of the input and
  // all pivot decisions are rescaling-invariant.
  for (int step = 0; step < m; ++step) {
    int bestCol = -1, bestRow = -1;
    double bestScore = -1.0;
    for (int j = 0; j < n; ++j) {
      if (colUsed[j]) continue;
      double colMaxAll = 0.0;
      for (int i = 0; i < m; ++i) colMaxAll = std::max(colMaxAll, std::fabs(M(i, j)));
      double eligNorm2 = 0.0, eligMax = 0.0;
      int eligRow = -1;
      for (int i = 0; i < m; ++i) {
        if (rowUsed[i]) continue;
        const double a = std::fabs(M(i, j));
        eligNorm2 += a * a;
        if (a > eligMax) {
          eligMax = a;
          eligRow = i;
        }
      }
      // Exhausted column: best eligible entry is zero relative to the column.
      if (colMaxAll == 0.0 || eligMax <= pivot_tolerance() * colMaxAll) continue;
      const double score = eligMax / std::sqrt(eligNorm2);
      if (score > bestScore * (1.0 + 1e-12)) {
        bestScore = score;
        bestCol = j;
        bestRow = eligRow;
      }
    }
    if (bestCol < 0)
      throw RankDeficient("row_reduce: rank " + std::to_string(step) + " < " + std::to_string(m));

    const double pivotValue = M(bestRow, bestCol);
    for (int i = 0; i < m; ++i) {
      if (i == bestRow) continue;
      const double factor = M(i, bestCol) / pivotValue;
      if (factor == 0.0) continue;
      for (int j = 0; j < n; ++j) M(i, j) -= factor * M(bestRow, j);
      M(i, bestCol) = 0.0;
    }
    rowUsed[bestRow] = true;
    colUsed[bestCol] = true;
    res.basisColumns.push_back(bestCol);
    res.pivotLog.emplace_back(bestRow, bestCol);
  }

  // Normalize pivot rows and order them by pivot step, giving the identity
  // block on basisColumns.
  res.reduced = Matrix(m, n);
  for (int k = 0; k < m; ++k) {
    const int srcRow = res.pivotLog[k].first;
    const double pivotValue = M(srcRow, res.basisColumns[k]);
    for (int j = 0; j < n; ++j) res.reduced(k, j) = M(srcRow, j) / pivotValue;
    res.reduced(k, res.basisColumns[k]) = 1.0;
  }
  return res;
}

namespace {

// Dominant eigenpair of a symmetric PSD matrix. Plain power iteration stalls
// when the top eigenvalues nearly coincide, so the iteration matrix is
// repeatedly squared first; any unit vector of the resulting dominant
// subspace gives a Rayleigh quotient within ~1e-12 relative of the true top
// eigenvalue.
double dominant_eigenpair(const Matrix& S, Vec& v) {
  const int dim = S.rows();
  v.assign(dim, 0.0);
  const double scaleS = S.maxAbs();
  if (scaleS == 0.0) {
    if (dim > 0) v[0] = 1.0;
    return 0.0;
  }
  Matrix P(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) P(i, j) = S(i, j) / scaleS;
  for (int sq = 0; sq < 48; ++sq) {
    P = P.times(P);
    const double m = P.maxAbs();
    if (m == 0.0 || !P.allFinite()) break;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) P(i, j) /= m;
  }
  std::mt19937 rng(0x5eed01u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 8; ++attempt) {
    Vec x(dim);
    for (double& xi : x) xi = gauss(rng);
    const double nx = norm2(x);
    if (nx == 0.0) continue;
    x = scale(x, 1.0 / nx);
    bool ok = true;
    Vec prev = x;
    for (int it = 0; it < 100; ++it) {
      Vec w = P.apply(x);
      const double nw = norm2(w);
      if (nw <= 1e-290) {
        ok = false;
        break;
      }
      x = scale(w, 1.0 / nw);
      double diff = 0.0;
      for (int i = 0; i < dim; ++i) diff = std::max(diff, std::fabs(std::fabs(x[i]) - std::fabs(prev[i])));
      prev = x;
      if (it > 0 && diff <= 1e-15) break;
    }
    if (ok) {
      v = x;
      return std::max(dot(v, S.apply(v)), 0.0);
    }
  }
  v.assign(dim, 0.0);
  v[0] = 1.0;
  return std::max(dot(v, S.apply(v)), 0.0);
}

}  // namespace

std::vector<double> gram_eigenvalues(const Matrix& G, int k) {
  const int dim = G.rows();
  std::vector<double> eigs;
  if (dim == 0) return eigs;
  Matrix work = G;
  for (int e = 0; e < k && e < dim; ++e) {
    Vec v;
    const double lambda = dominant_eigenpair(work, v);
    eigs.push_back(lambda);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) work(i, j) -= lambda * v[i] * v[j];
  }
  return eigs;
}

double spectral_norm(const Matrix& M) {
  if (!M.allFinite()) throw Error("spectral_norm: non-finite entries");
  if (M.empty()) return 0.0;
  // Gram matrix on the smaller side.
  const bool wide = M.cols() > M.rows();
  const Matrix S = wide ? M.times(M.transposed()) : M.transposed().times(M);
  if (S.maxAbs() == 0.0) return 0.0;
  const std::vector<double> top = gram_eigenvalues(S, 1);
  return std::sqrt(std::max(top.empty() ? 0.0 : top[0], 0.0));
}

Vec min_norm_solution(const Matrix& A, const Vec& b) {
  if (static_cast<int>(b.size()) != A.rows()) throw DimensionMismatch("min_norm_solution shape");
  // Thin QR of A^T: A^T = Q1 R, d = Q1 R^{-T} b. Pivoting is not used so that
  // the triangular solve maps b directly; rank is checked on the diagonal.
  QrFactors f = householder_qr(A.transposed(), false);
  const int m = A.rows();
  double maxDiag = 0.0;
  for (int i = 0; i < m; ++i) maxDiag = std::max(maxDiag, std::fabs(f.R(i, i)));
  for (int i = 0; i < m; ++i)
    if (std::fabs(f.R(i, i)) <= pivot_tolerance() * std::max(maxDiag, 1e-300))
      throw RankDeficient("min_norm_solution: A is rank deficient");
  // Solve R^T z = b (forward substitution).
  Vec z(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double acc = b[i];
    for (int j = 0; j < i; ++j) acc -= f.R(j, i) * z[j];
    z[i] = acc / f.R(i, i);
  }
  const int n = A.cols();
  Vec d(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += f.Q(i, j) * z[j];
    d[i] = acc;
  }
  return d;
}

Vec least_squares(const Matrix& A, const Vec& b) {
  if (static_cast<int>(b.size()) != A.rows()) throw DimensionMismatch("least_squares shape");
  QrFactors f = householder_qr(A, true);
  const int r = f.rank;
  Vec qtb(A.rows(), 0.0);
  for (int i = 0; i < A.rows(); ++i) {
    double acc = 0.0;
    for (int row = 0; row < A.rows(); ++row) acc += f.Q(row, i) * b[row];
    qtb[i] = acc;
  }
  const Vec zr = backSubstitute(f.R, qtb, r);
  Vec x(A.cols(), 0.0);
  for (int j = 0; j < r; ++j) x[f.perm[j]] = zr[j];
  if (r < A.cols()) {
    // Remove the nullspace component to get the minimum-norm minimizer.
    const OrthonormalBasis N = orthonormal_nullspace(A);
    for (int j = 0; j < N.dim(); ++j) {
      const Vec nj = N.vectors.column(j);
      const double proj = dot(x, nj);
      for (int i = 0; i < A.cols(); ++i) x[i] -= proj * nj[i];
    }
  }
  return x;
}

Vec least_squares_full_rank(const Matrix& A, const Vec& b) {
  if (static_cast<int>(b.size()) != A.rows()) throw DimensionMismatch("least_squares shape");
  QrFactors f = householder_qr(A, false);
  const int k = A.cols();
  for (int i = 0; i < k; ++i)
    if (f.R(i, i) == 0.0) throw RankDeficient("least_squares_full_rank: exactly singular R");
  Vec qtb(k, 0.0);
  for (int i = 0; i < k; ++i) {
    double acc = 0.0;
    for (int row = 0; row < A.rows(); ++row) acc += f.Q(row, i) * b[row];
    qtb[i] = acc;
  }
  return backSubstitute(f.R, qtb, k);
}

std::vector<int> independent_columns(const Matrix& M) {
  QrFactors f = householder_qr(M, true);
  std::vector<int> cols(f.perm.begin(), f.perm.begin() + f.rank);
  std::sort(cols.begin(), cols.end());
  return cols;
}

Vec constrained_least_squares(const Vec& weight, const Vec& target, const Matrix& freeBasis,
                              const Vec& fixedPart) {
  const int n = static_cast<int>(weight.size());
  if (static_cast<int>(target.size()) != n || static_cast<int>(fixedPart.size()) != n)
    throw DimensionMismatch("constrained_least_squares shape");
  if (freeBasis.cols() == 0) return Vec{};
  if (freeBasis.rows() != n) throw DimensionMismatch("constrained_least_squares basis rows");

  Matrix Mw = freeBasis.scaledRows(weight);
  QrFactors f = householder_qr(Mw, true);
  if (f.rank < freeBasis.cols())
    throw DegenerateBasis("constrained_least_squares: dependent basis columns");
  Vec rhs(n, 0.0);
  for (int i = 0; i < n; ++i) rhs[i] = -weight[i] * (target[i] + fixedPart[i]);
  Vec qtb(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int row = 0; row < n; ++row) acc += f.Q(row, i) * rhs[row];
    qtb[i] = acc;
  }
  const Vec zr = backSubstitute(f.R, qtb, f.rank);
  Vec z(freeBasis.cols(), 0.0);
  for (int j = 0; j < f.rank; ++j) z[f.perm[j]] = zr[j];
  return z;
}

}  // namespace llslp
