#include "llslp/lifting.hpp"

#include <algorithm>
#include <cmath>

namespace llslp {

namespace {

std::vector<int> complement_of(const std::vector<int>& I, int n) {
  std::vector<bool> inI(n, false);
  for (int i : I) inI[i] = true;
  std::vector<int> comp;
  for (int i = 0; i < n; ++i)
    if (!inI[i]) comp.push_back(i);
  return comp;
}

// Gauss-Jordan by column operations over the given row scan order. Rows that
// stay dependent are skipped, as are rows whose entries sit below dustCut:
// those are numerical residue of a vanishing coordinate projection, and a
// pivot there would amplify noise into the operator matrix.
void eliminate_rows(Matrix& M, const std::vector<int>& scanOrder, std::vector<int>& Iprime,
                    std::vector<int>& pivotCols, double dustCut, std::vector<bool>& colUsed,
                    std::vector<bool>& rowPivoted) {
  const int k = M.cols();
  for (int i : scanOrder) {
    double rowMaxAll = 0.0, rowMaxFree = 0.0;
    for (int j = 0; j < k; ++j) {
      const double a = std::fabs(M(i, j));
      rowMaxAll = std::max(rowMaxAll, a);
      if (!colUsed[j]) rowMaxFree = std::max(rowMaxFree, a);
    }
    if (rowMaxAll == 0.0 || rowMaxFree <= std::max(pivot_tolerance() * rowMaxAll, dustCut)) continue;
    int best = -1;
    double bestScore = -1.0;
    for (int j = 0; j < k; ++j) {
      if (colUsed[j]) continue;
      const double a = std::fabs(M(i, j));
      if (a <= pivot_tolerance() * rowMaxAll) continue;
      double colNorm2 = 0.0;
      for (int r = 0; r < M.rows(); ++r)
        if (!rowPivoted[r]) colNorm2 += M(r, j) * M(r, j);
      const double score = a / std::sqrt(colNorm2);
      if (score > bestScore * (1.0 + 1e-12)) {
        bestScore = score;
        best = j;
      }
    }
    if (best < 0) continue;
    const double piv = M(i, best);
    for (int r = 0; r < M.rows(); ++r) M(r, best) /= piv;
    M(i, best) = 1.0;
    for (int j = 0; j < k; ++j) {
      if (j == best) continue;
      const double f = M(i, j);
      if (f == 0.0) continue;
      for (int r = 0; r < M.rows(); ++r) M(r, j) -= f * M(r, best);
      M(i, j) = 0.0;
    }
    colUsed[best] = true;
    rowPivoted[i] = true;
    Iprime.push_back(i);
    pivotCols.push_back(best);
  }
}

// Makes the pivot columns orthogonal (on the complement rows) to the span of
// the free columns, which carries the subspace vectors vanishing on I.
void orthogonalize_against_free(Matrix& M, const std::vector<int>& freeCols,
                                const std::vector<int>& pivotCols,
                                const std::vector<int>& complement) {
  std::vector<Vec> Q;
  for (int j : freeCols) {
    Vec v(complement.size());
    for (size_t r = 0; r < complement.size(); ++r) v[r] = M(complement[r], j);
    for (const Vec& q : Q) {
      const double proj = dot(v, q);
      for (size_t r = 0; r < v.size(); ++r) v[r] -= proj * q[r];
    }
    const double nv = norm2(v);
    if (nv > 1e-13) Q.push_back(scale(v, 1.0 / nv));
  }
  for (int c : pivotCols) {
    for (const Vec& q : Q) {
      double proj = 0.0;
      for (size_t r = 0; r < complement.size(); ++r) proj += M(complement[r], c) * q[r];
      for (size_t r = 0; r < complement.size(); ++r) M(complement[r], c) -= proj * q[r];
    }
  }
}

LiftVerdict verdict_from_operator(LiftOperator op, int ambientDim, double theta) {
  LiftVerdict v;
  double maxAbs = 0.0;
  int argRow = -1, argCol = -1;
  for (int r = 0; r < op.B.rows(); ++r)
    for (int c = 0; c < op.B.cols(); ++c) {
      const double a = std::fabs(op.B(r, c));
      if (a > maxAbs) {
        maxAbs = a;
        argRow = r;
        argCol = c;
      }
    }
  v.pass = ambientDim * maxAbs <= theta;
  if (!v.pass) {
    v.certificate.i = op.Iprime[argCol];
    v.certificate.j = op.complement[argRow];
    v.certificate.t = maxAbs;
  }
  v.op = std::move(op);
  return v;
}

}  // namespace

Vec lift(const OrthonormalBasis& subspace, const std::vector<int>& I, const Vec& p) {
  const Matrix BI = subspace.vectors.selectRows(I);
  const Vec u = least_squares(BI, p);
  const Vec resid = sub(BI.apply(u), p);
  if (norm2(resid) > 1e-9 * std::max(norm2(p), 1e-300))
    throw NotInProjection("lift: target is not in the coordinate projection");
  return subspace.vectors.apply(u);
}

double lifting_score(const OrthonormalBasis& subspace, const std::vector<int>& I) {
  if (I.empty()) return 0.0;
  const Matrix BI = subspace.vectors.selectRows(I);
  if (BI.maxAbs() <= 1e-13 * std::max(subspace.vectors.maxAbs(), 1e-300)) return 0.0;
  const OrthonormalBasis QI = orthonormal_range(BI);
  const int r = QI.dim();
  if (r == 0) return 0.0;
  // With orthonormal inputs the lift is an isometry on the I block, so the
  // score equals the operator norm of the lift restricted off I. Computing it
  // there directly avoids the sqrt(eps) floor of ||L||^2 - 1.
  std::vector<bool> inI(subspace.ambientDim, false);
  for (int i : I) inI[i] = true;
  std::vector<int> off;
  for (int i = 0; i < subspace.ambientDim; ++i)
    if (!inI[i]) off.push_back(i);
  if (off.empty()) return 0.0;
  std::vector<Vec> lifted(r);
  for (int t = 0; t < r; ++t) {
    const Vec z = lift(subspace, I, QI.vectors.column(t));
    lifted[t] = gather(z, off);
  }
  return spectral_norm(Matrix::fromColumns(static_cast<int>(off.size()), lifted));
}

LiftVerdict verify_lift(const Matrix& subspaceBasis, const std::vector<int>& I, double theta) {
  std::vector<int> order = I;
  std::sort(order.begin(), order.end());
  return verify_lift_ordered(subspaceBasis, order, theta);
}

LiftVerdict verify_lift_ordered(const Matrix& subspaceBasis, const std::vector<int>& scanOrder,
                                double theta) {
  const int n = subspaceBasis.rows();
  Matrix M = subspaceBasis;
  const double dustCut = 1e-14 * subspaceBasis.maxAbs();
  std::vector<int> Iprime, pivotCols;
  std::vector<bool> colUsed(M.cols(), false), rowPivoted(M.rows(), false);
  eliminate_rows(M, scanOrder, Iprime, pivotCols, dustCut, colUsed, rowPivoted);

  LiftOperator op;
  op.I = scanOrder;
  std::sort(op.I.begin(), op.I.end());
  op.Iprime = Iprime;
  op.complement = complement_of(op.I, n);

  std::vector<bool> used(M.cols(), false);
  for (int c : pivotCols) used[c] = true;
  std::vector<int> freeCols;
  for (int j = 0; j < M.cols(); ++j)
    if (!used[j]) freeCols.push_back(j);
  orthogonalize_against_free(M, freeCols, pivotCols, op.complement);

  op.B = Matrix(static_cast<int>(op.complement.size()), static_cast<int>(pivotCols.size()));
  for (int r = 0; r < op.B.rows(); ++r)
    for (int c = 0; c < op.B.cols(); ++c) op.B(r, c) = M(op.complement[r], pivotCols[c]);
  return verdict_from_operator(std::move(op), n, theta);
}

std::vector<LiftVerdict> verify_lift_suffixes(const Matrix& subspaceBasis,
                                              const std::vector<std::vector<int>>& components,
                                              double theta) {
  const int n = subspaceBasis.rows();
  const int ell = static_cast<int>(components.size());
  std::vector<LiftVerdict> verdicts;
  if (ell < 2) return verdicts;

  Matrix M = subspaceBasis;
  const double dustCut = 1e-14 * subspaceBasis.maxAbs();
  // Staircase: pivot the last component first so that columns assigned to
  // block h vanish on all later components.
  std::vector<std::vector<int>> IprimeOf(ell), pivotColsOf(ell);
  std::vector<bool> colUsed(M.cols(), false), rowPivoted(M.rows(), false);
  for (int h = ell - 1; h >= 1; --h) {
    std::vector<int> order = components[h];
    std::sort(order.begin(), order.end());
    eliminate_rows(M, order, IprimeOf[h], pivotColsOf[h], dustCut, colUsed, rowPivoted);
  }
  std::vector<int> pivotAnywhere;
  for (int h = 1; h < ell; ++h)
    for (int c : pivotColsOf[h]) pivotAnywhere.push_back(c);
  std::vector<bool> isPivot(M.cols(), false);
  for (int c : pivotAnywhere) isPivot[c] = true;
  std::vector<int> d1Cols;  // includes every column left free: block 1's share
  for (int j = 0; j < M.cols(); ++j)
    if (!isPivot[j]) d1Cols.push_back(j);

  // Block orthogonalization: columns of block h become orthogonal to the span
  // of all earlier blocks (restricted to rows where those blocks live).
  {
    std::vector<Vec> Q;
    auto pushOrthonormal = [&](const Vec& col) {
      Vec v = col;
      for (const Vec& q : Q) {
        const double proj = dot(v, q);
        for (size_t r = 0; r < v.size(); ++r) v[r] -= proj * q[r];
      }
      const double nv = norm2(v);
      if (nv > 1e-13) Q.push_back(scale(v, 1.0 / nv));
    };
    for (int j : d1Cols) pushOrthonormal(M.column(j));
    for (int h = 1; h < ell; ++h) {
      std::vector<Vec> processed;
      for (int c : pivotColsOf[h]) {
        Vec v = M.column(c);
        for (const Vec& q : Q) {
          const double proj = dot(v, q);
          for (size_t r = 0; r < v.size(); ++r) v[r] -= proj * q[r];
        }
        for (int r = 0; r < n; ++r) M(r, c) = v[r];
        processed.push_back(std::move(v));
      }
      for (const Vec& v : processed) pushOrthonormal(v);
    }
  }

  // Walk suffixes from the last; before emitting suffix k, clear the entries
  // of later blocks on this block's pivot rows so the operator columns are
  // lifts of unit vectors on the whole suffix row set.
  verdicts.resize(ell - 1);
  std::vector<int> suffixPivotCols, suffixIprime;
  std::vector<int> suffixRows;
  for (int kk = ell - 1; kk >= 1; --kk) {
    // Eliminate M[Iprime_k, laterPivotCols] with block k's columns.
    for (size_t t = 0; t < IprimeOf[kk].size(); ++t) {
      const int i = IprimeOf[kk][t];
      const int c = pivotColsOf[kk][t];
      for (int j : suffixPivotCols) {
        const double f = M(i, j);
        if (f == 0.0) continue;
        for (int r = 0; r < n; ++r) M(r, j) -= f * M(r, c);
        M(i, j) = 0.0;
      }
    }
    for (size_t t = 0; t < IprimeOf[kk].size(); ++t) {
      suffixIprime.push_back(IprimeOf[kk][t]);
      suffixPivotCols.push_back(pivotColsOf[kk][t]);
    }
    for (int i : components[kk]) suffixRows.push_back(i);

    LiftOperator op;
    op.I = suffixRows;
    std::sort(op.I.begin(), op.I.end());
    op.Iprime = suffixIprime;
    op.complement = complement_of(op.I, n);
    op.B = Matrix(static_cast<int>(op.complement.size()), static_cast<int>(suffixPivotCols.size()));
    for (int r = 0; r < op.B.rows(); ++r)
      for (int c = 0; c < op.B.cols(); ++c) op.B(r, c) = M(op.complement[r], suffixPivotCols[c]);
    verdicts[kk - 1] = verdict_from_operator(std::move(op), n, theta);
  }
  return verdicts;
}

OrthonormalBasis rescaled_subspace(const OrthonormalBasis& subspace, const Vec& delta) {
  return orthonormal_columns(subspace.vectors.scaledRows(delta));
}

double partition_lifting_score(const OrthonormalBasis& subspace, const Vec& delta,
                               const std::vector<std::vector<int>>& layers) {
  if (layers.size() <= 1) return 0.0;
  const OrthonormalBasis scaled = rescaled_subspace(subspace, delta);
  double worst = 0.0;
  std::vector<int> suffix;
  for (size_t k = layers.size(); k-- > 1;) {
    for (int i : layers[k]) suffix.push_back(i);
    std::vector<int> I = suffix;
    std::sort(I.begin(), I.end());
    worst = std::max(worst, lifting_score(scaled, I));
  }
  return worst;
}

}  // namespace llslp
