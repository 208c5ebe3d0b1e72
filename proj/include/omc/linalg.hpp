#pragma once

#include <cstdint>
#include <vector>

#include "omc/rng.hpp"

namespace omc {

// Row-major dense matrix of doubles. Deliberately minimal: the engine only
// needs tall-skinny (d x k) and small square (k x k) shapes, so there is no
// expression machinery, just the handful of kernels the algorithms use.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), a(std::size_t(r) * std::size_t(c), 0.0) {}

  double& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
  double operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }

  double* row(int i) { return a.data() + std::size_t(i) * cols; }
  const double* row(int i) const { return a.data() + std::size_t(i) * cols; }

  static DenseMatrix identity(int n);
  bool all_finite() const;
};

// One observed/sparse entry. Shared by the sampler and the sparse SVD.
struct Entry {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

struct QrThin {
  DenseMatrix q;  // rows x cols, orthonormal columns (deficient ones completed)
  DenseMatrix r;  // cols x cols upper triangular; zero diagonal marks deficiency
};

struct SvdTriple {
  DenseMatrix left;        // orthonormal columns
  std::vector<double> sv;  // nonincreasing, >= 0
  DenseMatrix right;       // orthonormal columns
};

// ---- basic kernels ----

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);         // a * b
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);    // a^T * b
DenseMatrix matmul_abt(const DenseMatrix& a, const DenseMatrix& b);     // a * b^T
DenseMatrix transpose(const DenseMatrix& a);
double frob_norm_sq(const DenseMatrix& a);
double frob_norm(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
// Scales column j by s[j] in place.
void scale_cols_inplace(DenseMatrix& a, const std::vector<double>& s);
double dot_rows(const DenseMatrix& a, int ia, const DenseMatrix& b, int ib);
DenseMatrix gaussian_matrix(int rows, int cols, Rng& rng);

// ||q^T q - I||_F. Cheap consistency probe for orthonormal factors.
double orthonormality_defect(const DenseMatrix& q);

// Throws ConsistencyError if the triple is malformed (shape mismatch,
// non-orthonormal factors beyond tol, unsorted or negative singular values).
void validate_triple(const SvdTriple& t, double tol);

// ---- factorizations ----

// Thin QR by modified Gram-Schmidt with a second reorthogonalization pass.
// Requires rows >= cols. Zero or numerically dependent columns get a zero
// diagonal entry in r; the matching q column is replaced by a deterministic
// orthonormal completion so q^T q = I always holds exactly to roundoff.
QrThin qr_thin(const DenseMatrix& a);

// Full SVD of a small matrix (intended k x k and similar; cost O(n^3) per
// sweep) by one-sided Jacobi. Deterministic sweep order, thin factors of
// width min(rows, cols). Singular values below 1e-14 * sv_max are flushed to
// exact zero and their left columns completed to keep the factor orthonormal.
SvdTriple svd_small(const DenseMatrix& a);

// SVD of the product u * v^T without forming it: QR of each factor and a
// k x k core SVD. O((d1 + d2) k^2 + k^3). Requires u.cols == v.cols and
// k <= min(d1, d2). Rank-deficient products yield trailing zero sv.
SvdTriple svd_product(const DenseMatrix& u, const DenseMatrix& v);

// Top-k SVD of the scaled sparse matrix scale * sum(entries), duplicates
// accumulating, by randomized subspace iteration with oversampling
// (default p = k) and `power_iters` power steps. Deterministic given the
// seed and entry order. Throws DegeneracyError if the top-k singular value
// estimates have not stabilized (relative change > 1e-6) by the last
// iteration.
SvdTriple topk_svd_sparse(const std::vector<Entry>& entries, double scale,
                          int d1, int d2, int k, int power_iters,
                          std::uint64_t seed, int oversample = -1);

}  // namespace omc
