#include "omc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "omc/errors.hpp"

namespace omc {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw ConfigError("matmul: inner dimension mismatch");
  DenseMatrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (int l = 0; l < a.cols; ++l) {
      double ail = ai[l];
      if (ail == 0.0) continue;
      const double* bl = b.row(l);
      for (int j = 0; j < b.cols; ++j) ci[j] += ail * bl[j];
    }
  }
  return c;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows) throw ConfigError("matmul_at_b: row count mismatch");
  DenseMatrix c(a.cols, b.cols);
  for (int l = 0; l < a.rows; ++l) {
    const double* al = a.row(l);
    const double* bl = b.row(l);
    for (int i = 0; i < a.cols; ++i) {
      double ali = al[i];
      if (ali == 0.0) continue;
      double* ci = c.row(i);
      for (int j = 0; j < b.cols; ++j) ci[j] += ali * bl[j];
    }
  }
  return c;
}

DenseMatrix matmul_abt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.cols) throw ConfigError("matmul_abt: column count mismatch");
  DenseMatrix c(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (int j = 0; j < b.rows; ++j) {
      const double* bj = b.row(j);
      double s = 0.0;
      for (int l = 0; l < a.cols; ++l) s += ai[l] * bj[l];
      ci[j] = s;
    }
  }
  return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

double frob_norm_sq(const DenseMatrix& a) {
  double s = 0.0;
  for (double x : a.a) s += x * x;
  return s;
}

double frob_norm(const DenseMatrix& a) { return std::sqrt(frob_norm_sq(a)); }

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw ConfigError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t t = 0; t < a.a.size(); ++t)
    m = std::max(m, std::fabs(a.a[t] - b.a[t]));
  return m;
}

void scale_cols_inplace(DenseMatrix& a, const std::vector<double>& s) {
  if (int(s.size()) != a.cols) throw ConfigError("scale_cols: size mismatch");
  for (int i = 0; i < a.rows; ++i) {
    double* ai = a.row(i);
    for (int j = 0; j < a.cols; ++j) ai[j] *= s[j];
  }
}

double dot_rows(const DenseMatrix& a, int ia, const DenseMatrix& b, int ib) {
  const double* x = a.row(ia);
  const double* y = b.row(ib);
  double s = 0.0;
  for (int j = 0; j < a.cols; ++j) s += x[j] * y[j];
  return s;
}

DenseMatrix gaussian_matrix(int rows, int cols, Rng& rng) {
  DenseMatrix g(rows, cols);
  for (double& x : g.a) x = rng.next_gaussian();
  return g;
}

double orthonormality_defect(const DenseMatrix& q) {
  DenseMatrix g = matmul_at_b(q, q);
  for (int i = 0; i < g.rows; ++i) g(i, i) -= 1.0;
  return frob_norm(g);
}

void validate_triple(const SvdTriple& t, double tol) {
  if (t.left.cols != int(t.sv.size()) || t.right.cols != int(t.sv.size()))
    throw ConsistencyError("svd triple: factor width != sv count");
  for (std::size_t l = 0; l < t.sv.size(); ++l) {
    if (!(t.sv[l] >= 0.0))
      throw ConsistencyError("svd triple: negative or NaN singular value");
    if (l > 0 && t.sv[l] > t.sv[l - 1] * (1.0 + 1e-12))
      throw ConsistencyError("svd triple: singular values not sorted");
  }
  double du = orthonormality_defect(t.left);
  double dv = orthonormality_defect(t.right);
  if (du > tol || dv > tol)
    throw ConsistencyError("svd triple: orthonormality defect " +
                           std::to_string(std::max(du, dv)) + " > " +
                           std::to_string(tol));
}

namespace {

// Dots of column p and q of a (row-major, so strided).
double col_dot(const DenseMatrix& a, int p, int q) {
  double s = 0.0;
  for (int i = 0; i < a.rows; ++i) s += a(i, p) * a(i, q);
  return s;
}

// Replaces column j of q (assumed expendable) by a unit vector orthogonal to
// columns `live`. Picks the coordinate vector with the largest residual after
// projection, so the choice is deterministic and never degenerate while
// |live| < rows.
void complete_column(DenseMatrix& q, int j, const std::vector<int>& live) {
  int n = q.rows;
  int best_c = 0;
  double best_norm2 = -1.0;
  std::vector<double> w(n), best(n);
  for (int c = 0; c < n; ++c) {
    for (int i = 0; i < n; ++i) w[i] = 0.0;
    w[c] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (int l : live) {
        double d = 0.0;
        for (int i = 0; i < n; ++i) d += w[i] * q(i, l);
        for (int i = 0; i < n; ++i) w[i] -= d * q(i, l);
      }
    }
    double n2 = 0.0;
    for (int i = 0; i < n; ++i) n2 += w[i] * w[i];
    if (n2 > best_norm2) {
      best_norm2 = n2;
      best_c = c;
      best = w;
    }
  }
  (void)best_c;
  double inv = 1.0 / std::sqrt(best_norm2);
  for (int i = 0; i < n; ++i) q(i, j) = best[i] * inv;
}

}  // namespace

QrThin qr_thin(const DenseMatrix& a) {
  int m = a.rows, n = a.cols;
  if (m < n) throw ConfigError("qr_thin: requires rows >= cols");
  QrThin out;
  out.q = a;
  out.r = DenseMatrix(n, n);
  DenseMatrix& q = out.q;
  DenseMatrix& r = out.r;
  std::vector<int> live;  // columns usable for projection (unit norm)
  live.reserve(n);
  for (int j = 0; j < n; ++j) {
    double orig2 = col_dot(q, j, j);
    // Two MGS passes; the second mops up cancellation in near-dependent sets.
    for (int pass = 0; pass < 2; ++pass) {
      for (int l : live) {
        double d = 0.0;
        for (int i = 0; i < m; ++i) d += q(i, l) * q(i, j);
        if (l < j) r(l, j) += d;  // completed columns beyond j never appear here
        for (int i = 0; i < m; ++i) q(i, j) -= d * q(i, l);
      }
    }
    double n2 = col_dot(q, j, j);
    if (n2 <= orig2 * 1e-26 || n2 == 0.0) {
      // Dependent or zero input column: r_jj = 0, q column completed so the
      // factor stays orthonormal. Reconstruction is untouched (0 * q_j).
      r(j, j) = 0.0;
      complete_column(q, j, live);
    } else {
      double nrm = std::sqrt(n2);
      r(j, j) = nrm;
      double inv = 1.0 / nrm;
      for (int i = 0; i < m; ++i) q(i, j) *= inv;
    }
    live.push_back(j);
  }
  return out;
}

namespace {

// One-sided Jacobi on a square-or-tall working copy (rows >= cols).
// Returns thin factors of width `cols`.
SvdTriple jacobi_tall(const DenseMatrix& a) {
  int m = a.rows, n = a.cols;
  DenseMatrix w = a;
  DenseMatrix v = DenseMatrix::identity(n);
  const double tol = 1e-14;
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = col_dot(w, p, p);
        double aqq = col_dot(w, q, q);
        double apq = col_dot(w, p, q);
        if (std::fabs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0)
          continue;
        rotated = true;
        double zeta = (aqq - app) / (2.0 * apq);
        double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (int i = 0; i < m; ++i) {
          double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (int i = 0; i < n; ++i) {
          double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  // Column norms are the singular values; sort nonincreasing.
  std::vector<double> sv(n);
  for (int j = 0; j < n; ++j) sv[j] = std::sqrt(col_dot(w, j, j));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int x, int y) { return sv[x] > sv[y]; });
  SvdTriple out;
  out.left = DenseMatrix(m, n);
  out.right = DenseMatrix(n, n);
  out.sv.resize(n);
  double smax = sv[perm[0]];
  std::vector<int> live;
  std::vector<int> dead;
  for (int j = 0; j < n; ++j) {
    int src = perm[j];
    out.sv[j] = sv[src];
    for (int i = 0; i < n; ++i) out.right(i, j) = v(i, src);
    if (sv[src] > 1e-14 * smax && sv[src] > 0.0) {
      double inv = 1.0 / sv[src];
      for (int i = 0; i < m; ++i) out.left(i, j) = w(i, src) * inv;
      live.push_back(j);
    } else {
      // Numerically zero direction: flush and complete the basis below.
      out.sv[j] = 0.0;
      dead.push_back(j);
    }
  }
  for (int j : dead) {
    complete_column(out.left, j, live);
    live.push_back(j);
  }
  return out;
}

}  // namespace

SvdTriple svd_small(const DenseMatrix& a) {
  if (a.rows == 0 || a.cols == 0) throw ConfigError("svd_small: empty matrix");
  SvdTriple t;
  if (a.rows >= a.cols) {
    t = jacobi_tall(a);
  } else {
    t = jacobi_tall(transpose(a));
    std::swap(t.left, t.right);
  }
#ifndef NDEBUG
  validate_triple(t, 1e-9);
  // Full SVD of a small matrix must reconstruct it exactly up to roundoff.
  DenseMatrix ls = t.left;
  scale_cols_inplace(ls, t.sv);
  DenseMatrix rec = matmul_abt(ls, t.right);
  double resid = 0.0;
  for (std::size_t s = 0; s < rec.a.size(); ++s) {
    double d = rec.a[s] - a.a[s];
    resid += d * d;
  }
  double ref = frob_norm_sq(a);
  if (resid > 1e-18 * (ref + 1e-30))
    throw ConsistencyError("svd_small: reconstruction residual " +
                           std::to_string(std::sqrt(resid / (ref + 1e-300))));
#endif
  return t;
}

SvdTriple svd_product(const DenseMatrix& u, const DenseMatrix& v) {
  if (u.cols != v.cols) throw ConfigError("svd_product: factor width mismatch");
  int k = u.cols;
  if (k < 1 || k > u.rows || k > v.rows)
    throw ConfigError("svd_product: requires 1 <= k <= min(d1, d2)");
  QrThin fu = qr_thin(u);
  QrThin fv = qr_thin(v);
  DenseMatrix core = matmul_abt(fu.r, fv.r);  // r_u * r_v^T, k x k
  SvdTriple cs = svd_small(core);
  SvdTriple out;
  out.left = matmul(fu.q, cs.left);
  out.right = matmul(fv.q, cs.right);
  out.sv = std::move(cs.sv);
#ifndef NDEBUG
  validate_triple(out, 1e-9);
  // Factored residual ||u v^T - L S R^T||_F^2 without the dense product:
  // ||uv^T||^2 + sum s^2 - 2 tr(S L^T u v^T R).
  double pv = 0.0;
  {
    DenseMatrix gu = matmul_at_b(u, u), gv = matmul_at_b(v, v);
    for (std::size_t s = 0; s < gu.a.size(); ++s) pv += gu.a[s] * gv.a[s];
  }
  double ss = 0.0;
  for (double s : out.sv) ss += s * s;
  DenseMatrix lu = matmul_at_b(out.left, u);
  DenseMatrix rv = matmul_at_b(out.right, v);
  double cross = 0.0;
  for (std::size_t l = 0; l < out.sv.size(); ++l)
    cross += out.sv[l] * dot_rows(lu, int(l), rv, int(l));
  double resid_sq = std::max(0.0, pv + ss - 2.0 * cross);
  if (resid_sq > 1e-18 * (pv + 1e-30))
    throw ConsistencyError("svd_product: reconstruction residual " +
                           std::to_string(std::sqrt(resid_sq / (pv + 1e-300))));
#endif
  return out;
}

namespace {

// y = scale * A * x applied column-block-wise, entries in given order.
DenseMatrix sparse_apply(const std::vector<Entry>& entries, double scale,
                         int d1, const DenseMatrix& x) {
  DenseMatrix y(d1, x.cols);
  for (const Entry& e : entries) {
    double c = scale * e.value;
    const double* xr = x.row(e.j);
    double* yr = y.row(e.i);
    for (int l = 0; l < x.cols; ++l) yr[l] += c * xr[l];
  }
  return y;
}

DenseMatrix sparse_apply_t(const std::vector<Entry>& entries, double scale,
                           int d2, const DenseMatrix& x) {
  DenseMatrix y(d2, x.cols);
  for (const Entry& e : entries) {
    double c = scale * e.value;
    const double* xr = x.row(e.i);
    double* yr = y.row(e.j);
    for (int l = 0; l < x.cols; ++l) yr[l] += c * xr[l];
  }
  return y;
}

}  // namespace

SvdTriple topk_svd_sparse(const std::vector<Entry>& entries, double scale,
                          int d1, int d2, int k, int power_iters,
                          std::uint64_t seed, int oversample) {
  if (d1 < 1 || d2 < 1) throw ConfigError("topk_svd_sparse: bad dimensions");
  if (k < 1 || k > std::min(d1, d2))
    throw ConfigError("topk_svd_sparse: requires 1 <= k <= min(d1, d2)");
  if (power_iters < 1)
    throw ConfigError("topk_svd_sparse: power_iters must be >= 1");
  for (const Entry& e : entries)
    if (e.i < 0 || e.i >= d1 || e.j < 0 || e.j >= d2)
      throw ConfigError("topk_svd_sparse: entry index out of range");
  int p = oversample < 0 ? k : oversample;
  int l = std::min(k + p, std::min(d1, d2));

  Rng rng(seed);
  DenseMatrix g = gaussian_matrix(d2, l, rng);
  DenseMatrix q = qr_thin(sparse_apply(entries, scale, d1, g)).q;

  // Singular value estimates are refreshed at every half-step; the last two
  // must agree to 1e-6 (relative to sv_max) or the caller gets a diagnostic.
  std::vector<double> prev_sv, cur_sv;
  auto estimates = [&](const DenseMatrix& r) {
    std::vector<double> s = svd_small(r).sv;
    s.resize(std::size_t(k));
    return s;
  };
  double rel_change = 0.0;
  auto update_rel = [&](const std::vector<double>& nxt) {
    if (!cur_sv.empty()) {
      prev_sv = cur_sv;
      cur_sv = nxt;
      double denom = std::max({cur_sv[0], prev_sv[0], 1e-300});
      double worst = 0.0;
      for (int i = 0; i < k; ++i)
        worst = std::max(worst, std::fabs(cur_sv[i] - prev_sv[i]) / denom);
      rel_change = worst;
    } else {
      cur_sv = nxt;
    }
  };

  DenseMatrix bt;  // A^T q, d2 x l
  for (int it = 0; it < power_iters; ++it) {
    bt = sparse_apply_t(entries, scale, d2, q);
    QrThin fz = qr_thin(bt);
    update_rel(estimates(fz.r));
    QrThin fy = qr_thin(sparse_apply(entries, scale, d1, fz.q));
    q = fy.q;
    update_rel(estimates(fy.r));
  }
  if (rel_change > 1e-6)
    throw DegeneracyError(
        "topk_svd_sparse: top-k singular values did not stabilize (relative "
        "change " + std::to_string(rel_change) +
        " > 1e-6 after " + std::to_string(power_iters) +
        " power iterations); increase power_iters");

  bt = sparse_apply_t(entries, scale, d2, q);
  QrThin fb = qr_thin(bt);
  SvdTriple cs = svd_small(transpose(fb.r));  // q^T A = r^T qb^T
  DenseMatrix left_full = matmul(q, cs.left);
  DenseMatrix right_full = matmul(fb.q, cs.right);

  SvdTriple out;
  out.left = DenseMatrix(d1, k);
  out.right = DenseMatrix(d2, k);
  out.sv.assign(cs.sv.begin(), cs.sv.begin() + k);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < k; ++j) out.left(i, j) = left_full(i, j);
  for (int i = 0; i < d2; ++i)
    for (int j = 0; j < k; ++j) out.right(i, j) = right_full(i, j);
#ifndef NDEBUG
  validate_triple(out, 1e-9);
#endif
  return out;
}

}  // namespace omc
