#include "omc/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "omc/errors.hpp"

namespace omc {

double frob_error_sq(const GroundTruth& gt, const DenseMatrix& u,
                     const DenseMatrix& v) {
  if (u.rows != gt.d1 || v.rows != gt.d2 || u.cols != v.cols)
    throw ConfigError("frob_error_sq: shape mismatch");
  // ||UV^T||^2 = tr(G_u G_v); <UV^T, M> = sum_l s_l (B A^T)_ll with
  // A = x^T U, B = y^T V; ||M||^2 = sum s^2.
  DenseMatrix gu = matmul_at_b(u, u);
  DenseMatrix gv = matmul_at_b(v, v);
  double tr_gg = 0.0;
  for (std::size_t t = 0; t < gu.a.size(); ++t) tr_gg += gu.a[t] * gv.a[t];
  DenseMatrix a = matmul_at_b(gt.x, u);
  DenseMatrix b = matmul_at_b(gt.y, v);
  double cross = 0.0;
  for (int l = 0; l < gt.k; ++l) cross += gt.s[l] * dot_rows(b, l, a, l);
  double msq = 0.0;
  for (double s : gt.s) msq += s * s;
  return std::max(0.0, tr_gg - 2.0 * cross + msq);
}

double max_row_leverage_psd(const DenseMatrix& u) {
  double m = 0.0;
  for (int i = 0; i < u.rows; ++i) m = std::max(m, dot_rows(u, i, u, i));
  return m;
}

double max_row_leverage(const DenseMatrix& factor,
                        const DenseMatrix& gram_other) {
  if (gram_other.rows != factor.cols || gram_other.cols != factor.cols)
    throw ConfigError("max_row_leverage: gram shape mismatch");
  int k = factor.cols;
  double m = 0.0;
  for (int i = 0; i < factor.rows; ++i) {
    const double* r = factor.row(i);
    double acc = 0.0;
    for (int p = 0; p < k; ++p) {
      const double* gp = gram_other.row(p);
      double rp = r[p];
      for (int q = 0; q < k; ++q) acc += rp * gp[q] * r[q];
    }
    m = std::max(m, acc);
  }
  return m;
}

double alignment_sigma_min(const DenseMatrix& basis,
                           const DenseMatrix& factor) {
  if (basis.rows != factor.rows)
    throw ConfigError("alignment_sigma_min: row mismatch");
  DenseMatrix c = matmul_at_b(basis, factor);
  return svd_small(c).sv.back();
}

double spectral_norm_factor(const DenseMatrix& u) {
  DenseMatrix g = matmul_at_b(u, u);
  return std::sqrt(std::max(0.0, svd_small(g).sv.front()));
}

namespace {

// x * (diag(s) * a) without forming intermediates twice.
DenseMatrix scaled_basis_product(const DenseMatrix& x,
                                 const std::vector<double>& s,
                                 const DenseMatrix& a) {
  DenseMatrix sa = a;
  for (int l = 0; l < sa.rows; ++l) {
    double* r = sa.row(l);
    for (int c = 0; c < sa.cols; ++c) r[c] *= s[l];
  }
  return matmul(x, sa);
}

}  // namespace

DenseMatrix full_gradient_psd(const GroundTruth& gt, const DenseMatrix& u) {
  if (!gt.symmetric_psd)
    throw ConfigError("full_gradient_psd: ground truth is not PSD");
  if (u.rows != gt.d1) throw ConfigError("full_gradient_psd: shape mismatch");
  // 4 (U U^T - M) U = 4 (U (U^T U) - x diag(s) (x^T U)).
  DenseMatrix gu = matmul_at_b(u, u);
  DenseMatrix a = matmul_at_b(gt.x, u);
  DenseMatrix grad = matmul(u, gu);
  DenseMatrix m_u = scaled_basis_product(gt.x, gt.s, a);
  for (std::size_t t = 0; t < grad.a.size(); ++t)
    grad.a[t] = 4.0 * (grad.a[t] - m_u.a[t]);
  return grad;
}

void full_gradient_asym(const GroundTruth& gt, const DenseMatrix& u,
                        const DenseMatrix& v, DenseMatrix& grad_u,
                        DenseMatrix& grad_v) {
  if (u.rows != gt.d1 || v.rows != gt.d2 || u.cols != v.cols)
    throw ConfigError("full_gradient_asym: shape mismatch");
  DenseMatrix gram_u = matmul_at_b(u, u);
  DenseMatrix gram_v = matmul_at_b(v, v);
  DenseMatrix a = matmul_at_b(gt.x, u);
  DenseMatrix b = matmul_at_b(gt.y, v);
  // dU = 2 (U G_v - x diag(s) B), dV = 2 (V G_u - y diag(s) A).
  grad_u = matmul(u, gram_v);
  DenseMatrix mv = scaled_basis_product(gt.x, gt.s, b);
  for (std::size_t t = 0; t < grad_u.a.size(); ++t)
    grad_u.a[t] = 2.0 * (grad_u.a[t] - mv.a[t]);
  grad_v = matmul(v, gram_u);
  DenseMatrix mtu = scaled_basis_product(gt.y, gt.s, a);
  for (std::size_t t = 0; t < grad_v.a.size(); ++t)
    grad_v.a[t] = 2.0 * (grad_v.a[t] - mtu.a[t]);
}

}  // namespace omc
