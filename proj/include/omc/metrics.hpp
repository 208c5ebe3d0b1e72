#pragma once

#include <cstdint>

#include "omc/model.hpp"

namespace omc {

// One trace checkpoint. For PSD runs max_h mirrors max_g and the v-alignment
// mirrors the u-alignment. elapsed_ns is wall time since run start.
struct StepTrace {
  long long step = 0;
  double f = 0.0;                  // ||U V^T - M||_F^2
  double max_g = 0.0;              // max_i row leverage of U against V
  double max_h = 0.0;              // max_j row leverage of V against U
  double sigma_min_align_u = 0.0;  // sigma_min(x^T U)
  double sigma_min_align_v = 0.0;  // sigma_min(y^T V)
  double spectral_norm_u = 0.0;    // sigma_max(U)
  long long elapsed_ns = 0;
};

// ||u v^T - M||_F^2 in O((d1 + d2) k^2) via k x k traces; never forms the
// d1 x d2 residual. Clamped at zero (the identity can round to -1e-16 near
// an exact fit). For a PSD instance pass u twice.
double frob_error_sq(const GroundTruth& gt, const DenseMatrix& u,
                     const DenseMatrix& v);

// PSD row leverage g_i(U) = ||row_i(U)||^2, maximized over rows.
double max_row_leverage_psd(const DenseMatrix& u);

// Asymmetric row leverage g_i(U, V) = ||e_i^T U V^T||^2 = row_i(U) * (V^T V)
// * row_i(U)^T, maximized over rows. gram_other must equal V^T V.
double max_row_leverage(const DenseMatrix& factor,
                        const DenseMatrix& gram_other);

// sigma_min(basis^T factor): alignment of the iterate with the true column
// space. basis is d x k orthonormal, factor d x k.
double alignment_sigma_min(const DenseMatrix& basis, const DenseMatrix& factor);

// sigma_max(u) via svd of the k x k gram.
double spectral_norm_factor(const DenseMatrix& u);

// Population gradient of f(U) = ||M - U U^T||_F^2: 4 (U U^T - M) U,
// assembled factored in O(d k^2).
DenseMatrix full_gradient_psd(const GroundTruth& gt, const DenseMatrix& u);

// Population gradients of f(U, V) = ||M - U V^T||_F^2:
// dU = 2 (U V^T - M) V, dV = 2 (U V^T - M)^T U.
void full_gradient_asym(const GroundTruth& gt, const DenseMatrix& u,
                        const DenseMatrix& v, DenseMatrix& grad_u,
                        DenseMatrix& grad_v);

}  // namespace omc
