#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "omc/model.hpp"

namespace omc {

// Spectral initialization from the offline sample set. The estimator is the
// rescaled sparse matrix (d1 d2 / m) * sum of observed entries (duplicates
// accumulate; m counts draws, not distinct cells).

// PSD path: the estimator is symmetrized to (A + A^T) / 2, the top-k
// factorization is taken, eigenvalue signs are recovered by Rayleigh
// quotients of the singular vectors and negative directions are clipped.
// Throws DegeneracyError if fewer than k directions survive.
DenseMatrix initialize_psd(const std::vector<Entry>& init_set, int d, int k,
                           std::uint64_t seed, int power_iters = 8);

// Asymmetric path: top-k SVD of the rescaled estimator, balanced split
// U0 = W D^{1/2}, V0 = Z D^{1/2}. Throws DegeneracyError on rank collapse.
std::pair<DenseMatrix, DenseMatrix> initialize_asym(
    const std::vector<Entry>& init_set, int d1, int d2, int k,
    std::uint64_t seed, int power_iters = 8);

// Measured initialization quality against the basin conditions, with the
// thresholds evaluated at the instance's measured mu and kappa.
//   PSD:  frob_err <= sigma_min/20,  max_j ||e_j^T U0||^2 <= 10 mu k kappa/d
//   asym: frob_err <= sigma_min/20,  max_i ||e_i^T U0 V0^T||^2 <= 10 mu k/d1,
//                                    max_j ||e_j^T V0 U0^T||^2 <= 10 mu k/d2
struct InitQuality {
  double frob_err = 0.0;
  double max_row_leverage_u = 0.0;
  double max_row_leverage_v = 0.0;
  double bound_frob = 0.0;
  double bound_row_u = 0.0;
  double bound_row_v = 0.0;
  bool frob_ok = false;
  bool row_u_ok = false;
  bool row_v_ok = false;
  bool inside_region = false;
};

// v0 == nullptr selects the PSD conventions (gt must be PSD).
InitQuality init_quality(const GroundTruth& gt, const DenseMatrix& u0,
                         const DenseMatrix* v0);

}  // namespace omc
