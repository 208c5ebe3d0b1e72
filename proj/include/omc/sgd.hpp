#pragma once

#include <string>
#include <vector>

#include "omc/config.hpp"
#include "omc/init.hpp"
#include "omc/metrics.hpp"
#include "omc/model.hpp"
#include "omc/sampling.hpp"

namespace omc {

// State invariant for both shapes: the cached grams track the exact k x k
// grams of the factors; checkpoints verify drift <= 1e-8 * (1 + ||gram||_F)
// and periodic refreshes verify <= 1e-6, both raising ConsistencyError.

struct PsdState {
  DenseMatrix u;     // d x k
  DenseMatrix gram;  // u^T u, rank-2-updated per step
  long long step = 0;
};

struct AsymState {
  DenseMatrix u;       // d1 x k
  DenseMatrix v;       // d2 x k
  DenseMatrix gram_u;  // u^T u
  DenseMatrix gram_v;  // v^T v
  long long step = 0;
};

PsdState make_psd_state(DenseMatrix u0);
AsymState make_asym_state(DenseMatrix u0, DenseMatrix v0);

// One stochastic step on f(U) = ||M - U U^T||_F^2 from the observation
// (i, j, M_ij): with r = <row_i, row_j> - M_ij and c = 2 eta d^2 r,
//   row_i <- row_i - c * row_j,  row_j <- row_j - c * row_i   (old rows);
// the diagonal case i == j collapses to row_i <- (1 - 2c) row_i. Touches
// only rows i and j plus the cached gram: O(k^2).
void step_psd(PsdState& st, const Entry& obs, double eta);

// Theoretical asymmetric step: renormalize first through the product SVD
// (U, V <- W_u D^{1/2}, W_v D^{1/2}), then the plain rank-one update
//   row_i(U) -= 2 eta d1 d2 r row_j(V),  row_j(V) -= 2 eta d1 d2 r row_i(U)
// with rows read from the renormalized pair. O((d1 + d2) k^2) per step.
// Throws DegeneracyError if sigma_k of the product falls below 1e-12.
void step_asym_theoretical(AsymState& st, const Entry& obs, double eta);

// Practical asymmetric step: same update direction computed through the
// k x k whitening transforms T_u, T_v assembled from the cached grams, so
// the renormalization never touches the tall factors. O(k^3) + O(k^2) per
// step, rows i of U and j of V only. Throws DegeneracyError if a gram loses
// rank (eigenvalue below 1e-12).
void step_asym_practical(AsymState& st, const Entry& obs, double eta);

// Recompute grams exactly; ConsistencyError if the cached copy had drifted
// beyond tol * (1 + ||gram_exact||_F).
void refresh_gram(PsdState& st, double tol);
void refresh_gram(AsymState& st, double tol);

enum class RunStatus { kOk, kDiverged, kDegenerate };

struct RunResult {
  RunStatus status = RunStatus::kOk;
  long long fail_step = -1;
  std::string message;            // diagnosis when status != kOk
  std::vector<StepTrace> trace;   // checkpoint at step 0, every
                                  // trace_interval, and the final step
  DenseMatrix u;                  // final factors (v unused for PSD)
  DenseMatrix v;
  InitQuality init;
  double eta = 0.0;               // resolved step size
  std::vector<Entry> init_set;    // the offline sample set (audit dump)
};

// Full pipeline on a given instance: offline sampling (stream 0), spectral
// initialization, online SGD (stream 1) with trace checkpoints. Divergence
// (f above 10x its initial value, or non-finite residuals) and rank
// degeneracy abort early with the diagnosis recorded instead of thrown.
// gt must match cfg's dimensions/shape. Config must already validate.
RunResult run(const GroundTruth& gt, const RunConfig& cfg);

// Convenience: generate the instance from cfg (kappa, seed) and run.
RunResult run_from_config(const RunConfig& cfg);

}  // namespace omc
