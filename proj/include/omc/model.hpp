#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omc/linalg.hpp"

namespace omc {

// Named RNG streams hanging off one master seed. Fixed indices so adding a
// consumer never shifts another consumer's draws.
inline constexpr std::uint64_t kStreamInitSet = 0;      // offline sample set
inline constexpr std::uint64_t kStreamOnline = 1;       // online observations
inline constexpr std::uint64_t kStreamInitSvd = 2;      // sparse SVD start block
inline constexpr std::uint64_t kStreamGroundTruth = 3;  // factor generation
inline constexpr std::uint64_t kStreamSweepBase = 1000; // per-cell child seeds

// Rank-k ground truth M = x * diag(s) * y^T with orthonormal x (d1 x k) and
// y (d2 x k), s nonincreasing and s[0] = 1 (spectral normalization).
// PSD instances store y == x (and need d1 == d2), giving M = M^T >= 0.
struct GroundTruth {
  int d1 = 0;
  int d2 = 0;
  int k = 0;
  bool symmetric_psd = false;
  DenseMatrix x;
  std::vector<double> s;
  DenseMatrix y;
};

struct ProblemStats {
  double mu = 0.0;            // max of row-coherences of x and y
  double kappa = 0.0;         // s[0] / s[k-1]
  double frob_norm_sq = 0.0;  // sum s^2
};

// (d/k) * max_i ||row_i(w)||^2 for orthonormal w; in [1, d/k].
// Throws ConfigError if ||w^T w - I||_F > 1e-8.
double coherence(const DenseMatrix& w);

// Random instance: orthonormal factors from seeded Gaussians, geometric
// spectrum s[l] = kappa_target^(-l/(k-1)) so kappa(M) == kappa_target and
// ||M|| == 1. kappa_target >= 1, 1 <= k <= min(d1, d2); PSD needs d1 == d2.
GroundTruth gen_ground_truth(int d1, int d2, int k, double kappa_target,
                             std::uint64_t seed, bool symmetric_psd);

// M_ij in O(k). Throws ConfigError on out-of-range indices.
double entry(const GroundTruth& gt, int i, int j);

ProblemStats stats(const GroundTruth& gt);

// JSON (de)serialization; doubles survive byte-exactly (shortest round-trip
// formatting), so save-then-load-then-save reproduces identical files.
void save_ground_truth(const GroundTruth& gt, const std::string& path);
GroundTruth load_ground_truth(const std::string& path);
std::string ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const std::string& text);

}  // namespace omc
