#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "omc/model.hpp"

namespace omc {

enum class Algorithm { kPsd, kAsymTheoretical, kAsymPractical };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);  // ConfigError if unknown

// Full description of one run. Exactly one of eta / c must be set: eta is
// the literal step size, c the constant in the schedule
//   eta = c / (mu * d * k * kappa^3 * log d),  d = max(d1, d2),
// evaluated with the instance's measured mu and kappa (spectral norm is 1 by
// construction). Ground truth is derived from (d1, d2, k, kappa, seed), the
// offline set has m_init draws, the online phase runs T steps.
struct RunConfig {
  Algorithm algorithm = Algorithm::kPsd;
  int d1 = 0;
  int d2 = 0;
  int k = 0;
  double kappa = 1.0;
  std::optional<double> eta;
  std::optional<double> c;
  long long steps = 0;             // T
  long long m_init = 0;
  long long trace_interval = 1000;
  long long gram_refresh_interval = 1024;
  // Sparse-SVD power steps for initialization. Sampled spectra at modest m
  // contract by only ~0.15 per step near sigma_k, so the pipeline default is
  // well above the bare minimum; extra steps cost O(m k) each.
  int init_power_iters = 25;
  std::uint64_t seed = 0;
};

// Throws ConfigError on any violated constraint (bad counts, eta/c both or
// neither set, PSD with d1 != d2, kappa < 1, ...).
void validate_config(const RunConfig& cfg);

// Canonical JSON (sorted keys); parse accepts exactly the same shape.
std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);

// FNV-1a 64 over the canonical JSON bytes, rendered as 16 hex digits.
// Identical configs hash identically across runs and platforms.
std::string config_hash(const RunConfig& cfg);

double resolve_eta(const RunConfig& cfg, const ProblemStats& ps);

// Offline sample count from the sample-complexity shape
// m = ceil(c0 * mu * d * k^2 * kappa^2 * log d), d = max(d1, d2).
long long recommended_init_samples(double c0, double mu, int d1, int d2, int k,
                                   double kappa);

// Step and offline-sample constants calibrated at desk scale (d = 200 PSD
// and 150x250 practical, k = 3, kappa = 1). The small-step regime decays at
// ~8 eta sigma_min (PSD) / ~4 eta sigma_min (one-sided updates), so a fitted
// rate inside [0.1, 2] eta sigma_min needs the sampling-noise drag of a large
// step; c = 5.5 sits between that band and the divergence edge (c ~ 9 at
// these scales). c0 = 3 keeps the spectral start well clear of degeneracy.
inline constexpr double kDefaultStepConstant = 5.5;
inline constexpr double kDefaultInitConstant = 3.0;

}  // namespace omc
