#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omc/model.hpp"

namespace omc {

// One property check outcome. `worst` is the extreme margin observed
// (violation amount for inequality checks, deviation for equality checks);
// sign convention per check, but pass == (violations == 0 && ran to plan).
struct CheckReport {
  std::string name;
  bool pass = false;
  int trials = 0;
  int violations = 0;
  double worst = 0.0;
  std::string details;
};

// Averaged stochastic gradient over all d1*d2 cells equals the population
// gradient entrywise within tol. v == nullptr selects the PSD form.
CheckReport check_unbiasedness(const GroundTruth& gt, const DenseMatrix& u,
                               const DenseMatrix* v, double tol = 1e-10);

// Gradient Lipschitz bound on the spectral-norm ball of radius gamma_cap:
//   PSD:  ||grad f(U1) - grad f(U2)||_F <= 16 max(cap^2, ||M||) ||U1 - U2||_F
//   asym: squared stacked form with beta = 8 max(cap^2, ||M||).
// Every 4th trial is a rank-1 pair aligned with its own top direction, which
// realizes most of the constant. beta_scale multiplies the constant; 0.5 is
// the negative-control fixture that must make the check fail (requires
// gamma_cap^2 >= ||M||, else the cubic term can't reach half the bound).
CheckReport check_smoothness(const GroundTruth& gt, bool psd_form,
                             double gamma_cap, int trials, std::uint64_t seed,
                             double beta_scale = 1.0);

// ||grad f||_F^2 >= 4 gamma^2 f - slack with gamma the realized alignment
// sigma_min(x^T U) (min of both sides for the asymmetric form), over states
// blending aligned and random components.
CheckReport check_pseudo_convexity(const GroundTruth& gt, bool psd_form,
                                   int trials, std::uint64_t seed);

// Inside the region ||M - U V^T||_F <= sigma_k / 10 (balanced split for the
// asymmetric form), the factors obey ||U|| <= sqrt(2 ||M||) and
// sigma_min(x^T U) >= sqrt(sigma_k / 2) (same on the V side).
CheckReport check_local_region(const GroundTruth& gt, bool psd_form,
                               int accepted_target, std::uint64_t seed);

// Theoretical and practical asymmetric steppers driven by one observation
// stream from one balanced start keep identical products: relative Frobenius
// gap <= tol after every step.
CheckReport check_equivalence(const GroundTruth& gt, int steps, double eta,
                              std::uint64_t seed, double tol = 1e-8);

// Median spectral error of the rescaled sparse estimator shrinks with m:
// strictly decreasing down a doubling ladder with per-rung ratio >= min_ratio.
CheckReport check_init_scaling(const GroundTruth& gt,
                               const std::vector<long long>& m_ladder,
                               int trials, std::uint64_t seed,
                               double min_ratio = 1.3);

// Whole suite at desk scale. beta_scale forwards to the smoothness checks
// (the negative-control fixture runs it at 0.5 and must fail).
std::vector<CheckReport> run_all_checks(std::uint64_t seed,
                                        double beta_scale = 1.0);

std::string reports_to_json(const std::vector<CheckReport>& reports);

}  // namespace omc
