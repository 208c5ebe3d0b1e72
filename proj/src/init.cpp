#include "omc/init.hpp"

#include <cmath>
#include <string>

#include "omc/errors.hpp"
#include "omc/metrics.hpp"

namespace omc {

namespace {

// Zero threshold relative to the leading direction; directions at or below
// it do not count as surviving rank.
bool direction_dead(double sv, double sv_max) {
  return !(sv > 1e-12 * sv_max) || sv == 0.0;
}

void require_full_rank(const std::vector<double>& sv, int k,
                       const char* which) {
  double sv_max = sv.empty() ? 0.0 : sv.front();
  int alive = 0;
  for (double s : sv)
    if (!direction_dead(s, sv_max)) ++alive;
  if (alive < k)
    throw DegeneracyError(std::string(which) + ": only " +
                          std::to_string(alive) + " of " + std::to_string(k) +
                          " directions survived; increase the offline sample "
                          "count m");
}

DenseMatrix scaled_factor(const DenseMatrix& w, const std::vector<double>& sv) {
  DenseMatrix f = w;
  std::vector<double> root(sv.size());
  for (std::size_t l = 0; l < sv.size(); ++l) root[l] = std::sqrt(sv[l]);
  scale_cols_inplace(f, root);
  return f;
}

}  // namespace

DenseMatrix initialize_psd(const std::vector<Entry>& init_set, int d, int k,
                           std::uint64_t seed, int power_iters) {
  if (init_set.empty()) throw ConfigError("initialize_psd: empty sample set");
  // Symmetrize: each observation contributes half at (i,j) and half at (j,i),
  // so the estimator equals (A + A^T)/2 exactly and U0 U0^T is symmetric no
  // matter how lopsided the sampled pattern is.
  std::vector<Entry> sym;
  sym.reserve(init_set.size() * 2);
  for (const Entry& e : init_set) {
    sym.push_back(Entry{e.i, e.j, e.value * 0.5});
    sym.push_back(Entry{e.j, e.i, e.value * 0.5});
  }
  double scale = double(d) * double(d) / double(init_set.size());
  SvdTriple t = topk_svd_sparse(sym, scale, d, d, k, power_iters,
                                stream_seed(seed, kStreamInitSvd));
  // The SVD loses eigenvalue signs; recover each via the Rayleigh quotient
  // of its singular vector against the scaled estimator and clip negatives.
  for (int l = 0; l < k; ++l) {
    double ray = 0.0;
    for (const Entry& e : sym) ray += e.value * t.left(e.i, l) * t.left(e.j, l);
    ray *= scale;
    if (ray < 0.0) t.sv[l] = 0.0;
  }
  require_full_rank(t.sv, k, "initialize_psd");
  return scaled_factor(t.left, t.sv);
}

std::pair<DenseMatrix, DenseMatrix> initialize_asym(
    const std::vector<Entry>& init_set, int d1, int d2, int k,
    std::uint64_t seed, int power_iters) {
  if (init_set.empty()) throw ConfigError("initialize_asym: empty sample set");
  double scale = double(d1) * double(d2) / double(init_set.size());
  SvdTriple t = topk_svd_sparse(init_set, scale, d1, d2, k, power_iters,
                                stream_seed(seed, kStreamInitSvd));
  require_full_rank(t.sv, k, "initialize_asym");
  return {scaled_factor(t.left, t.sv), scaled_factor(t.right, t.sv)};
}

InitQuality init_quality(const GroundTruth& gt, const DenseMatrix& u0,
                         const DenseMatrix* v0) {
  ProblemStats ps = stats(gt);
  double norm_m = gt.s.front();
  double sigma_min = gt.s.back();
  InitQuality q;
  q.bound_frob = sigma_min / 20.0;
  if (v0 == nullptr) {
    if (!gt.symmetric_psd)
      throw ConfigError("init_quality: PSD conventions need a PSD instance");
    q.frob_err = std::sqrt(frob_error_sq(gt, u0, u0));
    q.max_row_leverage_u = max_row_leverage_psd(u0);
    q.max_row_leverage_v = q.max_row_leverage_u;
    q.bound_row_u =
        10.0 * ps.mu * gt.k * ps.kappa / double(gt.d1) * norm_m;
    q.bound_row_v = q.bound_row_u;
  } else {
    q.frob_err = std::sqrt(frob_error_sq(gt, u0, *v0));
    DenseMatrix gram_u = matmul_at_b(u0, u0);
    DenseMatrix gram_v = matmul_at_b(*v0, *v0);
    q.max_row_leverage_u = max_row_leverage(u0, gram_v);
    q.max_row_leverage_v = max_row_leverage(*v0, gram_u);
    q.bound_row_u = 10.0 * ps.mu * gt.k / double(gt.d1) * norm_m;
    q.bound_row_v = 10.0 * ps.mu * gt.k / double(gt.d2) * norm_m;
  }
  q.frob_ok = q.frob_err <= q.bound_frob;
  q.row_u_ok = q.max_row_leverage_u <= q.bound_row_u;
  q.row_v_ok = q.max_row_leverage_v <= q.bound_row_v;
  q.inside_region = q.frob_ok && q.row_u_ok && q.row_v_ok;
  return q;
}

}  // namespace omc
