#include "omc/sgd.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "omc/errors.hpp"

namespace omc {

namespace {

void gram_rank_one_update(DenseMatrix& gram, const std::vector<double>& oldr,
                          const double* newr) {
  int k = gram.cols;
  for (int p = 0; p < k; ++p) {
    double* gp = gram.row(p);
    for (int q = 0; q < k; ++q)
      gp[q] += newr[p] * newr[q] - oldr[p] * oldr[q];
  }
}

void check_residual_finite(double r, long long step) {
  if (!std::isfinite(r))
    throw DivergenceError(
        "non-finite residual at step " + std::to_string(step), step);
}

double gram_drift(const DenseMatrix& cached, const DenseMatrix& exact) {
  double diff = 0.0, ref = 0.0;
  for (std::size_t t = 0; t < cached.a.size(); ++t) {
    double d = cached.a[t] - exact.a[t];
    diff += d * d;
    ref += exact.a[t] * exact.a[t];
  }
  return std::sqrt(diff) / (1.0 + std::sqrt(ref));
}

}  // namespace

PsdState make_psd_state(DenseMatrix u0) {
  PsdState st;
  st.gram = matmul_at_b(u0, u0);
  st.u = std::move(u0);
  st.step = 0;
  return st;
}

AsymState make_asym_state(DenseMatrix u0, DenseMatrix v0) {
  if (u0.cols != v0.cols) throw ConfigError("make_asym_state: width mismatch");
  AsymState st;
  st.gram_u = matmul_at_b(u0, u0);
  st.gram_v = matmul_at_b(v0, v0);
  st.u = std::move(u0);
  st.v = std::move(v0);
  st.step = 0;
  return st;
}

void step_psd(PsdState& st, const Entry& obs, double eta) {
  int k = st.u.cols;
  int d = st.u.rows;
  double r = dot_rows(st.u, obs.i, st.u, obs.j) - obs.value;
  check_residual_finite(r, st.step);
  double c = 2.0 * eta * double(d) * double(d) * r;
  if (obs.i == obs.j) {
    double* ui = st.u.row(obs.i);
    std::vector<double> oldi(ui, ui + k);
    double f = 1.0 - 2.0 * c;
    for (int l = 0; l < k; ++l) ui[l] = f * oldi[l];
    gram_rank_one_update(st.gram, oldi, ui);
  } else {
    double* ui = st.u.row(obs.i);
    double* uj = st.u.row(obs.j);
    std::vector<double> oldi(ui, ui + k), oldj(uj, uj + k);
    for (int l = 0; l < k; ++l) {
      ui[l] = oldi[l] - c * oldj[l];
      uj[l] = oldj[l] - c * oldi[l];
    }
    gram_rank_one_update(st.gram, oldi, ui);
    gram_rank_one_update(st.gram, oldj, uj);
  }
  ++st.step;
}

void step_asym_theoretical(AsymState& st, const Entry& obs, double eta) {
  int k = st.u.cols;
  // Renormalize first: replace (U, V) by the balanced split of their product.
  SvdTriple t = svd_product(st.u, st.v);
  if (t.sv.back() < 1e-12)
    throw DegeneracyError("product rank collapsed (sigma_k = " +
                              std::to_string(t.sv.back()) + ") at step " +
                              std::to_string(st.step),
                          st.step);
  std::vector<double> root(t.sv.size());
  for (std::size_t l = 0; l < root.size(); ++l) root[l] = std::sqrt(t.sv[l]);
  scale_cols_inplace(t.left, root);
  scale_cols_inplace(t.right, root);
  st.u = std::move(t.left);
  st.v = std::move(t.right);

  double r = dot_rows(st.u, obs.i, st.v, obs.j) - obs.value;
  check_residual_finite(r, st.step);
  double c = 2.0 * eta * double(st.u.rows) * double(st.v.rows) * r;
  double* ui = st.u.row(obs.i);
  double* vj = st.v.row(obs.j);
  std::vector<double> oldu(ui, ui + k), oldv(vj, vj + k);
  for (int l = 0; l < k; ++l) {
    ui[l] = oldu[l] - c * oldv[l];
    vj[l] = oldv[l] - c * oldu[l];
  }
  // Renormalization rewrote both factors wholesale; recompute grams exactly
  // (same O(d k^2) order as the renormalization itself).
  st.gram_u = matmul_at_b(st.u, st.u);
  st.gram_v = matmul_at_b(st.v, st.v);
  ++st.step;
}

void step_asym_practical(AsymState& st, const Entry& obs, double eta) {
  int k = st.u.cols;
  // Eigen-structure of the cached grams (symmetric PSD, so the SVD is the
  // eigendecomposition): gram_u = R_u D_u R_u^T, gram_v = R_v D_v R_v^T.
  SvdTriple eu = svd_small(st.gram_u);
  SvdTriple ev = svd_small(st.gram_v);
  if (eu.sv.back() < 1e-12 || ev.sv.back() < 1e-12)
    throw DegeneracyError("factor gram lost rank (eig_min = " +
                              std::to_string(std::min(eu.sv.back(),
                                                      ev.sv.back())) +
                              ") at step " + std::to_string(st.step),
                          st.step);
  std::vector<double> ru_root(k), ru_inv(k), rv_root(k), rv_inv(k);
  for (int l = 0; l < k; ++l) {
    ru_root[l] = std::sqrt(eu.sv[l]);
    ru_inv[l] = 1.0 / ru_root[l];
    rv_root[l] = std::sqrt(ev.sv[l]);
    rv_inv[l] = 1.0 / rv_root[l];
  }
  // Core D_u^{1/2} R_u^T R_v D_v^{1/2} = Q_u D Q_v^T carries the product's
  // singular structure; T_u, T_v are the whitening maps that reproduce the
  // balanced-split update without touching the tall factors.
  DenseMatrix core = matmul_at_b(eu.left, ev.left);
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q) core(p, q) *= ru_root[p] * rv_root[q];
  SvdTriple cs = svd_small(core);

  // T_v = R_v D_v^{-1/2} Q_v Q_u^T D_u^{1/2} R_u^T.
  DenseMatrix tv = ev.left;
  scale_cols_inplace(tv, rv_inv);
  tv = matmul(tv, cs.right);
  tv = matmul_abt(tv, cs.left);
  scale_cols_inplace(tv, ru_root);
  tv = matmul_abt(tv, eu.left);
  // T_u = R_u D_u^{-1/2} Q_u Q_v^T D_v^{1/2} R_v^T.
  DenseMatrix tu = eu.left;
  scale_cols_inplace(tu, ru_inv);
  tu = matmul(tu, cs.left);
  tu = matmul_abt(tu, cs.right);
  scale_cols_inplace(tu, rv_root);
  tu = matmul_abt(tu, ev.left);

  double r = dot_rows(st.u, obs.i, st.v, obs.j) - obs.value;
  check_residual_finite(r, st.step);
  double c = 2.0 * eta * double(st.u.rows) * double(st.v.rows) * r;
  double* ui = st.u.row(obs.i);
  double* vj = st.v.row(obs.j);
  std::vector<double> oldu(ui, ui + k), oldv(vj, vj + k);
  for (int q = 0; q < k; ++q) {
    double vt = 0.0, ut = 0.0;
    for (int p = 0; p < k; ++p) {
      vt += oldv[p] * tv(p, q);
      ut += oldu[p] * tu(p, q);
    }
    ui[q] = oldu[q] - c * vt;
    vj[q] = oldv[q] - c * ut;
  }
  gram_rank_one_update(st.gram_u, oldu, ui);
  gram_rank_one_update(st.gram_v, oldv, vj);
  ++st.step;
}

void refresh_gram(PsdState& st, double tol) {
  DenseMatrix exact = matmul_at_b(st.u, st.u);
  double drift = gram_drift(st.gram, exact);
  if (drift > tol)
    throw ConsistencyError("psd gram drift " + std::to_string(drift) +
                           " exceeds " + std::to_string(tol) + " at step " +
                           std::to_string(st.step));
  st.gram = std::move(exact);
}

void refresh_gram(AsymState& st, double tol) {
  DenseMatrix exact_u = matmul_at_b(st.u, st.u);
  DenseMatrix exact_v = matmul_at_b(st.v, st.v);
  double drift = std::max(gram_drift(st.gram_u, exact_u),
                          gram_drift(st.gram_v, exact_v));
  if (drift > tol)
    throw ConsistencyError("asym gram drift " + std::to_string(drift) +
                           " exceeds " + std::to_string(tol) + " at step " +
                           std::to_string(st.step));
  st.gram_u = std::move(exact_u);
  st.gram_v = std::move(exact_v);
}

namespace {

StepTrace checkpoint_psd(const GroundTruth& gt, const PsdState& st,
                         long long step, long long elapsed_ns) {
  StepTrace tr;
  tr.step = step;
  tr.f = frob_error_sq(gt, st.u, st.u);
  tr.max_g = max_row_leverage_psd(st.u);
  tr.max_h = tr.max_g;
  tr.sigma_min_align_u = alignment_sigma_min(gt.x, st.u);
  tr.sigma_min_align_v = tr.sigma_min_align_u;
  tr.spectral_norm_u = std::sqrt(std::max(0.0, svd_small(st.gram).sv.front()));
  tr.elapsed_ns = elapsed_ns;
  return tr;
}

StepTrace checkpoint_asym(const GroundTruth& gt, const AsymState& st,
                          long long step, long long elapsed_ns) {
  StepTrace tr;
  tr.step = step;
  tr.f = frob_error_sq(gt, st.u, st.v);
  tr.max_g = max_row_leverage(st.u, st.gram_v);
  tr.max_h = max_row_leverage(st.v, st.gram_u);
  tr.sigma_min_align_u = alignment_sigma_min(gt.x, st.u);
  tr.sigma_min_align_v = alignment_sigma_min(gt.y, st.v);
  tr.spectral_norm_u =
      std::sqrt(std::max(0.0, svd_small(st.gram_u).sv.front()));
  tr.elapsed_ns = elapsed_ns;
  return tr;
}

}  // namespace

RunResult run(const GroundTruth& gt, const RunConfig& cfg) {
  validate_config(cfg);
  if (gt.d1 != cfg.d1 || gt.d2 != cfg.d2 || gt.k != cfg.k)
    throw ConfigError("run: ground truth does not match config dimensions");
  bool psd = cfg.algorithm == Algorithm::kPsd;
  if (psd && !gt.symmetric_psd)
    throw ConfigError("run: psd algorithm needs a PSD instance");
  ProblemStats ps = stats(gt);

  RunResult res;
  res.eta = resolve_eta(cfg, ps);

  EntrySampler init_sampler(cfg.seed, kStreamInitSet, gt.d1, gt.d2);
  res.init_set = init_sampler.sample_init_set(gt, cfg.m_init);

  PsdState pst;
  AsymState ast;
  try {
    if (psd) {
      DenseMatrix u0 = initialize_psd(res.init_set, gt.d1, gt.k, cfg.seed,
                                      cfg.init_power_iters);
      res.init = init_quality(gt, u0, nullptr);
      pst = make_psd_state(std::move(u0));
    } else {
      auto [u0, v0] = initialize_asym(res.init_set, gt.d1, gt.d2, gt.k,
                                      cfg.seed, cfg.init_power_iters);
      res.init = init_quality(gt, u0, &v0);
      ast = make_asym_state(std::move(u0), std::move(v0));
    }
  } catch (const DegeneracyError& e) {
    res.status = RunStatus::kDegenerate;
    res.fail_step = -1;
    res.message = std::string("initialization failed: ") + e.what();
    return res;
  }

  EntrySampler online(cfg.seed, kStreamOnline, gt.d1, gt.d2);
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return (long long)std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now() - t0)
        .count();
  };
  auto checkpoint = [&](long long step) {
    StepTrace tr = psd ? checkpoint_psd(gt, pst, step, elapsed())
                       : checkpoint_asym(gt, ast, step, elapsed());
    res.trace.push_back(tr);
    return tr.f;
  };

  double f0 = checkpoint(0);
  // Divergence threshold; the additive floor keeps a numerically exact
  // initialization from tripping on roundoff noise.
  double f_limit = 10.0 * f0 + 1e-9 * ps.frob_norm_sq;
  bool theoretical = cfg.algorithm == Algorithm::kAsymTheoretical;
  for (long long t = 1; t <= cfg.steps; ++t) {
    Entry obs = online.next_entry(gt);
    try {
      if (psd)
        step_psd(pst, obs, res.eta);
      else if (theoretical)
        step_asym_theoretical(ast, obs, res.eta);
      else
        step_asym_practical(ast, obs, res.eta);
      if (t % cfg.gram_refresh_interval == 0) {
        if (psd)
          refresh_gram(pst, 1e-6);
        else
          refresh_gram(ast, 1e-6);
      }
    } catch (const DivergenceError& e) {
      res.status = RunStatus::kDiverged;
      res.fail_step = t;
      res.message = e.what();
      break;
    } catch (const DegeneracyError& e) {
      res.status = RunStatus::kDegenerate;
      res.fail_step = t;
      res.message = e.what();
      break;
    }
    if (t % cfg.trace_interval == 0 || t == cfg.steps) {
      // Checkpoints verify the gram invariant at the tighter tolerance and
      // then compute metrics from the exact grams.
      if (psd)
        refresh_gram(pst, 1e-8);
      else
        refresh_gram(ast, 1e-8);
      double f = checkpoint(t);
      if (f > f_limit) {
        res.status = RunStatus::kDiverged;
        res.fail_step = t;
        res.message = "f = " + std::to_string(f) + " exceeded 10x initial " +
                      std::to_string(f0) + " at step " + std::to_string(t);
        break;
      }
    }
  }
  if (psd) {
    res.u = std::move(pst.u);
  } else {
    res.u = std::move(ast.u);
    res.v = std::move(ast.v);
  }
  return res;
}

RunResult run_from_config(const RunConfig& cfg) {
  validate_config(cfg);
  GroundTruth gt =
      gen_ground_truth(cfg.d1, cfg.d2, cfg.k, cfg.kappa, cfg.seed,
                       cfg.algorithm == Algorithm::kPsd);
  return run(gt, cfg);
}

}  // namespace omc
