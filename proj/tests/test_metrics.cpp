#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "omc/metrics.hpp"
#include "omc/rng.hpp"

using namespace omc;

namespace {

DenseMatrix dense_of(const GroundTruth& gt) {
  DenseMatrix sy = gt.y;
  scale_cols_inplace(sy, gt.s);
  return matmul_abt(gt.x, sy);
}

// Reference implementation forming the d1 x d2 residual explicitly.
double frob_error_sq_dense(const GroundTruth& gt, const DenseMatrix& u,
                           const DenseMatrix& v) {
  DenseMatrix m = dense_of(gt);
  DenseMatrix p = matmul_abt(u, v);
  double acc = 0.0;
  for (size_t t = 0; t < m.a.size(); ++t) {
    double d = p.a[t] - m.a[t];
    acc += d * d;
  }
  return acc;
}

DenseMatrix exact_factor_u(const GroundTruth& gt) {
  DenseMatrix u = gt.x;
  std::vector<double> rt(gt.s.size());
  for (size_t l = 0; l < rt.size(); ++l) rt[l] = std::sqrt(gt.s[l]);
  scale_cols_inplace(u, rt);
  return u;
}

DenseMatrix exact_factor_v(const GroundTruth& gt) {
  DenseMatrix v = gt.y;
  std::vector<double> rt(gt.s.size());
  for (size_t l = 0; l < rt.size(); ++l) rt[l] = std::sqrt(gt.s[l]);
  scale_cols_inplace(v, rt);
  return v;
}

}  // namespace

TEST_CASE("frob_error_sq: zero factors give ||M||_F^2 = sum s^2") {
  GroundTruth gt = gen_ground_truth(12, 9, 3, 2.0, 4, false);
  DenseMatrix u(12, 3), v(9, 3);
  double sum2 = 0.0;
  for (double sv : gt.s) sum2 += sv * sv;
  CHECK(frob_error_sq(gt, u, v) == doctest::Approx(sum2).epsilon(1e-14));
}

TEST_CASE("frob_error_sq: the exact balanced split fits to roundoff") {
  GroundTruth gt = gen_ground_truth(10, 14, 3, 3.0, 8, false);
  double f = frob_error_sq(gt, exact_factor_u(gt), exact_factor_v(gt));
  CHECK(f >= 0.0);  // clamped, never a tiny negative
  // The identity cancels O(1) traces, so the floor is ~eps * sum s^2.
  CHECK(f < 1e-13);
}

TEST_CASE("frob_error_sq: matches the dense residual on random iterates") {
  GroundTruth gt = gen_ground_truth(11, 7, 3, 2.5, 19, false);
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    DenseMatrix u = gaussian_matrix(11, 3, rng);
    DenseMatrix v = gaussian_matrix(7, 3, rng);
    double fast = frob_error_sq(gt, u, v);
    double slow = frob_error_sq_dense(gt, u, v);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
  }
}

TEST_CASE("frob_error_sq: PSD convention (same factor twice)") {
  GroundTruth gt = gen_ground_truth(9, 9, 2, 2.0, 6, true);
  Rng rng(7);
  DenseMatrix u = gaussian_matrix(9, 2, rng);
  CHECK(frob_error_sq(gt, u, u) ==
        doctest::Approx(frob_error_sq_dense(gt, u, u)).epsilon(1e-10));
  CHECK(frob_error_sq(gt, exact_factor_u(gt), exact_factor_u(gt)) < 1e-13);
}

TEST_CASE("row leverage: hand matrix and gram reduction") {
  DenseMatrix u(3, 2);
  u(0, 0) = 1.0;
  u(1, 1) = 2.0;
  u(2, 0) = 0.5;
  u(2, 1) = 0.5;
  CHECK(max_row_leverage_psd(u) == doctest::Approx(4.0).epsilon(1e-15));
  // With gram_other = I the asymmetric leverage reduces to the PSD one.
  CHECK(max_row_leverage(u, DenseMatrix::identity(2)) ==
        doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("row leverage: matches the explicit e_i^T U V^T row norm") {
  Rng rng(11);
  DenseMatrix u = gaussian_matrix(8, 3, rng);
  DenseMatrix v = gaussian_matrix(6, 3, rng);
  DenseMatrix p = matmul_abt(u, v);
  double worst = 0.0;
  for (int i = 0; i < 8; ++i) {
    double n2 = 0.0;
    for (int j = 0; j < 6; ++j) n2 += p(i, j) * p(i, j);
    worst = std::max(worst, n2);
  }
  CHECK(max_row_leverage(u, matmul_at_b(v, v)) ==
        doctest::Approx(worst).epsilon(1e-12));
}

TEST_CASE("alignment_sigma_min: exact factor scores sqrt(s_k), rotations free") {
  GroundTruth gt = gen_ground_truth(13, 13, 3, 4.0, 9, true);
  DenseMatrix u = exact_factor_u(gt);
  // x^T U = diag(sqrt(s)), so sigma_min = sqrt(s_k) = sqrt(1/kappa).
  CHECK(alignment_sigma_min(gt.x, u) ==
        doctest::Approx(std::sqrt(0.25)).epsilon(1e-12));
  // Right-multiplying by a rotation leaves singular values untouched.
  Rng rng(3);
  DenseMatrix rot = qr_thin(gaussian_matrix(3, 3, rng)).q;
  CHECK(alignment_sigma_min(gt.x, matmul(u, rot)) ==
        doctest::Approx(std::sqrt(0.25)).epsilon(1e-12));
  // A factor orthogonal to the basis scores zero.
  DenseMatrix perp(13, 3);
  // Build a vector outside span(x) by orthogonalizing e_0..e_2 against x.
  DenseMatrix stack(13, 6);
  for (int i = 0; i < 13; ++i)
    for (int l = 0; l < 3; ++l) stack(i, l) = gt.x(i, l);
  stack(0, 3) = 1.0;
  stack(1, 4) = 1.0;
  stack(2, 5) = 1.0;
  DenseMatrix q = qr_thin(stack).q;
  for (int i = 0; i < 13; ++i)
    for (int l = 0; l < 3; ++l) perp(i, l) = q(i, l + 3);
  CHECK(alignment_sigma_min(gt.x, perp) < 1e-12);
}

TEST_CASE("spectral_norm_factor: agrees with the svd of the factor") {
  Rng rng(13);
  DenseMatrix u = gaussian_matrix(10, 3, rng);
  SvdTriple t = svd_small(u);
  CHECK(spectral_norm_factor(u) == doctest::Approx(t.sv[0]).epsilon(1e-12));
}

TEST_CASE("gradients: vanish at the exact factorization") {
  GroundTruth psd = gen_ground_truth(10, 10, 3, 2.0, 14, true);
  DenseMatrix g = full_gradient_psd(psd, exact_factor_u(psd));
  CHECK(frob_norm(g) < 1e-12);

  GroundTruth asym = gen_ground_truth(10, 8, 3, 2.0, 15, false);
  DenseMatrix gu, gv;
  full_gradient_asym(asym, exact_factor_u(asym), exact_factor_v(asym), gu, gv);
  CHECK(frob_norm(gu) < 1e-12);
  CHECK(frob_norm(gv) < 1e-12);
}

TEST_CASE("gradients: match central finite differences of f") {
  const double h = 1e-6;
  GroundTruth psd = gen_ground_truth(7, 7, 2, 2.0, 23, true);
  Rng rng(29);
  DenseMatrix u = gaussian_matrix(7, 2, rng);
  DenseMatrix g = full_gradient_psd(psd, u);
  for (int idx : {0, 5, 9, 13}) {
    DenseMatrix up = u, dn = u;
    up.a[idx] += h;
    dn.a[idx] -= h;
    double fd =
        (frob_error_sq(psd, up, up) - frob_error_sq(psd, dn, dn)) / (2 * h);
    CHECK(g.a[idx] == doctest::Approx(fd).epsilon(1e-6));
  }

  GroundTruth asym = gen_ground_truth(6, 9, 2, 2.0, 31, false);
  DenseMatrix au = gaussian_matrix(6, 2, rng);
  DenseMatrix av = gaussian_matrix(9, 2, rng);
  DenseMatrix gu, gv;
  full_gradient_asym(asym, au, av, gu, gv);
  for (int idx : {0, 3, 7, 11}) {
    DenseMatrix up = au, dn = au;
    up.a[idx] += h;
    dn.a[idx] -= h;
    double fd =
        (frob_error_sq(asym, up, av) - frob_error_sq(asym, dn, av)) / (2 * h);
    CHECK(gu.a[idx] == doctest::Approx(fd).epsilon(1e-6));
  }
  for (int idx : {0, 4, 10, 17}) {
    DenseMatrix up = av, dn = av;
    up.a[idx] += h;
    dn.a[idx] -= h;
    double fd =
        (frob_error_sq(asym, au, up) - frob_error_sq(asym, au, dn)) / (2 * h);
    CHECK(gv.a[idx] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("gradients: PSD gradient equals 4 (U U^T - M) U assembled densely") {
  GroundTruth gt = gen_ground_truth(8, 8, 3, 3.0, 37, true);
  Rng rng(41);
  DenseMatrix u = gaussian_matrix(8, 3, rng);
  DenseMatrix m = dense_of(gt);
  DenseMatrix resid = matmul_abt(u, u);
  for (size_t t = 0; t < resid.a.size(); ++t) resid.a[t] -= m.a[t];
  DenseMatrix want = matmul(resid, u);
  for (double& x : want.a) x *= 4.0;
  CHECK(max_abs_diff(full_gradient_psd(gt, u), want) < 1e-12);
}
