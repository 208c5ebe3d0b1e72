#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "omc/errors.hpp"
#include "omc/model.hpp"
#include "omc/rng.hpp"

using namespace omc;

TEST_CASE("coherence: standard basis columns hit the d/k ceiling") {
  // w = [e1 e2] in R^6: one row per column carries the whole mass.
  DenseMatrix w(6, 2);
  w(0, 0) = 1.0;
  w(1, 1) = 1.0;
  CHECK(coherence(w) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("coherence: maximally flat frame hits the floor of 1") {
  // Normalized DFT-like pair of columns over d = 4: every row norm^2 = k/d.
  DenseMatrix w(4, 2);
  double h = 0.5;
  double signs[4] = {1.0, 1.0, -1.0, -1.0};
  for (int i = 0; i < 4; ++i) {
    w(i, 0) = h;
    w(i, 1) = h * signs[i];
  }
  CHECK(coherence(w) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coherence: matches the brute-force row maximum") {
  Rng rng(99);
  DenseMatrix g = gaussian_matrix(17, 4, rng);
  DenseMatrix q = qr_thin(g).q;
  double worst = 0.0;
  for (int i = 0; i < q.rows; ++i) {
    double n2 = 0.0;
    for (int l = 0; l < q.cols; ++l) n2 += q(i, l) * q(i, l);
    worst = std::max(worst, n2);
  }
  CHECK(coherence(q) == doctest::Approx(17.0 / 4.0 * worst).epsilon(1e-12));
}

TEST_CASE("coherence: rejects a non-orthonormal input") {
  DenseMatrix w(5, 2);
  w(0, 0) = 1.0;
  w(0, 1) = 0.5;  // columns not orthogonal
  w(1, 1) = 1.0;
  CHECK_THROWS_AS(coherence(w), ConfigError);
}

TEST_CASE("gen_ground_truth: spectrum, normalization, orthonormality") {
  GroundTruth gt = gen_ground_truth(40, 30, 4, 8.0, 7, false);
  REQUIRE(int(gt.s.size()) == 4);
  CHECK(gt.s[0] == 1.0);
  CHECK(gt.s[3] == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
  // Geometric interpolation in between.
  CHECK(gt.s[1] == doctest::Approx(std::pow(8.0, -1.0 / 3.0)).epsilon(1e-14));
  CHECK(gt.s[2] == doctest::Approx(std::pow(8.0, -2.0 / 3.0)).epsilon(1e-14));
  CHECK(orthonormality_defect(gt.x) < 1e-12);
  CHECK(orthonormality_defect(gt.y) < 1e-12);

  ProblemStats ps = stats(gt);
  CHECK(ps.kappa == doctest::Approx(8.0).epsilon(1e-12));
  double sum2 = 0.0;
  for (double sv : gt.s) sum2 += sv * sv;
  CHECK(ps.frob_norm_sq == doctest::Approx(sum2).epsilon(1e-14));
  CHECK(ps.mu >= 1.0);
  CHECK(ps.mu <= 40.0 / 4.0);
}

TEST_CASE("gen_ground_truth: k = 1 and kappa = 1 edge spectra") {
  GroundTruth one = gen_ground_truth(12, 12, 1, 1.0, 3, true);
  REQUIRE(int(one.s.size()) == 1);
  CHECK(one.s[0] == 1.0);

  GroundTruth flat = gen_ground_truth(10, 8, 3, 1.0, 5, false);
  for (double sv : flat.s) CHECK(sv == 1.0);
}

TEST_CASE("gen_ground_truth: PSD instances share the factor") {
  GroundTruth gt = gen_ground_truth(15, 15, 3, 2.0, 11, true);
  CHECK(gt.symmetric_psd);
  REQUIRE(gt.y.rows == gt.x.rows);
  for (int i = 0; i < gt.x.rows; ++i)
    for (int l = 0; l < gt.x.cols; ++l) CHECK(gt.y(i, l) == gt.x(i, l));
  // Symmetry of the full matrix follows.
  CHECK(entry(gt, 2, 9) == doctest::Approx(entry(gt, 9, 2)).epsilon(1e-15));
}

TEST_CASE("gen_ground_truth: deterministic in the seed, sensitive to it") {
  GroundTruth a = gen_ground_truth(20, 25, 3, 3.0, 42, false);
  GroundTruth b = gen_ground_truth(20, 25, 3, 3.0, 42, false);
  GroundTruth c = gen_ground_truth(20, 25, 3, 3.0, 43, false);
  CHECK(max_abs_diff(a.x, b.x) == 0.0);
  CHECK(max_abs_diff(a.y, b.y) == 0.0);
  CHECK(max_abs_diff(a.x, c.x) > 1e-3);
}

TEST_CASE("gen_ground_truth: argument validation") {
  CHECK_THROWS_AS(gen_ground_truth(10, 10, 0, 2.0, 1, false), ConfigError);
  CHECK_THROWS_AS(gen_ground_truth(10, 8, 9, 2.0, 1, false), ConfigError);
  CHECK_THROWS_AS(gen_ground_truth(10, 10, 2, 0.5, 1, false), ConfigError);
  CHECK_THROWS_AS(gen_ground_truth(10, 12, 2, 2.0, 1, true), ConfigError);
}

TEST_CASE("entry: agrees with a hand-built factorization") {
  // M = x diag(s) y^T with tiny explicit factors; entries checkable by hand.
  GroundTruth gt;
  gt.d1 = 2;
  gt.d2 = 2;
  gt.k = 2;
  gt.x = DenseMatrix::identity(2);
  gt.y = DenseMatrix(2, 2);
  double r = 1.0 / std::sqrt(2.0);
  gt.y(0, 0) = r;
  gt.y(0, 1) = r;
  gt.y(1, 0) = r;
  gt.y(1, 1) = -r;
  gt.s = {1.0, 0.5};
  CHECK(entry(gt, 0, 0) == doctest::Approx(r).epsilon(1e-15));
  CHECK(entry(gt, 0, 1) == doctest::Approx(r).epsilon(1e-15));
  CHECK(entry(gt, 1, 0) == doctest::Approx(0.5 * r).epsilon(1e-15));
  CHECK(entry(gt, 1, 1) == doctest::Approx(-0.5 * r).epsilon(1e-15));
  CHECK_THROWS_AS(entry(gt, 2, 0), ConfigError);
  CHECK_THROWS_AS(entry(gt, 0, -1), ConfigError);
}

TEST_CASE("entry: matches the dense product on a random instance") {
  GroundTruth gt = gen_ground_truth(9, 13, 3, 2.5, 21, false);
  DenseMatrix sy = gt.y;
  scale_cols_inplace(sy, gt.s);
  DenseMatrix m = matmul_abt(gt.x, sy);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 13; ++j)
      CHECK(entry(gt, i, j) == doctest::Approx(m(i, j)).epsilon(1e-14));
}

TEST_CASE("stats: explicit spectrum") {
  GroundTruth gt = gen_ground_truth(10, 10, 3, 4.0, 2, true);
  gt.s = {1.0, 0.5, 0.25};  // overwrite to a hand spectrum
  ProblemStats ps = stats(gt);
  CHECK(ps.kappa == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(ps.frob_norm_sq == doctest::Approx(1.3125).epsilon(1e-15));
}

TEST_CASE("serialization: byte-exact round trip") {
  GroundTruth gt = gen_ground_truth(14, 11, 3, 5.0, 77, false);
  std::string j1 = ground_truth_to_json(gt);
  GroundTruth back = ground_truth_from_json(j1);
  CHECK(back.d1 == gt.d1);
  CHECK(back.d2 == gt.d2);
  CHECK(back.k == gt.k);
  CHECK(back.symmetric_psd == gt.symmetric_psd);
  CHECK(max_abs_diff(back.x, gt.x) == 0.0);
  CHECK(max_abs_diff(back.y, gt.y) == 0.0);
  for (int l = 0; l < 3; ++l) CHECK(back.s[l] == gt.s[l]);
  std::string j2 = ground_truth_to_json(back);
  CHECK(j1 == j2);
}

TEST_CASE("serialization: file save and load") {
  GroundTruth gt = gen_ground_truth(8, 8, 2, 2.0, 5, true);
  std::string path = "model_roundtrip_tmp.json";
  save_ground_truth(gt, path);
  GroundTruth back = load_ground_truth(path);
  CHECK(max_abs_diff(back.x, gt.x) == 0.0);
  CHECK(back.symmetric_psd);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_ground_truth("no_such_file_here.json"), ConfigError);
}

TEST_CASE("serialization: malformed payloads are ConfigError") {
  CHECK_THROWS_AS(ground_truth_from_json("not json at all"), ConfigError);
  CHECK_THROWS_AS(ground_truth_from_json("{\"d1\": 3}"), ConfigError);
}
