#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "omc/errors.hpp"
#include "omc/rng.hpp"
#include "omc/sgd.hpp"

using namespace omc;

namespace {

DenseMatrix ones_factor(int d, int k, double val) {
  DenseMatrix m(d, k);
  for (double& x : m.a) x = val;
  return m;
}

DenseMatrix random_factor(int d, int k, std::uint64_t seed, double scale) {
  Rng rng(seed);
  DenseMatrix m = gaussian_matrix(d, k, rng);
  for (double& x : m.a) x *= scale;
  return m;
}

}  // namespace

TEST_CASE("step_psd: worked 2x2 rank-1 off-diagonal update") {
  // M = 0.5 * ones(2,2) = u u^T with u = (1/sqrt2, 1/sqrt2); start from
  // u = (1, 1)^T (as a 2x1 factor), observe (0, 1): residual
  // r = u_0 u_1 - 0.5 = 0.5, c = 2*eta*4*0.5 = 4 eta.
  const double eta = 1e-3;
  PsdState st = make_psd_state(ones_factor(2, 1, 1.0));
  step_psd(st, {0, 1, 0.5}, eta);
  double c = 4.0 * eta;
  // Both updates read the OLD opposite row: row0 = 1 - c*1, row1 = 1 - c*1.
  CHECK(st.u(0, 0) == doctest::Approx(1.0 - c).epsilon(1e-15));
  CHECK(st.u(1, 0) == doctest::Approx(1.0 - c).epsilon(1e-15));
  CHECK(st.step == 1);
}

TEST_CASE("step_psd: worked diagonal update") {
  // Same M, observe (0, 0): r = 1 - 0.5 = 0.5, c = 4 eta,
  // row0 <- (1 - 2c) row0; row1 untouched.
  const double eta = 1e-3;
  PsdState st = make_psd_state(ones_factor(2, 1, 1.0));
  step_psd(st, {0, 0, 0.5}, eta);
  CHECK(st.u(0, 0) == doctest::Approx(1.0 - 8.0 * eta).epsilon(1e-15));
  CHECK(st.u(1, 0) == 1.0);
}

TEST_CASE("step_psd: untouched rows are bit-identical, gram tracks exactly") {
  PsdState st = make_psd_state(random_factor(12, 3, 5, 0.4));
  DenseMatrix before = st.u;
  step_psd(st, {4, 9, 0.123}, 1e-3);
  for (int i = 0; i < 12; ++i) {
    if (i == 4 || i == 9) continue;
    for (int l = 0; l < 3; ++l) CHECK(st.u(i, l) == before(i, l));
  }
  DenseMatrix exact = matmul_at_b(st.u, st.u);
  CHECK(max_abs_diff(st.gram, exact) < 1e-13);
}

TEST_CASE("step_psd: zero residual leaves the state bit-identical") {
  DenseMatrix u0 = random_factor(8, 2, 9, 0.3);
  PsdState st = make_psd_state(u0);
  double m23 = dot_rows(st.u, 2, st.u, 3);
  step_psd(st, {2, 3, m23}, 1e-2);
  CHECK(max_abs_diff(st.u, u0) == 0.0);
}

TEST_CASE("step_psd: rejects a non-finite update") {
  PsdState st = make_psd_state(ones_factor(4, 2, 1e200));
  CHECK_THROWS_AS(step_psd(st, {0, 1, 0.0}, 1e300), DivergenceError);
}

TEST_CASE("step_asym_theoretical: zero residual is a renormalization no-op") {
  // With r = 0 the row update vanishes, so the product must be preserved
  // exactly (renormalization only rebalances the factors).
  DenseMatrix u0 = random_factor(10, 2, 11, 0.5);
  DenseMatrix v0 = random_factor(7, 2, 12, 0.5);
  DenseMatrix p0 = matmul_abt(u0, v0);
  AsymState st = make_asym_state(u0, v0);
  double m34 = dot_rows(st.u, 3, st.v, 4);
  step_asym_theoretical(st, {3, 4, m34}, 1e-3);
  CHECK(max_abs_diff(matmul_abt(st.u, st.v), p0) < 1e-12);
  // And the returned pair is balanced: U^T U == V^T V.
  CHECK(max_abs_diff(matmul_at_b(st.u, st.u), matmul_at_b(st.v, st.v)) <
        1e-12);
}

TEST_CASE("step_asym_theoretical: hand-checked rank-1 update") {
  // Balanced rank-1 start: u = a x, v = a y with unit x, y; the pair is
  // already the canonical SVD split, so renormalization is the identity up
  // to sign and the update is the plain rank-one touch of rows i, j.
  const int d1 = 3, d2 = 4;
  const double eta = 1e-4;
  DenseMatrix u0(3, 1), v0(4, 1);
  u0(0, 0) = 0.6;
  u0(1, 0) = 0.8;  // ||u|| = 1, scaled by a = 1 below
  v0(2, 0) = 1.0;
  AsymState st = make_asym_state(u0, v0);
  // Observe (1, 2): true value 0.9 say; current product u_1 v_2 = 0.8.
  double r = 0.8 - 0.9;
  double c = 2.0 * eta * d1 * d2 * r;
  step_asym_theoretical(st, {1, 2, 0.9}, eta);
  // Signs of the SVD split are only defined up to a joint flip; compare the
  // product, which is sign-invariant.
  DenseMatrix p = matmul_abt(st.u, st.v);
  // (0.8 - c)(1 - 0.8 c) expanded.
  CHECK(p(1, 2) ==
        doctest::Approx(0.8 - 1.64 * c + 0.8 * c * c).epsilon(1e-12));
  // Untouched cell follows only from row 0 of U: new u_0 v_3 = 0 still.
  CHECK(p(0, 3) == doctest::Approx(0.0));
}

TEST_CASE("step_asym_theoretical: rank collapse raises DegeneracyError") {
  AsymState st = make_asym_state(ones_factor(5, 2, 0.3), ones_factor(6, 2, 0.3));
  // Both factors rank 1, so sigma_2 of the product is 0 < 1e-12.
  CHECK_THROWS_AS(step_asym_theoretical(st, {0, 0, 0.1}, 1e-3),
                  DegeneracyError);
}

TEST_CASE("step_asym_practical: matches the theoretical product trajectory") {
  // Equivalence at the single-step granularity: starting from
  // the same balanced state and feeding the same observation, the two
  // steppers must produce the same product U V^T (they differ only in the
  // basis carried).
  DenseMatrix u0 = random_factor(9, 3, 21, 0.4);
  DenseMatrix v0 = random_factor(11, 3, 22, 0.4);
  AsymState a = make_asym_state(u0, v0);
  AsymState b = make_asym_state(u0, v0);
  Rng rng(33);
  for (int t = 0; t < 40; ++t) {
    int i = int(rng.next_below(9));
    int j = int(rng.next_below(11));
    Entry obs{i, j, 0.05 * rng.next_gaussian()};
    step_asym_theoretical(a, obs, 2e-4);
    step_asym_practical(b, obs, 2e-4);
    DenseMatrix pa = matmul_abt(a.u, a.v);
    DenseMatrix pb = matmul_abt(b.u, b.v);
    CHECK(max_abs_diff(pa, pb) < 1e-10);
  }
}

TEST_CASE("step_asym_practical: identity grams reduce to the raw update") {
  // Orthonormal factors have gram = I, so both whitening transforms are the
  // identity and the step is the plain rank-one touch of rows i and j with
  // the OLD opposite rows.
  Rng rng(44);
  DenseMatrix u0 = qr_thin(gaussian_matrix(8, 2, rng)).q;
  DenseMatrix v0 = qr_thin(gaussian_matrix(6, 2, rng)).q;
  AsymState st = make_asym_state(u0, v0);
  const double eta = 1e-3;
  const Entry obs{2, 5, 0.3};
  double r = dot_rows(u0, 2, v0, 5) - 0.3;
  double c = 2.0 * eta * 8 * 6 * r;
  step_asym_practical(st, obs, eta);
  for (int l = 0; l < 2; ++l) {
    CHECK(st.u(2, l) ==
          doctest::Approx(u0(2, l) - c * v0(5, l)).epsilon(1e-13));
    CHECK(st.v(5, l) ==
          doctest::Approx(v0(5, l) - c * u0(2, l)).epsilon(1e-13));
  }
}

TEST_CASE("step_asym_practical: grams track the factors through many steps") {
  AsymState st = make_asym_state(random_factor(14, 3, 51, 0.4),
                                 random_factor(10, 3, 52, 0.4));
  Rng rng(53);
  for (int t = 0; t < 300; ++t) {
    int i = int(rng.next_below(14));
    int j = int(rng.next_below(10));
    step_asym_practical(st, {i, j, 0.02 * rng.next_gaussian()}, 1e-4);
  }
  CHECK(max_abs_diff(st.gram_u, matmul_at_b(st.u, st.u)) < 1e-10);
  CHECK(max_abs_diff(st.gram_v, matmul_at_b(st.v, st.v)) < 1e-10);
  // refresh_gram at checkpoint tolerance accepts the drift...
  CHECK_NOTHROW(refresh_gram(st, 1e-8));
  // ...and a corrupted cache is caught.
  st.gram_u(0, 0) += 1e-3;
  CHECK_THROWS_AS(refresh_gram(st, 1e-8), ConsistencyError);
}

TEST_CASE("step_asym_practical: zero residual leaves factors bit-identical") {
  DenseMatrix u0 = random_factor(6, 2, 61, 0.5);
  DenseMatrix v0 = random_factor(5, 2, 62, 0.5);
  AsymState st = make_asym_state(u0, v0);
  double m14 = dot_rows(st.u, 1, st.v, 4);
  step_asym_practical(st, {1, 4, m14}, 5e-3);
  CHECK(max_abs_diff(st.u, u0) == 0.0);
  CHECK(max_abs_diff(st.v, v0) == 0.0);
}

TEST_CASE("step_asym_practical: gram rank collapse raises DegeneracyError") {
  AsymState st =
      make_asym_state(ones_factor(5, 2, 0.3), random_factor(6, 2, 63, 0.4));
  CHECK_THROWS_AS(step_asym_practical(st, {0, 0, 0.1}, 1e-3), DegeneracyError);
}

TEST_CASE("run: PSD pipeline converges on a small instance") {
  RunConfig cfg;
  cfg.algorithm = Algorithm::kPsd;
  cfg.d1 = cfg.d2 = 30;
  cfg.k = 2;
  cfg.kappa = 1.5;
  cfg.eta = 2e-3;
  cfg.steps = 20000;
  cfg.m_init = 150000;  // generous: unit test wants a clean basin start
  cfg.trace_interval = 2000;
  cfg.seed = 17;
  RunResult res = run_from_config(cfg);
  REQUIRE(res.status == RunStatus::kOk);
  REQUIRE(!res.trace.empty());
  CHECK(res.trace.front().step == 0);
  CHECK(res.trace.back().step == 20000);
  // Loss decreased substantially from the post-init value.
  CHECK(res.trace.back().f < 0.1 * res.trace.front().f);
  // Trace is checkpointed on the expected grid.
  CHECK(res.trace.size() == 11);
  CHECK(res.init_set.size() == 150000);
  CHECK(res.eta == 2e-3);
}

TEST_CASE("run: asymmetric practical pipeline converges") {
  RunConfig cfg;
  cfg.algorithm = Algorithm::kAsymPractical;
  cfg.d1 = 25;
  cfg.d2 = 35;
  cfg.k = 2;
  cfg.kappa = 1.5;
  cfg.eta = 1.5e-3;
  cfg.steps = 30000;
  cfg.m_init = 200000;
  cfg.trace_interval = 3000;
  cfg.seed = 19;
  RunResult res = run_from_config(cfg);
  REQUIRE(res.status == RunStatus::kOk);
  CHECK(res.trace.back().f < 0.1 * res.trace.front().f);
  // PSD mirror fields hold the asymmetric quantities.
  CHECK(res.trace.back().max_h > 0.0);
  CHECK(res.trace.back().sigma_min_align_v > 0.0);
}

TEST_CASE("run: T = 0 returns the initialization with a single checkpoint") {
  RunConfig cfg;
  cfg.algorithm = Algorithm::kPsd;
  cfg.d1 = cfg.d2 = 12;
  cfg.k = 2;
  cfg.kappa = 1.0;
  cfg.eta = 1e-3;
  cfg.steps = 0;
  cfg.m_init = 2000;
  cfg.seed = 23;
  RunResult res = run_from_config(cfg);
  REQUIRE(res.status == RunStatus::kOk);
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0].step == 0);
  CHECK(res.trace[0].f == doctest::Approx(res.init.frob_err * res.init.frob_err)
                              .epsilon(1e-10));
}

TEST_CASE("run: eta = 0 leaves the loss exactly flat") {
  RunConfig cfg;
  cfg.algorithm = Algorithm::kAsymPractical;
  cfg.d1 = 10;
  cfg.d2 = 12;
  cfg.k = 2;
  cfg.kappa = 1.0;
  cfg.eta = 0.0;
  cfg.steps = 5000;
  cfg.m_init = 5000;
  cfg.trace_interval = 1000;
  cfg.seed = 29;
  RunResult res = run_from_config(cfg);
  REQUIRE(res.status == RunStatus::kOk);
  for (const StepTrace& t : res.trace)
    CHECK(t.f == doctest::Approx(res.trace[0].f).epsilon(1e-12));
}

TEST_CASE("run: a huge step size is reported as divergence, not a crash") {
  RunConfig cfg;
  cfg.algorithm = Algorithm::kPsd;
  cfg.d1 = cfg.d2 = 20;
  cfg.k = 2;
  cfg.kappa = 1.0;
  cfg.eta = 10.0;  // far beyond any stable step
  cfg.steps = 5000;
  cfg.m_init = 20000;
  cfg.trace_interval = 100;
  cfg.seed = 31;
  RunResult res = run_from_config(cfg);
  CHECK(res.status == RunStatus::kDiverged);
  CHECK(res.fail_step >= 0);
  CHECK(!res.message.empty());
}

TEST_CASE("run: deterministic replay produces identical traces and factors") {
  RunConfig cfg;
  cfg.algorithm = Algorithm::kAsymPractical;
  cfg.d1 = 15;
  cfg.d2 = 18;
  cfg.k = 2;
  cfg.kappa = 1.5;
  cfg.eta = 1e-3;
  cfg.steps = 4000;
  cfg.m_init = 30000;
  cfg.trace_interval = 500;
  cfg.seed = 37;
  RunResult a = run_from_config(cfg);
  RunResult b = run_from_config(cfg);
  REQUIRE(a.status == RunStatus::kOk);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t t = 0; t < a.trace.size(); ++t) {
    CHECK(a.trace[t].f == b.trace[t].f);
    CHECK(a.trace[t].max_g == b.trace[t].max_g);
  }
  CHECK(max_abs_diff(a.u, b.u) == 0.0);
  CHECK(max_abs_diff(a.v, b.v) == 0.0);
}

TEST_CASE("config: resolve_eta applies the schedule formula") {
  RunConfig cfg;
  cfg.algorithm = Algorithm::kPsd;
  cfg.d1 = cfg.d2 = 100;
  cfg.k = 3;
  cfg.kappa = 2.0;
  cfg.c = 0.5;
  cfg.steps = 1;
  cfg.m_init = 1;
  ProblemStats ps;
  ps.mu = 3.0;
  ps.kappa = 2.0;
  double want = 0.5 / (3.0 * 100.0 * 3.0 * 8.0 * std::log(100.0));
  CHECK(resolve_eta(cfg, ps) == doctest::Approx(want).epsilon(1e-12));
  // Literal eta wins when set.
  cfg.c.reset();
  cfg.eta = 7e-4;
  CHECK(resolve_eta(cfg, ps) == 7e-4);
}

TEST_CASE("config: validation rejects malformed setups") {
  RunConfig cfg;
  cfg.algorithm = Algorithm::kPsd;
  cfg.d1 = 10;
  cfg.d2 = 12;  // PSD needs square
  cfg.k = 2;
  cfg.kappa = 1.0;
  cfg.eta = 1e-3;
  cfg.steps = 10;
  cfg.m_init = 10;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg.d2 = 10;
  CHECK_NOTHROW(validate_config(cfg));
  cfg.c = 0.1;  // both eta and c set
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg.eta.reset();
  cfg.c.reset();  // neither set
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg.eta = 1e-3;
  cfg.kappa = 0.5;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("config: canonical json round trip and stable hash") {
  RunConfig cfg;
  cfg.algorithm = Algorithm::kAsymPractical;
  cfg.d1 = 150;
  cfg.d2 = 250;
  cfg.k = 3;
  cfg.kappa = 2.0;
  cfg.c = 0.4;
  cfg.steps = 200000;
  cfg.m_init = 60000;
  cfg.seed = 99;
  std::string j = config_to_json(cfg);
  RunConfig back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(config_hash(cfg).size() == 16);
  back.seed = 100;
  CHECK(config_hash(back) != config_hash(cfg));
}
