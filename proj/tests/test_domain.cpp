#include <doctest.h>

#include <random>

#include "crcmap/rng.hpp"
#include "crcmap/synth.hpp"
#include "crcmap/types.hpp"
#include "testutil.hpp"

using namespace crcmap;

TEST_CASE("score map rejects invalid construction") {
  CHECK_THROWS_AS(ScoreMap(0, 0, 2, {}, {}), Error);
  CHECK_THROWS_AS(ScoreMap(0, 1, 2, {0.5f}, {0}), Error);  // size mismatch
  CHECK_THROWS_AS(ScoreMap(0, 1, 2, {0.5f, 1.5f}, {0, 1}), Error);
  CHECK_THROWS_AS(ScoreMap(0, 1, 2, {0.5f, -0.1f}, {0, 1}), Error);
  CHECK_THROWS_AS(ScoreMap(0, 1, 2, {0.5f, 0.5f}, {0, 2}), Error);
  const float nan = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(ScoreMap(0, 1, 2, {0.5f, nan}, {0, 1}), Error);
  // exact 0 and 1 are legal scores
  CHECK_NOTHROW(ScoreMap(0, 1, 2, {0.0f, 1.0f}, {0, 1}));
}

TEST_CASE("score map set enforces unique ids and uniform dimensions") {
  ScoreMap a(1, 1, 2, {0.1f, 0.2f}, {0, 1});
  ScoreMap b(1, 1, 2, {0.3f, 0.4f}, {0, 1});
  CHECK_THROWS_AS(ScoreMapSet({a, b}), Error);
  ScoreMap c(2, 2, 1, {0.3f, 0.4f}, {0, 1});
  CHECK_THROWS_AS(ScoreMapSet({a, c}), Error);
}

TEST_CASE("spec types validate their ranges") {
  CHECK_THROWS_AS(RiskSpec(0.0), Error);
  CHECK_THROWS_AS(RiskSpec(1.0), Error);
  CHECK_NOTHROW(RiskSpec(0.05));
  CHECK_THROWS_AS(CostSpec(0.0, 1.0), Error);
  CHECK_THROWS_AS(CostSpec(1.0, -2.0), Error);
  CHECK_THROWS_AS(ShiftInterval(0.0, 1.0), Error);
  CHECK_THROWS_AS(ShiftInterval(1.2, 1.1), Error);
  CHECK_NOTHROW(ShiftInterval(1.0, 1.0));
  CHECK_THROWS_AS(Prevalence(1.5), Error);
}

TEST_CASE("prevalence pi0 is derived exactly") {
  Prevalence prev(0.05);
  CHECK(prev.pi0() + prev.pi1() == 1.0);
  CHECK(prev.pi0() == 1.0 - 0.05);
}

TEST_CASE("prevalence_of basic examples") {
  // all positive
  CHECK(prevalence_of(testutil::one_image({0.1f, 0.9f}, {1, 1})).pi1() == 1.0);
  // no-data excluded by definition
  const auto set =
      testutil::one_image({0.5f, 0.5f, 0.5f, 0.5f}, {1, 0, 0, -1});
  CHECK(prevalence_of(set).pi1() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // no valid pixels at all
  CHECK_THROWS_AS(prevalence_of(testutil::one_image({0.2f}, {-1})), Error);
}

TEST_CASE("prevalence of a large generated set lands on the target") {
  const BiNormalModel model(1.0, 0.05);
  const ScoreMapSet set = generate(model, 4, 500, 500, 7);  // 1e6 pixels
  CHECK(prevalence_of(set).pi1() == doctest::Approx(0.05).epsilon(0.02));
  CHECK(std::fabs(prevalence_of(set).pi1() - 0.05) < 0.001);
}

TEST_CASE("prevalence is invariant under added no-data pixels") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 20; ++rep) {
    const auto set = testutil::random_set(gen);
    if (set.count_valid() == 0) continue;
    const auto padded = testutil::pad_with_nodata(set, 3);
    CHECK(prevalence_of(set).pi1() == prevalence_of(padded).pi1());
  }
}

TEST_CASE("calibration result invariants") {
  CalibrationResult r;
  r.lambda_hat = 0.2;
  r.alpha_used = 0.05;
  r.m_positives = 99;
  r.quantile_index = 5;
  r.n_valid = 500;
  CHECK_NOTHROW(r.validate());
  r.quantile_index = 6;  // != ceil(0.05 * 100)
  CHECK_THROWS_AS(r.validate(), Error);
}
