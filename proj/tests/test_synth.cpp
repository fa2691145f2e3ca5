#include <doctest.h>

#include <cmath>
#include <random>

#include "crcmap/crc.hpp"
#include "crcmap/metrics.hpp"
#include "crcmap/normal.hpp"
#include "crcmap/synth.hpp"
#include "testutil.hpp"

using namespace crcmap;

TEST_CASE("model_from_auroc inverts the separation formula") {
  CHECK(model_from_auroc(0.5, 0.1).mu1 == 0.0);
  const BiNormalModel m = model_from_auroc(0.969, 0.05);
  CHECK(m.mu1 == doctest::Approx(2.639).epsilon(1e-3));
  CHECK(m.implied_auroc() == doctest::Approx(0.969).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(model_from_auroc(1.0, 0.1),
                       doctest::Contains("AurocOutOfRange"), Error);
  CHECK_THROWS_WITH_AS(model_from_auroc(0.4, 0.1),
                       doctest::Contains("AurocOutOfRange"), Error);
}

TEST_CASE("model rejects degenerate prevalence") {
  CHECK_THROWS_WITH_AS(BiNormalModel(1.0, 0.0),
                       doctest::Contains("DegeneratePrevalence"), Error);
  CHECK_THROWS_AS(BiNormalModel(1.0, 1.0), Error);
}

TEST_CASE("generation is deterministic per seed") {
  const BiNormalModel model = model_from_auroc(0.9, 0.3);
  const ScoreMapSet a = generate(model, 3, 4, 5, 99);
  const ScoreMapSet b = generate(model, 3, 4, 5, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t p = 0; p < a.maps()[i].pixel_count(); ++p) {
      CHECK(a.maps()[i].score_at(p) == b.maps()[i].score_at(p));
      CHECK(a.maps()[i].label_at(p) == b.maps()[i].label_at(p));
    }
  }
  const ScoreMapSet c = generate(model, 3, 4, 5, 100);
  CHECK(c.maps()[0].score_at(0) != a.maps()[0].score_at(0));
}

TEST_CASE("generated sets reproduce the model AUROC and prevalence") {
  const BiNormalModel model = model_from_auroc(0.969, 0.05);
  const ScoreMapSet set = generate(model, 1, 1000, 1000, 4);  // 1e6 pixels
  CHECK(auroc(set) == doctest::Approx(0.969).epsilon(0.004));
  CHECK(std::fabs(auroc(set) - 0.969) < 0.003);
  const double pi1 = prevalence_of(set).pi1();
  CHECK(std::fabs(pi1 - 0.05) < 3.0 * std::sqrt(0.05 * 0.95 / 1e6));
}

TEST_CASE("latent offset moves scores without touching ranks") {
  const BiNormalModel model = model_from_auroc(0.95, 0.1);
  const ScoreMapSet plain = generate(model, 1, 50, 50, 8, 0.0);
  const ScoreMapSet shifted = generate(model, 1, 50, 50, 8, -5.0);
  CHECK(auroc(plain) == doctest::Approx(auroc(shifted)).epsilon(1e-12));
  double max_shifted = 0.0;
  for (float s : shifted.maps()[0].scores())
    max_shifted = std::max(max_shifted, static_cast<double>(s));
  CHECK(max_shifted < 0.5);  // mass concentrated near zero
}

TEST_CASE("closed-form set size limits") {
  CHECK(closed_form_set_size(BiNormalModel(0.0, 0.3), 0.25) ==
        doctest::Approx(0.75).epsilon(1e-12));  // F0 = F1 at mu1 = 0
  CHECK(closed_form_set_size(BiNormalModel(40.0, 0.3), 0.25) ==
        doctest::Approx(0.3 * 0.75).epsilon(1e-9));  // perfect separation
  const BiNormalModel m = model_from_auroc(0.969, 0.05);
  CHECK(closed_form_set_size(m, 0.05) == doctest::Approx(0.1995).epsilon(0.003));
  CHECK_THROWS_AS(closed_form_set_size(m, 0.0), Error);
}

TEST_CASE("order statistics commute with the link") {
  // lambda from latent-space order statistics maps through the logistic to
  // the lambda calibrated on linked scores.
  std::mt19937_64 gen(13);
  std::normal_distribution<double> normal(1.0, 1.0);
  std::vector<double> latents(257);
  for (double& z : latents) z = normal(gen);

  std::vector<float> linked;
  for (double z : latents) linked.push_back(static_cast<float>(logistic(z)));
  std::vector<std::int8_t> labels(latents.size(), 1);
  const auto result =
      calibrate_fnr(testutil::one_image(linked, labels), RiskSpec(0.1));

  std::vector<double> sorted = latents;
  std::sort(sorted.begin(), sorted.end());
  const auto k = static_cast<std::size_t>(
      std::ceil(0.1 * static_cast<double>(latents.size() + 1)));
  const float expected = static_cast<float>(logistic(sorted[k - 1]));
  CHECK(result.lambda_hat == static_cast<double>(expected));
}

TEST_CASE("mc_fnr_guarantee is deterministic and honours a loose target") {
  const BiNormalModel model = model_from_auroc(0.9, 0.2);
  McConfig config;
  config.n_cal_pixels = 2000;
  config.n_test_pixels = 2000;
  config.trials = 60;
  config.seed = 5;
  const McResult a = mc_fnr_guarantee(model, 0.5, config);
  const McResult b = mc_fnr_guarantee(model, 0.5, config);
  CHECK(a.mean_risk == b.mean_risk);
  CHECK(a.std_risk == b.std_risk);
  CHECK(a.violation_fraction == b.violation_fraction);
  CHECK(a.mean_risk <= 0.5);
  CHECK(a.trials == 60);

  const McResult tight = mc_fnr_guarantee(model, 0.1, config);
  CHECK(tight.mean_risk <=
        0.1 + 2.0 * tight.std_risk / std::sqrt(60.0) + 0.01);
}

TEST_CASE("mc_fnr_guarantee enforces the positive-count precondition") {
  const BiNormalModel model = model_from_auroc(0.9, 0.01);
  McConfig config;
  config.n_cal_pixels = 500;  // expected positives = 5 < 20
  config.n_test_pixels = 500;
  config.trials = 3;
  CHECK_THROWS_WITH_AS(mc_fnr_guarantee(model, 0.2, config),
                       doctest::Contains("TooFewPositives"), Error);
}

TEST_CASE("mc set size approaches the closed form") {
  const BiNormalModel model = model_from_auroc(0.95, 0.2);
  McConfig config;
  config.n_cal_pixels = 50000;
  config.n_test_pixels = 50000;
  config.trials = 20;
  config.seed = 17;
  const SetSizeCheck check = mc_set_size(model, 0.1, config);
  CHECK(std::fabs(check.mc_mean - check.closed_form) / check.closed_form <
        0.05);
}

TEST_CASE("three-way mc: rare-event regime collapses SAFE in every trial") {
  const BiNormalModel model = model_from_auroc(0.97, 0.05);
  ThreeWayMcConfig config;
  config.base.n_cal_pixels = 20000;
  config.base.n_test_pixels = 20000;
  config.base.trials = 25;
  config.base.seed = 23;
  config.base.latent_offset = -5.0;  // wildfire-like score concentration
  const ThreeWayMcResult result = mc_threeway_check(
      model, CostSpec(5, 1), 0.5, ShiftInterval(0.9, 1.1), config);
  CHECK(result.mean_lambda_base <= 0.02);
  CHECK(result.frac_lambda_min_zero == 1.0);
  CHECK(result.frac_safe_zero == 1.0);
  CHECK(result.risk.violation_fraction == 0.0);
}

TEST_CASE("three-way mc: moderate regime keeps SAFE alive and bound holds") {
  const BiNormalModel model = model_from_auroc(0.97, 0.3);
  ThreeWayMcConfig config;
  config.base.n_cal_pixels = 20000;
  config.base.n_test_pixels = 20000;
  config.base.trials = 25;
  config.base.seed = 29;
  config.rho_test = 1.0;
  const ThreeWayMcResult result = mc_threeway_check(
      model, CostSpec(5, 1), 0.5, ShiftInterval(0.9, 1.1), config);
  CHECK(result.mean_safe_fraction > 0.0);
  CHECK(result.frac_safe_zero == 0.0);
  CHECK(result.risk.violation_fraction == 0.0);
  CHECK(result.risk.mean_risk <= result.mean_bound);
  CHECK(result.undecided_trials == 0);
}
