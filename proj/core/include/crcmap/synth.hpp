#pragma once

#include <cstdint>
#include <optional>

#include "crcmap/types.hpp"

namespace crcmap {

/// Bi-normal score model: latent class-conditional scores are unit-variance
/// normals at 0 (negative) and mu1 (positive); the logistic link maps the
/// latent score into [0,1]. Implied AUROC is Phi(mu1/sqrt(2)).
struct BiNormalModel {
  double mu1 = 0.0;
  double pi1 = 0.5;

  BiNormalModel(double mu1_arg, double pi1_arg);
  double implied_auroc() const;
};

/// Inverts AUROC = Phi(mu1/sqrt(2)); accepts 0.5 <= auroc < 1.
BiNormalModel model_from_auroc(double auroc, double pi1);

/// I.i.d. pixels: label ~ Bernoulli(pi1), latent ~ N(mu1*label, 1), score =
/// logistic(latent + latent_offset). The offset shifts both classes, so it
/// changes absolute score placement (e.g. concentrating mass near 0 the way
/// rare-event models do) without touching ranks, AUROC, or prevalence.
/// Image i draws from stream (seed, i): identical seeds give identical sets.
ScoreMapSet generate(const BiNormalModel& model, std::uint32_t n_images,
                     std::uint32_t height, std::uint32_t width,
                     std::uint64_t seed, double latent_offset = 0.0);

/// S(alpha) = pi1*(1-alpha) + pi0*(1 - Phi(mu1 + Phi^-1(alpha))), evaluated
/// in latent space (quantiles commute with the strictly increasing link).
double closed_form_set_size(const BiNormalModel& model, double alpha);

struct McResult {
  std::uint32_t trials = 0;
  double mean_risk = 0.0;
  double std_risk = 0.0;
  double violation_fraction = 0.0;  // trials with risk above the target
};

struct McConfig {
  std::uint64_t n_cal_pixels = 50000;
  std::uint64_t n_test_pixels = 50000;
  std::uint32_t trials = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
  double latent_offset = 0.0;
};

/// Per trial: fresh calibration and test draws, calibrate_fnr on the first,
/// test FNR on the second. Checks the expectation guarantee empirically.
McResult mc_fnr_guarantee(const BiNormalModel& model, double alpha,
                          const McConfig& config);

struct SetSizeCheck {
  std::uint32_t trials = 0;
  double mc_mean = 0.0;
  double mc_std = 0.0;
  double closed_form = 0.0;
};

/// Mean empirical set size at the per-trial calibrated threshold, against
/// the closed-form prediction.
SetSizeCheck mc_set_size(const BiNormalModel& model, double alpha,
                         const McConfig& config);

struct ThreeWayMcConfig {
  McConfig base;
  /// Deployment prevalence ratio; when absent each trial draws one
  /// uniformly inside the declared shift interval.
  std::optional<double> rho_test;
};

struct ThreeWayMcResult {
  McResult risk;  // decided-set risk per trial vs the per-trial bound
  double mean_bound = 0.0;
  double frac_lambda_min_zero = 0.0;
  double frac_safe_zero = 0.0;  // trials with SAFE fraction exactly 0
  double mean_safe_fraction = 0.0;
  double mean_monitor_fraction = 0.0;
  double mean_lambda_base = 0.0;
  std::uint32_t undecided_trials = 0;  // everything MONITOR, no decided risk
};

/// Per trial: three-way calibration on a calibration draw, decided-set risk
/// on a test draw at deployment prevalence rho * pi1, checked against
/// alpha_cw / (1 - d).
ThreeWayMcResult mc_threeway_check(const BiNormalModel& model,
                                   const CostSpec& cost, double alpha_cw,
                                   const ShiftInterval& shift,
                                   const ThreeWayMcConfig& config);

}  // namespace crcmap
