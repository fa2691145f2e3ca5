#include "crcmap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "crcmap/crc.hpp"
#include "crcmap/normal.hpp"
#include "crcmap/rng.hpp"
#include "crcmap/threeway.hpp"

namespace crcmap {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct TrialStats {
  double mean = 0.0;
  double stddev = 0.0;
};

TrialStats mean_std(const std::vector<double>& values) {
  TrialStats stats;
  if (values.empty()) return stats;
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      const double d = v - stats.mean;
      ss += d * d;
    }
    stats.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return stats;
}

/// Runs fn(trial) on a strided thread pool; outputs are keyed by trial
/// index, so results never depend on the schedule.
template <typename Fn>
void run_trials(std::uint32_t trials, unsigned threads, Fn&& fn) {
  unsigned n_threads = threads ? threads : std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  n_threads = std::min<unsigned>(n_threads, trials);
  if (n_threads <= 1) {
    for (std::uint32_t t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned k = 0; k < n_threads; ++k) {
    pool.emplace_back([&fn, k, n_threads, trials] {
      for (std::uint32_t t = k; t < trials; t += n_threads) fn(t);
    });
  }
}

void check_pixel_budget(const BiNormalModel& model, const McConfig& config) {
  require(config.trials >= 1, Errc::InvalidArgument, "trials must be >= 1");
  require(config.n_cal_pixels > 0 && config.n_test_pixels > 0,
          Errc::InvalidArgument, "pixel counts must be positive");
  const double expected_cal =
      model.pi1 * static_cast<double>(config.n_cal_pixels);
  const double expected_test =
      model.pi1 * static_cast<double>(config.n_test_pixels);
  require(expected_cal >= 20.0 && expected_test >= 20.0,
          Errc::TooFewPositives,
          "expected positives per trial below 20; enlarge the sets");
}

ScoreMapSet one_image_draw(const BiNormalModel& model, std::uint64_t n_pixels,
                           std::uint64_t seed, double latent_offset) {
  return generate(model, 1, 1, static_cast<std::uint32_t>(n_pixels), seed,
                  latent_offset);
}

}  // namespace

BiNormalModel::BiNormalModel(double mu1_arg, double pi1_arg)
    : mu1(mu1_arg), pi1(pi1_arg) {
  require(std::isfinite(mu1), Errc::InvalidArgument, "mu1 must be finite");
  require(pi1 > 0.0 && pi1 < 1.0, Errc::DegeneratePrevalence,
          "pi1 must lie strictly inside (0,1)");
}

double BiNormalModel::implied_auroc() const {
  return normal_cdf(mu1 / kSqrt2);
}

BiNormalModel model_from_auroc(double auroc, double pi1) {
  require(auroc >= 0.5 && auroc < 1.0, Errc::AurocOutOfRange,
          "auroc must lie in [0.5, 1)");
  return BiNormalModel(kSqrt2 * normal_quantile(auroc), pi1);
}

ScoreMapSet generate(const BiNormalModel& model, std::uint32_t n_images,
                     std::uint32_t height, std::uint32_t width,
                     std::uint64_t seed, double latent_offset) {
  require(n_images > 0 && height > 0 && width > 0, Errc::InvalidArgument,
          "dimensions must be positive");
  require(std::isfinite(latent_offset), Errc::InvalidArgument,
          "latent offset must be finite");

  const std::size_t pixels = static_cast<std::size_t>(height) * width;
  std::vector<ScoreMap> maps;
  maps.reserve(n_images);
  for (std::uint32_t img = 0; img < n_images; ++img) {
    std::mt19937_64 gen = make_stream(seed, img);
    std::vector<float> scores(pixels);
    std::vector<std::int8_t> labels(pixels);
    for (std::size_t i = 0; i < pixels; ++i) {
      const bool fire = uniform01(gen) < model.pi1;
      const double latent =
          normal_draw(gen) + (fire ? model.mu1 : 0.0) + latent_offset;
      scores[i] = static_cast<float>(logistic(latent));
      labels[i] = fire ? 1 : 0;
    }
    maps.emplace_back(img, height, width, std::move(scores),
                      std::move(labels));
  }
  return ScoreMapSet(std::move(maps));
}

double closed_form_set_size(const BiNormalModel& model, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, Errc::AlphaOutOfRange,
          "alpha must lie in (0,1)");
  const double pi0 = 1.0 - model.pi1;
  return model.pi1 * (1.0 - alpha) +
         pi0 * (1.0 - normal_cdf(model.mu1 + normal_quantile(alpha)));
}

McResult mc_fnr_guarantee(const BiNormalModel& model, double alpha,
                          const McConfig& config) {
  RiskSpec spec(alpha);
  check_pixel_budget(model, config);

  std::vector<double> risks(config.trials);
  run_trials(config.trials, config.threads, [&](std::uint32_t t) {
    const ScoreMapSet cal =
        one_image_draw(model, config.n_cal_pixels,
                       derive_seed(config.seed, 3 * t), config.latent_offset);
    const ScoreMapSet test = one_image_draw(
        model, config.n_test_pixels, derive_seed(config.seed, 3 * t + 1),
        config.latent_offset);
    const CalibrationResult result = calibrate_fnr(cal, spec);
    risks[t] = fnr_at(test, result.lambda_hat);
  });

  const TrialStats stats = mean_std(risks);
  McResult out;
  out.trials = config.trials;
  out.mean_risk = stats.mean;
  out.std_risk = stats.stddev;
  std::uint32_t violations = 0;
  for (double r : risks) violations += (r > alpha);
  out.violation_fraction =
      static_cast<double>(violations) / static_cast<double>(config.trials);
  return out;
}

SetSizeCheck mc_set_size(const BiNormalModel& model, double alpha,
                         const McConfig& config) {
  RiskSpec spec(alpha);
  check_pixel_budget(model, config);

  std::vector<double> sizes(config.trials);
  run_trials(config.trials, config.threads, [&](std::uint32_t t) {
    const ScoreMapSet cal =
        one_image_draw(model, config.n_cal_pixels,
                       derive_seed(config.seed, 3 * t), config.latent_offset);
    const ScoreMapSet test = one_image_draw(
        model, config.n_test_pixels, derive_seed(config.seed, 3 * t + 1),
        config.latent_offset);
    const CalibrationResult result = calibrate_fnr(cal, spec);
    sizes[t] = set_size_at(test, result.lambda_hat);
  });

  const TrialStats stats = mean_std(sizes);
  SetSizeCheck out;
  out.trials = config.trials;
  out.mc_mean = stats.mean;
  out.mc_std = stats.stddev;
  out.closed_form = closed_form_set_size(model, alpha);
  return out;
}

ThreeWayMcResult mc_threeway_check(const BiNormalModel& model,
                                   const CostSpec& cost, double alpha_cw,
                                   const ShiftInterval& shift,
                                   const ThreeWayMcConfig& config) {
  check_pixel_budget(model, config.base);
  if (config.rho_test) {
    require(*config.rho_test > 0.0 && *config.rho_test * model.pi1 < 1.0,
            Errc::InvalidArgument, "rho_test * pi1 must lie in (0,1)");
  } else {
    require(shift.rho_hi() * model.pi1 < 1.0, Errc::InvalidArgument,
            "rho_hi * pi1 must stay below 1 for test generation");
  }

  const std::uint32_t trials = config.base.trials;
  struct TrialOut {
    double risk = 0.0;
    double bound = 0.0;
    double safe_frac = 0.0;
    double monitor_frac = 0.0;
    double lambda_base = 0.0;
    bool lambda_min_zero = false;
    bool decided = false;
  };
  std::vector<TrialOut> rows(trials);

  run_trials(trials, config.base.threads, [&](std::uint32_t t) {
    const std::uint64_t seed = config.base.seed;
    const ScoreMapSet cal =
        one_image_draw(model, config.base.n_cal_pixels,
                       derive_seed(seed, 3 * t), config.base.latent_offset);
    const ZoneThresholds zones =
        calibrate_three_way(cal, cost, alpha_cw, shift);

    double rho = 1.0;
    if (config.rho_test) {
      rho = *config.rho_test;
    } else {
      std::mt19937_64 gen = make_stream(seed, 0x80000000ULL + t);
      rho = shift.rho_lo() +
            (shift.rho_hi() - shift.rho_lo()) * uniform01(gen);
    }
    const BiNormalModel deployed(model.mu1, rho * model.pi1);
    const ScoreMapSet test = one_image_draw(
        deployed, config.base.n_test_pixels, derive_seed(seed, 3 * t + 1),
        config.base.latent_offset);

    const ZoneAssignment assignment = assign_zones(test, zones);
    TrialOut row;
    row.safe_frac = assignment.report.frac_safe;
    row.monitor_frac = assignment.report.frac_monitor;
    row.lambda_base = zones.lambda_base;
    row.lambda_min_zero = (zones.lambda_min == 0.0);
    if (assignment.report.decided_risk) {
      row.decided = true;
      row.risk = *assignment.report.decided_risk;
      row.bound = *assignment.report.decided_bound;
    }
    rows[t] = row;
  });

  ThreeWayMcResult out;
  std::vector<double> risks;
  risks.reserve(trials);
  double bound_sum = 0.0;
  std::uint32_t violations = 0;
  std::uint32_t lambda_zero = 0;
  std::uint32_t safe_zero = 0;
  double safe_sum = 0.0;
  double monitor_sum = 0.0;
  double base_sum = 0.0;
  for (const TrialOut& row : rows) {
    lambda_zero += row.lambda_min_zero;
    safe_zero += (row.safe_frac == 0.0);
    safe_sum += row.safe_frac;
    monitor_sum += row.monitor_frac;
    base_sum += row.lambda_base;
    if (!row.decided) {
      ++out.undecided_trials;
      continue;
    }
    risks.push_back(row.risk);
    bound_sum += row.bound;
    violations += (row.risk > row.bound);
  }

  const TrialStats stats = mean_std(risks);
  out.risk.trials = trials;
  out.risk.mean_risk = stats.mean;
  out.risk.std_risk = stats.stddev;
  out.risk.violation_fraction =
      risks.empty() ? 0.0
                    : static_cast<double>(violations) /
                          static_cast<double>(risks.size());
  out.mean_bound =
      risks.empty() ? 0.0 : bound_sum / static_cast<double>(risks.size());
  const double nt = static_cast<double>(trials);
  out.frac_lambda_min_zero = static_cast<double>(lambda_zero) / nt;
  out.frac_safe_zero = static_cast<double>(safe_zero) / nt;
  out.mean_safe_fraction = safe_sum / nt;
  out.mean_monitor_fraction = monitor_sum / nt;
  out.mean_lambda_base = base_sum / nt;
  return out;
}

}  // namespace crcmap
