#include "crcmap/types.hpp"

#include <cmath>
#include <string>
#include <unordered_set>
#include <utility>

namespace crcmap {

ScoreMap::ScoreMap(std::uint32_t image_id, std::uint32_t height,
                   std::uint32_t width, std::vector<float> scores,
                   std::vector<std::int8_t> labels)
    : image_id_(image_id),
      height_(height),
      width_(width),
      scores_(std::move(scores)),
      labels_(std::move(labels)) {
  require(height_ > 0 && width_ > 0, Errc::InvalidArgument,
          "image dimensions must be positive");
  const std::size_t n = static_cast<std::size_t>(height_) * width_;
  require(scores_.size() == n && labels_.size() == n, Errc::InvalidArgument,
          "scores/labels must both have height*width entries");
  for (std::size_t i = 0; i < n; ++i) {
    // NaN fails both comparisons, so it is rejected here too.
    require(scores_[i] >= 0.0f && scores_[i] <= 1.0f, Errc::ScoreOutOfRange,
            "score outside [0,1] at pixel " + std::to_string(i));
    require(is_valid_label(labels_[i]), Errc::BadLabel,
            "label not in {-1,0,1} at pixel " + std::to_string(i));
  }
}

ScoreMapSet::ScoreMapSet(std::vector<ScoreMap> maps) : maps_(std::move(maps)) {
  std::unordered_set<std::uint32_t> seen;
  seen.reserve(maps_.size());
  for (const ScoreMap& map : maps_) {
    require(seen.insert(map.image_id()).second, Errc::InvalidArgument,
            "duplicate image_id " + std::to_string(map.image_id()));
    require(map.height() == maps_.front().height() &&
                map.width() == maps_.front().width(),
            Errc::InvalidArgument,
            "all maps in a set must share the same dimensions");
  }
}

std::uint32_t ScoreMapSet::height() const {
  require(!maps_.empty(), Errc::EmptyInput, "empty set has no dimensions");
  return maps_.front().height();
}

std::uint32_t ScoreMapSet::width() const {
  require(!maps_.empty(), Errc::EmptyInput, "empty set has no dimensions");
  return maps_.front().width();
}

std::size_t ScoreMapSet::total_pixels() const {
  std::size_t n = 0;
  for (const ScoreMap& map : maps_) n += map.pixel_count();
  return n;
}

std::size_t ScoreMapSet::count_valid() const {
  std::size_t n = 0;
  for (const ScoreMap& map : maps_)
    for (std::int8_t label : map.labels()) n += (label >= 0);
  return n;
}

std::size_t ScoreMapSet::count_positive() const {
  std::size_t n = 0;
  for (const ScoreMap& map : maps_)
    for (std::int8_t label : map.labels()) n += (label == 1);
  return n;
}

RiskSpec::RiskSpec(double alpha) : alpha_(alpha) {
  require(alpha > 0.0 && alpha < 1.0, Errc::AlphaOutOfRange,
          "alpha must lie in (0,1)");
}

CostSpec::CostSpec(double c_fn, double c_fp) : c_fn_(c_fn), c_fp_(c_fp) {
  require(c_fn > 0.0 && c_fp > 0.0, Errc::InvalidArgument,
          "costs must be strictly positive");
  require(std::isfinite(c_fn) && std::isfinite(c_fp), Errc::InvalidArgument,
          "costs must be finite");
}

ShiftInterval::ShiftInterval(double rho_lo, double rho_hi)
    : rho_lo_(rho_lo), rho_hi_(rho_hi) {
  require(rho_lo > 0.0 && rho_lo <= rho_hi, Errc::InvalidArgument,
          "shift interval requires 0 < rho_lo <= rho_hi");
  require(std::isfinite(rho_hi), Errc::InvalidArgument,
          "rho_hi must be finite");
}

Prevalence::Prevalence(double pi1) : pi1_(pi1) {
  require(pi1 >= 0.0 && pi1 <= 1.0, Errc::InvalidArgument,
          "pi1 must lie in [0,1]");
}

void CalibrationResult::validate() const {
  require(lambda_hat >= 0.0 && lambda_hat <= 1.0, Errc::InvalidArgument,
          "lambda_hat outside [0,1]");
  require(alpha_used > 0.0 && alpha_used < 1.0, Errc::AlphaOutOfRange,
          "alpha_used outside (0,1)");
  const auto k = static_cast<std::uint64_t>(
      std::ceil(alpha_used * static_cast<double>(m_positives + 1)));
  require(quantile_index == k, Errc::InvalidArgument,
          "quantile_index != ceil(alpha*(m+1))");
  require(quantile_index >= 1 && quantile_index <= m_positives,
          Errc::InvalidArgument, "quantile_index outside [1, m]");
  require(n_valid >= m_positives, Errc::InvalidArgument,
          "n_valid smaller than m_positives");
}

void ZoneThresholds::validate() const {
  require(lambda_min >= 0.0 && lambda_min <= lambda_max && lambda_max <= 1.0,
          Errc::InvalidArgument, "need 0 <= lambda_min <= lambda_max <= 1");
  const double pi0 = 1.0 - pi1_cal;
  const double expect_bpw =
      (c_fn * pi1_cal > c_fp * pi0) ? c_fn * pi1_cal : c_fp * pi0;
  require(b_pw == expect_bpw, Errc::InvalidArgument,
          "b_pw inconsistent with costs and prevalence");
  require(alpha_safe == alpha_cw - eps_max, Errc::InvalidArgument,
          "alpha_safe != alpha_cw - eps_max");
  require(delta_lo_l1 >= 0.0 && delta_hi_l1 >= 0.0, Errc::InvalidArgument,
          "weight mismatches must be nonnegative");
}

void MetricsReport::validate() const {
  for (const MetricEstimate* m :
       {&coverage, &fnr, &set_size, &auroc, &auprc, &precision, &f1, &iou}) {
    if (m->value) {
      require(*m->value >= 0.0 && *m->value <= 1.0, Errc::InvalidArgument,
              "metric outside [0,1]");
    }
    if (m->ci) {
      require(m->ci->lo <= m->ci->hi, Errc::InvalidArgument,
              "confidence interval with lo > hi");
    }
  }
}

Prevalence prevalence_of(const ScoreMapSet& set) {
  std::size_t valid = 0;
  std::size_t positive = 0;
  for (const ScoreMap& map : set.maps()) {
    for (std::int8_t label : map.labels()) {
      valid += (label >= 0);
      positive += (label == 1);
    }
  }
  require(valid > 0, Errc::EmptyInput, "no valid pixels in set");
  return Prevalence(static_cast<double>(positive) / static_cast<double>(valid));
}

}  // namespace crcmap
