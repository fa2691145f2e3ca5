#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "crcmap/error.hpp"

namespace crcmap {

/// Per-pixel ground truth. -1 marks no-data pixels, which are excluded from
/// every count, metric, and calibration.
enum class PixelLabel : std::int8_t { NoData = -1, NonFire = 0, Fire = 1 };

constexpr bool is_valid_label(std::int8_t raw) {
  return raw == -1 || raw == 0 || raw == 1;
}

/// One image of per-pixel probabilities plus labels, row-major. Immutable
/// after construction; validity (label != -1) is derived, never stored.
class ScoreMap {
 public:
  ScoreMap(std::uint32_t image_id, std::uint32_t height, std::uint32_t width,
           std::vector<float> scores, std::vector<std::int8_t> labels);

  std::uint32_t image_id() const { return image_id_; }
  std::uint32_t height() const { return height_; }
  std::uint32_t width() const { return width_; }
  std::size_t pixel_count() const { return scores_.size(); }

  std::span<const float> scores() const { return scores_; }
  std::span<const std::int8_t> labels() const { return labels_; }

  float score_at(std::size_t i) const { return scores_[i]; }
  std::int8_t label_at(std::size_t i) const { return labels_[i]; }
  bool valid_at(std::size_t i) const { return labels_[i] >= 0; }

 private:
  std::uint32_t image_id_;
  std::uint32_t height_;
  std::uint32_t width_;
  std::vector<float> scores_;
  std::vector<std::int8_t> labels_;
};

/// An ordered collection of equally sized score maps with unique image ids.
class ScoreMapSet {
 public:
  ScoreMapSet() = default;
  explicit ScoreMapSet(std::vector<ScoreMap> maps);

  const std::vector<ScoreMap>& maps() const { return maps_; }
  bool empty() const { return maps_.empty(); }
  std::size_t size() const { return maps_.size(); }

  /// Shared image dimensions; require a nonempty set.
  std::uint32_t height() const;
  std::uint32_t width() const;

  std::size_t total_pixels() const;
  std::size_t count_valid() const;
  std::size_t count_positive() const;

 private:
  std::vector<ScoreMap> maps_;
};

/// Target risk level for binary FNR control.
class RiskSpec {
 public:
  explicit RiskSpec(double alpha);
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

/// Asymmetric decision costs for the three-way policy.
class CostSpec {
 public:
  CostSpec(double c_fn, double c_fp);
  double c_fn() const { return c_fn_; }
  double c_fp() const { return c_fp_; }
  double max_cost() const { return c_fn_ > c_fp_ ? c_fn_ : c_fp_; }

 private:
  double c_fn_;
  double c_fp_;
};

/// Declared range of the deployment/calibration prevalence ratio.
class ShiftInterval {
 public:
  ShiftInterval(double rho_lo, double rho_hi);
  double rho_lo() const { return rho_lo_; }
  double rho_hi() const { return rho_hi_; }

 private:
  double rho_lo_;
  double rho_hi_;
};

/// Positive-class fraction among valid pixels; pi0 is always derived.
class Prevalence {
 public:
  explicit Prevalence(double pi1);
  double pi1() const { return pi1_; }
  double pi0() const { return 1.0 - pi1_; }

 private:
  double pi1_;
};

/// Selected FNR-controlling threshold with its order-statistic provenance.
struct CalibrationResult {
  double lambda_hat = 0.0;
  double alpha_used = 0.0;
  std::uint64_t m_positives = 0;   // positive calibration pixels
  std::uint64_t quantile_index = 0;  // k = ceil(alpha * (m + 1)), 1-based
  std::uint64_t n_valid = 0;         // all valid calibration pixels

  void validate() const;
};

/// Three-way zone boundaries plus every intermediate of the shift-aware
/// calibration, so reports are reproducible from this record alone.
struct ZoneThresholds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double lambda_base = 0.0;  // cost-weighted threshold before shifting
  double alpha_cw = 0.0;
  double alpha_safe = 0.0;
  double eps_max = 0.0;
  double b_pw = 0.0;
  double shift_scale_s = 0.0;
  double delta_lo_l1 = 0.0;
  double delta_hi_l1 = 0.0;
  double c_fn = 0.0;
  double c_fp = 0.0;
  double pi1_cal = 0.0;      // calibration prevalence behind b_pw
  std::uint64_t n_valid = 0;

  void validate() const;
};

enum class Zone : std::int8_t { Safe = 0, Monitor = 1, Evacuate = 2 };

/// Percentile bootstrap interval attached to a metric.
struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  std::uint32_t resamples = 0;
  std::uint32_t skipped = 0;  // resamples on which the metric was undefined
};

/// A metric value that may be undefined (0/0 ratios are reported as absent,
/// never coerced to 0 or 1).
struct MetricEstimate {
  std::optional<double> value;
  std::optional<ConfidenceInterval> ci;
};

struct MetricsReport {
  MetricEstimate coverage;
  MetricEstimate fnr;
  MetricEstimate set_size;
  MetricEstimate auroc;
  MetricEstimate auprc;
  MetricEstimate precision;
  MetricEstimate f1;
  MetricEstimate iou;

  void validate() const;
};

/// Prevalence over valid pixels, pooled across the whole set.
Prevalence prevalence_of(const ScoreMapSet& set);

}  // namespace crcmap
