#pragma once

#include <cstdint>

#include "crcmap/types.hpp"

namespace crcmap {

struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t valid() const { return tp + fp + fn + tn; }
  std::uint64_t positives() const { return tp + fn; }
};

/// Confusion counts over valid pixels under y_hat = 1{p >= lambda}.
Confusion confusion_at(const ScoreMapSet& set, double lambda);

/// Threshold-dependent metrics (coverage, fnr, set_size, precision, f1,
/// iou). Precision is absent when nothing is flagged; a set without
/// positive pixels is an error since coverage is meaningless on it.
MetricsReport point_metrics(const ScoreMapSet& set, double lambda);

/// Probability a random positive outranks a random negative, ties at 1/2.
double auroc(const ScoreMapSet& set);

/// Average precision with the step-function convention, ties grouped by
/// distinct score value.
double auprc(const ScoreMapSet& set);

/// Designates one metric for resampling-based interval estimation.
enum class MetricKind {
  Coverage,
  Fnr,
  SetSize,
  Auroc,
  Auprc,
  Precision,
  F1,
  Iou,
};

const char* metric_name(MetricKind kind) noexcept;

}  // namespace crcmap
