#pragma once

#include <cstdint>
#include <optional>

#include "crcmap/metrics.hpp"
#include "crcmap/types.hpp"

namespace crcmap {

struct BootstrapSpec {
  std::uint32_t resamples = 10000;
  double confidence = 0.95;
  std::uint64_t seed = 0;

  void validate() const;
};

struct BootstrapOutcome {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::uint32_t resamples = 0;
  std::uint32_t skipped = 0;  // resamples where the metric was undefined
};

/// Percentile bootstrap over image resamples (never pixels). Resample r
/// draws its RNG stream from (seed, r), so results are independent of the
/// parallel schedule and bit-identical for a fixed seed. Resamples on which
/// the metric is undefined are skipped and counted; more than 50% skipped
/// is an error. Threshold metrics require lambda; auroc/auprc ignore it.
BootstrapOutcome bootstrap_ci(const ScoreMapSet& set, MetricKind metric,
                              std::optional<double> lambda,
                              const BootstrapSpec& spec, unsigned threads = 0);

/// Full metric suite with intervals from one shared set of resamples.
/// Metrics undefined on the original set come back absent instead of
/// erroring; per-metric skip counts land in the attached intervals.
MetricsReport bootstrap_report(const ScoreMapSet& set, double lambda,
                               const BootstrapSpec& spec, unsigned threads = 0);

}  // namespace crcmap
