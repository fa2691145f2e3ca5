#include "crcmap/bootstrap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <thread>
#include <vector>

#include "crcmap/rng.hpp"

namespace crcmap {

namespace {

constexpr std::size_t kMetricCount = 8;

constexpr std::array<MetricKind, kMetricCount> kAllMetrics = {
    MetricKind::Coverage, MetricKind::Fnr,       MetricKind::SetSize,
    MetricKind::Auroc,    MetricKind::Auprc,     MetricKind::Precision,
    MetricKind::F1,       MetricKind::Iou};

std::optional<double> metric_from_confusion(MetricKind kind,
                                            const Confusion& c) {
  const double tp = static_cast<double>(c.tp);
  switch (kind) {
    case MetricKind::Coverage:
      if (c.positives() == 0) return std::nullopt;
      return tp / static_cast<double>(c.positives());
    case MetricKind::Fnr:
      if (c.positives() == 0) return std::nullopt;
      return 1.0 - tp / static_cast<double>(c.positives());
    case MetricKind::SetSize:
      if (c.valid() == 0) return std::nullopt;
      return static_cast<double>(c.tp + c.fp) / static_cast<double>(c.valid());
    case MetricKind::Precision:
      if (c.tp + c.fp == 0) return std::nullopt;
      return tp / static_cast<double>(c.tp + c.fp);
    case MetricKind::F1:
      if (c.positives() == 0) return std::nullopt;
      return 2.0 * tp / static_cast<double>(2 * c.tp + c.fp + c.fn);
    case MetricKind::Iou:
      if (c.positives() == 0) return std::nullopt;
      return tp / static_cast<double>(c.tp + c.fp + c.fn);
    default:
      return std::nullopt;
  }
}

bool needs_lambda(MetricKind kind) {
  return kind != MetricKind::Auroc && kind != MetricKind::Auprc;
}

/// Precomputed sufficient statistics: per-image confusions for threshold
/// metrics, plus one globally sorted pixel array with tie-group boundaries
/// for the rank metrics. A resample only supplies image multiplicities.
class Resampler {
 public:
  Resampler(const ScoreMapSet& set, std::optional<double> lambda)
      : n_images_(set.size()) {
    require(n_images_ > 0, Errc::EmptyInput, "cannot bootstrap an empty set");

    if (lambda) {
      image_confusion_.reserve(n_images_);
      for (const ScoreMap& map : set.maps()) {
        Confusion c;
        const auto scores = map.scores();
        const auto labels = map.labels();
        for (std::size_t i = 0; i < scores.size(); ++i) {
          if (labels[i] < 0) continue;
          const bool flagged = static_cast<double>(scores[i]) >= *lambda;
          if (labels[i] == 1) {
            flagged ? ++c.tp : ++c.fn;
          } else {
            flagged ? ++c.fp : ++c.tn;
          }
        }
        image_confusion_.push_back(c);
      }
    }

    struct Pixel {
      float score;
      std::uint32_t image;
      std::int8_t label;
    };
    std::vector<Pixel> pixels;
    for (std::size_t img = 0; img < set.size(); ++img) {
      const ScoreMap& map = set.maps()[img];
      const auto labels = map.labels();
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0)
          pixels.push_back(Pixel{map.score_at(i),
                                 static_cast<std::uint32_t>(img), labels[i]});
    }
    std::sort(pixels.begin(), pixels.end(),
              [](const Pixel& a, const Pixel& b) { return a.score < b.score; });
    pix_image_.reserve(pixels.size());
    pix_label_.reserve(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      pix_image_.push_back(pixels[i].image);
      pix_label_.push_back(pixels[i].label);
      if (i + 1 == pixels.size() || pixels[i + 1].score != pixels[i].score)
        group_end_.push_back(i + 1);
    }
  }

  std::size_t n_images() const { return n_images_; }

  /// Metric values for one multiplicity vector; nullopt where undefined.
  std::array<std::optional<double>, kMetricCount> evaluate(
      const std::vector<std::uint32_t>& mult,
      std::vector<std::pair<double, double>>& group_buf) const {
    std::array<std::optional<double>, kMetricCount> out;

    if (!image_confusion_.empty()) {
      Confusion total;
      for (std::size_t i = 0; i < image_confusion_.size(); ++i) {
        const std::uint64_t m = mult[i];
        if (m == 0) continue;
        total.tp += m * image_confusion_[i].tp;
        total.fp += m * image_confusion_[i].fp;
        total.fn += m * image_confusion_[i].fn;
        total.tn += m * image_confusion_[i].tn;
      }
      for (std::size_t k = 0; k < kMetricCount; ++k)
        out[k] = metric_from_confusion(kAllMetrics[k], total);
    }

    // Weighted tie-group counts feed both rank metrics.
    group_buf.clear();
    group_buf.reserve(group_end_.size());
    double total_pos = 0.0;
    double total_neg = 0.0;
    std::size_t begin = 0;
    for (std::size_t end : group_end_) {
      double wp = 0.0;
      double wn = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const double w = mult[pix_image_[i]];
        pix_label_[i] == 1 ? wp += w : wn += w;
      }
      group_buf.emplace_back(wp, wn);
      total_pos += wp;
      total_neg += wn;
      begin = end;
    }

    if (total_pos > 0.0 && total_neg > 0.0) {
      double u = 0.0;
      double cum_neg = 0.0;
      for (const auto& [wp, wn] : group_buf) {
        u += wp * (cum_neg + 0.5 * wn);
        cum_neg += wn;
      }
      out[3] = u / (total_pos * total_neg);  // auroc
    }
    if (total_pos > 0.0) {
      double ap = 0.0;
      double tp = 0.0;
      double flagged = 0.0;
      for (auto it = group_buf.rbegin(); it != group_buf.rend(); ++it) {
        tp += it->first;
        flagged += it->first + it->second;
        if (it->first > 0.0) ap += (tp / flagged) * it->first;
      }
      out[4] = ap / total_pos;  // auprc
    }
    return out;
  }

 private:
  std::size_t n_images_;
  std::vector<Confusion> image_confusion_;  // empty when lambda absent
  std::vector<std::uint32_t> pix_image_;
  std::vector<std::int8_t> pix_label_;
  std::vector<std::size_t> group_end_;
};

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted.front();
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto idx = static_cast<std::size_t>(h);
  if (idx + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(idx);
  return sorted[idx] + frac * (sorted[idx + 1] - sorted[idx]);
}

struct SuiteResult {
  std::array<std::optional<double>, kMetricCount> point;
  std::array<std::optional<ConfidenceInterval>, kMetricCount> ci;
  std::array<std::uint32_t, kMetricCount> skipped{};
};

SuiteResult run_suite(const ScoreMapSet& set, std::optional<double> lambda,
                      const BootstrapSpec& spec, unsigned threads) {
  spec.validate();
  const Resampler resampler(set, lambda);
  const std::size_t n = resampler.n_images();
  const std::uint32_t R = spec.resamples;

  // Point estimates use the identity multiplicity vector.
  SuiteResult result;
  {
    std::vector<std::uint32_t> ones(n, 1);
    std::vector<std::pair<double, double>> buf;
    result.point = resampler.evaluate(ones, buf);
  }

  std::vector<std::array<std::optional<double>, kMetricCount>> values(R);
  unsigned n_threads = threads ? threads : std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  n_threads = std::min<unsigned>(n_threads, R);

  const auto worker = [&](unsigned tid) {
    std::vector<std::uint32_t> mult(n);
    std::vector<std::pair<double, double>> buf;
    for (std::uint32_t r = tid; r < R; r += n_threads) {
      std::mt19937_64 gen = make_stream(spec.seed, r);
      std::fill(mult.begin(), mult.end(), 0);
      for (std::size_t draw = 0; draw < n; ++draw)
        ++mult[uniform_below(gen, n)];
      values[r] = resampler.evaluate(mult, buf);
    }
  };
  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
  }

  const double q_lo = (1.0 - spec.confidence) / 2.0;
  const double q_hi = 1.0 - q_lo;
  std::vector<double> kept;
  for (std::size_t k = 0; k < kMetricCount; ++k) {
    kept.clear();
    for (const auto& row : values)
      if (row[k]) kept.push_back(*row[k]);
    result.skipped[k] = R - static_cast<std::uint32_t>(kept.size());
    if (kept.empty() || result.skipped[k] * 2 > R) continue;
    std::sort(kept.begin(), kept.end());
    ConfidenceInterval ci;
    ci.lo = percentile(kept, q_lo);
    ci.hi = percentile(kept, q_hi);
    ci.resamples = R;
    ci.skipped = result.skipped[k];
    result.ci[k] = ci;
  }
  return result;
}

std::size_t metric_index(MetricKind kind) {
  for (std::size_t k = 0; k < kMetricCount; ++k)
    if (kAllMetrics[k] == kind) return k;
  throw Error(Errc::InvalidArgument, "unknown metric designator");
}

}  // namespace

void BootstrapSpec::validate() const {
  require(resamples >= 1, Errc::InvalidArgument, "resamples must be >= 1");
  require(confidence > 0.0 && confidence < 1.0, Errc::InvalidArgument,
          "confidence must lie in (0,1)");
}

BootstrapOutcome bootstrap_ci(const ScoreMapSet& set, MetricKind metric,
                              std::optional<double> lambda,
                              const BootstrapSpec& spec, unsigned threads) {
  require(!needs_lambda(metric) || lambda.has_value(), Errc::InvalidArgument,
          std::string(metric_name(metric)) + " requires a threshold");
  const SuiteResult suite = run_suite(set, lambda, spec, threads);
  const std::size_t k = metric_index(metric);
  require(suite.point[k].has_value(), Errc::MetricUndefined,
          std::string(metric_name(metric)) + " undefined on the full set");
  require(suite.ci[k].has_value(), Errc::MetricUndefined,
          std::string(metric_name(metric)) +
              " undefined on more than half of the resamples");
  BootstrapOutcome out;
  out.point = *suite.point[k];
  out.lo = suite.ci[k]->lo;
  out.hi = suite.ci[k]->hi;
  out.resamples = suite.ci[k]->resamples;
  out.skipped = suite.ci[k]->skipped;
  return out;
}

MetricsReport bootstrap_report(const ScoreMapSet& set, double lambda,
                               const BootstrapSpec& spec, unsigned threads) {
  const SuiteResult suite = run_suite(set, lambda, spec, threads);
  MetricsReport report;
  MetricEstimate* slots[kMetricCount] = {
      &report.coverage, &report.fnr,       &report.set_size, &report.auroc,
      &report.auprc,    &report.precision, &report.f1,       &report.iou};
  for (std::size_t k = 0; k < kMetricCount; ++k) {
    slots[k]->value = suite.point[k];
    slots[k]->ci = suite.ci[k];
  }
  return report;
}

}  // namespace crcmap
