#include "crcmap/metrics.hpp"

#include <algorithm>
#include <vector>

namespace crcmap {

namespace {

/// (score, label) pairs for valid pixels, sorted ascending by score.
std::vector<std::pair<float, std::int8_t>> sorted_valid(const ScoreMapSet& set) {
  std::vector<std::pair<float, std::int8_t>> pixels;
  for (const ScoreMap& map : set.maps()) {
    const auto labels = map.labels();
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] >= 0) pixels.emplace_back(map.score_at(i), labels[i]);
  }
  std::sort(pixels.begin(), pixels.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return pixels;
}

}  // namespace

Confusion confusion_at(const ScoreMapSet& set, double lambda) {
  Confusion c;
  for (const ScoreMap& map : set.maps()) {
    const auto scores = map.scores();
    const auto labels = map.labels();
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (labels[i] < 0) continue;
      const bool flagged = static_cast<double>(scores[i]) >= lambda;
      if (labels[i] == 1) {
        flagged ? ++c.tp : ++c.fn;
      } else {
        flagged ? ++c.fp : ++c.tn;
      }
    }
  }
  require(c.valid() > 0, Errc::EmptyInput, "no valid pixels");
  return c;
}

MetricsReport point_metrics(const ScoreMapSet& set, double lambda) {
  const Confusion c = confusion_at(set, lambda);
  require(c.positives() > 0, Errc::NoPositives,
          "coverage/fnr undefined without positive pixels");

  MetricsReport report;
  const double tp = static_cast<double>(c.tp);
  const double cov = tp / static_cast<double>(c.tp + c.fn);
  report.coverage.value = cov;
  report.fnr.value = 1.0 - cov;
  report.set_size.value = static_cast<double>(c.tp + c.fp) /
                          static_cast<double>(c.valid());
  if (c.tp + c.fp > 0)
    report.precision.value = tp / static_cast<double>(c.tp + c.fp);
  report.f1.value = 2.0 * tp / static_cast<double>(2 * c.tp + c.fp + c.fn);
  report.iou.value = tp / static_cast<double>(c.tp + c.fp + c.fn);
  return report;
}

double auroc(const ScoreMapSet& set) {
  const auto pixels = sorted_valid(set);
  require(!pixels.empty(), Errc::EmptyInput, "no valid pixels");

  // Mann-Whitney via average ranks over tie groups.
  std::uint64_t n_pos = 0;
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < pixels.size()) {
    std::size_t j = i;
    std::uint64_t group_pos = 0;
    while (j < pixels.size() && pixels[j].first == pixels[i].first) {
      group_pos += (pixels[j].second == 1);
      ++j;
    }
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    rank_sum_pos += avg_rank * static_cast<double>(group_pos);
    n_pos += group_pos;
    i = j;
  }
  const std::uint64_t n_neg = pixels.size() - n_pos;
  require(n_pos > 0, Errc::NoPositives, "auroc needs positive pixels");
  require(n_neg > 0, Errc::NoNegatives, "auroc needs negative pixels");

  const double u = rank_sum_pos -
                   0.5 * static_cast<double>(n_pos) *
                       static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auprc(const ScoreMapSet& set) {
  auto pixels = sorted_valid(set);
  require(!pixels.empty(), Errc::EmptyInput, "no valid pixels");

  std::uint64_t n_pos = 0;
  for (const auto& p : pixels) n_pos += (p.second == 1);
  require(n_pos > 0, Errc::NoPositives, "auprc needs positive pixels");

  // Walk distinct scores descending; each group contributes its positives
  // at the precision of the prefix ending with that group.
  double ap = 0.0;
  std::uint64_t tp = 0;
  std::uint64_t flagged = 0;
  std::size_t i = pixels.size();
  while (i > 0) {
    std::size_t j = i;
    std::uint64_t group_pos = 0;
    std::uint64_t group_all = 0;
    const float score = pixels[i - 1].first;
    while (j > 0 && pixels[j - 1].first == score) {
      group_pos += (pixels[j - 1].second == 1);
      ++group_all;
      --j;
    }
    tp += group_pos;
    flagged += group_all;
    if (group_pos > 0) {
      const double precision =
          static_cast<double>(tp) / static_cast<double>(flagged);
      ap += precision * static_cast<double>(group_pos);
    }
    i = j;
  }
  return ap / static_cast<double>(n_pos);
}

const char* metric_name(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::Coverage: return "coverage";
    case MetricKind::Fnr: return "fnr";
    case MetricKind::SetSize: return "set_size";
    case MetricKind::Auroc: return "auroc";
    case MetricKind::Auprc: return "auprc";
    case MetricKind::Precision: return "precision";
    case MetricKind::F1: return "f1";
    case MetricKind::Iou: return "iou";
  }
  return "unknown";
}

}  // namespace crcmap
