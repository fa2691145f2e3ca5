#pragma once

// Test-only helpers: set builders and independent brute-force oracles.
// The oracles recompute every quantity by direct enumeration and must stay
// independent of the library implementation paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "crcmap/types.hpp"

namespace testutil {

using crcmap::ScoreMap;
using crcmap::ScoreMapSet;

/// Single 1xN image from parallel score/label arrays.
inline ScoreMapSet one_image(const std::vector<float>& scores,
                             const std::vector<std::int8_t>& labels,
                             std::uint32_t image_id = 0) {
  std::vector<ScoreMap> maps;
  maps.emplace_back(image_id, 1, static_cast<std::uint32_t>(scores.size()),
                    scores, labels);
  return ScoreMapSet(std::move(maps));
}

struct RandomSetOptions {
  std::uint32_t images = 4;
  std::uint32_t height = 3;
  std::uint32_t width = 5;
  double p_nodata = 0.1;
  double p_fire = 0.3;
  /// Scores snap to an i/granularity grid so ties occur; 0 disables.
  std::uint32_t granularity = 8;
  bool include_extremes = true;  // sprinkle exact 0.0f and 1.0f scores
};

inline ScoreMapSet random_set(std::mt19937_64& gen,
                              const RandomSetOptions& opt = {}) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ScoreMap> maps;
  for (std::uint32_t img = 0; img < opt.images; ++img) {
    const std::size_t n =
        static_cast<std::size_t>(opt.height) * opt.width;
    std::vector<float> scores(n);
    std::vector<std::int8_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = unit(gen);
      if (opt.granularity > 0)
        s = std::round(s * opt.granularity) / opt.granularity;
      if (opt.include_extremes) {
        const double u = unit(gen);
        if (u < 0.03) s = 0.0;
        else if (u < 0.06) s = 1.0;
      }
      scores[i] = static_cast<float>(s);
      const double r = unit(gen);
      labels[i] = (r < opt.p_nodata) ? -1 : (r < opt.p_nodata + opt.p_fire);
    }
    maps.emplace_back(img, opt.height, opt.width, std::move(scores),
                      std::move(labels));
  }
  return ScoreMapSet(std::move(maps));
}

/// Appends no-data pixels by widening every image with -1 columns; all
/// metrics and thresholds must be invariant under this.
inline ScoreMapSet pad_with_nodata(const ScoreMapSet& set,
                                   std::uint32_t extra_cols,
                                   float filler_score = 0.7f) {
  std::vector<ScoreMap> maps;
  for (const ScoreMap& map : set.maps()) {
    const std::uint32_t w = map.width() + extra_cols;
    std::vector<float> scores;
    std::vector<std::int8_t> labels;
    for (std::uint32_t r = 0; r < map.height(); ++r) {
      for (std::uint32_t c = 0; c < map.width(); ++c) {
        scores.push_back(map.score_at(static_cast<std::size_t>(r) * map.width() + c));
        labels.push_back(map.label_at(static_cast<std::size_t>(r) * map.width() + c));
      }
      for (std::uint32_t c = 0; c < extra_cols; ++c) {
        scores.push_back(filler_score);
        labels.push_back(-1);
      }
    }
    maps.emplace_back(map.image_id(), map.height(), w, std::move(scores),
                      std::move(labels));
  }
  return ScoreMapSet(std::move(maps));
}

inline std::vector<std::pair<float, std::int8_t>> valid_pixels(
    const ScoreMapSet& set) {
  std::vector<std::pair<float, std::int8_t>> out;
  for (const ScoreMap& map : set.maps())
    for (std::size_t i = 0; i < map.pixel_count(); ++i)
      if (map.valid_at(i)) out.emplace_back(map.score_at(i), map.label_at(i));
  return out;
}

// ---- independent oracles ----

struct OracleConfusion {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline OracleConfusion oracle_confusion(const ScoreMapSet& set, double lambda) {
  OracleConfusion c;
  for (const auto& [score, label] : valid_pixels(set)) {
    const bool flag = static_cast<double>(score) >= lambda;
    if (label == 1) flag ? ++c.tp : ++c.fn;
    else flag ? ++c.fp : ++c.tn;
  }
  return c;
}

inline double oracle_fnr(const ScoreMapSet& set, double lambda) {
  const OracleConfusion c = oracle_confusion(set, lambda);
  return static_cast<double>(c.fn) / static_cast<double>(c.tp + c.fn);
}

inline double oracle_set_size(const ScoreMapSet& set, double lambda) {
  const OracleConfusion c = oracle_confusion(set, lambda);
  return static_cast<double>(c.tp + c.fp) /
         static_cast<double>(c.tp + c.fp + c.fn + c.tn);
}

/// AUROC by exhaustive positive-negative pair comparison, ties at 1/2.
inline double oracle_auroc(const ScoreMapSet& set) {
  std::vector<float> pos, neg;
  for (const auto& [score, label] : valid_pixels(set))
    (label == 1 ? pos : neg).push_back(score);
  double wins = 0.0;
  for (float p : pos)
    for (float q : neg) wins += (p > q) ? 1.0 : (p == q ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

/// Average precision by full PR enumeration over distinct-score thresholds,
/// step convention: AP = sum_k (recall_k - recall_{k-1}) * precision_k.
inline double oracle_ap(const ScoreMapSet& set) {
  const auto pixels = valid_pixels(set);
  std::vector<float> thresholds;
  std::uint64_t total_pos = 0;
  for (const auto& [score, label] : pixels) {
    thresholds.push_back(score);
    total_pos += (label == 1);
  }
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  double ap = 0.0;
  double prev_recall = 0.0;
  for (float t : thresholds) {
    std::uint64_t tp = 0, flagged = 0;
    for (const auto& [score, label] : pixels) {
      if (score >= t) {
        ++flagged;
        tp += (label == 1);
      }
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(total_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(flagged);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

/// Mean cost-weighted loss at a threshold, by direct summation.
inline double oracle_cost_risk(const ScoreMapSet& set, double c_fn, double c_fp,
                               double lambda) {
  double total = 0.0;
  std::uint64_t n = 0;
  for (const auto& [score, label] : valid_pixels(set)) {
    ++n;
    const bool flag = static_cast<double>(score) >= lambda;
    if (label == 1 && !flag) total += c_fn;
    if (label == 0 && flag) total += c_fp;
  }
  return total / static_cast<double>(n);
}

/// Smallest feasible candidate threshold by brute-force scan of
/// {0} u {scores} u {1} with the finite-sample margin; NaN when infeasible.
inline double oracle_cost_weighted(const ScoreMapSet& set, double c_fn,
                                   double c_fp, double alpha) {
  std::vector<double> candidates{0.0, 1.0};
  std::uint64_t n = 0;
  for (const auto& [score, label] : valid_pixels(set)) {
    candidates.push_back(score);
    ++n;
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  const double margin = std::max(c_fn, c_fp) / static_cast<double>(n + 1);
  for (double lambda : candidates) {
    if (oracle_cost_risk(set, c_fn, c_fp, lambda) + margin <= alpha)
      return lambda;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace testutil
