#include "crcmap/crc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

namespace crcmap {

namespace {

struct PoolCounts {
  std::uint64_t valid = 0;
  std::uint64_t positive = 0;
  std::uint64_t positive_below = 0;  // positives with score < lambda
  std::uint64_t flagged = 0;         // valid with score >= lambda
};

PoolCounts pool_at(const ScoreMapSet& set, double lambda) {
  PoolCounts counts;
  for (const ScoreMap& map : set.maps()) {
    const auto scores = map.scores();
    const auto labels = map.labels();
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (labels[i] < 0) continue;
      ++counts.valid;
      const double s = scores[i];
      counts.flagged += (s >= lambda);
      if (labels[i] == 1) {
        ++counts.positive;
        counts.positive_below += (s < lambda);
      }
    }
  }
  return counts;
}

std::vector<float> positive_scores(const ScoreMapSet& set) {
  std::vector<float> scores;
  for (const ScoreMap& map : set.maps()) {
    const auto labels = map.labels();
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == 1) scores.push_back(map.score_at(i));
  }
  return scores;
}

void append_double(std::string& out, double v) {
  char tmp[64];
  const auto res = std::to_chars(tmp, tmp + sizeof tmp, v);
  out.append(tmp, res.ptr);
}

}  // namespace

double fnr_at(const ScoreMapSet& set, double lambda) {
  const PoolCounts counts = pool_at(set, lambda);
  require(counts.positive > 0, Errc::NoPositives,
          "fnr undefined without positive valid pixels");
  return static_cast<double>(counts.positive_below) /
         static_cast<double>(counts.positive);
}

double set_size_at(const ScoreMapSet& set, double lambda) {
  const PoolCounts counts = pool_at(set, lambda);
  require(counts.valid > 0, Errc::EmptyInput,
          "set size undefined without valid pixels");
  return static_cast<double>(counts.flagged) /
         static_cast<double>(counts.valid);
}

CalibrationResult calibrate_fnr(const ScoreMapSet& cal, const RiskSpec& spec) {
  std::vector<float> positives = positive_scores(cal);
  const std::uint64_t m = positives.size();
  require(m > 0, Errc::NoPositives, "no positive calibration pixels");

  const auto k = static_cast<std::uint64_t>(
      std::ceil(spec.alpha() * static_cast<double>(m + 1)));
  require(k <= m, Errc::AlphaTooLargeForSample,
          "ceil(alpha*(m+1)) = " + std::to_string(k) + " exceeds m = " +
              std::to_string(m));

  std::sort(positives.begin(), positives.end());
  CalibrationResult result;
  result.lambda_hat = positives[k - 1];  // the exact stored score value
  result.alpha_used = spec.alpha();
  result.m_positives = m;
  result.quantile_index = k;
  result.n_valid = cal.count_valid();
  return result;
}

std::vector<SweepRow> fnr_sweep(const ScoreMapSet& set,
                                std::span<const double> grid) {
  require(!grid.empty(), Errc::InvalidArgument, "empty sweep grid");
  for (double lambda : grid)
    require(std::isfinite(lambda) && lambda >= 0.0, Errc::InvalidArgument,
            "grid values must be finite and >= 0");

  // One sort, then binary searches per grid point.
  std::vector<float> all;
  std::vector<float> pos;
  for (const ScoreMap& map : set.maps()) {
    const auto labels = map.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0) continue;
      all.push_back(map.score_at(i));
      if (labels[i] == 1) pos.push_back(map.score_at(i));
    }
  }
  require(!all.empty(), Errc::EmptyInput, "no valid pixels");
  require(!pos.empty(), Errc::NoPositives, "no positive valid pixels");
  std::sort(all.begin(), all.end());
  std::sort(pos.begin(), pos.end());

  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double lambda : grid) {
    // score < lambda  <=>  score is before lower_bound(lambda) in a sorted
    // float array; the comparison runs in double so lambda is not narrowed.
    const auto below = [](const std::vector<float>& v, double x) {
      return std::lower_bound(v.begin(), v.end(), x,
                              [](float s, double t) {
                                return static_cast<double>(s) < t;
                              }) -
             v.begin();
    };
    SweepRow row;
    row.lambda = lambda;
    row.fnr = static_cast<double>(below(pos, lambda)) /
              static_cast<double>(pos.size());
    row.set_size =
        static_cast<double>(all.size() - below(all, lambda)) /
        static_cast<double>(all.size());
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.is_open(), Errc::IoFailure, "cannot open " + path.string());
  std::string buf = "lambda,fnr,set_size\n";
  for (const SweepRow& row : rows) {
    append_double(buf, row.lambda);
    buf.push_back(',');
    append_double(buf, row.fnr);
    buf.push_back(',');
    append_double(buf, row.set_size);
    buf.push_back('\n');
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  require(out.good(), Errc::IoFailure, "write failed for " + path.string());
}

}  // namespace crcmap
