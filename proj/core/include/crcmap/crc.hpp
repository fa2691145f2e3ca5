#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "crcmap/types.hpp"

namespace crcmap {

// Binary conformal risk control. The decision rule is y_hat = 1{p >= lambda}
// (ties at lambda are flagged), so fnr counts scores strictly below lambda.
// All quantities pool valid pixels across every image in the set.

/// Fraction of positive valid pixels with score < lambda.
double fnr_at(const ScoreMapSet& set, double lambda);

/// Fraction of valid pixels with score >= lambda.
double set_size_at(const ScoreMapSet& set, double lambda);

/// Selects the k-th smallest positive-pixel score, k = ceil(alpha*(m+1)).
/// At that threshold at most k-1 calibration positives lie strictly below.
CalibrationResult calibrate_fnr(const ScoreMapSet& cal, const RiskSpec& spec);

struct SweepRow {
  double lambda = 0.0;
  double fnr = 0.0;
  double set_size = 0.0;
};

/// Evaluates (fnr, set_size) at every grid point, ordered like the grid.
std::vector<SweepRow> fnr_sweep(const ScoreMapSet& set,
                                std::span<const double> grid);

/// Plot-ready CSV with header "lambda,fnr,set_size".
void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path);

}  // namespace crcmap
