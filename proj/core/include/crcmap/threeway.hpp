#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crcmap/io.hpp"
#include "crcmap/types.hpp"

namespace crcmap {

/// Importance-weight mismatch at one prevalence-ratio endpoint.
struct ShiftDiagnostics {
  double rho = 1.0;
  double w1 = 1.0;
  double w0 = 1.0;
  double delta_l1 = 0.0;  // |w1 - 1| + |w0 - 1|
};

ShiftDiagnostics shift_diagnostics(const Prevalence& prev, double rho);

/// B_pw = max(c_fn * pi1, c_fp * pi0).
double prevalence_weighted_bound(const CostSpec& cost, const Prevalence& prev);

/// Cost-weighted threshold selection. The per-pixel loss at threshold
/// lambda is c_fn*1{y=1, p<lambda} + c_fp*1{y=0, p>=lambda} and the
/// empirical risk R(lambda) is its mean over valid pixels. R is not
/// monotone in lambda, so every candidate in {0} U {distinct scores} U {1}
/// is scanned; the result is the smallest candidate with
/// R(lambda) + max(c_fn, c_fp)/(n+1) <= alpha, i.e. the most protective
/// feasible threshold (smaller lambda flags more pixels).
double calibrate_cost_weighted(const ScoreMapSet& cal, const CostSpec& cost,
                               double alpha);

/// Shift-aware three-way calibration: recalibrates at
/// alpha_safe = alpha_cw - eps_max, then widens the base threshold by the
/// scaled endpoint mismatches into [lambda_min, lambda_max].
ZoneThresholds calibrate_three_way(const ScoreMapSet& cal, const CostSpec& cost,
                                   double alpha_cw, const ShiftInterval& shift);

/// Zone-fraction and decided-set summary over valid pixels.
struct ZoneReport {
  double frac_safe = 0.0;
  double frac_monitor = 0.0;
  double frac_evacuate = 0.0;
  /// Fire pixels routed to MONITOR or EVACUATE (both counted as flagged).
  std::optional<double> coverage_flagged;
  /// Fire pixels routed to EVACUATE only.
  std::optional<double> coverage_evacuate;
  /// Mean cost-weighted loss over SAFE u EVACUATE, EVACUATE read as a
  /// positive prediction; absent when every pixel is MONITOR.
  std::optional<double> decided_risk;
  /// alpha_cw / (1 - d_monitor); absent when d_monitor = 1.
  std::optional<double> decided_bound;
  double d_monitor = 0.0;
  std::uint64_t n_valid = 0;
  std::uint64_t n_decided = 0;
};

struct ZoneAssignment {
  std::vector<ZoneMap> maps;  // zone codes per pixel, -1 for no-data
  ZoneReport report;
};

ZoneAssignment assign_zones(const ScoreMapSet& set,
                            const ZoneThresholds& zones);

}  // namespace crcmap
