#include "crcmap/threeway.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace crcmap {

ShiftDiagnostics shift_diagnostics(const Prevalence& prev, double rho) {
  require(prev.pi1() > 0.0 && prev.pi1() < 1.0, Errc::DegeneratePrevalence,
          "shift diagnostics need 0 < pi1 < 1");
  require(rho > 0.0 && std::isfinite(rho), Errc::InvalidArgument,
          "rho must be positive and finite");
  const double pi1 = prev.pi1();
  const double pi0 = prev.pi0();
  ShiftDiagnostics d;
  d.rho = rho;
  d.w1 = (rho * pi1) / (rho * pi1 + pi0) / pi1;
  d.w0 = pi0 / (rho * pi1 + pi0) / pi0;
  d.delta_l1 = std::fabs(d.w1 - 1.0) + std::fabs(d.w0 - 1.0);
  return d;
}

double prevalence_weighted_bound(const CostSpec& cost, const Prevalence& prev) {
  return std::max(cost.c_fn() * prev.pi1(), cost.c_fp() * prev.pi0());
}

double calibrate_cost_weighted(const ScoreMapSet& cal, const CostSpec& cost,
                               double alpha) {
  require(alpha > 0.0 && std::isfinite(alpha), Errc::AlphaOutOfRange,
          "alpha must be positive");

  std::vector<std::pair<float, std::int8_t>> pixels;
  std::uint64_t n_pos = 0;
  std::uint64_t n_neg = 0;
  for (const ScoreMap& map : cal.maps()) {
    const auto labels = map.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0) continue;
      pixels.emplace_back(map.score_at(i), labels[i]);
      labels[i] == 1 ? ++n_pos : ++n_neg;
    }
  }
  require(n_pos > 0, Errc::NoPositives, "no positive calibration pixels");
  require(n_neg > 0, Errc::NoNegatives, "no negative calibration pixels");

  std::sort(pixels.begin(), pixels.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const std::uint64_t n = pixels.size();
  const double margin = cost.max_cost() / static_cast<double>(n + 1);

  // Prefix counts at each distinct score boundary give exact loss totals
  // for every candidate without incremental float error.
  // At candidate lambda: positives strictly below miss (c_fn), negatives at
  // or above false-alarm (c_fp).
  const auto risk_with = [&](std::uint64_t pos_below,
                             std::uint64_t neg_below) {
    const double fn_cost = cost.c_fn() * static_cast<double>(pos_below);
    const double fp_cost = cost.c_fp() * static_cast<double>(n_neg - neg_below);
    return (fn_cost + fp_cost) / static_cast<double>(n);
  };

  const auto feasible = [&](std::uint64_t pos_below, std::uint64_t neg_below) {
    return risk_with(pos_below, neg_below) + margin <= alpha;
  };

  // Candidates ascending: 0, each distinct score, the sentinel 1. Return
  // the first (smallest) feasible one. The prefix counts entering each
  // group are exactly the strictly-below counts for that candidate.
  if (feasible(0, 0)) return 0.0;
  std::uint64_t pos_below = 0;
  std::uint64_t neg_below = 0;
  std::size_t i = 0;
  while (i < n) {
    const float candidate = pixels[i].first;
    if (candidate > 0.0f && feasible(pos_below, neg_below))
      return candidate;
    while (i < n && pixels[i].first == candidate) {
      pixels[i].second == 1 ? ++pos_below : ++neg_below;
      ++i;
    }
  }
  // Sentinel 1 flags only score-1 pixels; when such pixels exist the loop
  // already evaluated candidate 1, otherwise the full counts apply.
  if (pixels.back().first < 1.0f && feasible(pos_below, neg_below)) return 1.0;
  throw Error(Errc::Infeasible,
              "no threshold satisfies the cost-weighted level " +
                  std::to_string(alpha));
}

ZoneThresholds calibrate_three_way(const ScoreMapSet& cal, const CostSpec& cost,
                                   double alpha_cw, const ShiftInterval& shift) {
  require(alpha_cw > 0.0 && alpha_cw < cost.max_cost(), Errc::AlphaOutOfRange,
          "alpha_cw must lie in (0, max(c_fn, c_fp))");

  const Prevalence prev = prevalence_of(cal);
  const ShiftDiagnostics lo = shift_diagnostics(prev, shift.rho_lo());
  const ShiftDiagnostics hi = shift_diagnostics(prev, shift.rho_hi());
  const double b_pw = prevalence_weighted_bound(cost, prev);
  const std::uint64_t n_valid = cal.count_valid();

  ZoneThresholds z;
  z.alpha_cw = alpha_cw;
  z.b_pw = b_pw;
  z.delta_lo_l1 = lo.delta_l1;
  z.delta_hi_l1 = hi.delta_l1;
  z.eps_max = b_pw * std::max(lo.delta_l1, hi.delta_l1) +
              b_pw / static_cast<double>(n_valid + 1);
  z.alpha_safe = alpha_cw - z.eps_max;
  require(z.alpha_safe > 0.0, Errc::Infeasible,
          "shift interval too wide: alpha_safe <= 0");

  z.lambda_base = calibrate_cost_weighted(cal, cost, z.alpha_safe);
  z.shift_scale_s = b_pw / cost.max_cost();
  z.lambda_min = std::max(0.0, z.lambda_base - z.shift_scale_s * lo.delta_l1);
  z.lambda_max = std::min(1.0, z.lambda_base + z.shift_scale_s * hi.delta_l1);
  z.c_fn = cost.c_fn();
  z.c_fp = cost.c_fp();
  z.pi1_cal = prev.pi1();
  z.n_valid = n_valid;
  z.validate();
  return z;
}

ZoneAssignment assign_zones(const ScoreMapSet& set,
                            const ZoneThresholds& zones) {
  zones.validate();

  ZoneAssignment out;
  out.maps.reserve(set.size());

  std::uint64_t n_valid = 0;
  std::uint64_t n_safe = 0;
  std::uint64_t n_monitor = 0;
  std::uint64_t n_evacuate = 0;
  std::uint64_t n_fire = 0;
  std::uint64_t fire_monitor_or_evac = 0;
  std::uint64_t fire_evac = 0;
  std::uint64_t fire_in_safe = 0;
  std::uint64_t nonfire_in_evac = 0;

  for (const ScoreMap& map : set.maps()) {
    ZoneMap zone_map;
    zone_map.image_id = map.image_id();
    zone_map.height = map.height();
    zone_map.width = map.width();
    zone_map.scores.assign(map.scores().begin(), map.scores().end());
    zone_map.zones.resize(map.pixel_count());

    const auto scores = map.scores();
    const auto labels = map.labels();
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (labels[i] < 0) {
        zone_map.zones[i] = -1;
        continue;
      }
      const double s = scores[i];
      Zone zone;
      if (s < zones.lambda_min) {
        zone = Zone::Safe;
        ++n_safe;
        fire_in_safe += (labels[i] == 1);
      } else if (s < zones.lambda_max) {
        zone = Zone::Monitor;
        ++n_monitor;
      } else {
        zone = Zone::Evacuate;
        ++n_evacuate;
        nonfire_in_evac += (labels[i] == 0);
      }
      zone_map.zones[i] = static_cast<std::int8_t>(zone);
      ++n_valid;
      if (labels[i] == 1) {
        ++n_fire;
        fire_monitor_or_evac += (zone != Zone::Safe);
        fire_evac += (zone == Zone::Evacuate);
      }
    }
    out.maps.push_back(std::move(zone_map));
  }
  require(n_valid > 0, Errc::EmptyInput, "no valid pixels to assign");

  ZoneReport& report = out.report;
  const double nv = static_cast<double>(n_valid);
  report.frac_safe = static_cast<double>(n_safe) / nv;
  report.frac_monitor = static_cast<double>(n_monitor) / nv;
  report.frac_evacuate = static_cast<double>(n_evacuate) / nv;
  report.d_monitor = report.frac_monitor;
  report.n_valid = n_valid;
  report.n_decided = n_safe + n_evacuate;

  if (n_fire > 0) {
    report.coverage_flagged = static_cast<double>(fire_monitor_or_evac) /
                              static_cast<double>(n_fire);
    report.coverage_evacuate =
        static_cast<double>(fire_evac) / static_cast<double>(n_fire);
  }
  if (report.n_decided > 0) {
    report.decided_risk = (zones.c_fn * static_cast<double>(fire_in_safe) +
                           zones.c_fp * static_cast<double>(nonfire_in_evac)) /
                          static_cast<double>(report.n_decided);
    report.decided_bound = zones.alpha_cw / (1.0 - report.d_monitor);
  }
  return out;
}

}  // namespace crcmap
