#include "crcmap/report.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace crcmap {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json provenance_json(const Provenance& prov) {
  ordered_json j;
  j["artifact"] = std::string(kArtifactName) + " " + kArtifactVersion;
  j["command"] = prov.command;
  ordered_json params = ordered_json::object();
  for (const auto& [key, value] : prov.parameters) params[key] = value;
  j["parameters"] = std::move(params);
  ordered_json inputs = ordered_json::array();
  for (const InputDigest& input : prov.inputs) {
    inputs.push_back({{"role", input.role},
                      {"path", input.path},
                      {"digest", input.digest}});
  }
  j["inputs"] = std::move(inputs);
  return j;
}

std::string finish(ordered_json j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.is_open(), Errc::IoFailure, "cannot open " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(out.good(), Errc::IoFailure, "write failed for " + path.string());
}

ordered_json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.is_open(), Errc::IoFailure, "cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadField,
                "cannot parse " + path.string() + ": " + e.what());
  }
}

template <typename T>
T field(const ordered_json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::BadField, std::string("missing or mistyped field '") +
                                    key + "'");
  }
}

ordered_json zone_thresholds_json(const ZoneThresholds& z) {
  ordered_json j;
  j["lambda_min"] = z.lambda_min;
  j["lambda_max"] = z.lambda_max;
  j["lambda_base"] = z.lambda_base;
  j["alpha_cw"] = z.alpha_cw;
  j["alpha_safe"] = z.alpha_safe;
  j["eps_max"] = z.eps_max;
  j["b_pw"] = z.b_pw;
  j["shift_scale_s"] = z.shift_scale_s;
  j["delta_lo_l1"] = z.delta_lo_l1;
  j["delta_hi_l1"] = z.delta_hi_l1;
  j["c_fn"] = z.c_fn;
  j["c_fp"] = z.c_fp;
  j["pi1_cal"] = z.pi1_cal;
  j["n_valid"] = z.n_valid;
  return j;
}

void metric_to_json(ordered_json& parent, const char* name,
                    const MetricEstimate& metric) {
  if (!metric.value && !metric.ci) return;  // absent fields stay absent
  ordered_json j = ordered_json::object();
  if (metric.value) j["value"] = *metric.value;
  if (metric.ci) {
    j["ci"] = {{"lo", metric.ci->lo},
               {"hi", metric.ci->hi},
               {"resamples", metric.ci->resamples},
               {"skipped", metric.ci->skipped}};
  }
  parent[name] = std::move(j);
}

}  // namespace

std::string fnv1a64_digest(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  require(in.is_open(), Errc::IoFailure, "cannot open " + file.string());
  std::uint64_t hash = 14695981039346656037ULL;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
  }
  char text[32];
  std::snprintf(text, sizeof text, "fnv1a64:%016llx",
                static_cast<unsigned long long>(hash));
  return text;
}

std::string render_calibration(const CalibrationResult& result,
                               const Provenance& prov) {
  ordered_json j;
  j["provenance"] = provenance_json(prov);
  j["calibration"] = {{"lambda_hat", result.lambda_hat},
                      {"alpha_used", result.alpha_used},
                      {"m_positives", result.m_positives},
                      {"quantile_index", result.quantile_index},
                      {"n_valid", result.n_valid}};
  return finish(std::move(j));
}

void save_calibration(const std::filesystem::path& path,
                      const CalibrationResult& result, const Provenance& prov) {
  write_text(path, render_calibration(result, prov));
}

CalibrationResult load_calibration(const std::filesystem::path& path) {
  const ordered_json j = parse_file(path);
  require(j.contains("calibration"), Errc::BadField,
          "not a calibration file: " + path.string());
  const ordered_json& c = j["calibration"];
  CalibrationResult result;
  result.lambda_hat = field<double>(c, "lambda_hat");
  result.alpha_used = field<double>(c, "alpha_used");
  result.m_positives = field<std::uint64_t>(c, "m_positives");
  result.quantile_index = field<std::uint64_t>(c, "quantile_index");
  result.n_valid = field<std::uint64_t>(c, "n_valid");
  result.validate();
  return result;
}

std::string render_zone_thresholds(const ZoneThresholds& zones,
                                   const Provenance& prov) {
  ordered_json j;
  j["provenance"] = provenance_json(prov);
  j["zones"] = zone_thresholds_json(zones);
  return finish(std::move(j));
}

void save_zone_thresholds(const std::filesystem::path& path,
                          const ZoneThresholds& zones, const Provenance& prov) {
  write_text(path, render_zone_thresholds(zones, prov));
}

ZoneThresholds load_zone_thresholds(const std::filesystem::path& path) {
  const ordered_json j = parse_file(path);
  require(j.contains("zones"), Errc::BadField,
          "not a zone-thresholds file: " + path.string());
  const ordered_json& z = j["zones"];
  ZoneThresholds zones;
  zones.lambda_min = field<double>(z, "lambda_min");
  zones.lambda_max = field<double>(z, "lambda_max");
  zones.lambda_base = field<double>(z, "lambda_base");
  zones.alpha_cw = field<double>(z, "alpha_cw");
  zones.alpha_safe = field<double>(z, "alpha_safe");
  zones.eps_max = field<double>(z, "eps_max");
  zones.b_pw = field<double>(z, "b_pw");
  zones.shift_scale_s = field<double>(z, "shift_scale_s");
  zones.delta_lo_l1 = field<double>(z, "delta_lo_l1");
  zones.delta_hi_l1 = field<double>(z, "delta_hi_l1");
  zones.c_fn = field<double>(z, "c_fn");
  zones.c_fp = field<double>(z, "c_fp");
  zones.pi1_cal = field<double>(z, "pi1_cal");
  zones.n_valid = field<std::uint64_t>(z, "n_valid");
  zones.validate();
  return zones;
}

std::string render_zone_report(const ZoneThresholds& zones,
                               const ZoneReport& report,
                               const Provenance& prov) {
  ordered_json j;
  j["provenance"] = provenance_json(prov);
  j["zones"] = zone_thresholds_json(zones);
  ordered_json r;
  r["frac_safe"] = report.frac_safe;
  r["frac_monitor"] = report.frac_monitor;
  r["frac_evacuate"] = report.frac_evacuate;
  if (report.coverage_flagged)
    r["coverage_flagged"] = *report.coverage_flagged;
  if (report.coverage_evacuate)
    r["coverage_evacuate"] = *report.coverage_evacuate;
  if (report.decided_risk) r["decided_risk"] = *report.decided_risk;
  if (report.decided_bound) r["decided_bound"] = *report.decided_bound;
  r["d_monitor"] = report.d_monitor;
  r["n_valid"] = report.n_valid;
  r["n_decided"] = report.n_decided;
  j["report"] = std::move(r);
  return finish(std::move(j));
}

void save_zone_report(const std::filesystem::path& path,
                      const ZoneThresholds& zones, const ZoneReport& report,
                      const Provenance& prov) {
  write_text(path, render_zone_report(zones, report, prov));
}

std::string render_metrics_report(double lambda, const MetricsReport& report,
                                  const Provenance& prov) {
  ordered_json j;
  j["provenance"] = provenance_json(prov);
  j["lambda"] = lambda;
  j["score_pooling"] = "pixels pooled across images";
  bool any_ci = false;
  for (const MetricEstimate* m :
       {&report.coverage, &report.fnr, &report.set_size, &report.auroc,
        &report.auprc, &report.precision, &report.f1, &report.iou})
    any_ci |= m->ci.has_value();
  if (any_ci) j["interval_method"] = "percentile bootstrap, image resamples";
  ordered_json metrics = ordered_json::object();
  metric_to_json(metrics, "coverage", report.coverage);
  metric_to_json(metrics, "fnr", report.fnr);
  metric_to_json(metrics, "set_size", report.set_size);
  metric_to_json(metrics, "auroc", report.auroc);
  metric_to_json(metrics, "auprc", report.auprc);
  metric_to_json(metrics, "precision", report.precision);
  metric_to_json(metrics, "f1", report.f1);
  metric_to_json(metrics, "iou", report.iou);
  j["metrics"] = std::move(metrics);
  return finish(std::move(j));
}

void save_metrics_report(const std::filesystem::path& path, double lambda,
                         const MetricsReport& report, const Provenance& prov) {
  write_text(path, render_metrics_report(lambda, report, prov));
}

std::string render_mc_result(const std::string& mode, const McResult& result,
                             const KeyValues& extras, bool passed,
                             const std::string& criterion,
                             const Provenance& prov) {
  ordered_json j;
  j["provenance"] = provenance_json(prov);
  j["mode"] = mode;
  ordered_json r;
  r["trials"] = result.trials;
  r["mean_risk"] = result.mean_risk;
  r["std_risk"] = result.std_risk;
  r["violation_fraction"] = result.violation_fraction;
  for (const auto& [key, value] : extras) r[key] = value;
  j["result"] = std::move(r);
  j["check"] = {{"criterion", criterion}, {"passed", passed}};
  return finish(std::move(j));
}

std::string render_split_summary(const std::vector<InputDigest>& partitions,
                                 const std::vector<std::size_t>& sizes,
                                 const Provenance& prov) {
  ordered_json j;
  j["provenance"] = provenance_json(prov);
  ordered_json parts = ordered_json::array();
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    parts.push_back({{"role", partitions[i].role},
                     {"path", partitions[i].path},
                     {"images", sizes[i]},
                     {"digest", partitions[i].digest}});
  }
  j["partitions"] = std::move(parts);
  return finish(std::move(j));
}

}  // namespace crcmap
