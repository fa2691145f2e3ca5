#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "crcmap/synth.hpp"
#include "crcmap/threeway.hpp"
#include "crcmap/types.hpp"

namespace crcmap {

inline constexpr const char* kArtifactName = "crcmap";
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Content digest of an input file, "fnv1a64:" + 16 hex digits.
std::string fnv1a64_digest(const std::filesystem::path& file);

struct InputDigest {
  std::string role;
  std::string path;
  std::string digest;
};

/// Embedded in every emitted report: the exact parameters that produced it
/// plus content digests of the inputs. No timestamps, no host info.
struct Provenance {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<InputDigest> inputs;
};

using KeyValues = std::vector<std::pair<std::string, double>>;

// Renderers return the exact bytes of the structured-text report (JSON,
// two-space indent, trailing newline); save_* write them to disk.

std::string render_calibration(const CalibrationResult& result,
                               const Provenance& prov);
void save_calibration(const std::filesystem::path& path,
                      const CalibrationResult& result, const Provenance& prov);
CalibrationResult load_calibration(const std::filesystem::path& path);

std::string render_zone_thresholds(const ZoneThresholds& zones,
                                   const Provenance& prov);
void save_zone_thresholds(const std::filesystem::path& path,
                          const ZoneThresholds& zones, const Provenance& prov);
ZoneThresholds load_zone_thresholds(const std::filesystem::path& path);

std::string render_zone_report(const ZoneThresholds& zones,
                               const ZoneReport& report,
                               const Provenance& prov);
void save_zone_report(const std::filesystem::path& path,
                      const ZoneThresholds& zones, const ZoneReport& report,
                      const Provenance& prov);

std::string render_metrics_report(double lambda, const MetricsReport& report,
                                  const Provenance& prov);
void save_metrics_report(const std::filesystem::path& path, double lambda,
                         const MetricsReport& report, const Provenance& prov);

std::string render_mc_result(const std::string& mode, const McResult& result,
                             const KeyValues& extras, bool passed,
                             const std::string& criterion,
                             const Provenance& prov);

std::string render_split_summary(const std::vector<InputDigest>& partitions,
                                 const std::vector<std::size_t>& sizes,
                                 const Provenance& prov);

}  // namespace crcmap
