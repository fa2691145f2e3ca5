#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "crcmap/types.hpp"

namespace crcmap {

// Score container layout (".crcs", all integers little-endian):
//   magic "CRS1" | u16 version=1 | u32 n_images | u32 height | u32 width
// then per image:
//   u32 image_id | f32 scores row-major | i8 labels row-major
// Zone containers ("CRZ1") share the layout with labels replaced by zone
// codes {0=SAFE, 1=MONITOR, 2=EVACUATE}; -1 still marks no-data.

inline constexpr std::array<char, 4> kScoreMagic = {'C', 'R', 'S', '1'};
inline constexpr std::array<char, 4> kZoneMagic = {'C', 'R', 'Z', '1'};
inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderBytes = 18;

/// One image of scores plus per-pixel zone codes (the CRZ1 payload).
struct ZoneMap {
  std::uint32_t image_id = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<float> scores;
  std::vector<std::int8_t> zones;  // -1 no-data, else Zone codes
};

std::uint64_t write_container(const ScoreMapSet& set,
                              const std::filesystem::path& path);
std::uint64_t write_container(const ScoreMapSet& set, std::ostream& out);

ScoreMapSet read_container(const std::filesystem::path& path);
ScoreMapSet read_container(std::istream& in);

std::uint64_t write_zone_container(const std::vector<ZoneMap>& maps,
                                   const std::filesystem::path& path);
std::vector<ZoneMap> read_zone_container(const std::filesystem::path& path);

// CSV with header "image_id,row,col,score,label". Cells absent from the
// file decode as label -1 with score 0; grid dimensions are one plus the
// largest row/col index seen anywhere in the file.
void write_csv(const ScoreMapSet& set, const std::filesystem::path& path);
void write_csv(const ScoreMapSet& set, std::ostream& out);
ScoreMapSet read_csv(const std::filesystem::path& path);
ScoreMapSet read_csv(std::istream& in);

/// Deterministic image-level splitting.
struct SplitSpec {
  std::uint64_t seed = 0;
  std::array<double, 3> ratios{};  // train, calibration, test

  void validate() const;
};

/// Permutes images with a seeded Fisher-Yates shuffle (mt19937_64), then
/// cuts at the cumulative-ratio boundaries floor(n * c_j); the final
/// boundary is pinned to n so the three parts always partition the input.
std::array<ScoreMapSet, 3> split(const ScoreMapSet& set, const SplitSpec& spec);

}  // namespace crcmap
