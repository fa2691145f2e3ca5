#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "crcmap/io.hpp"
#include "testutil.hpp"

using namespace crcmap;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool sets_equal(const ScoreMapSet& a, const ScoreMapSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const ScoreMap& x = a.maps()[i];
    const ScoreMap& y = b.maps()[i];
    if (x.image_id() != y.image_id() || x.height() != y.height() ||
        x.width() != y.width())
      return false;
    for (std::size_t p = 0; p < x.pixel_count(); ++p) {
      if (std::bit_cast<std::uint32_t>(x.score_at(p)) !=
          std::bit_cast<std::uint32_t>(y.score_at(p)))
        return false;
      if (x.label_at(p) != y.label_at(p)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("container byte layout: one 2x2 image is 42 bytes") {
  const auto set = ScoreMapSet({ScoreMap(
      7, 2, 2, {0.0f, 0.25f, 0.5f, 1.0f}, {0, 1, -1, 1})});
  std::ostringstream out;
  CHECK(write_container(set, out) == 42);  // 18 header + 4 id + 16 + 4
  const std::string bytes = out.str();
  CHECK(bytes.size() == 42);
  CHECK(bytes.substr(0, 4) == "CRS1");
  CHECK(bytes[4] == 1);  // version 1 LE
  CHECK(bytes[5] == 0);
  CHECK(static_cast<unsigned char>(bytes[6]) == 1);  // n_images
  CHECK(static_cast<unsigned char>(bytes[10]) == 2);  // height
  CHECK(static_cast<unsigned char>(bytes[14]) == 2);  // width
  CHECK(static_cast<unsigned char>(bytes[18]) == 7);  // image_id
}

TEST_CASE("container rejects an empty set") {
  std::ostringstream out;
  CHECK_THROWS_AS(write_container(ScoreMapSet(), out), Error);
}

TEST_CASE("container read errors") {
  const auto set =
      ScoreMapSet({ScoreMap(0, 1, 2, {0.5f, 0.75f}, {0, 1})});
  std::ostringstream out;
  write_container(set, out);
  const std::string good = out.str();

  SUBCASE("bad magic") {
    std::string bad = good;
    bad.replace(0, 4, "XXXX");
    std::istringstream in(bad);
    CHECK_THROWS_WITH_AS(read_container(in), doctest::Contains("BadMagic"),
                         Error);
  }
  SUBCASE("bad version") {
    std::string bad = good;
    bad[4] = 2;
    std::istringstream in(bad);
    CHECK_THROWS_WITH_AS(read_container(in), doctest::Contains("BadVersion"),
                         Error);
  }
  SUBCASE("payload one byte short") {
    std::istringstream in(good.substr(0, good.size() - 1));
    CHECK_THROWS_WITH_AS(read_container(in),
                         doctest::Contains("TruncatedPayload"), Error);
  }
  SUBCASE("trailing bytes") {
    std::istringstream in(good + "x");
    CHECK_THROWS_WITH_AS(read_container(in),
                         doctest::Contains("TruncatedPayload"), Error);
  }
  SUBCASE("score out of range after decode") {
    std::string bad = good;
    // score[0] occupies bytes 22..25; 2.0f little-endian is 00 00 00 40
    bad[22] = 0; bad[23] = 0; bad[24] = 0; bad[25] = 0x40;
    std::istringstream in(bad);
    CHECK_THROWS_WITH_AS(read_container(in),
                         doctest::Contains("ScoreOutOfRange"), Error);
  }
  SUBCASE("bad label") {
    std::string bad = good;
    bad[30] = 3;  // labels start at 22 + 8
    std::istringstream in(bad);
    CHECK_THROWS_WITH_AS(read_container(in), doctest::Contains("BadLabel"),
                         Error);
  }
}

TEST_CASE("container round trip is the identity, rewrite is byte-identical") {
  std::mt19937_64 gen(99);
  for (int rep = 0; rep < 30; ++rep) {
    testutil::RandomSetOptions opt;
    opt.images = 1 + static_cast<std::uint32_t>(gen() % 5);
    opt.p_nodata = (rep % 3 == 0) ? 1.0 : 0.15;  // some all-no-data sets
    const auto set = testutil::random_set(gen, opt);

    std::ostringstream first;
    write_container(set, first);
    std::istringstream in(first.str());
    const ScoreMapSet back = read_container(in);
    CHECK(sets_equal(set, back));

    std::ostringstream second;
    write_container(back, second);
    CHECK(first.str() == second.str());
  }
}

TEST_CASE("csv parses a small image") {
  std::istringstream in(
      "image_id,row,col,score,label\n"
      "3,0,0,0.25,1\n"
      "3,0,1,0.75,0\n");
  const ScoreMapSet set = read_csv(in);
  REQUIRE(set.size() == 1);
  CHECK(set.maps()[0].image_id() == 3);
  CHECK(set.maps()[0].height() == 1);
  CHECK(set.maps()[0].width() == 2);
  CHECK(set.maps()[0].score_at(0) == 0.25f);
  CHECK(set.maps()[0].label_at(1) == 0);
}

TEST_CASE("csv absent cells become no-data with score zero") {
  std::istringstream in(
      "image_id,row,col,score,label\n"
      "0,1,2,0.5,1\n");  // forces a 2x3 grid with 5 absent cells
  const ScoreMapSet set = read_csv(in);
  REQUIRE(set.size() == 1);
  CHECK(set.maps()[0].height() == 2);
  CHECK(set.maps()[0].width() == 3);
  CHECK(set.maps()[0].label_at(0) == -1);
  CHECK(set.maps()[0].score_at(0) == 0.0f);
  CHECK(set.maps()[0].label_at(5) == 1);
}

TEST_CASE("csv error identities") {
  {
    std::istringstream in("image,row,col,score,label\n");
    CHECK_THROWS_WITH_AS(read_csv(in), doctest::Contains("BadHeader"), Error);
  }
  {
    std::istringstream in("image_id,row,col,score,label\n0,0,0,abc,1\n");
    CHECK_THROWS_WITH_AS(read_csv(in), doctest::Contains("BadField"), Error);
  }
  {
    std::istringstream in("image_id,row,col,score,label\n0,0,0,1.5,1\n");
    CHECK_THROWS_WITH_AS(read_csv(in), doctest::Contains("ScoreOutOfRange"),
                         Error);
  }
  {
    std::istringstream in("image_id,row,col,score,label\n0,0,0,0.5,9\n");
    CHECK_THROWS_WITH_AS(read_csv(in), doctest::Contains("BadLabel"), Error);
  }
  {
    std::istringstream in(
        "image_id,row,col,score,label\n0,0,0,0.5,1\n0,0,0,0.4,0\n");
    CHECK_THROWS_WITH_AS(read_csv(in), doctest::Contains("BadField"), Error);
  }
}

TEST_CASE("csv and container round trips compose") {
  std::mt19937_64 gen(123);
  for (int rep = 0; rep < 10; ++rep) {
    const auto set = testutil::random_set(gen);
    std::ostringstream csv;
    write_csv(set, csv);
    std::istringstream csv_in(csv.str());
    const ScoreMapSet from_csv = read_csv(csv_in);
    CHECK(sets_equal(set, from_csv));

    std::ostringstream bin;
    write_container(from_csv, bin);
    std::istringstream bin_in(bin.str());
    CHECK(sets_equal(set, read_container(bin_in)));
  }
}

TEST_CASE("zone container round trip") {
  std::vector<ZoneMap> zones;
  zones.push_back(ZoneMap{5, 1, 4, {0.0f, 0.3f, 0.6f, 1.0f}, {0, 1, 2, -1}});
  const auto path = temp_file("crcmap_test_zones.crcs");
  write_zone_container(zones, path);
  const std::string bytes = slurp(path);
  CHECK(bytes.substr(0, 4) == "CRZ1");
  const auto back = read_zone_container(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].image_id == 5);
  CHECK(back[0].zones == zones[0].zones);
  CHECK(back[0].scores == zones[0].scores);
  std::filesystem::remove(path);
}

TEST_CASE("missing file raises IoFailure") {
  CHECK_THROWS_WITH_AS(read_container("/nonexistent/file.crcs"),
                       doctest::Contains("IoFailure"), Error);
}

TEST_CASE("split ratios validate") {
  SplitSpec spec;
  spec.ratios = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.ratios = {0.7, 0.15, 0.15};
  CHECK_NOTHROW(spec.validate());
}

TEST_CASE("split reproduces the documented partition sizes") {
  std::vector<ScoreMap> maps;
  maps.reserve(18545);
  for (std::uint32_t i = 0; i < 18545; ++i)
    maps.emplace_back(i, 1, 1, std::vector<float>{0.5f},
                      std::vector<std::int8_t>{0});
  const ScoreMapSet set{std::move(maps)};
  SplitSpec spec;
  spec.seed = 42;
  spec.ratios = {0.70, 0.15, 0.15};
  const auto parts = split(set, spec);
  CHECK(std::abs(static_cast<long>(parts[0].size()) - 12981L) <= 1);
  CHECK(std::abs(static_cast<long>(parts[1].size()) - 2781L) <= 1);
  CHECK(std::abs(static_cast<long>(parts[2].size()) - 2783L) <= 1);
  CHECK(parts[0].size() + parts[1].size() + parts[2].size() == 18545);
}

TEST_CASE("degenerate ratios put everything in the first partition") {
  std::mt19937_64 gen(5);
  testutil::RandomSetOptions opt;
  opt.images = 10;
  const auto set = testutil::random_set(gen, opt);
  SplitSpec spec;
  spec.seed = 1;
  spec.ratios = {1.0, 0.0, 0.0};
  const auto parts = split(set, spec);
  CHECK(parts[0].size() == 10);
  CHECK(parts[1].empty());
  CHECK(parts[2].empty());
}

TEST_CASE("split is deterministic and partitions the input") {
  std::mt19937_64 gen(6);
  testutil::RandomSetOptions opt;
  opt.images = 37;
  const auto set = testutil::random_set(gen, opt);
  SplitSpec spec;
  spec.seed = 42;
  spec.ratios = {0.5, 0.25, 0.25};

  const auto a = split(set, spec);
  const auto b = split(set, spec);
  for (int part = 0; part < 3; ++part) {
    REQUIRE(a[part].size() == b[part].size());
    for (std::size_t i = 0; i < a[part].size(); ++i)
      CHECK(a[part].maps()[i].image_id() == b[part].maps()[i].image_id());
  }

  std::vector<std::uint32_t> ids;
  for (const auto& part : a)
    for (const auto& map : part.maps()) ids.push_back(map.image_id());
  std::sort(ids.begin(), ids.end());
  CHECK(ids.size() == set.size());
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());

  SplitSpec other = spec;
  other.seed = 43;
  const auto c = split(set, other);
  bool same_first = a[0].size() == c[0].size();
  if (same_first) {
    same_first = std::equal(
        a[0].maps().begin(), a[0].maps().end(), c[0].maps().begin(),
        [](const ScoreMap& x, const ScoreMap& y) {
          return x.image_id() == y.image_id();
        });
  }
  CHECK_FALSE(same_first);  // different seed shuffles differently
}
