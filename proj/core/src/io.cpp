#include "crcmap/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "crcmap/rng.hpp"

namespace crcmap {

namespace {

constexpr std::size_t kMaxPixelsPerImage = std::size_t{1} << 28;

void put_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8)
    buf.push_back(static_cast<char>((v >> shift) & 0xff));
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void append_scores_le(std::string& buf, std::span<const float> scores) {
  if constexpr (std::endian::native == std::endian::little) {
    const std::size_t offset = buf.size();
    buf.resize(offset + scores.size() * 4);
    std::memcpy(buf.data() + offset, scores.data(), scores.size() * 4);
  } else {
    for (float s : scores) put_u32(buf, std::bit_cast<std::uint32_t>(s));
  }
}

void decode_scores_le(const unsigned char* p, std::size_t count,
                      std::vector<float>& out) {
  out.resize(count);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), p, count * 4);
  } else {
    for (std::size_t i = 0; i < count; ++i)
      out[i] = std::bit_cast<float>(get_u32(p + 4 * i));
  }
}

void read_exact(std::istream& in, char* dst, std::size_t n,
                const char* what) {
  in.read(dst, static_cast<std::streamsize>(n));
  require(static_cast<std::size_t>(in.gcount()) == n, Errc::TruncatedPayload,
          std::string("unexpected end of data while reading ") + what);
}

struct RawImage {
  std::uint32_t image_id;
  std::vector<float> scores;
  std::vector<std::int8_t> codes;
};

std::uint64_t write_raw(const std::array<char, 4>& magic, std::uint32_t height,
                        std::uint32_t width, const std::vector<RawImage>& images,
                        std::ostream& out) {
  require(!images.empty(), Errc::EmptyInput, "refusing to write an empty set");
  std::string header(magic.begin(), magic.end());
  put_u16(header, kContainerVersion);
  put_u32(header, static_cast<std::uint32_t>(images.size()));
  put_u32(header, height);
  put_u32(header, width);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  std::uint64_t bytes = header.size();
  std::string buf;
  for (const RawImage& img : images) {
    buf.clear();
    put_u32(buf, img.image_id);
    append_scores_le(buf, img.scores);
    buf.append(reinterpret_cast<const char*>(img.codes.data()),
               img.codes.size());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    bytes += buf.size();
  }
  require(out.good(), Errc::IoFailure, "write failed");
  return bytes;
}

std::vector<RawImage> read_raw(const std::array<char, 4>& magic,
                               std::istream& in, std::uint32_t& height,
                               std::uint32_t& width) {
  char header[kContainerHeaderBytes];
  read_exact(in, header, sizeof header, "container header");
  require(std::memcmp(header, magic.data(), 4) == 0, Errc::BadMagic,
          "container magic mismatch");
  const auto* h = reinterpret_cast<const unsigned char*>(header);
  const std::uint16_t version = get_u16(h + 4);
  require(version == kContainerVersion, Errc::BadVersion,
          "unsupported container version " + std::to_string(version));
  const std::uint32_t n_images = get_u32(h + 6);
  height = get_u32(h + 10);
  width = get_u32(h + 14);
  if (n_images > 0) {
    require(height > 0 && width > 0, Errc::InvalidArgument,
            "container declares zero image dimensions");
    require(static_cast<std::uint64_t>(height) * width <= kMaxPixelsPerImage,
            Errc::InvalidArgument, "container declares absurd dimensions");
  }
  const std::size_t pixels = static_cast<std::size_t>(height) * width;

  std::vector<RawImage> images;
  images.reserve(n_images);
  std::vector<char> buf(4 + 5 * pixels);
  for (std::uint32_t i = 0; i < n_images; ++i) {
    read_exact(in, buf.data(), buf.size(), "image payload");
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    RawImage img;
    img.image_id = get_u32(p);
    decode_scores_le(p + 4, pixels, img.scores);
    img.codes.resize(pixels);
    std::memcpy(img.codes.data(), buf.data() + 4 + 4 * pixels, pixels);
    images.push_back(std::move(img));
  }
  require(in.peek() == std::char_traits<char>::eof(), Errc::TruncatedPayload,
          "payload longer than the header declares");
  return images;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.is_open(), Errc::IoFailure, "cannot open " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.is_open(), Errc::IoFailure, "cannot open " + path.string());
  return in;
}

std::string format_float(float v) {
  char tmp[64];
  const auto res = std::to_chars(tmp, tmp + sizeof tmp, v);
  return std::string(tmp, res.ptr);
}

}  // namespace

std::uint64_t write_container(const ScoreMapSet& set, std::ostream& out) {
  require(!set.empty(), Errc::EmptyInput, "refusing to write an empty set");
  std::vector<RawImage> images;
  images.reserve(set.size());
  for (const ScoreMap& map : set.maps()) {
    RawImage img;
    img.image_id = map.image_id();
    img.scores.assign(map.scores().begin(), map.scores().end());
    img.codes.assign(map.labels().begin(), map.labels().end());
    images.push_back(std::move(img));
  }
  return write_raw(kScoreMagic, set.height(), set.width(), images, out);
}

std::uint64_t write_container(const ScoreMapSet& set,
                              const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  const std::uint64_t bytes = write_container(set, out);
  out.flush();
  require(out.good(), Errc::IoFailure, "write failed for " + path.string());
  return bytes;
}

ScoreMapSet read_container(std::istream& in) {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<RawImage> raw = read_raw(kScoreMagic, in, height, width);
  std::vector<ScoreMap> maps;
  maps.reserve(raw.size());
  for (RawImage& img : raw) {
    // ScoreMap construction re-validates score range and label domain.
    maps.emplace_back(img.image_id, height, width, std::move(img.scores),
                      std::move(img.codes));
  }
  return ScoreMapSet(std::move(maps));
}

ScoreMapSet read_container(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return read_container(in);
}

std::uint64_t write_zone_container(const std::vector<ZoneMap>& maps,
                                   const std::filesystem::path& path) {
  require(!maps.empty(), Errc::EmptyInput, "refusing to write an empty set");
  std::vector<RawImage> images;
  images.reserve(maps.size());
  for (const ZoneMap& map : maps) {
    RawImage img;
    img.image_id = map.image_id;
    img.scores = map.scores;
    img.codes = map.zones;
    images.push_back(std::move(img));
  }
  std::ofstream out = open_out(path);
  const std::uint64_t bytes =
      write_raw(kZoneMagic, maps.front().height, maps.front().width, images, out);
  out.flush();
  require(out.good(), Errc::IoFailure, "write failed for " + path.string());
  return bytes;
}

std::vector<ZoneMap> read_zone_container(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<RawImage> raw = read_raw(kZoneMagic, in, height, width);
  std::vector<ZoneMap> maps;
  maps.reserve(raw.size());
  for (RawImage& img : raw) {
    for (std::size_t i = 0; i < img.codes.size(); ++i) {
      const std::int8_t c = img.codes[i];
      require(c >= -1 && c <= 2, Errc::BadLabel,
              "zone code not in {-1,0,1,2} at pixel " + std::to_string(i));
      require(img.scores[i] >= 0.0f && img.scores[i] <= 1.0f,
              Errc::ScoreOutOfRange, "score outside [0,1]");
    }
    maps.push_back(ZoneMap{img.image_id, height, width, std::move(img.scores),
                           std::move(img.codes)});
  }
  return maps;
}

void write_csv(const ScoreMapSet& set, std::ostream& out) {
  out << "image_id,row,col,score,label\n";
  for (const ScoreMap& map : set.maps()) {
    std::size_t i = 0;
    for (std::uint32_t r = 0; r < map.height(); ++r) {
      for (std::uint32_t c = 0; c < map.width(); ++c, ++i) {
        out << map.image_id() << ',' << r << ',' << c << ','
            << format_float(map.score_at(i)) << ','
            << static_cast<int>(map.label_at(i)) << '\n';
      }
    }
  }
  require(out.good(), Errc::IoFailure, "CSV write failed");
}

void write_csv(const ScoreMapSet& set, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  write_csv(set, out);
}

namespace {

template <typename T>
T parse_number(const std::string& field, const char* what) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, value);
  require(res.ec == std::errc() && res.ptr == last, Errc::BadField,
          std::string("cannot parse ") + what + " from '" + field + "'");
  return value;
}

}  // namespace

ScoreMapSet read_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::BadHeader,
          "missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "image_id,row,col,score,label", Errc::BadHeader,
          "CSV header must be exactly 'image_id,row,col,score,label'");

  struct Cell {
    float score;
    std::int8_t label;
  };
  std::vector<std::uint32_t> order;                     // first appearance
  std::map<std::uint32_t, std::map<std::pair<std::uint32_t, std::uint32_t>, Cell>>
      cells;
  std::uint32_t max_row = 0;
  std::uint32_t max_col = 0;
  bool any = false;

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string, 5> fields;
    std::size_t field = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        require(field < 5, Errc::BadField,
                "too many fields on line " + std::to_string(lineno));
        fields[field++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    require(field == 5, Errc::BadField,
            "expected 5 fields on line " + std::to_string(lineno));

    const auto image_id = parse_number<std::uint32_t>(fields[0], "image_id");
    const auto row = parse_number<std::uint32_t>(fields[1], "row");
    const auto col = parse_number<std::uint32_t>(fields[2], "col");
    const auto score = parse_number<float>(fields[3], "score");
    const auto label_raw = parse_number<int>(fields[4], "label");
    require(score >= 0.0f && score <= 1.0f, Errc::ScoreOutOfRange,
            "score outside [0,1] on line " + std::to_string(lineno));
    require(label_raw >= -1 && label_raw <= 1, Errc::BadLabel,
            "label not in {-1,0,1} on line " + std::to_string(lineno));

    auto [it, inserted] = cells.try_emplace(image_id);
    if (inserted) order.push_back(image_id);
    const bool fresh =
        it->second
            .try_emplace({row, col},
                         Cell{score, static_cast<std::int8_t>(label_raw)})
            .second;
    require(fresh, Errc::BadField,
            "duplicate cell on line " + std::to_string(lineno));
    max_row = std::max(max_row, row);
    max_col = std::max(max_col, col);
    any = true;
  }
  if (!any) return ScoreMapSet();

  const std::uint32_t height = max_row + 1;
  const std::uint32_t width = max_col + 1;
  std::vector<ScoreMap> maps;
  maps.reserve(order.size());
  for (std::uint32_t id : order) {
    std::vector<float> scores(static_cast<std::size_t>(height) * width, 0.0f);
    std::vector<std::int8_t> labels(scores.size(), -1);
    for (const auto& [rc, cell] : cells[id]) {
      const std::size_t idx =
          static_cast<std::size_t>(rc.first) * width + rc.second;
      scores[idx] = cell.score;
      labels[idx] = cell.label;
    }
    maps.emplace_back(id, height, width, std::move(scores), std::move(labels));
  }
  return ScoreMapSet(std::move(maps));
}

ScoreMapSet read_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return read_csv(in);
}

void SplitSpec::validate() const {
  double sum = 0.0;
  for (double r : ratios) {
    require(r >= 0.0, Errc::InvalidArgument, "ratios must be nonnegative");
    sum += r;
  }
  require(std::fabs(sum - 1.0) <= 1e-9, Errc::InvalidArgument,
          "ratios must sum to 1 within 1e-9");
}

std::array<ScoreMapSet, 3> split(const ScoreMapSet& set, const SplitSpec& spec) {
  spec.validate();
  require(!set.empty(), Errc::EmptyInput, "cannot split an empty set");

  const std::size_t n = set.size();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 gen = make_stream(spec.seed, 0);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(gen, i + 1));
    std::swap(perm[i], perm[j]);
  }

  // Boundaries at floor(n * cumulative ratio); the last is pinned to n so
  // rounding never drops an image.
  const double nd = static_cast<double>(n);
  std::array<std::size_t, 3> bound{};
  bound[0] = static_cast<std::size_t>(std::floor(nd * spec.ratios[0]));
  bound[1] = static_cast<std::size_t>(
      std::floor(nd * (spec.ratios[0] + spec.ratios[1])));
  bound[2] = n;
  bound[0] = std::min(bound[0], n);
  bound[1] = std::min(std::max(bound[1], bound[0]), n);

  std::array<ScoreMapSet, 3> out;
  std::size_t begin = 0;
  for (std::size_t part = 0; part < 3; ++part) {
    std::vector<ScoreMap> maps;
    maps.reserve(bound[part] - begin);
    for (std::size_t i = begin; i < bound[part]; ++i)
      maps.push_back(set.maps()[perm[i]]);
    out[part] = ScoreMapSet(std::move(maps));
    begin = bound[part];
  }
  return out;
}

}  // namespace crcmap
