#include "cann/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace cann::io {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

const char* to_string(FormatErrc code) {
  switch (code) {
    case FormatErrc::kIo: return "io error";
    case FormatErrc::kBadMagic: return "bad magic";
    case FormatErrc::kVersionMismatch: return "version mismatch";
    case FormatErrc::kTruncated: return "truncated";
    case FormatErrc::kUnsupportedScalar: return "unsupported scalar type";
    case FormatErrc::kAlgorithmMismatch: return "algorithm mismatch";
    case FormatErrc::kCorrupt: return "corrupt";
    case FormatErrc::kParse: return "parse error";
  }
  return "unknown";
}

namespace {

constexpr std::array<char, 4> kDescriptorMagic = {'C', 'A', 'N', 'N'};
constexpr std::array<char, 8> kIndexMagic = {'C', 'A', 'N', 'N', 'I', 'D', 'X', '\0'};

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    using U = std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
    auto u = std::bit_cast<U>(v);
    U r = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) r = (r << 8) | ((u >> (8 * i)) & 0xFF);
    return std::bit_cast<T>(r);
  } else {
    return v;
  }
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out_) throw FormatError(FormatErrc::kIo, "write failed");
  }
  template <typename T>
  void put(T v) {
    v = to_little(v);
    bytes(&v, sizeof(T));
  }
  template <typename T>
  void put_array(const T* data, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(data, n * sizeof(T));
    } else {
      for (std::size_t i = 0; i < n; ++i) put(data[i]);
    }
  }
  template <typename T>
  void put_vector(const std::vector<T>& v) {
    put<std::uint64_t>(v.size());
    put_array(v.data(), v.size());
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw FormatError(FormatErrc::kTruncated, "unexpected end of file");
    }
  }
  template <typename T>
  T get() {
    T v;
    bytes(&v, sizeof(T));
    return to_little(v);
  }
  template <typename T>
  void get_array(T* data, std::size_t n) {
    bytes(data, n * sizeof(T));
    if constexpr (std::endian::native != std::endian::little) {
      for (std::size_t i = 0; i < n; ++i) data[i] = to_little(data[i]);
    }
  }
  template <typename T>
  std::vector<T> get_vector(std::uint64_t limit) {
    const auto n = get<std::uint64_t>();
    if (n > limit) throw FormatError(FormatErrc::kCorrupt, "array length out of range");
    std::vector<T> v(static_cast<std::size_t>(n));
    get_array(v.data(), v.size());
    return v;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatErrc::kIo, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw FormatError(FormatErrc::kIo, "cannot open " + path.string());
  return in;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? line.npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw FormatError(FormatErrc::kParse,
                      "line " + std::to_string(line_no) + ": bad number '" + std::string(field) + "'");
  }
  return value;
}

// Reads non-empty lines, stripping a trailing '\r'.
template <typename F>
void for_each_line(const std::filesystem::path& path, F&& fn) {
  auto in = open_in(path, false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(std::string_view(line), line_no);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Descriptors

void write_descriptors(const std::filesystem::path& path, const PointSet& points) {
  auto out = open_out(path);
  Writer w(out);
  w.bytes(kDescriptorMagic.data(), kDescriptorMagic.size());
  w.put<std::uint32_t>(kDescriptorVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(points.dim()));
  w.put<std::uint64_t>(points.size());
  w.put<std::uint32_t>(kScalarF32);
  for (std::size_t i = 0; i < points.size(); ++i) {
    w.put<std::uint32_t>(points.color(i));
    const auto p = points.point(i);
    w.put_array(p.data(), p.size());
  }
}

PointSet read_descriptors(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  Reader r(in);
  std::array<char, 4> magic{};
  try {
    r.bytes(magic.data(), magic.size());
  } catch (const FormatError&) {
    throw FormatError(FormatErrc::kBadMagic, path.string() + " is not a descriptor file");
  }
  if (magic != kDescriptorMagic) throw FormatError(FormatErrc::kBadMagic, path.string() + " is not a descriptor file");
  const auto version = r.get<std::uint32_t>();
  if (version != kDescriptorVersion) {
    throw FormatError(FormatErrc::kVersionMismatch, "descriptor file version " + std::to_string(version));
  }
  const auto dim = r.get<std::uint32_t>();
  const auto count = r.get<std::uint64_t>();
  const auto scalar = r.get<std::uint32_t>();
  if (scalar != kScalarF32) throw FormatError(FormatErrc::kUnsupportedScalar, "scalar tag " + std::to_string(scalar));
  if (dim == 0 && count > 0) throw FormatError(FormatErrc::kCorrupt, "zero dimension");

  const std::uint64_t record = 4 + 4ull * dim;
  const auto file_size = std::filesystem::file_size(path);
  const std::uint64_t body = file_size - kDescriptorHeaderBytes;
  if (count > body / record || body < count * record) {
    throw FormatError(FormatErrc::kTruncated, "body holds " + std::to_string(body) + " bytes, need " +
                                                  std::to_string(count * record));
  }
  if (body != count * record) throw FormatError(FormatErrc::kCorrupt, "trailing bytes after descriptor body");

  std::vector<float> values(static_cast<std::size_t>(count * dim));
  std::vector<Color> colors(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < colors.size(); ++i) {
    colors[i] = r.get<std::uint32_t>();
    r.get_array(values.data() + i * dim, dim);
  }
  return PointSet(dim, std::move(values), std::move(colors));
}

// ---------------------------------------------------------------------------
// Color maps

ColorMap::ColorMap(std::vector<std::string> names) : names_(std::move(names)) {
  ids_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty() || names_[i].find_first_of("\t\n") != std::string::npos) {
      throw FormatError(FormatErrc::kParse, "invalid image name '" + names_[i] + "'");
    }
    if (!ids_.emplace(names_[i], static_cast<Color>(i)).second) {
      throw FormatError(FormatErrc::kCorrupt, "duplicate image name '" + names_[i] + "'");
    }
  }
}

const std::string& ColorMap::name(Color color) const {
  if (color >= names_.size()) throw std::out_of_range("unknown color " + std::to_string(color));
  return names_[color];
}

Color ColorMap::color(const std::string& name) const {
  const auto it = ids_.find(name);
  if (it == ids_.end()) throw std::out_of_range("unknown image '" + name + "'");
  return it->second;
}

void write_color_map(const std::filesystem::path& path, const ColorMap& map) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < map.size(); ++i) out << map.names()[i] << '\t' << i << '\n';
  if (!out) throw FormatError(FormatErrc::kIo, "write failed");
}

ColorMap read_color_map(const std::filesystem::path& path) {
  std::vector<std::pair<Color, std::string>> rows;
  for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    const auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw FormatError(FormatErrc::kParse, "line " + std::to_string(line_no) + ": expected name<TAB>id");
    }
    rows.emplace_back(parse_number<Color>(fields[1], line_no), std::string(fields[0]));
  });
  std::sort(rows.begin(), rows.end());
  std::vector<std::string> names;
  names.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != i) {
      throw FormatError(FormatErrc::kCorrupt, "color ids must be dense from 0 without duplicates");
    }
    names.push_back(std::move(rows[i].second));
  }
  return ColorMap(std::move(names));
}

// ---------------------------------------------------------------------------
// Rankings

void write_rankings(std::ostream& out, const std::vector<Ranking>& rankings, const ColorMap& images) {
  out << std::fixed << std::setprecision(6);
  for (const auto& ranking : rankings) {
    std::size_t rank = 1;
    for (const auto& e : ranking.entries) {
      out << ranking.query_id << '\t' << rank++ << '\t' << images.name(e.color) << '\t' << e.score << '\n';
    }
  }
  if (!out) throw FormatError(FormatErrc::kIo, "write failed");
}

void write_rankings(const std::filesystem::path& path, const std::vector<Ranking>& rankings,
                    const ColorMap& images) {
  auto out = open_out(path);
  write_rankings(out, rankings, images);
}

std::vector<Ranking> read_rankings(const std::filesystem::path& path, const ColorMap& images) {
  std::vector<Ranking> rankings;
  for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw FormatError(FormatErrc::kParse, "line " + std::to_string(line_no) + ": expected 4 fields");
    }
    const std::string query(fields[0]);
    const auto rank = parse_number<std::size_t>(fields[1], line_no);
    const auto score = parse_number<double>(fields[3], line_no);
    if (rankings.empty() || rankings.back().query_id != query) rankings.push_back({query, {}});
    auto& entries = rankings.back().entries;
    if (rank != entries.size() + 1) {
      throw FormatError(FormatErrc::kCorrupt, "line " + std::to_string(line_no) + ": ranks not contiguous");
    }
    if (!entries.empty() && score > entries.back().score) {
      throw FormatError(FormatErrc::kCorrupt, "line " + std::to_string(line_no) + ": scores increase");
    }
    entries.push_back({images.color(std::string(fields[2])), score});
  });
  return rankings;
}

GlobalScores read_global_scores(const std::filesystem::path& path, const ColorMap& images) {
  GlobalScores scores;
  for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw FormatError(FormatErrc::kParse, "line " + std::to_string(line_no) + ": expected query<TAB>image<TAB>score");
    }
    scores[std::string(fields[0])][images.color(std::string(fields[1]))] = parse_number<double>(fields[2], line_no);
  });
  return scores;
}

std::unordered_map<std::string, Pose> read_poses(const std::filesystem::path& path) {
  std::unordered_map<std::string, Pose> poses;
  for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    std::istringstream in{std::string(line)};
    std::string name;
    double v[7];
    in >> name;
    for (double& x : v) in >> x;
    std::string rest;
    if (!in || (in >> rest)) {
      throw FormatError(FormatErrc::kParse, "line " + std::to_string(line_no) + ": expected name tx ty tz qw qx qy qz");
    }
    Pose pose;
    pose.position = {v[0], v[1], v[2]};
    pose.orientation = Eigen::Quaterniond(v[3], v[4], v[5], v[6]);
    // Text quaternions carry rounding; renormalize those that are close to unit.
    if (std::abs(pose.orientation.norm() - 1.0) > 1e-4) {
      throw FormatError(FormatErrc::kParse, "line " + std::to_string(line_no) + ": quaternion is not unit");
    }
    pose.orientation.normalize();
    poses[name] = pose;
  });
  return poses;
}

// ---------------------------------------------------------------------------
// Index files

namespace {

struct IndexHeader {
  IndexAlgorithm algorithm = IndexAlgorithm::kRg;
  std::uint32_t dim = 0;
  std::uint64_t point_count = 0;
  std::uint32_t color_width = 16;
  double approx = 0.0;
  double max_radius = 0.0;
  double min_radius = 0.0;
  std::uint32_t grids = 0;  // per replica
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t rs_filter = 0;
  std::uint64_t color_count = 0;
  std::uint32_t total_grids = 0;
  std::uint32_t level_count = 0;
};

void write_header(Writer& w, const IndexHeader& h) {
  w.bytes(kIndexMagic.data(), kIndexMagic.size());
  w.put<std::uint32_t>(kIndexVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(h.algorithm));
  w.put<std::uint32_t>(h.dim);
  w.put<std::uint64_t>(h.point_count);
  w.put<std::uint32_t>(h.color_width);
  w.put<double>(h.approx);
  w.put<double>(h.max_radius);
  w.put<double>(h.min_radius);
  w.put<std::uint32_t>(h.grids);
  w.put<double>(h.gamma);
  w.put<std::uint64_t>(h.seed);
  w.put<std::uint32_t>(h.rs_filter);
  w.put<std::uint64_t>(h.color_count);
  w.put<std::uint32_t>(h.total_grids);
  w.put<std::uint32_t>(h.level_count);
}

IndexHeader read_header(Reader& r) {
  std::array<char, 8> magic{};
  try {
    r.bytes(magic.data(), magic.size());
  } catch (const FormatError&) {
    throw FormatError(FormatErrc::kBadMagic, "not an index file");
  }
  if (magic != kIndexMagic) throw FormatError(FormatErrc::kBadMagic, "not an index file");
  const auto version = r.get<std::uint32_t>();
  if (version != kIndexVersion) throw FormatError(FormatErrc::kVersionMismatch, "index version " + std::to_string(version));
  IndexHeader h;
  const auto algo = r.get<std::uint32_t>();
  if (algo != static_cast<std::uint32_t>(IndexAlgorithm::kRs) && algo != static_cast<std::uint32_t>(IndexAlgorithm::kRg)) {
    throw FormatError(FormatErrc::kCorrupt, "unknown algorithm tag " + std::to_string(algo));
  }
  h.algorithm = static_cast<IndexAlgorithm>(algo);
  h.dim = r.get<std::uint32_t>();
  h.point_count = r.get<std::uint64_t>();
  h.color_width = r.get<std::uint32_t>();
  h.approx = r.get<double>();
  h.max_radius = r.get<double>();
  h.min_radius = r.get<double>();
  h.grids = r.get<std::uint32_t>();
  h.gamma = r.get<double>();
  h.seed = r.get<std::uint64_t>();
  h.rs_filter = r.get<std::uint32_t>();
  h.color_count = r.get<std::uint64_t>();
  h.total_grids = r.get<std::uint32_t>();
  h.level_count = r.get<std::uint32_t>();

  if (h.dim == 0 || h.dim > 65536) throw FormatError(FormatErrc::kCorrupt, "dimension out of range");
  if (h.color_width != 16 && h.color_width != 32) throw FormatError(FormatErrc::kCorrupt, "bad color width");
  if (!(h.approx > 1.0) || !(h.max_radius > 0.0) || !(h.min_radius > 0.0) || h.grids == 0 ||
      !(h.gamma > 0.0 && h.gamma < 1.0)) {
    throw FormatError(FormatErrc::kCorrupt, "invalid index parameters");
  }
  if (h.total_grids != h.grids * replication_for(h.gamma)) {
    throw FormatError(FormatErrc::kCorrupt, "grid count does not match L and gamma");
  }
  return h;
}

void write_bank(Writer& w, const RotationBank& bank) {
  for (const auto s : bank.seeds()) w.put<std::uint64_t>(s);
  const Eigen::MatrixXd& m = bank.stacked();  // column-major
  w.put_array(m.data(), static_cast<std::size_t>(m.size()));
}

RotationBank read_bank(Reader& r, const IndexHeader& h) {
  std::vector<std::uint64_t> seeds(h.total_grids);
  for (auto& s : seeds) s = r.get<std::uint64_t>();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(h.total_grids) * h.dim, static_cast<Eigen::Index>(h.dim));
  r.get_array(m.data(), static_cast<std::size_t>(m.size()));
  return RotationBank(h.dim, std::move(seeds), std::move(m));
}

void write_level(Writer& w, const GridLevel& level) {
  w.put<double>(level.radius());
  w.put<double>(level.cell_width());
  const Eigen::MatrixXd& shifts = level.shifts();
  w.put_array(shifts.data(), static_cast<std::size_t>(shifts.size()));
  for (const auto& table : level.tables()) {
    const auto& raw = table.raw();
    w.put<std::uint32_t>(raw.bucket_bits);
    w.put<std::uint8_t>(raw.wide ? 1 : 0);
    w.put_vector(raw.directory);
    w.put_vector(raw.fingerprints);
    w.put_vector(raw.low);
    w.put_vector(raw.high);
  }
}

GridLevel read_level(Reader& r, const IndexHeader& h) {
  const double radius = r.get<double>();
  const double cell_width = r.get<double>();
  Eigen::MatrixXd shifts(static_cast<Eigen::Index>(h.dim), static_cast<Eigen::Index>(h.total_grids));
  r.get_array(shifts.data(), static_cast<std::size_t>(shifts.size()));
  const std::uint64_t limit = h.point_count + (std::uint64_t{1} << 29);
  std::vector<CellTable> tables;
  tables.reserve(h.total_grids);
  for (std::uint32_t g = 0; g < h.total_grids; ++g) {
    CellTable::Raw raw;
    raw.bucket_bits = r.get<std::uint32_t>();
    raw.wide = r.get<std::uint8_t>() != 0;
    raw.directory = r.get_vector<std::uint32_t>(limit);
    raw.fingerprints = r.get_vector<std::uint32_t>(h.point_count);
    raw.low = r.get_vector<std::uint16_t>(h.point_count);
    raw.high = r.get_vector<std::uint16_t>(h.point_count);
    try {
      tables.push_back(CellTable::from_raw(std::move(raw)));
    } catch (const std::invalid_argument& e) {
      throw FormatError(FormatErrc::kCorrupt, e.what());
    }
  }
  return GridLevel(radius, cell_width, std::move(shifts), std::move(tables));
}

void expect_algorithm(const IndexHeader& h, IndexAlgorithm wanted) {
  if (h.algorithm != wanted) {
    throw FormatError(FormatErrc::kAlgorithmMismatch,
                      std::string("index holds ") + (h.algorithm == IndexAlgorithm::kRs ? "RS" : "RG") +
                          ", requested " + (wanted == IndexAlgorithm::kRs ? "RS" : "RG"));
  }
}

}  // namespace

IndexAlgorithm read_index_algorithm(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  Reader r(in);
  return read_header(r).algorithm;
}

void save_index(std::ostream& out, const LadderIndex& index) {
  Writer w(out);
  const auto& cfg = index.config();
  IndexHeader h;
  h.algorithm = IndexAlgorithm::kRg;
  h.dim = static_cast<std::uint32_t>(index.dim());
  h.point_count = index.point_count();
  h.color_width = static_cast<std::uint32_t>(cfg.color_width);
  h.approx = cfg.approx;
  h.max_radius = cfg.max_radius;
  h.min_radius = cfg.min_radius;
  h.grids = static_cast<std::uint32_t>(cfg.grids);
  h.gamma = cfg.gamma;
  h.seed = cfg.seed;
  h.color_count = index.color_count();
  h.total_grids = static_cast<std::uint32_t>(index.bank().grid_count());
  h.level_count = static_cast<std::uint32_t>(index.levels().size());
  write_header(w, h);
  write_bank(w, index.bank());
  for (const auto& level : index.levels()) write_level(w, level);
}

void save_index(std::ostream& out, const RsIndex& index) {
  Writer w(out);
  const auto& cfg = index.config();
  const auto& grid = index.grid();
  IndexHeader h;
  h.algorithm = IndexAlgorithm::kRs;
  h.dim = static_cast<std::uint32_t>(index.dim());
  h.point_count = index.point_count();
  h.color_width = 32;
  h.approx = cfg.approx;
  h.max_radius = cfg.radius;
  h.min_radius = cfg.radius;
  h.grids = static_cast<std::uint32_t>(cfg.grids);
  h.gamma = cfg.gamma;
  h.seed = cfg.seed;
  h.rs_filter = static_cast<std::uint32_t>(cfg.filter);
  h.color_count = grid.points().color_count();
  h.total_grids = static_cast<std::uint32_t>(grid.bank().grid_count());
  h.level_count = 1;
  write_header(w, h);
  write_bank(w, grid.bank());
  write_level(w, grid.level());
  const PointSet& points = grid.points();
  for (std::size_t i = 0; i < points.size(); ++i) {
    w.put<std::uint32_t>(points.color(i));
    const auto p = points.point(i);
    w.put_array(p.data(), p.size());
  }
}

void save_index(const std::filesystem::path& path, const LadderIndex& index) {
  auto out = open_out(path);
  save_index(out, index);
}

void save_index(const std::filesystem::path& path, const RsIndex& index) {
  auto out = open_out(path);
  save_index(out, index);
}

LadderIndex load_ladder_index(std::istream& in) {
  Reader r(in);
  const IndexHeader h = read_header(r);
  expect_algorithm(h, IndexAlgorithm::kRg);
  std::vector<double> radii;
  try {
    radii = ladder_radii(h.min_radius, h.approx, h.max_radius);
  } catch (const std::invalid_argument& e) {
    throw FormatError(FormatErrc::kCorrupt, e.what());
  }
  if (h.level_count != radii.size()) {
    throw FormatError(FormatErrc::kCorrupt, "level count " + std::to_string(h.level_count) +
                                                " does not match ladder bounds (" + std::to_string(radii.size()) + ")");
  }
  auto bank = std::make_shared<const RotationBank>(read_bank(r, h));
  std::vector<GridLevel> levels;
  levels.reserve(h.level_count);
  for (std::uint32_t k = 0; k < h.level_count; ++k) {
    levels.push_back(read_level(r, h));
    if (levels.back().radius() != radii[k]) throw FormatError(FormatErrc::kCorrupt, "level radius mismatch");
  }
  if (!r.at_end()) throw FormatError(FormatErrc::kCorrupt, "trailing bytes after index");

  LadderConfig cfg;
  cfg.min_radius = h.min_radius;
  cfg.max_radius = h.max_radius;
  cfg.approx = h.approx;
  cfg.grids = h.grids;
  cfg.gamma = h.gamma;
  cfg.seed = h.seed;
  cfg.color_width = h.color_width == 32 ? ColorWidth::k32 : ColorWidth::k16;
  return LadderIndex(std::move(bank), std::move(levels), cfg, h.point_count, h.color_count);
}

RsIndex load_rs_index(std::istream& in) {
  Reader r(in);
  const IndexHeader h = read_header(r);
  expect_algorithm(h, IndexAlgorithm::kRs);
  if (h.level_count != 1) throw FormatError(FormatErrc::kCorrupt, "RS index must have exactly one level");
  if (h.rs_filter > 1) throw FormatError(FormatErrc::kCorrupt, "unknown RS filter mode");
  RotationBank bank = read_bank(r, h);
  GridLevel level = read_level(r, h);
  std::vector<float> values(static_cast<std::size_t>(h.point_count * h.dim));
  std::vector<Color> colors(static_cast<std::size_t>(h.point_count));
  for (std::size_t i = 0; i < colors.size(); ++i) {
    colors[i] = r.get<std::uint32_t>();
    r.get_array(values.data() + i * h.dim, h.dim);
  }
  if (!r.at_end()) throw FormatError(FormatErrc::kCorrupt, "trailing bytes after index");

  RsConfig cfg;
  cfg.radius = h.max_radius;
  cfg.approx = h.approx;
  cfg.grids = h.grids;
  cfg.gamma = h.gamma;
  cfg.seed = h.seed;
  cfg.filter = static_cast<RsFilter>(h.rs_filter);
  PointGridIndex grid(std::move(bank), std::move(level), h.approx,
                      PointSet(h.dim, std::move(values), std::move(colors)));
  return RsIndex(std::move(grid), cfg);
}

LadderIndex load_ladder_index(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  return load_ladder_index(in);
}

RsIndex load_rs_index(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  return load_rs_index(in);
}

}  // namespace cann::io
