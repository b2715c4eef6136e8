#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cann/cann_index.hpp"
#include "cann/eval.hpp"
#include "cann/retrieval.hpp"
#include "cann/types.hpp"

namespace cann::io {

enum class FormatErrc {
  kIo,
  kBadMagic,
  kVersionMismatch,
  kTruncated,
  kUnsupportedScalar,
  kAlgorithmMismatch,
  kCorrupt,
  kParse,
};

const char* to_string(FormatErrc code);

class FormatError : public std::runtime_error {
 public:
  FormatError(FormatErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  FormatErrc code() const { return code_; }

 private:
  FormatErrc code_;
};

// Descriptor files: "CANN", u32 version, u32 dim, u64 count, u32 scalar tag,
// then count records of (u32 color, dim x f32). Little-endian throughout.
inline constexpr std::uint32_t kDescriptorVersion = 1;
inline constexpr std::uint32_t kScalarF32 = 1;
inline constexpr std::size_t kDescriptorHeaderBytes = 24;

void write_descriptors(const std::filesystem::path& path, const PointSet& points);
PointSet read_descriptors(const std::filesystem::path& path);

/// Bijection between image names and dense color ids 0..n-1.
class ColorMap {
 public:
  ColorMap() = default;
  explicit ColorMap(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(Color color) const;
  Color color(const std::string& name) const;
  bool contains(const std::string& name) const { return ids_.contains(name); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Color> ids_;
};

void write_color_map(const std::filesystem::path& path, const ColorMap& map);
ColorMap read_color_map(const std::filesystem::path& path);

/// One line per ranked image: query<TAB>rank<TAB>image<TAB>score, rank from 1,
/// score with six decimals.
void write_rankings(std::ostream& out, const std::vector<Ranking>& rankings, const ColorMap& images);
void write_rankings(const std::filesystem::path& path, const std::vector<Ranking>& rankings,
                    const ColorMap& images);

/// Parses a ranking file back; validates contiguous ranks and non-increasing
/// scores per query. Scores carry the six-decimal rounding of the file.
std::vector<Ranking> read_rankings(const std::filesystem::path& path, const ColorMap& images);

/// query<TAB>image<TAB>score lines, grouped by query name.
using GlobalScores = std::unordered_map<std::string, std::unordered_map<Color, double>>;
GlobalScores read_global_scores(const std::filesystem::path& path, const ColorMap& images);

/// Whitespace-separated "name tx ty tz qw qx qy qz" lines.
std::unordered_map<std::string, Pose> read_poses(const std::filesystem::path& path);

// Index files: "CANNIDX\0", u32 version, then the algorithm-specific payload.
inline constexpr std::uint32_t kIndexVersion = 1;

enum class IndexAlgorithm : std::uint32_t { kRs = 1, kRg = 2 };

IndexAlgorithm read_index_algorithm(const std::filesystem::path& path);

void save_index(const std::filesystem::path& path, const LadderIndex& index);
void save_index(const std::filesystem::path& path, const RsIndex& index);
void save_index(std::ostream& out, const LadderIndex& index);
void save_index(std::ostream& out, const RsIndex& index);

/// Throws FormatError(kAlgorithmMismatch) when the file holds the other kind.
LadderIndex load_ladder_index(const std::filesystem::path& path);
RsIndex load_rs_index(const std::filesystem::path& path);
LadderIndex load_ladder_index(std::istream& in);
RsIndex load_rs_index(std::istream& in);

}  // namespace cann::io
