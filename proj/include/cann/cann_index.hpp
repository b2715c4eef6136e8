#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cann/parallel.hpp"
#include "cann/random_grid.hpp"
#include "cann/types.hpp"

namespace cann {

enum class EstimateKind : std::uint8_t { kExact = 0, kBucketRadius = 1 };

/// Per query feature: each reported color with its (approximate) nearest
/// neighbor distance. Entries are kept sorted by color, one per color.
class QueryOutcome {
 public:
  struct Entry {
    Color color;
    double distance;
    bool operator==(const Entry&) const = default;
  };

  explicit QueryOutcome(EstimateKind kind = EstimateKind::kExact) : kind_(kind) {}
  /// Duplicated colors keep their smallest distance.
  QueryOutcome(EstimateKind kind, std::vector<Entry> entries);

  EstimateKind kind() const { return kind_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  const std::vector<Entry>& entries() const { return entries_; }

  std::optional<double> find(Color color) const;

  bool operator==(const QueryOutcome&) const = default;

 private:
  EstimateKind kind_;
  std::vector<Entry> entries_;
};

/// Exact per-color nearest neighbor within `radius` by linear scan.
QueryOutcome brute_force_colored_nn(const PointSet& points, std::span<const float> q, double radius);

/// Wraps the linear scan so it can be driven like the other solvers.
class BruteForceIndex {
 public:
  struct Scratch {};

  BruteForceIndex(PointSet points, double radius);

  QueryOutcome query(std::span<const float> q) const;
  QueryOutcome query(std::span<const float> q, Scratch&) const { return query(q); }
  Scratch make_scratch() const { return {}; }

  std::size_t dim() const { return points_.dim(); }
  double radius() const { return radius_; }
  const PointSet& points() const { return points_; }

 private:
  PointSet points_;
  double radius_;
};

// ---------------------------------------------------------------------------
// CANN-RS

enum class RsFilter : std::uint8_t {
  kExact = 0,        // distance check, keep candidates within R
  kApproximate = 1,  // no distance computation; every candidate color reported at R
};

struct RsConfig {
  double radius = 1.0;
  double approx = 1.1;
  std::size_t grids = 16;
  double gamma = kDefaultGamma;
  std::uint64_t seed = 0;
  RsFilter filter = RsFilter::kExact;
  std::size_t threads = 1;

  /// e^-1: one replica of the grids.
  static constexpr double kDefaultGamma = 0.36787944117144233;
};

/// Range-search colored NN: enumerate every indexed point in the query's grid
/// cells, filter by exact distance, keep the per-color minimum.
class RsIndex {
 public:
  struct Scratch {
    StampSet points;
    StampSet colors;
    std::vector<QueryOutcome::Entry> entries;
  };

  RsIndex() = default;
  RsIndex(PointGridIndex grid, RsConfig config);

  static RsIndex build(const PointSet& points, const RsConfig& config);

  QueryOutcome query(std::span<const float> q) const;
  QueryOutcome query(std::span<const float> q, Scratch& scratch) const;
  Scratch make_scratch() const;

  /// De-duplicated candidate point ids (before distance filtering).
  std::vector<std::uint32_t> candidates(std::span<const float> q) const {
    return grid_.query_candidates(q);
  }

  const RsConfig& config() const { return config_; }
  const PointGridIndex& grid() const { return grid_; }
  std::size_t dim() const { return grid_.dim(); }
  std::size_t point_count() const { return grid_.points().size(); }
  std::size_t stored_ids() const { return grid_.level().entry_count(); }

 private:
  PointGridIndex grid_;
  RsConfig config_;
  std::size_t color_count_ = 0;
};

// ---------------------------------------------------------------------------
// CANN-RG

struct LadderConfig {
  double min_radius = 1.0 / 16.0;  // r
  double max_radius = 1.0;         // R
  double approx = 1.1;             // c
  std::size_t grids = 16;          // L, per replica
  double gamma = RsConfig::kDefaultGamma;
  std::uint64_t seed = 0;
  ColorWidth color_width = ColorWidth::k16;
  std::size_t threads = 1;

  /// min_radius = R / 16.
  static LadderConfig with_defaults(double max_radius);
};

/// Radii r * c^t for t = 0..T, T the smallest integer with r * c^T >= R.
std::vector<double> ladder_radii(double min_radius, double approx, double max_radius);

/// Sequence of colored random grids at geometrically increasing radii. A color
/// first seen at level t is assigned the bucket distance radius(t).
class LadderIndex {
 public:
  struct Scratch {
    StampSet colors;
    std::vector<QueryOutcome::Entry> entries;
    std::vector<std::uint64_t> keys;
    std::vector<CellTable::Probe> probes;
  };

  LadderIndex() = default;
  LadderIndex(std::shared_ptr<const RotationBank> bank, std::vector<GridLevel> levels,
              LadderConfig config, std::size_t point_count, std::size_t color_count);

  /// Throws std::invalid_argument for invalid ladder bounds or grid
  /// parameters, std::out_of_range when a color exceeds the color width.
  static LadderIndex build(const PointSet& points, const LadderConfig& config);

  QueryOutcome query(std::span<const float> q) const;
  QueryOutcome query(std::span<const float> q, Scratch& scratch) const;
  Scratch make_scratch() const;

  /// Distinct colors of a single level, ascending.
  std::vector<Color> query_level(std::size_t level, std::span<const float> q) const;

  const LadderConfig& config() const { return config_; }
  const std::vector<GridLevel>& levels() const { return levels_; }
  const RotationBank& bank() const { return *bank_; }
  std::vector<double> radii() const;
  std::size_t dim() const { return bank_ ? bank_->dim() : 0; }
  std::size_t point_count() const { return point_count_; }
  std::size_t color_count() const { return color_count_; }
  std::size_t stored_entries() const;
  std::size_t memory_bytes() const;

 private:
  std::shared_ptr<const RotationBank> bank_;
  std::vector<GridLevel> levels_;
  LadderConfig config_;
  std::size_t point_count_ = 0;
  std::size_t color_count_ = 0;
};

/// Runs index.query on every row of `queries`, fanning out over `threads`
/// workers. Output order follows input order.
template <typename Index>
std::vector<QueryOutcome> multi_query(const Index& index, const PointSet& queries,
                                      std::size_t threads = 1) {
  if (!queries.empty() && queries.dim() != index.dim()) throw DimensionMismatch(index.dim(), queries.dim());
  std::vector<QueryOutcome> out(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    auto scratch = index.make_scratch();
    for (std::size_t i = begin; i < end; ++i) out[i] = index.query(queries.point(i), scratch);
  });
  return out;
}

}  // namespace cann
