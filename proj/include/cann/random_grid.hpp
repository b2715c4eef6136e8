#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cann/types.hpp"

namespace cann {

/// Deterministic 64-bit seed derivation (splitmix64 finalizer over a combination).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/// Haar-distributed d x d rotation: Q factor of a standard Gaussian matrix with
/// the column signs fixed by diag(R).
Eigen::MatrixXd random_rotation(std::uint64_t seed, std::size_t dim);

/// Uniform shift vector with entries in [0, cell_width).
Eigen::VectorXd random_shift(std::uint64_t seed, std::size_t dim, double cell_width);

/// A random rotation followed by a translation.
struct RandomTransform {
  Eigen::MatrixXd rotation;
  Eigen::VectorXd shift;
  std::uint64_t seed = 0;

  std::size_t dim() const { return static_cast<std::size_t>(shift.size()); }
  Eigen::VectorXd apply(std::span<const float> x) const;
};

RandomTransform make_transform(std::uint64_t seed, std::size_t dim, double cell_width);

/// Mixes integer cell coordinates into a 64-bit key. Equal coordinate vectors
/// always give equal keys.
std::uint64_t hash_cell_coords(std::span<const std::int64_t> coords);

/// Key of the cell containing transform(x) in a grid of the given width.
std::uint64_t cell_key(const RandomTransform& t, double cell_width, std::span<const float> x);

/// Grid cell width giving a cell diameter of exactly approx * radius.
inline double cell_width_for(double radius, double approx, std::size_t dim) {
  return radius * approx / std::sqrt(static_cast<double>(dim));
}

/// ceil(e^(dim / approx)): grid count needed for constant success probability
/// when `dim` is the (intrinsic) dimension of the data.
std::size_t grids_for_dimension(double dim, double approx);

/// ceil(ln(1/gamma)), at least 1.
std::size_t replication_for(double gamma);

/// floor(v) as an integer, for |v| < 2^62.
inline std::int64_t cell_coordinate(double v) {
  const auto i = static_cast<std::int64_t>(v);
  return i - static_cast<std::int64_t>(static_cast<double>(i) > v);
}

/// Immutable hash map from a 64-bit cell key to a duplicate-free list of 16 or
/// 32 bit payloads (colors or point ids).
///
/// Layout: entries are bucketed by the top `bucket_bits` of the key and store
/// the low 32 key bits as a fingerprint, so one (cell, payload) pair costs 6
/// bytes (8 for wide payloads) plus the bucket directory.
class CellTable {
 public:
  struct Entry {
    std::uint64_t key;
    std::uint32_t payload;
  };

  struct Raw {
    std::uint32_t bucket_bits = 0;
    std::vector<std::uint32_t> directory;
    std::vector<std::uint32_t> fingerprints;
    std::vector<std::uint16_t> low;
    std::vector<std::uint16_t> high;  // same length as low when wide, else empty
    bool wide = false;
  };

  CellTable() = default;

  /// Sorts and de-duplicates the entries. Payloads must fit in 16 bits unless
  /// `wide` is set.
  static CellTable build(std::vector<Entry> entries, bool wide);
  static CellTable from_raw(Raw raw);

  /// Bucket range of one key, resolved ahead of the scan so that lookups in
  /// many tables can overlap their memory latency.
  struct Probe {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::uint32_t fingerprint = 0;
  };

  void prefetch_directory(std::uint64_t key) const {
    if (!raw_.fingerprints.empty()) __builtin_prefetch(raw_.directory.data() + bucket_of(key));
  }

  Probe probe(std::uint64_t key) const {
    if (raw_.fingerprints.empty()) return {};
    const std::size_t bucket = bucket_of(key);
    Probe p{raw_.directory[bucket], raw_.directory[bucket + 1], static_cast<std::uint32_t>(key)};
    if (p.begin < p.end) {
      __builtin_prefetch(raw_.fingerprints.data() + p.begin);
      __builtin_prefetch(raw_.low.data() + p.begin);
    }
    return p;
  }

  template <typename F>
  void for_each_payload(const Probe& p, F&& fn) const {
    for (std::uint32_t i = p.begin; i < p.end; ++i) {
      if (raw_.fingerprints[i] == p.fingerprint) {
        fn(payload(i));
      } else if (raw_.fingerprints[i] > p.fingerprint) {
        break;
      }
    }
  }

  template <typename F>
  void for_each_payload(std::uint64_t key, F&& fn) const {
    for_each_payload(probe(key), fn);
  }

  std::vector<std::uint32_t> lookup(std::uint64_t key) const;

  /// Calls fn(payloads) once per stored cell.
  void for_each_cell(const std::function<void(std::span<const std::uint32_t>)>& fn) const;

  std::size_t entry_count() const { return raw_.fingerprints.size(); }
  std::size_t cell_count() const;
  bool wide() const { return raw_.wide; }
  std::size_t memory_bytes() const;
  const Raw& raw() const { return raw_; }

  bool operator==(const CellTable& other) const;

 private:
  std::size_t bucket_of(std::uint64_t key) const {
    return raw_.bucket_bits == 0 ? 0 : static_cast<std::size_t>(key >> (64 - raw_.bucket_bits));
  }
  std::uint32_t payload(std::size_t i) const {
    std::uint32_t v = raw_.low[i];
    if (raw_.wide) v |= static_cast<std::uint32_t>(raw_.high[i]) << 16;
    return v;
  }

  Raw raw_;
};

/// L random rotations shared by one or more grid levels. Rotating a vector by
/// all of them is a single stacked matrix-vector product.
class RotationBank {
 public:
  RotationBank() = default;
  RotationBank(std::size_t dim, std::vector<std::uint64_t> seeds);
  /// Restores a bank from stored matrices (rows: grid_count * dim, cols: dim).
  RotationBank(std::size_t dim, std::vector<std::uint64_t> seeds, Eigen::MatrixXd stacked);

  std::size_t dim() const { return dim_; }
  std::size_t grid_count() const { return seeds_.size(); }
  const std::vector<std::uint64_t>& seeds() const { return seeds_; }
  const Eigen::MatrixXd& stacked() const { return stacked_; }
  Eigen::MatrixXd rotation(std::size_t grid) const;

  /// Returns a (grid_count * dim) vector: all rotations applied to x.
  Eigen::VectorXd rotate(std::span<const float> x) const;
  /// Rotates a block of points (columns) by one grid's rotation.
  Eigen::MatrixXd rotate_block(std::size_t grid, const Eigen::MatrixXd& points) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint64_t> seeds_;
  Eigen::MatrixXd stacked_;
};

/// One radius of a random grid structure: per-grid shifts and cell tables.
/// The rotations live in a RotationBank owned by the enclosing index.
class GridLevel {
 public:
  GridLevel() = default;
  GridLevel(double radius, double cell_width, Eigen::MatrixXd shifts, std::vector<CellTable> tables);

  double radius() const { return radius_; }
  double cell_width() const { return cell_width_; }
  std::size_t grid_count() const { return tables_.size(); }
  const Eigen::MatrixXd& shifts() const { return shifts_; }  // dim x grid_count
  const std::vector<CellTable>& tables() const { return tables_; }

  /// Cell key of an already rotated vector under grid g.
  std::uint64_t key_of_rotated(std::size_t grid, const double* rotated) const;
  /// Keys of all grids at once; `rotated` holds grid_count stacked rotations.
  void keys_of_rotated(const double* rotated, std::uint64_t* out) const;

  std::size_t entry_count() const;
  bool operator==(const GridLevel& other) const;

 private:
  double radius_ = 0.0;
  double cell_width_ = 0.0;
  Eigen::MatrixXd shifts_;
  std::vector<CellTable> tables_;
};

/// Assigns payloads[i] of every point to its cell in each grid of every level.
/// Levels share the rotations of `bank`; levels[k] receives shifts derived
/// from shift_seeds[k][g].
std::vector<GridLevel> build_levels(const PointSet& points, const RotationBank& bank,
                                    std::span<const double> radii, double approx,
                                    const std::vector<std::vector<std::uint64_t>>& shift_seeds,
                                    std::span<const std::uint32_t> payloads,
                                    bool wide_payload, std::size_t threads);

/// Colored random grid for one radius: cells keep the distinct colors of the
/// points falling into them, never coordinates.
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(std::shared_ptr<const RotationBank> bank, GridLevel level, double approx,
            ColorWidth width, std::size_t point_count, std::size_t color_count);

  /// Throws std::invalid_argument for empty input, approx <= 1, grids == 0,
  /// DimensionMismatch for ragged input, std::out_of_range for colors wider
  /// than `width`.
  static GridIndex build(const PointSet& points, double radius, double approx, std::size_t grids,
                         std::uint64_t base_seed, ColorWidth width = ColorWidth::k16,
                         std::size_t threads = 1);

  /// Distinct colors found in the query's cell across all grids, ascending.
  std::vector<Color> query_colors(std::span<const float> q) const;

  double radius() const { return level_.radius(); }
  double approx() const { return approx_; }
  double cell_width() const { return level_.cell_width(); }
  std::size_t dim() const { return bank_ ? bank_->dim() : 0; }
  std::size_t grid_count() const { return level_.grid_count(); }
  std::size_t point_count() const { return point_count_; }
  std::size_t color_count() const { return color_count_; }
  ColorWidth color_width() const { return width_; }
  RandomTransform transform(std::size_t grid) const;
  const GridLevel& level() const { return level_; }
  const RotationBank& bank() const { return *bank_; }

 private:
  std::shared_ptr<const RotationBank> bank_;
  GridLevel level_;
  double approx_ = 0.0;
  ColorWidth width_ = ColorWidth::k16;
  std::size_t point_count_ = 0;
  std::size_t color_count_ = 0;
};

/// Random grid whose cells keep point ids; coordinates and colors are kept in
/// a side table for exact distance checks.
class PointGridIndex {
 public:
  PointGridIndex() = default;
  PointGridIndex(RotationBank bank, GridLevel level, double approx, PointSet points);

  static PointGridIndex build(const PointSet& points, double radius, double approx,
                              std::size_t grids, std::uint64_t base_seed, std::size_t threads = 1);

  /// De-duplicated occupants of the query's cells across all grids, in first
  /// seen order. A default-constructed index returns nothing.
  std::vector<std::uint32_t> query_candidates(std::span<const float> q) const;

  template <typename F>
  void for_each_candidate(std::span<const float> q, F&& fn) const {
    if (level_.grid_count() == 0) return;
    const Eigen::VectorXd rotated = bank_.rotate(q);
    for (std::size_t g = 0; g < level_.grid_count(); ++g) {
      const std::uint64_t key = level_.key_of_rotated(g, rotated.data() + g * dim());
      level_.tables()[g].for_each_payload(key, fn);
    }
  }

  double radius() const { return level_.radius(); }
  double approx() const { return approx_; }
  std::size_t dim() const { return bank_.dim(); }
  std::size_t grid_count() const { return level_.grid_count(); }
  const PointSet& points() const { return points_; }
  const GridLevel& level() const { return level_; }
  const RotationBank& bank() const { return bank_; }

 private:
  RotationBank bank_;
  GridLevel level_;
  double approx_ = 0.0;
  PointSet points_;
};

/// Seeds used for grid g of an index built from base_seed.
std::uint64_t grid_rotation_seed(std::uint64_t base_seed, std::size_t grid);
std::uint64_t grid_shift_seed(std::uint64_t base_seed, std::size_t level, std::size_t grid);

void check_colors_fit(const PointSet& points, ColorWidth width);

}  // namespace cann
