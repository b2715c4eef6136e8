#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cann {

/// Image identifier attached to every indexed descriptor.
using Color = std::uint32_t;

/// Number of bits used to store a color inside grid cells.
enum class ColorWidth : std::uint32_t { k16 = 16, k32 = 32 };

inline std::uint64_t max_color(ColorWidth width) {
  return width == ColorWidth::k16 ? 0xFFFFull : 0xFFFFFFFFull;
}

/// Single descriptor with its color. Convenience type for building a
/// PointSet by hand; bulk data lives in PointSet.
struct ColoredPoint {
  std::vector<float> descriptor;
  Color color = 0;
};

/// Row-major matrix of n descriptors of dimension d with one color per row.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::vector<float> values, std::vector<Color> colors);

  static PointSet from_points(const std::vector<ColoredPoint>& points);

  void add(std::span<const float> descriptor, Color color);
  void reserve(std::size_t n);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return colors_.size(); }
  bool empty() const { return colors_.empty(); }

  std::span<const float> point(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  Color color(std::size_t i) const { return colors_[i]; }

  const std::vector<float>& values() const { return values_; }
  const std::vector<Color>& colors() const { return colors_; }

  /// One past the largest color present (0 when empty).
  std::size_t color_count() const;

  bool operator==(const PointSet&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<float> values_;
  std::vector<Color> colors_;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) +
                              ", got " + std::to_string(got)) {}
};

/// Groups rows by color: result[c] holds the rows of color c, in input order.
std::vector<PointSet> split_by_color(const PointSet& points, std::size_t groups);

double squared_distance(std::span<const float> a, std::span<const float> b);
double distance(std::span<const float> a, std::span<const float> b);

}  // namespace cann
