#include "cann/types.hpp"

#include <algorithm>
#include <cmath>

namespace cann {

PointSet::PointSet(std::size_t dim, std::vector<float> values, std::vector<Color> colors)
    : dim_(dim), values_(std::move(values)), colors_(std::move(colors)) {
  if (dim_ == 0 && !colors_.empty()) throw std::invalid_argument("point set dimension must be positive");
  if (values_.size() != colors_.size() * dim_) throw DimensionMismatch(colors_.size() * dim_, values_.size());
}

PointSet PointSet::from_points(const std::vector<ColoredPoint>& points) {
  if (points.empty()) return {};
  PointSet set(points.front().descriptor.size());
  set.reserve(points.size());
  for (const auto& p : points) set.add(p.descriptor, p.color);
  return set;
}

void PointSet::add(std::span<const float> descriptor, Color color) {
  if (dim_ == 0 && colors_.empty()) dim_ = descriptor.size();
  if (descriptor.size() != dim_ || dim_ == 0) throw DimensionMismatch(dim_, descriptor.size());
  values_.insert(values_.end(), descriptor.begin(), descriptor.end());
  colors_.push_back(color);
}

void PointSet::reserve(std::size_t n) {
  values_.reserve(n * dim_);
  colors_.reserve(n);
}

std::size_t PointSet::color_count() const {
  if (colors_.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(colors_.begin(), colors_.end())) + 1;
}

double squared_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return sum;
}

double distance(std::span<const float> a, std::span<const float> b) {
  return std::sqrt(squared_distance(a, b));
}

}  // namespace cann

namespace cann {

std::vector<PointSet> split_by_color(const PointSet& points, std::size_t groups) {
  std::vector<PointSet> out(groups, PointSet(points.dim()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Color c = points.color(i);
    if (c >= groups) throw std::out_of_range("color " + std::to_string(c) + " outside group range");
    out[c].add(points.point(i), c);
  }
  return out;
}

}  // namespace cann
