#include "cann/cann_index.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cann {

QueryOutcome::QueryOutcome(EstimateKind kind, std::vector<Entry> entries)
    : kind_(kind), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.color != b.color ? a.color < b.color : a.distance < b.distance;
  });
  entries_.erase(std::unique(entries_.begin(), entries_.end(),
                             [](const Entry& a, const Entry& b) { return a.color == b.color; }),
                 entries_.end());
}

std::optional<double> QueryOutcome::find(Color color) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), color,
                                   [](const Entry& e, Color c) { return e.color < c; });
  if (it == entries_.end() || it->color != color) return std::nullopt;
  return it->distance;
}

// ---------------------------------------------------------------------------

BruteForceIndex::BruteForceIndex(PointSet points, double radius) : points_(std::move(points)), radius_(radius) {
  if (points_.empty()) throw std::invalid_argument("cannot search an empty point set");
  if (!(radius_ > 0.0)) throw std::invalid_argument("radius must be positive");
}

QueryOutcome BruteForceIndex::query(std::span<const float> q) const {
  return brute_force_colored_nn(points_, q, radius_);
}

QueryOutcome brute_force_colored_nn(const PointSet& points, std::span<const float> q, double radius) {
  if (points.empty()) throw std::invalid_argument("cannot search an empty point set");
  if (q.size() != points.dim()) throw DimensionMismatch(points.dim(), q.size());
  std::vector<QueryOutcome::Entry> entries;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = distance(points.point(i), q);
    if (d <= radius) entries.push_back({points.color(i), d});
  }
  return QueryOutcome(EstimateKind::kExact, std::move(entries));
}

// ---------------------------------------------------------------------------
// CANN-RS

RsIndex::RsIndex(PointGridIndex grid, RsConfig config)
    : grid_(std::move(grid)), config_(config), color_count_(grid_.points().color_count()) {}

RsIndex RsIndex::build(const PointSet& points, const RsConfig& config) {
  const std::size_t grids = config.grids * replication_for(config.gamma);
  auto grid = PointGridIndex::build(points, config.radius, config.approx, grids, config.seed, config.threads);
  return RsIndex(std::move(grid), config);
}

RsIndex::Scratch RsIndex::make_scratch() const {
  return {StampSet(point_count()), StampSet(color_count_), {}};
}

QueryOutcome RsIndex::query(std::span<const float> q) const {
  auto scratch = make_scratch();
  return query(q, scratch);
}

QueryOutcome RsIndex::query(std::span<const float> q, Scratch& scratch) const {
  const PointSet& points = grid_.points();
  const double radius = config_.radius;
  scratch.points.reset(points.size());
  scratch.colors.reset(color_count_);
  scratch.entries.clear();

  if (config_.filter == RsFilter::kApproximate) {
    grid_.for_each_candidate(q, [&](std::uint32_t id) {
      const Color c = points.color(id);
      if (scratch.colors.insert(c)) scratch.entries.push_back({c, radius});
    });
    return QueryOutcome(EstimateKind::kBucketRadius, scratch.entries);
  }

  grid_.for_each_candidate(q, [&](std::uint32_t id) {
    if (!scratch.points.insert(id)) return;
    const double d = distance(points.point(id), q);
    if (d <= radius) scratch.entries.push_back({points.color(id), d});
  });
  return QueryOutcome(EstimateKind::kExact, scratch.entries);
}

// ---------------------------------------------------------------------------
// CANN-RG

LadderConfig LadderConfig::with_defaults(double max_radius) {
  LadderConfig config;
  config.max_radius = max_radius;
  config.min_radius = max_radius / 16.0;
  return config;
}

std::vector<double> ladder_radii(double min_radius, double approx, double max_radius) {
  if (!(min_radius > 0.0) || !(max_radius > 0.0)) throw std::invalid_argument("ladder radii must be positive");
  if (min_radius > max_radius) throw std::invalid_argument("ladder minimum radius exceeds R");
  if (!(approx > 1.0)) throw std::invalid_argument("approximation factor c must exceed 1");
  constexpr std::size_t kMaxLevels = 4096;
  const double steps = std::log(max_radius / min_radius) / std::log(approx);
  if (!(steps < static_cast<double>(kMaxLevels))) throw std::invalid_argument("ladder would exceed 4096 levels");
  // Slack absorbs log() rounding when R / r is an exact power of c.
  const auto top = static_cast<std::size_t>(std::max(0.0, std::ceil(steps - 1e-9)));
  std::vector<double> radii(top + 1);
  for (std::size_t t = 0; t <= top; ++t) radii[t] = min_radius * std::pow(approx, static_cast<double>(t));
  if (radii.back() < max_radius) radii.back() = max_radius;
  return radii;
}

LadderIndex::LadderIndex(std::shared_ptr<const RotationBank> bank, std::vector<GridLevel> levels,
                         LadderConfig config, std::size_t point_count, std::size_t color_count)
    : bank_(std::move(bank)),
      levels_(std::move(levels)),
      config_(config),
      point_count_(point_count),
      color_count_(color_count) {}

LadderIndex LadderIndex::build(const PointSet& points, const LadderConfig& config) {
  if (points.empty()) throw std::invalid_argument("cannot index an empty point set");
  if (config.grids == 0) throw std::invalid_argument("grid count must be at least 1");
  check_colors_fit(points, config.color_width);
  const std::vector<double> radii = ladder_radii(config.min_radius, config.approx, config.max_radius);
  const std::size_t grids = config.grids * replication_for(config.gamma);

  // Rotations are shared by all levels; shifts are drawn per level.
  std::vector<std::uint64_t> rot_seeds(grids);
  for (std::size_t g = 0; g < grids; ++g) rot_seeds[g] = grid_rotation_seed(config.seed, g);
  std::vector<std::vector<std::uint64_t>> shift_seeds(radii.size(), std::vector<std::uint64_t>(grids));
  for (std::size_t k = 0; k < radii.size(); ++k) {
    for (std::size_t g = 0; g < grids; ++g) shift_seeds[k][g] = grid_shift_seed(config.seed, k, g);
  }
  auto bank = std::make_shared<const RotationBank>(points.dim(), std::move(rot_seeds));
  auto levels = build_levels(points, *bank, radii, config.approx, shift_seeds, points.colors(),
                             config.color_width == ColorWidth::k32, config.threads);
  return LadderIndex(std::move(bank), std::move(levels), config, points.size(), points.color_count());
}

LadderIndex::Scratch LadderIndex::make_scratch() const { return {StampSet(color_count_), {}, {}, {}}; }

QueryOutcome LadderIndex::query(std::span<const float> q) const {
  auto scratch = make_scratch();
  return query(q, scratch);
}

QueryOutcome LadderIndex::query(std::span<const float> q, Scratch& scratch) const {
  if (levels_.empty()) return QueryOutcome(EstimateKind::kBucketRadius);
  const Eigen::VectorXd rotated = bank_->rotate(q);
  scratch.colors.reset(color_count_);
  scratch.entries.clear();
  std::size_t total = 0;
  for (const GridLevel& level : levels_) total += level.grid_count();
  scratch.keys.resize(total);
  std::size_t k = 0;
  for (const GridLevel& level : levels_) {
    level.keys_of_rotated(rotated.data(), scratch.keys.data() + k);
    for (std::size_t g = 0; g < level.grid_count(); ++g) level.tables()[g].prefetch_directory(scratch.keys[k++]);
  }
  scratch.probes.clear();
  k = 0;
  for (const GridLevel& level : levels_) {
    for (std::size_t g = 0; g < level.grid_count(); ++g) scratch.probes.push_back(level.tables()[g].probe(scratch.keys[k++]));
  }
  k = 0;
  for (const GridLevel& level : levels_) {
    const double radius = level.radius();
    for (std::size_t g = 0; g < level.grid_count(); ++g) {
      level.tables()[g].for_each_payload(scratch.probes[k++], [&](std::uint32_t c) {
        if (scratch.colors.insert(c)) scratch.entries.push_back({c, radius});
      });
    }
  }
  return QueryOutcome(EstimateKind::kBucketRadius, scratch.entries);
}

std::vector<Color> LadderIndex::query_level(std::size_t level, std::span<const float> q) const {
  const GridLevel& lv = levels_.at(level);
  const Eigen::VectorXd rotated = bank_->rotate(q);
  StampSet seen(color_count_);
  seen.reset(color_count_);
  std::vector<Color> out;
  for (std::size_t g = 0; g < lv.grid_count(); ++g) {
    const std::uint64_t key = lv.key_of_rotated(g, rotated.data() + g * dim());
    lv.tables()[g].for_each_payload(key, [&](std::uint32_t c) {
      if (seen.insert(c)) out.push_back(c);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> LadderIndex::radii() const {
  std::vector<double> out;
  out.reserve(levels_.size());
  for (const auto& level : levels_) out.push_back(level.radius());
  return out;
}

std::size_t LadderIndex::stored_entries() const {
  std::size_t total = 0;
  for (const auto& level : levels_) total += level.entry_count();
  return total;
}

std::size_t LadderIndex::memory_bytes() const {
  std::size_t total = static_cast<std::size_t>(bank_->stacked().size()) * sizeof(double);
  for (const auto& level : levels_) {
    total += static_cast<std::size_t>(level.shifts().size()) * sizeof(double);
    for (const auto& t : level.tables()) total += t.memory_bytes();
  }
  return total;
}

}  // namespace cann
