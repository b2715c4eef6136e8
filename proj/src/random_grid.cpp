#include "cann/random_grid.hpp"

#include <algorithm>
#include <bit>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "cann/parallel.hpp"
#include "cann/rng.hpp"

namespace cann {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Streaming multiply-xor mix over integer cell coordinates.
class CellHasher {
 public:
  void add(std::int64_t coord) {
    h_ = (h_ ^ static_cast<std::uint64_t>(coord)) * 0x9E3779B97F4A7C15ull;
    h_ ^= h_ >> 32;
  }
  std::uint64_t finish() const {
    std::uint64_t x = h_;
    x ^= x >> 33;
    x *= 0xFF51AFD7ED558CCDull;
    x ^= x >> 33;
    x *= 0xC4CEB9FE1A85EC53ull;
    x ^= x >> 33;
    return x;
  }

 private:
  std::uint64_t h_ = 0x243F6A8885A308D3ull;
};

void validate_grid_args(const PointSet& points, double radius, double approx, std::size_t grids) {
  if (points.empty()) throw std::invalid_argument("cannot index an empty point set");
  if (points.dim() == 0) throw std::invalid_argument("descriptor dimension must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (!(approx > 1.0)) throw std::invalid_argument("approximation factor c must exceed 1");
  if (grids == 0) throw std::invalid_argument("grid count must be at least 1");
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ (b * 0xD1B54A32D192ED03ull));
}

std::uint64_t grid_rotation_seed(std::uint64_t base_seed, std::size_t grid) {
  return derive_seed(base_seed, grid);
}

std::uint64_t grid_shift_seed(std::uint64_t base_seed, std::size_t level, std::size_t grid) {
  return derive_seed(grid_rotation_seed(base_seed, grid), 1 + level);
}

Eigen::MatrixXd random_rotation(std::uint64_t seed, std::size_t dim) {
  GaussianSource gauss(seed);
  Eigen::MatrixXd a(dim, dim);
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = gauss.next();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  }
  return q;
}

Eigen::VectorXd random_shift(std::uint64_t seed, std::size_t dim, double cell_width) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd shift(dim);
  for (Eigen::Index i = 0; i < shift.size(); ++i) shift(i) = unit_uniform(rng) * cell_width;
  return shift;
}

Eigen::VectorXd RandomTransform::apply(std::span<const float> x) const {
  if (x.size() != dim()) throw DimensionMismatch(dim(), x.size());
  const Eigen::VectorXd v =
      Eigen::Map<const Eigen::VectorXf>(x.data(), static_cast<Eigen::Index>(x.size())).cast<double>();
  return rotation * v + shift;
}

RandomTransform make_transform(std::uint64_t seed, std::size_t dim, double cell_width) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  if (!(cell_width > 0.0)) throw std::invalid_argument("cell width must be positive");
  return {random_rotation(seed, dim), random_shift(derive_seed(seed, 1), dim, cell_width), seed};
}

std::uint64_t hash_cell_coords(std::span<const std::int64_t> coords) {
  CellHasher h;
  for (const auto c : coords) h.add(c);
  return h.finish();
}

std::uint64_t cell_key(const RandomTransform& t, double cell_width, std::span<const float> x) {
  const Eigen::VectorXd y = t.apply(x);
  CellHasher h;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    h.add(cell_coordinate(y(i) / cell_width));
  }
  return h.finish();
}

std::size_t grids_for_dimension(double dim, double approx) {
  return static_cast<std::size_t>(std::ceil(std::exp(dim / approx)));
}

std::size_t replication_for(double gamma) {
  if (!(gamma > 0.0) || !(gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  // The slack keeps gamma = e^-k at exactly k replicas.
  const double reps = std::ceil(std::log(1.0 / gamma) - 1e-12);
  return std::max<std::size_t>(1, static_cast<std::size_t>(reps));
}

// ---------------------------------------------------------------------------
// CellTable

CellTable CellTable::build(std::vector<Entry> entries, bool wide) {
  Raw raw;
  raw.wide = wide;
  const std::size_t n = entries.size();
  raw.bucket_bits = n < 16 ? 0u : std::min<std::uint32_t>(28, std::bit_width(n / 4) - 1);
  const std::size_t buckets = std::size_t{1} << raw.bucket_bits;
  auto bucket_of = [&](std::uint64_t key) -> std::size_t {
    return raw.bucket_bits == 0 ? 0 : static_cast<std::size_t>(key >> (64 - raw.bucket_bits));
  };

  // Counting sort by bucket, then (fingerprint, payload) inside each bucket.
  std::vector<std::uint32_t> start(buckets + 1, 0);
  for (const auto& e : entries) {
    if (!wide && e.payload > 0xFFFFu) throw std::out_of_range("payload exceeds 16 bits");
    ++start[bucket_of(e.key) + 1];
  }
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<std::uint64_t> packed(n);
  {
    std::vector<std::uint32_t> cursor(start.begin(), start.end() - 1);
    for (const auto& e : entries) {
      const auto fp = static_cast<std::uint32_t>(e.key);
      packed[cursor[bucket_of(e.key)]++] = (static_cast<std::uint64_t>(fp) << 32) | e.payload;
    }
  }
  entries.clear();
  entries.shrink_to_fit();

  raw.directory.assign(buckets + 1, 0);
  raw.fingerprints.reserve(n);
  raw.low.reserve(n);
  if (wide) raw.high.reserve(n);
  for (std::size_t b = 0; b < buckets; ++b) {
    raw.directory[b] = static_cast<std::uint32_t>(raw.fingerprints.size());
    const auto first = packed.begin() + start[b];
    const auto last = packed.begin() + start[b + 1];
    std::sort(first, last);
    const auto unique_end = std::unique(first, last);
    for (auto it = first; it != unique_end; ++it) {
      raw.fingerprints.push_back(static_cast<std::uint32_t>(*it >> 32));
      const auto payload = static_cast<std::uint32_t>(*it);
      raw.low.push_back(static_cast<std::uint16_t>(payload & 0xFFFFu));
      if (wide) raw.high.push_back(static_cast<std::uint16_t>(payload >> 16));
    }
  }
  raw.directory[buckets] = static_cast<std::uint32_t>(raw.fingerprints.size());
  raw.fingerprints.shrink_to_fit();
  raw.low.shrink_to_fit();
  raw.high.shrink_to_fit();

  CellTable table;
  table.raw_ = std::move(raw);
  return table;
}

CellTable CellTable::from_raw(Raw raw) {
  if (raw.bucket_bits > 28) throw std::invalid_argument("cell table: bucket bits out of range");
  const std::size_t buckets = std::size_t{1} << raw.bucket_bits;
  if (raw.directory.size() != buckets + 1) throw std::invalid_argument("cell table: bad directory size");
  if (raw.low.size() != raw.fingerprints.size()) throw std::invalid_argument("cell table: length mismatch");
  if (raw.wide ? raw.high.size() != raw.low.size() : !raw.high.empty()) {
    throw std::invalid_argument("cell table: payload width mismatch");
  }
  if (raw.directory.front() != 0 || raw.directory.back() != raw.fingerprints.size() ||
      !std::is_sorted(raw.directory.begin(), raw.directory.end())) {
    throw std::invalid_argument("cell table: corrupt directory");
  }
  CellTable table;
  table.raw_ = std::move(raw);
  return table;
}

std::vector<std::uint32_t> CellTable::lookup(std::uint64_t key) const {
  std::vector<std::uint32_t> out;
  for_each_payload(key, [&](std::uint32_t p) { out.push_back(p); });
  return out;
}

void CellTable::for_each_cell(const std::function<void(std::span<const std::uint32_t>)>& fn) const {
  std::vector<std::uint32_t> cell;
  const std::size_t buckets = raw_.directory.empty() ? 0 : raw_.directory.size() - 1;
  for (std::size_t b = 0; b < buckets; ++b) {
    std::uint32_t i = raw_.directory[b];
    const std::uint32_t end = raw_.directory[b + 1];
    while (i < end) {
      cell.clear();
      const std::uint32_t fp = raw_.fingerprints[i];
      while (i < end && raw_.fingerprints[i] == fp) cell.push_back(payload(i++));
      fn(cell);
    }
  }
}

std::size_t CellTable::cell_count() const {
  std::size_t cells = 0;
  for_each_cell([&](std::span<const std::uint32_t>) { ++cells; });
  return cells;
}

std::size_t CellTable::memory_bytes() const {
  return raw_.directory.size() * 4 + raw_.fingerprints.size() * 4 + raw_.low.size() * 2 +
         raw_.high.size() * 2;
}

bool CellTable::operator==(const CellTable& other) const {
  return raw_.bucket_bits == other.raw_.bucket_bits && raw_.wide == other.raw_.wide &&
         raw_.directory == other.raw_.directory && raw_.fingerprints == other.raw_.fingerprints &&
         raw_.low == other.raw_.low && raw_.high == other.raw_.high;
}

// ---------------------------------------------------------------------------
// RotationBank / GridLevel

RotationBank::RotationBank(std::size_t dim, std::vector<std::uint64_t> seeds)
    : dim_(dim), seeds_(std::move(seeds)) {
  stacked_.resize(static_cast<Eigen::Index>(seeds_.size() * dim_), static_cast<Eigen::Index>(dim_));
  for (std::size_t g = 0; g < seeds_.size(); ++g) {
    stacked_.middleRows(static_cast<Eigen::Index>(g * dim_), static_cast<Eigen::Index>(dim_)) =
        random_rotation(seeds_[g], dim_);
  }
}

RotationBank::RotationBank(std::size_t dim, std::vector<std::uint64_t> seeds, Eigen::MatrixXd stacked)
    : dim_(dim), seeds_(std::move(seeds)), stacked_(std::move(stacked)) {
  if (stacked_.rows() != static_cast<Eigen::Index>(seeds_.size() * dim_) ||
      stacked_.cols() != static_cast<Eigen::Index>(dim_)) {
    throw std::invalid_argument("rotation bank: matrix shape mismatch");
  }
}

Eigen::MatrixXd RotationBank::rotation(std::size_t grid) const {
  return stacked_.middleRows(static_cast<Eigen::Index>(grid * dim_), static_cast<Eigen::Index>(dim_));
}

Eigen::VectorXd RotationBank::rotate(std::span<const float> x) const {
  if (x.size() != dim_) throw DimensionMismatch(dim_, x.size());
  const Eigen::VectorXd v =
      Eigen::Map<const Eigen::VectorXf>(x.data(), static_cast<Eigen::Index>(x.size())).cast<double>();
  return stacked_ * v;
}

Eigen::MatrixXd RotationBank::rotate_block(std::size_t grid, const Eigen::MatrixXd& points) const {
  return stacked_.middleRows(static_cast<Eigen::Index>(grid * dim_), static_cast<Eigen::Index>(dim_)) *
         points;
}

GridLevel::GridLevel(double radius, double cell_width, Eigen::MatrixXd shifts,
                     std::vector<CellTable> tables)
    : radius_(radius), cell_width_(cell_width), shifts_(std::move(shifts)), tables_(std::move(tables)) {
  if (shifts_.cols() != static_cast<Eigen::Index>(tables_.size())) {
    throw std::invalid_argument("grid level: shift count differs from table count");
  }
}

std::uint64_t GridLevel::key_of_rotated(std::size_t grid, const double* rotated) const {
  CellHasher h;
  const auto g = static_cast<Eigen::Index>(grid);
  for (Eigen::Index i = 0; i < shifts_.rows(); ++i) {
    h.add(cell_coordinate((rotated[i] + shifts_(i, g)) / cell_width_));
  }
  return h.finish();
}

void GridLevel::keys_of_rotated(const double* rotated, std::uint64_t* out) const {
  constexpr std::size_t kLanes = 8;
  const auto dim = shifts_.rows();
  const std::size_t grids = tables_.size();
  for (std::size_t g0 = 0; g0 < grids; g0 += kLanes) {
    const std::size_t lanes = std::min(kLanes, grids - g0);
    CellHasher h[kLanes];
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (std::size_t l = 0; l < lanes; ++l) {
        const auto g = static_cast<Eigen::Index>(g0 + l);
        h[l].add(cell_coordinate((rotated[g * dim + i] + shifts_(i, g)) / cell_width_));
      }
    }
    for (std::size_t l = 0; l < lanes; ++l) out[g0 + l] = h[l].finish();
  }
}

std::size_t GridLevel::entry_count() const {
  std::size_t total = 0;
  for (const auto& t : tables_) total += t.entry_count();
  return total;
}

bool GridLevel::operator==(const GridLevel& other) const {
  return radius_ == other.radius_ && cell_width_ == other.cell_width_ && shifts_ == other.shifts_ &&
         tables_ == other.tables_;
}

std::vector<GridLevel> build_levels(const PointSet& points, const RotationBank& bank,
                                    std::span<const double> radii, double approx,
                                    const std::vector<std::vector<std::uint64_t>>& shift_seeds,
                                    std::span<const std::uint32_t> payloads, bool wide_payload,
                                    std::size_t threads) {
  const std::size_t dim = bank.dim();
  const std::size_t grids = bank.grid_count();
  const std::size_t n = points.size();
  if (points.dim() != dim) throw DimensionMismatch(dim, points.dim());
  if (payloads.size() != n) throw std::invalid_argument("one payload per point required");
  if (shift_seeds.size() != radii.size()) throw std::invalid_argument("one seed row per level required");

  std::vector<double> widths(radii.size());
  std::vector<Eigen::MatrixXd> shifts(radii.size(), Eigen::MatrixXd(dim, grids));
  for (std::size_t k = 0; k < radii.size(); ++k) {
    widths[k] = cell_width_for(radii[k], approx, dim);
    if (shift_seeds[k].size() != grids) throw std::invalid_argument("one shift seed per grid required");
    for (std::size_t g = 0; g < grids; ++g) {
      shifts[k].col(static_cast<Eigen::Index>(g)) = random_shift(shift_seeds[k][g], dim, widths[k]);
    }
  }

  std::vector<std::vector<CellTable>> tables(radii.size(), std::vector<CellTable>(grids));
  const Eigen::Map<const Eigen::MatrixXf> source(points.values().data(), static_cast<Eigen::Index>(dim),
                                                 static_cast<Eigen::Index>(n));

  parallel_for(grids, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    constexpr Eigen::Index kBlock = 8192;
    Eigen::MatrixXd rotated(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
    std::vector<CellTable::Entry> entries;
    for (std::size_t g = begin; g < end; ++g) {
      for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(n); b += kBlock) {
        const Eigen::Index len = std::min<Eigen::Index>(kBlock, static_cast<Eigen::Index>(n) - b);
        rotated.middleCols(b, len) = bank.rotate_block(g, source.middleCols(b, len).cast<double>());
      }
      for (std::size_t k = 0; k < radii.size(); ++k) {
        entries.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          CellHasher h;
          const double* y = rotated.col(static_cast<Eigen::Index>(i)).data();
          for (std::size_t j = 0; j < dim; ++j) {
            h.add(cell_coordinate(
                (y[j] + shifts[k](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(g))) / widths[k]));
          }
          entries[i] = {h.finish(), payloads[i]};
        }
        tables[k][g] = CellTable::build(std::move(entries), wide_payload);
        entries = {};
      }
    }
  });

  std::vector<GridLevel> levels;
  levels.reserve(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    levels.emplace_back(radii[k], widths[k], std::move(shifts[k]), std::move(tables[k]));
  }
  return levels;
}

void check_colors_fit(const PointSet& points, ColorWidth width) {
  const std::uint64_t limit = max_color(width);
  for (const Color c : points.colors()) {
    if (c > limit) {
      throw std::out_of_range("color " + std::to_string(c) + " exceeds " +
                              std::to_string(static_cast<std::uint32_t>(width)) + "-bit color width");
    }
  }
}

// ---------------------------------------------------------------------------
// GridIndex

GridIndex::GridIndex(std::shared_ptr<const RotationBank> bank, GridLevel level, double approx,
                     ColorWidth width, std::size_t point_count, std::size_t color_count)
    : bank_(std::move(bank)),
      level_(std::move(level)),
      approx_(approx),
      width_(width),
      point_count_(point_count),
      color_count_(color_count) {}

GridIndex GridIndex::build(const PointSet& points, double radius, double approx, std::size_t grids,
                           std::uint64_t base_seed, ColorWidth width, std::size_t threads) {
  validate_grid_args(points, radius, approx, grids);
  check_colors_fit(points, width);
  std::vector<std::uint64_t> rot_seeds(grids);
  std::vector<std::vector<std::uint64_t>> shift_seeds(1, std::vector<std::uint64_t>(grids));
  for (std::size_t g = 0; g < grids; ++g) {
    rot_seeds[g] = grid_rotation_seed(base_seed, g);
    shift_seeds[0][g] = grid_shift_seed(base_seed, 0, g);
  }
  auto bank = std::make_shared<const RotationBank>(points.dim(), std::move(rot_seeds));
  const double radii[] = {radius};
  auto levels = build_levels(points, *bank, radii, approx, shift_seeds, points.colors(),
                             width == ColorWidth::k32, threads);
  return GridIndex(std::move(bank), std::move(levels.front()), approx, width, points.size(),
                   points.color_count());
}

std::vector<Color> GridIndex::query_colors(std::span<const float> q) const {
  if (!bank_) return {};
  const Eigen::VectorXd rotated = bank_->rotate(q);
  StampSet seen(color_count_);
  seen.reset(color_count_);
  std::vector<Color> out;
  for (std::size_t g = 0; g < level_.grid_count(); ++g) {
    const std::uint64_t key = level_.key_of_rotated(g, rotated.data() + g * dim());
    level_.tables()[g].for_each_payload(key, [&](std::uint32_t c) {
      if (seen.insert(c)) out.push_back(c);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

RandomTransform GridIndex::transform(std::size_t grid) const {
  return {bank_->rotation(grid), level_.shifts().col(static_cast<Eigen::Index>(grid)),
          bank_->seeds()[grid]};
}

// ---------------------------------------------------------------------------
// PointGridIndex

PointGridIndex::PointGridIndex(RotationBank bank, GridLevel level, double approx, PointSet points)
    : bank_(std::move(bank)), level_(std::move(level)), approx_(approx), points_(std::move(points)) {}

PointGridIndex PointGridIndex::build(const PointSet& points, double radius, double approx,
                                     std::size_t grids, std::uint64_t base_seed, std::size_t threads) {
  validate_grid_args(points, radius, approx, grids);
  std::vector<std::uint64_t> rot_seeds(grids);
  std::vector<std::vector<std::uint64_t>> shift_seeds(1, std::vector<std::uint64_t>(grids));
  for (std::size_t g = 0; g < grids; ++g) {
    rot_seeds[g] = grid_rotation_seed(base_seed, g);
    shift_seeds[0][g] = grid_shift_seed(base_seed, 0, g);
  }
  RotationBank bank(points.dim(), std::move(rot_seeds));
  std::vector<std::uint32_t> ids(points.size());
  std::iota(ids.begin(), ids.end(), 0u);
  const double radii[] = {radius};
  auto levels = build_levels(points, bank, radii, approx, shift_seeds, ids, true, threads);
  return PointGridIndex(std::move(bank), std::move(levels.front()), approx, points);
}

std::vector<std::uint32_t> PointGridIndex::query_candidates(std::span<const float> q) const {
  StampSet seen(points_.size());
  seen.reset(points_.size());
  std::vector<std::uint32_t> out;
  for_each_candidate(q, [&](std::uint32_t id) {
    if (seen.insert(id)) out.push_back(id);
  });
  return out;
}

}  // namespace cann
