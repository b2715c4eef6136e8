#include "cann/synthetic.hpp"

#include <stdexcept>

#include "cann/random_grid.hpp"
#include "cann/rng.hpp"

namespace cann {

Eigen::MatrixXd random_basis(std::size_t dim, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k > dim) throw std::invalid_argument("subspace dimension must be in [1, dim]");
  return random_rotation(seed, dim).leftCols(static_cast<Eigen::Index>(k));
}

SyntheticDataset make_clustered_dataset(const SyntheticConfig& config) {
  if (config.images == 0 || config.features_per_image == 0) {
    throw std::invalid_argument("synthetic data needs at least one image and feature");
  }
  const auto k = static_cast<Eigen::Index>(config.intrinsic_dim);
  SyntheticDataset data;
  data.basis = random_basis(config.dim, config.intrinsic_dim, derive_seed(config.seed, 0x5EED));
  data.centers.resize(k, static_cast<Eigen::Index>(config.images));

  GaussianSource gauss(derive_seed(config.seed, 0xC1));
  if (config.group_size <= 1) {
    for (Eigen::Index j = 0; j < data.centers.cols(); ++j) {
      for (Eigen::Index i = 0; i < k; ++i) data.centers(i, j) = config.center_spread * gauss.next();
    }
  } else {
    const auto group = static_cast<Eigen::Index>(config.group_size);
    Eigen::VectorXd place(k);
    for (Eigen::Index j = 0; j < data.centers.cols(); ++j) {
      if (j % group == 0) {
        for (Eigen::Index i = 0; i < k; ++i) place(i) = config.center_spread * gauss.next();
      }
      for (Eigen::Index i = 0; i < k; ++i) data.centers(i, j) = place(i) + config.group_spread * gauss.next();
    }
  }

  data.database = PointSet(config.dim);
  data.database.reserve(config.images * config.features_per_image);
  Eigen::VectorXd coeff(k);
  std::vector<float> row(config.dim);
  for (std::size_t img = 0; img < config.images; ++img) {
    for (std::size_t f = 0; f < config.features_per_image; ++f) {
      for (Eigen::Index i = 0; i < k; ++i) {
        coeff(i) = data.centers(i, static_cast<Eigen::Index>(img)) + config.cluster_spread * gauss.next();
      }
      const Eigen::VectorXd x = data.basis * coeff;
      for (std::size_t d = 0; d < config.dim; ++d) row[d] = static_cast<float>(x(static_cast<Eigen::Index>(d)));
      data.database.add(row, static_cast<Color>(img));
    }
  }
  return data;
}

SyntheticQueries make_queries(const SyntheticDataset& data, std::size_t count, std::size_t features,
                              double noise, std::uint64_t seed) {
  const std::size_t images = static_cast<std::size_t>(data.centers.cols());
  const std::size_t per_image = data.database.size() / images;
  const std::size_t dim = data.database.dim();
  const auto k = data.basis.cols();
  GaussianSource gauss(seed);

  SyntheticQueries out;
  out.images.reserve(count);
  Eigen::VectorXd offset(k);
  std::vector<float> row(dim);
  for (std::size_t q = 0; q < count; ++q) {
    const auto target = static_cast<Color>(q % images);
    QueryImage image{"q" + std::to_string(q), PointSet(dim)};
    image.features.reserve(features);
    for (std::size_t f = 0; f < features; ++f) {
      const auto pick = static_cast<std::size_t>(gauss.uniform() * static_cast<double>(per_image));
      const auto src = data.database.point(target * per_image + std::min(pick, per_image - 1));
      for (Eigen::Index i = 0; i < k; ++i) offset(i) = noise * gauss.next();
      const Eigen::VectorXd delta = data.basis * offset;
      for (std::size_t d = 0; d < dim; ++d) {
        row[d] = static_cast<float>(src[d] + delta(static_cast<Eigen::Index>(d)));
      }
      image.features.add(row, target);
    }
    out.images.push_back(std::move(image));
    out.targets.push_back(target);
  }
  return out;
}

namespace {

void observe(const TrackDataset& data, std::size_t landmark, GaussianSource& gauss, std::vector<float>& row) {
  const auto k = data.landmarks.rows();
  Eigen::VectorXd coeff(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    coeff(i) = data.landmarks(i, static_cast<Eigen::Index>(landmark)) + data.config.observation_noise * gauss.next();
  }
  const Eigen::VectorXd x = data.basis * coeff;
  for (std::size_t d = 0; d < row.size(); ++d) row[d] = static_cast<float>(x(static_cast<Eigen::Index>(d)));
}

}  // namespace

TrackDataset make_track_dataset(const TrackConfig& config) {
  if (config.images == 0 || config.features_per_image == 0) {
    throw std::invalid_argument("synthetic data needs at least one image and feature");
  }
  TrackDataset data;
  data.config = config;
  data.basis = random_basis(config.dim, config.intrinsic_dim, derive_seed(config.seed, 0x5EED));
  const std::size_t landmarks = (config.images - 1) * config.stride + config.features_per_image;
  const auto k = static_cast<Eigen::Index>(config.intrinsic_dim);
  data.landmarks.resize(k, static_cast<Eigen::Index>(landmarks));
  GaussianSource gauss(derive_seed(config.seed, 0x1A));
  for (Eigen::Index j = 0; j < data.landmarks.cols(); ++j) {
    for (Eigen::Index i = 0; i < k; ++i) data.landmarks(i, j) = config.landmark_spread * gauss.next();
  }

  data.database = PointSet(config.dim);
  data.database.reserve(config.images * config.features_per_image);
  std::vector<float> row(config.dim);
  for (std::size_t img = 0; img < config.images; ++img) {
    for (std::size_t f = 0; f < config.features_per_image; ++f) {
      observe(data, img * config.stride + f, gauss, row);
      data.database.add(row, static_cast<Color>(img));
    }
  }
  return data;
}

SyntheticQueries make_track_queries(const TrackDataset& data, std::size_t count, std::uint64_t seed) {
  const TrackConfig& cfg = data.config;
  GaussianSource gauss(seed);
  SyntheticQueries out;
  out.images.reserve(count);
  std::vector<float> row(cfg.dim);
  for (std::size_t q = 0; q < count; ++q) {
    const auto target = static_cast<Color>(q % cfg.images);
    QueryImage image{"q" + std::to_string(q), PointSet(cfg.dim)};
    image.features.reserve(cfg.features_per_image);
    for (std::size_t f = 0; f < cfg.features_per_image; ++f) {
      observe(data, target * cfg.stride + f, gauss, row);
      image.features.add(row, target);
    }
    out.images.push_back(std::move(image));
    out.targets.push_back(target);
  }
  return out;
}

}  // namespace cann
