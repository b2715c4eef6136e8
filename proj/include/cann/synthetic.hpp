#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cann/retrieval.hpp"
#include "cann/types.hpp"

namespace cann {

/// Gaussian clusters on a random d_eff-dimensional subspace of R^d, one
/// cluster per image (color). With group_size > 1, consecutive runs of
/// group_size images view the same place: their cluster centers scatter by
/// group_spread around a shared place center.
struct SyntheticConfig {
  std::size_t images = 50;
  std::size_t features_per_image = 100;
  std::size_t dim = 32;
  std::size_t intrinsic_dim = 8;
  double center_spread = 1.0;   // std-dev of cluster centers per subspace axis
  double cluster_spread = 0.1;  // std-dev of features around their center
  std::size_t group_size = 1;
  double group_spread = 0.0;  // std-dev of image centers around their place center
  std::uint64_t seed = 1;
};

struct SyntheticDataset {
  PointSet database;
  Eigen::MatrixXd basis;  // dim x intrinsic_dim, orthonormal columns
  Eigen::MatrixXd centers;  // intrinsic_dim x images
};

struct SyntheticQueries {
  std::vector<QueryImage> images;
  std::vector<Color> targets;
};

/// dim x k matrix with orthonormal columns.
Eigen::MatrixXd random_basis(std::size_t dim, std::size_t k, std::uint64_t seed);

SyntheticDataset make_clustered_dataset(const SyntheticConfig& config);

/// Query i targets image i mod images: it holds `features` randomly chosen
/// features of the target, each perturbed by Gaussian noise of std-dev
/// `noise` inside the subspace.
SyntheticQueries make_queries(const SyntheticDataset& data, std::size_t count, std::size_t features,
                              double noise, std::uint64_t seed);

/// Images along a path that observe overlapping runs of shared landmarks.
/// Image i sees landmarks [i * stride, i * stride + features_per_image), each
/// as the landmark's descriptor plus Gaussian noise inside the subspace, so
/// neighboring images share most of their content and the overlap shrinks
/// linearly with their separation.
struct TrackConfig {
  std::size_t images = 50;
  std::size_t features_per_image = 100;
  std::size_t stride = 10;
  std::size_t dim = 32;
  std::size_t intrinsic_dim = 8;
  double landmark_spread = 1.0;     // std-dev of landmark descriptors per subspace axis
  double observation_noise = 0.01;  // std-dev of each observation around its landmark
  std::uint64_t seed = 1;
};

struct TrackDataset {
  TrackConfig config;
  PointSet database;
  Eigen::MatrixXd basis;      // dim x intrinsic_dim
  Eigen::MatrixXd landmarks;  // intrinsic_dim x landmark count
};

TrackDataset make_track_dataset(const TrackConfig& config);

/// Query i re-observes all landmarks of image i mod images with fresh noise.
SyntheticQueries make_track_queries(const TrackDataset& data, std::size_t count, std::uint64_t seed);

}  // namespace cann
