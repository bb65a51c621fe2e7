// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace entrolim::detail {

/// Static k-d tree over n points in R^dim (sample-major storage) answering
/// "distance to the k-th nearest other point" queries in the Euclidean norm.
class KdTree {
 public:
  KdTree(std::span<const double> points, std::size_t dim, std::size_t leaf_size = 12);

  /// Euclidean distance from point `index` to its k-th nearest neighbour,
  /// the point itself excluded.
  [[nodiscard]] double kth_neighbor_distance(std::size_t index, std::size_t k) const;

  /// kth_neighbor_distance for every point.
  [[nodiscard]] std::vector<double> all_kth_neighbor_distances(std::size_t k) const;

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t left = 0;   // child node indices, 0 = leaf
    std::size_t right = 0;
    std::size_t split_dim = 0;
    double split = 0.0;
    std::vector<double> lo;  // bounding box
    std::vector<double> hi;
  };

  std::size_t build(std::size_t begin, std::size_t end);
  [[nodiscard]] double point(std::size_t idx, std::size_t d) const { return points_[idx * dim_ + d]; }

  std::span<const double> points_;
  std::size_t dim_;
  std::size_t leaf_size_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace entrolim::detail
