// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include "kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "entrolim/common.hpp"

namespace entrolim::detail {

KdTree::KdTree(std::span<const double> points, std::size_t dim, std::size_t leaf_size)
    : points_(points), dim_(dim), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  if (dim == 0 || points.size() % dim != 0) throw InvalidArgument("kd-tree: bad point layout");
  const std::size_t n = points.size() / dim;
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * n / leaf_size_ + 2);
  if (n > 0) build(0, n);
}

std::size_t KdTree::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  Node fresh;
  fresh.begin = begin;
  fresh.end = end;
  nodes_.push_back(std::move(fresh));
  std::vector<double> lo(dim_, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim_, -std::numeric_limits<double>::infinity());
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t d = 0; d < dim_; ++d) {
      const double v = point(order_[i], d);
      lo[d] = std::min(lo[d], v);
      hi[d] = std::max(hi[d], v);
    }
  }
  std::size_t widest = 0;
  for (std::size_t d = 1; d < dim_; ++d)
    if (hi[d] - lo[d] > hi[widest] - lo[widest]) widest = d;

  if (end - begin > leaf_size_ && hi[widest] > lo[widest]) {
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) {
                       return point(a, widest) < point(b, widest);
                     });
    const double split = point(order_[mid], widest);
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    nodes_[id].split_dim = widest;
    nodes_[id].split = split;
  }
  nodes_[id].lo = std::move(lo);
  nodes_[id].hi = std::move(hi);
  return id;
}

double KdTree::kth_neighbor_distance(std::size_t index, std::size_t k) const {
  if (k == 0 || k >= order_.size()) throw InvalidArgument("kd-tree: k out of range");
  // Max-heap of the k best squared distances.
  std::vector<double> best;
  best.reserve(k + 1);
  auto worst = [&] {
    return best.size() < k ? std::numeric_limits<double>::infinity() : best.front();
  };
  auto box_distance = [&](const Node& node) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const double v = point(index, d);
      double gap = 0.0;
      if (v < node.lo[d]) gap = node.lo[d] - v;
      else if (v > node.hi[d]) gap = v - node.hi[d];
      s += gap * gap;
    }
    return s;
  };

  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (box_distance(node) >= worst()) continue;
    if (node.left == 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t other = order_[i];
        if (other == index) continue;
        double s = 0.0;
        for (std::size_t d = 0; d < dim_; ++d) {
          const double diff = point(other, d) - point(index, d);
          s += diff * diff;
        }
        if (s < worst()) {
          best.push_back(s);
          std::push_heap(best.begin(), best.end());
          if (best.size() > k) {
            std::pop_heap(best.begin(), best.end());
            best.pop_back();
          }
        }
      }
      continue;
    }
    // Visit the nearer child first.
    const bool go_left = point(index, node.split_dim) < node.split;
    stack.push_back(go_left ? node.right : node.left);
    stack.push_back(go_left ? node.left : node.right);
  }
  return std::sqrt(best.front());
}

std::vector<double> KdTree::all_kth_neighbor_distances(std::size_t k) const {
  std::vector<double> out(order_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = kth_neighbor_distance(i, k);
  return out;
}

}  // namespace entrolim::detail
