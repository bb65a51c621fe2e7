// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace entrolim {

/// Read-only view of a (possibly vector-valued) sampled signal stored
/// sample-major: element (k, i) lives at data[k * dim + i].
class SignalView {
 public:
  SignalView() = default;
  SignalView(std::span<const double> data, std::size_t dim)
      : data_(data), dim_(dim) {}

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t length() const {
    return dim_ == 0 ? 0 : data_.size() / dim_;
  }
  [[nodiscard]] bool empty() const { return length() == 0; }
  [[nodiscard]] std::span<const double> at(std::size_t k) const {
    return data_.subspan(k * dim_, dim_);
  }
  /// Channel 0 at step k.
  [[nodiscard]] double scalar(std::size_t k) const { return data_[k * dim_]; }
  /// The first `n` samples.
  [[nodiscard]] SignalView prefix(std::size_t n) const {
    return {data_.first(n * dim_), dim_};
  }
  [[nodiscard]] std::span<const double> raw() const { return data_; }

 private:
  std::span<const double> data_;
  std::size_t dim_ = 1;
};

/// Owning sample-major signal.
class Signal {
 public:
  Signal() = default;
  explicit Signal(std::size_t dim, std::size_t length = 0)
      : dim_(dim), data_(dim * length, 0.0) {}
  Signal(std::size_t dim, std::vector<double> data);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t length() const {
    return dim_ == 0 ? 0 : data_.size() / dim_;
  }
  [[nodiscard]] std::span<double> at(std::size_t k) {
    return std::span<double>(data_).subspan(k * dim_, dim_);
  }
  [[nodiscard]] std::span<const double> at(std::size_t k) const {
    return std::span<const double>(data_).subspan(k * dim_, dim_);
  }
  [[nodiscard]] double scalar(std::size_t k) const { return data_[k * dim_]; }
  [[nodiscard]] SignalView view() const { return {data_, dim_}; }
  [[nodiscard]] SignalView prefix(std::size_t n) const {
    return view().prefix(n);
  }
  [[nodiscard]] const std::vector<double>& raw() const { return data_; }
  [[nodiscard]] std::vector<double>& raw() { return data_; }

  /// Channel `i` copied out as a scalar series.
  [[nodiscard]] std::vector<double> channel(std::size_t i) const;

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  std::size_t dim_ = 1;
  std::vector<double> data_;
};

}  // namespace entrolim
