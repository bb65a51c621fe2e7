// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include "entrolim/signal.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "entrolim/common.hpp"

namespace entrolim {

LpExponent LpExponent::finite(double p) {
  if (std::isinf(p) && p > 0) return infinity();
  if (!(p >= 1.0)) {
    throw InvalidArgument("L_p exponent must satisfy p >= 1, got " +
                          format_double(p));
  }
  LpExponent e;
  e.p_ = p;
  e.infinite_ = false;
  return e;
}

std::string LpExponent::to_string() const {
  return infinite_ ? std::string("inf") : format_double(p_);
}

LpExponent LpExponent::parse(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "infinity" || lower == "+inf") return infinity();
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw InvalidArgument("cannot parse L_p exponent '" + text + "'");
  }
  return finite(value);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

Signal::Signal(std::size_t dim, std::vector<double> data)
    : dim_(dim), data_(std::move(data)) {
  if (dim_ == 0 || data_.size() % dim_ != 0) {
    throw DimensionError("signal data size is not a multiple of its dimension");
  }
}

std::vector<double> Signal::channel(std::size_t i) const {
  std::vector<double> out(length());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = data_[k * dim_ + i];
  return out;
}

}  // namespace entrolim
