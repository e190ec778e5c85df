// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace subgrad {

// A subset of the ground set {0, ..., n-1}, stored as a membership mask.
class Subset {
 public:
  Subset() = default;
  explicit Subset(std::size_t ground_size) : in_(ground_size, 0) {}

  static Subset full(std::size_t ground_size) {
    Subset s(ground_size);
    std::fill(s.in_.begin(), s.in_.end(), 1);
    s.count_ = ground_size;
    return s;
  }

  static Subset from_items(std::size_t ground_size,
                           std::span<const std::size_t> items) {
    Subset s(ground_size);
    for (std::size_t e : items) s.insert(e);
    return s;
  }

  static Subset from_items(std::size_t ground_size,
                           std::initializer_list<std::size_t> items) {
    return from_items(ground_size,
                      std::span<const std::size_t>(items.begin(), items.size()));
  }

  // Bit i of `mask` selects item i. Requires ground_size <= 64.
  static Subset from_mask(std::size_t ground_size, std::uint64_t mask) {
    if (ground_size > 64) throw std::out_of_range("Subset::from_mask: n > 64");
    Subset s(ground_size);
    for (std::size_t i = 0; i < ground_size; ++i) {
      if ((mask >> i) & 1U) s.insert(i);
    }
    return s;
  }

  std::size_t ground_size() const { return in_.size(); }
  std::size_t count() const { return count_; }
  bool empty() const { return count_ == 0; }

  bool contains(std::size_t e) const {
    check(e);
    return in_[e] != 0;
  }

  void insert(std::size_t e) {
    check(e);
    if (!in_[e]) {
      in_[e] = 1;
      ++count_;
    }
  }

  void erase(std::size_t e) {
    check(e);
    if (in_[e]) {
      in_[e] = 0;
      --count_;
    }
  }

  Subset with(std::size_t e) const {
    Subset s = *this;
    s.insert(e);
    return s;
  }

  Subset without(std::size_t e) const {
    Subset s = *this;
    s.erase(e);
    return s;
  }

  Subset complement() const {
    Subset s(in_.size());
    for (std::size_t i = 0; i < in_.size(); ++i) {
      if (!in_[i]) s.insert(i);
    }
    return s;
  }

  bool is_subset_of(const Subset& other) const {
    if (other.ground_size() != ground_size()) return false;
    for (std::size_t i = 0; i < in_.size(); ++i) {
      if (in_[i] && !other.in_[i]) return false;
    }
    return true;
  }

  std::vector<std::size_t> items() const {
    std::vector<std::size_t> out;
    out.reserve(count_);
    for (std::size_t i = 0; i < in_.size(); ++i) {
      if (in_[i]) out.push_back(i);
    }
    return out;
  }

  std::uint64_t mask() const {
    if (in_.size() > 64) throw std::out_of_range("Subset::mask: n > 64");
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < in_.size(); ++i) {
      if (in_[i]) m |= std::uint64_t{1} << i;
    }
    return m;
  }

  // "{0 2 5}"
  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for (std::size_t e : items()) {
      if (!first) out += ' ';
      out += std::to_string(e);
      first = false;
    }
    return out + "}";
  }

  friend bool operator==(const Subset& a, const Subset& b) {
    return a.in_ == b.in_;
  }

  // Lexicographic order on the sorted item lists ({} < {0} < {0 1} < {1}).
  friend bool lex_less(const Subset& a, const Subset& b) {
    const auto x = a.items();
    const auto y = b.items();
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
  }

 private:
  void check(std::size_t e) const {
    if (e >= in_.size()) {
      throw std::out_of_range("item " + std::to_string(e) +
                              " outside ground set of size " +
                              std::to_string(in_.size()));
    }
  }

  std::vector<std::uint8_t> in_;
  std::size_t count_ = 0;
};

}  // namespace subgrad
