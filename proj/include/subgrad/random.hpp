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
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <thread>
#include <vector>

namespace subgrad {

using Rng = std::mt19937_64;
inline constexpr const char* kRngName = "mt19937_64";

// Uniform double in [0, 1) built from the top 53 bits. Unlike
// std::uniform_real_distribution the result is identical across standard
// library implementations.
template <class Urbg>
double uniform01(Urbg& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1].
template <class Urbg>
double uniform01_open_low(Urbg& rng) {
  return 1.0 - uniform01(rng);
}

// Uniform integer in [0, bound) by rejection, portable across libraries.
template <class Urbg>
std::uint64_t uniform_index(Urbg& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

template <class T, class Urbg>
void shuffle(std::vector<T>& v, Urbg& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(rng, i)]);
  }
}

// Independent stream for (seed, stream index). Used to give every
// Monte-Carlo run, example, or fold its own generator so that results do not
// depend on scheduling.
inline Rng stream_rng(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t substream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(substream),
                    static_cast<std::uint32_t>(substream >> 32)};
  return Rng(seq);
}

inline unsigned default_threads() {
  return std::max(1U, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, count) on up to `threads` workers using a static
// block partition. fn must only write to per-index state; callers reduce in
// index order afterwards.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1U, threads);
  if (threads == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace subgrad
