/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The usvar Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace usvar::random {

/// Philox4x32-10 counter-based generator. A block is a
/// pure function of (key, counter), so any draw can be regenerated in
/// isolation and parallel consumers never share state.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// SplitMix64 finalizer, used to fold structured tags into one stream id.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Purposes of independent random streams derived from one seed.
enum class Purpose : std::uint32_t {
  speckle = 1,
  channel_noise = 2,
  empirical_sample = 3,
  sampler = 4,
  test = 99,
};

constexpr std::uint64_t stream_id(Purpose purpose, std::uint64_t a = 0, std::uint64_t b = 0) {
  return mix64(mix64(mix64(static_cast<std::uint64_t>(purpose)) ^ a) ^ b);
}

/// Indexed standard-normal sequence keyed by (seed, stream). Element i is a
/// fixed function of (seed, stream, i): two normals per Philox block via
/// Box-Muller on 53-bit uniforms.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  double operator()(std::uint64_t index) const {
    const auto pair = pair_at(index >> 1);
    return (index & 1u) ? pair[1] : pair[0];
  }

  void fill(std::span<double> out, std::uint64_t offset = 0) const {
    std::uint64_t i = offset;
    std::size_t k = 0;
    if (i & 1u && k < out.size()) out[k++] = (*this)(i++);
    for (; k + 1 < out.size(); k += 2, i += 2) {
      const auto pair = pair_at(i >> 1);
      out[k] = pair[0];
      out[k + 1] = pair[1];
    }
    if (k < out.size()) out[k] = (*this)(i);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t index) const {
    const auto r = raw(index >> 1);
    const std::uint64_t bits = (index & 1u) ? (std::uint64_t{r[2]} << 32 | r[3])
                                            : (std::uint64_t{r[0]} << 32 | r[1]);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  Philox4x32::Counter raw(std::uint64_t block) const {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                                  static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    return Philox4x32::block(ctr, key);
  }

  std::array<double, 2> pair_at(std::uint64_t block) const {
    const auto r = raw(block);
    const std::uint64_t a = std::uint64_t{r[0]} << 32 | r[1];
    const std::uint64_t b = std::uint64_t{r[2]} << 32 | r[3];
    // 1 - u keeps the log argument in (0, 1]
    const double u1 = 1.0 - static_cast<double>(a >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace usvar::random
