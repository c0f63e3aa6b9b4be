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

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "usvar/core/envelope.hpp"
#include "usvar/core/types.hpp"
#include "usvar/metrics/region.hpp"

namespace usvar::metrics {

inline constexpr std::size_t kDefaultGcnrBins = 256;

/// Generalized contrast-to-noise ratio: 1 - sum_k min(h_in(k), h_out(k)) with
/// both histograms normalized and sharing bins over the pooled value range.
inline double gcnr(std::span<const double> inside, std::span<const double> outside,
                   std::size_t bins = kDefaultGcnrBins) {
  if (inside.empty() || outside.empty()) throw ConfigError("gCNR needs two non-empty regions");
  if (bins < 2) throw ConfigError("gCNR needs at least 2 bins");
  const auto [lo_in, hi_in] = std::minmax_element(inside.begin(), inside.end());
  const auto [lo_out, hi_out] = std::minmax_element(outside.begin(), outside.end());
  const double lo = std::min(*lo_in, *lo_out);
  const double hi = std::max(*hi_in, *hi_out);
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DataError("gCNR input contains non-finite values");
  if (!(hi > lo)) return 0.0;

  const double scale = static_cast<double>(bins) / (hi - lo);
  auto histogram = [&](std::span<const double> values) {
    std::vector<double> h(bins, 0.0);
    for (double v : values) {
      auto k = static_cast<std::size_t>((v - lo) * scale);
      h[std::min(k, bins - 1)] += 1.0;
    }
    for (auto& x : h) x /= static_cast<double>(values.size());
    return h;
  };
  const auto h_in = histogram(inside);
  const auto h_out = histogram(outside);
  double overlap = 0.0;
  for (std::size_t k = 0; k < bins; ++k) overlap += std::min(h_in[k], h_out[k]);
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

enum class ContrastDomain { linear, decibel };

inline ContrastDomain parse_domain(const std::string& s) {
  if (s == "linear") return ContrastDomain::linear;
  if (s == "db" || s == "decibel") return ContrastDomain::decibel;
  throw ConfigError("unknown gCNR domain '" + s + "' (expected linear|db)");
}

inline const char* to_string(ContrastDomain d) { return d == ContrastDomain::linear ? "linear" : "db"; }

inline double gcnr(const RfImage& envelope, const BoolMatrix& inside, const BoolMatrix& outside,
                   std::size_t bins = kDefaultGcnrBins, ContrastDomain domain = ContrastDomain::linear) {
  const Matrix& img = domain == ContrastDomain::linear ? envelope.values : log_compress(envelope, 300.0).values_db;
  const auto a = masked_values(img, inside);
  const auto b = masked_values(img, outside);
  return gcnr(a, b, bins);
}

/// Mean over unbiased standard deviation of the region's values.
inline double snr(std::span<const double> values) {
  if (values.empty()) throw ConfigError("SNR region is empty");
  if (values.size() < 2) throw DegenerateInputError("SNR needs at least 2 pixels");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) throw DegenerateInputError("SNR region is constant");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  if (!(sd > 0.0)) throw DegenerateInputError("SNR region has zero variance");
  return mean / sd;
}

inline double snr(const RfImage& envelope, const BoolMatrix& region) {
  const auto v = masked_values(envelope.values, region);
  return snr(v);
}

}  // namespace usvar::metrics
