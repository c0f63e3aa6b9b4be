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
#include <vector>

#include "usvar/core/types.hpp"
#include "usvar/diffusion/sampler.hpp"

namespace usvar::diffusion {

namespace detail {
inline void check_shapes(const SampleSet& set) {
  for (const auto& s : set.samples) {
    if (s.rows() != set.samples.front().rows() || s.cols() != set.samples.front().cols()) {
      throw DataError("samples in a set must share one shape");
    }
  }
}
}  // namespace detail

/// Pixel-wise unbiased sample variance (divisor C - 1).
inline RfImage variance_image(const SampleSet& set) {
  if (set.size() < 2) throw ConfigError("variance needs at least 2 samples");
  detail::check_shapes(set);
  const double c = static_cast<double>(set.size());
  // deviations from the first sample: identical samples give exactly zero
  const Matrix& ref = set.samples[0];
  Matrix mean = Matrix::Zero(ref.rows(), ref.cols());
  for (const auto& s : set.samples) mean += s - ref;
  mean /= c;
  Matrix acc = Matrix::Zero(ref.rows(), ref.cols());
  for (const auto& s : set.samples) acc.array() += (s - ref - mean).array().square();
  return {acc / (c - 1.0), set.grid};
}

/// Pixel-wise median; even counts average the two middle values.
inline RfImage median_image(const SampleSet& set) {
  if (set.size() < 1) throw ConfigError("median needs at least 1 sample");
  detail::check_shapes(set);
  const auto rows = set.samples[0].rows();
  const auto cols = set.samples[0].cols();
  const std::size_t n = set.size();
  Matrix out(rows, cols);
  std::vector<double> v(n);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (std::size_t c = 0; c < n; ++c) v[c] = set.samples[c](i, j);
      const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
      std::nth_element(v.begin(), mid, v.end());
      double m = *mid;
      if (n % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
      out(i, j) = m;
    }
  }
  return {out, set.grid};
}

}  // namespace usvar::diffusion
