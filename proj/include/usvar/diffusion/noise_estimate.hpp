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

namespace usvar::diffusion {

/// Heuristic additive-noise level: median absolute value of the orthonormal
/// Haar diagonal detail band, divided by 0.6745 (the MAD of a unit normal).
/// Reliable when the image content is smooth at the 2x2-pixel scale.
inline double estimate_noise_std(const Matrix& x) {
  const Eigen::Index hz = x.rows() / 2;
  const Eigen::Index hx = x.cols() / 2;
  if (hz < 1 || hx < 1) throw ConfigError("noise estimate needs an image of at least 2x2 pixels");
  std::vector<double> detail;
  detail.reserve(static_cast<std::size_t>(hz * hx));
  for (Eigen::Index j = 0; j < hx; ++j) {
    for (Eigen::Index i = 0; i < hz; ++i) {
      const double a = x(2 * i, 2 * j);
      const double b = x(2 * i, 2 * j + 1);
      const double c = x(2 * i + 1, 2 * j);
      const double d = x(2 * i + 1, 2 * j + 1);
      detail.push_back(std::abs(a - b - c + d) * 0.5);
    }
  }
  const auto mid = detail.begin() + static_cast<std::ptrdiff_t>(detail.size() / 2);
  std::nth_element(detail.begin(), mid, detail.end());
  return *mid / 0.6744897501960817;
}

}  // namespace usvar::diffusion
