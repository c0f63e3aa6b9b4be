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
#include <filesystem>
#include <string>

#include "usvar/core/types.hpp"
#include "usvar/io/tensor_file.hpp"

namespace usvar::io {

/// Binary P5 greymap, 8-bit, row-major (rows = axial). Decibels map linearly:
/// -dynamic_range -> 0, 0 dB -> 255.
inline std::string encode_pgm(const BModeImage& img) {
  const auto h = img.values_db.rows();
  const auto w = img.values_db.cols();
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(w * h));
  for (Eigen::Index i = 0; i < h; ++i) {
    for (Eigen::Index j = 0; j < w; ++j) {
      const double level = (img.values_db(i, j) + img.dynamic_range) / img.dynamic_range;
      const double clamped = std::clamp(level, 0.0, 1.0);
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(clamped * 255.0))));
    }
  }
  return out;
}

inline void write_pgm(const std::filesystem::path& path, const BModeImage& img) { write_bytes(path, encode_pgm(img)); }

}  // namespace usvar::io
