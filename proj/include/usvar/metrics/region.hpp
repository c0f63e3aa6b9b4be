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

#include <string>
#include <variant>

#include "usvar/core/types.hpp"
#include "usvar/phantom/phantom.hpp"

namespace usvar::metrics {

/// Refers to the pixels carrying a given phantom label.
struct LabelRef {
  int label = 0;
};

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Evaluation region: a circle or rectangle in meters, or a phantom label.
struct RegionMask {
  std::variant<phantom::Circle, phantom::Rectangle, LabelRef> shape;
  std::string name;

  /// Pixels of `grid` inside the region. Geometric shapes must lie within the
  /// grid extent; label references need `labels` on the same grid.
  BoolMatrix resolve(const ImagingGrid& grid, const Eigen::MatrixXi* labels = nullptr) const {
    const auto nz = static_cast<Eigen::Index>(grid.nz());
    const auto nx = static_cast<Eigen::Index>(grid.nx());
    BoolMatrix mask = BoolMatrix::Constant(nz, nx, false);
    if (const auto* ref = std::get_if<LabelRef>(&shape)) {
      if (!labels || labels->rows() != nz || labels->cols() != nx) {
        throw ConfigError("region '" + name + "' refers to phantom labels that are not available on this grid");
      }
      mask = labels->array() == ref->label;
    } else {
      const phantom::Shape geometric = std::holds_alternative<phantom::Circle>(shape)
                                           ? phantom::Shape(std::get<phantom::Circle>(shape))
                                           : phantom::Shape(std::get<phantom::Rectangle>(shape));
      if (!phantom::inside_grid(geometric, grid)) throw ConfigError("region '" + name + "' lies off the image grid");
      for (Eigen::Index j = 0; j < nx; ++j) {
        for (Eigen::Index i = 0; i < nz; ++i) {
          mask(i, j) = phantom::contains(geometric, grid.lateral[static_cast<std::size_t>(j)],
                                         grid.axial[static_cast<std::size_t>(i)]);
        }
      }
    }
    if (!mask.any()) throw ConfigError("region '" + name + "' contains no pixels");
    return mask;
  }
};

inline std::vector<double> masked_values(const Matrix& img, const BoolMatrix& mask) {
  if (img.rows() != mask.rows() || img.cols() != mask.cols()) throw DataError("mask and image shapes differ");
  std::vector<double> v;
  for (Eigen::Index j = 0; j < img.cols(); ++j) {
    for (Eigen::Index i = 0; i < img.rows(); ++i) {
      if (mask(i, j)) v.push_back(img(i, j));
    }
  }
  return v;
}

}  // namespace usvar::metrics
