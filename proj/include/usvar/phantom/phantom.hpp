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

#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "usvar/core/types.hpp"
#include "usvar/random/philox.hpp"

namespace usvar::phantom {

struct Circle {
  double center_x = 0.0;
  double center_z = 0.0;
  double radius = 0.0;
};

struct Rectangle {
  double x_min = 0.0;
  double x_max = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
};

using Shape = std::variant<Circle, Rectangle>;

inline bool contains(const Shape& shape, double x, double z) {
  return std::visit(
      [&](const auto& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Circle>) {
          const double dx = x - s.center_x;
          const double dz = z - s.center_z;
          return dx * dx + dz * dz <= s.radius * s.radius;
        } else {
          return x >= s.x_min && x <= s.x_max && z >= s.z_min && z <= s.z_max;
        }
      },
      shape);
}

/// Bounding box inside the grid extent (half a pixel of slack on each side).
inline bool inside_grid(const Shape& shape, const ImagingGrid& grid) {
  return std::visit(
      [&](const auto& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Circle>) {
          return s.radius > 0.0 && grid.contains(s.center_x - s.radius, s.center_z - s.radius) &&
                 grid.contains(s.center_x + s.radius, s.center_z + s.radius);
        } else {
          return s.x_max > s.x_min && s.z_max > s.z_min && grid.contains(s.x_min, s.z_min) &&
                 grid.contains(s.x_max, s.z_max);
        }
      },
      shape);
}

/// Echogenic region drawn onto a phantom. Label 0 is reserved for background.
struct Primitive {
  Shape shape;
  double level = 1.0;
  std::string name;
};

struct PhantomSpec {
  double background_level = 1.0;
  std::vector<Primitive> primitives;
};

/// Echogenicity map with per-pixel region labels (0 = background, k = k-th primitive).
struct Phantom {
  Matrix echo_map;
  Eigen::MatrixXi region_labels;
  ImagingGrid grid;
  std::vector<std::string> region_names;  // index = label
};

/// Rasterizes primitives in order; later primitives overwrite earlier ones.
inline Phantom make_phantom(const PhantomSpec& spec, const ImagingGrid& grid) {
  grid.validate();
  if (!(spec.background_level >= 0.0)) throw ConfigError("background level must be non-negative");
  for (std::size_t k = 0; k < spec.primitives.size(); ++k) {
    const auto& prim = spec.primitives[k];
    if (!(prim.level >= 0.0)) throw ConfigError("primitive level must be non-negative");
    if (!inside_grid(prim.shape, grid)) {
      throw ConfigError("primitive " + std::to_string(k) + " lies outside the phantom grid");
    }
  }

  const auto nz = static_cast<Eigen::Index>(grid.nz());
  const auto nx = static_cast<Eigen::Index>(grid.nx());
  Phantom ph{Matrix::Constant(nz, nx, spec.background_level), Eigen::MatrixXi::Zero(nz, nx), grid, {"background"}};
  for (std::size_t k = 0; k < spec.primitives.size(); ++k) {
    const auto& prim = spec.primitives[k];
    ph.region_names.push_back(prim.name.empty() ? "region" + std::to_string(k + 1) : prim.name);
    for (Eigen::Index j = 0; j < nx; ++j) {
      const double x = grid.lateral[static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i < nz; ++i) {
        if (contains(prim.shape, x, grid.axial[static_cast<std::size_t>(i)])) {
          ph.echo_map(i, j) = prim.level;
          ph.region_labels(i, j) = static_cast<int>(k + 1);
        }
      }
    }
  }
  return ph;
}

/// i.i.d. standard normal field, reproducible from its seed.
struct SpeckleField {
  Matrix m;
  std::uint64_t seed = 0;
};

inline SpeckleField draw_speckle(const ImagingGrid& grid, std::uint64_t seed) {
  SpeckleField field{Matrix(static_cast<Eigen::Index>(grid.nz()), static_cast<Eigen::Index>(grid.nx())), seed};
  const random::NormalStream normal(seed, random::stream_id(random::Purpose::speckle));
  // column-major storage, so the flat index is the draw index
  normal.fill(std::span<double>(field.m.data(), static_cast<std::size_t>(field.m.size())));
  return field;
}

struct TissueReflectivity {
  Matrix o;
  ImagingGrid grid;
};

/// Multiplicative speckle model: o = m (.) p.
inline TissueReflectivity reflectivity(const Phantom& phantom, const SpeckleField& speckle) {
  if (speckle.m.rows() != phantom.echo_map.rows() || speckle.m.cols() != phantom.echo_map.cols()) {
    throw DataError("speckle field and phantom grids differ");
  }
  return {speckle.m.cwiseProduct(phantom.echo_map), phantom.grid};
}

inline TissueReflectivity draw_reflectivity(const Phantom& phantom, std::uint64_t seed) {
  return reflectivity(phantom, draw_speckle(phantom.grid, seed));
}

/// One draw of the empirical diffusion-output model
///   o_c = m (.) p + sqrt(p) (.) G_c,
/// where m belongs to the measurement and G_c is fresh per sample_seed.
inline RfImage empirical_sample(const Phantom& phantom, const SpeckleField& speckle, std::uint64_t sample_seed) {
  const auto base = reflectivity(phantom, speckle);
  Matrix g(base.o.rows(), base.o.cols());
  const random::NormalStream normal(sample_seed, random::stream_id(random::Purpose::empirical_sample));
  normal.fill(std::span<double>(g.data(), static_cast<std::size_t>(g.size())));
  return {base.o + phantom.echo_map.cwiseSqrt().cwiseProduct(g), phantom.grid};
}

}  // namespace usvar::phantom
