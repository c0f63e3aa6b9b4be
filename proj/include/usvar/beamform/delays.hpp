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
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "usvar/beamform/config.hpp"
#include "usvar/core/types.hpp"

namespace usvar::beamform {

/// Round-trip plane-wave delays for every (pixel, element), seconds.
class DelayTable {
 public:
  DelayTable(std::size_t nz, std::size_t nx, std::size_t ne) : nz_(nz), nx_(nx), ne_(ne), data_(nz * nx * ne) {}

  double& operator()(std::size_t iz, std::size_t ix, std::size_t e) { return data_[index(iz, ix) + e]; }
  double operator()(std::size_t iz, std::size_t ix, std::size_t e) const { return data_[index(iz, ix) + e]; }

  std::span<const double> pixel(std::size_t iz, std::size_t ix) const { return {data_.data() + index(iz, ix), ne_}; }
  std::span<double> pixel(std::size_t iz, std::size_t ix) { return {data_.data() + index(iz, ix), ne_}; }

  std::size_t nz() const { return nz_; }
  std::size_t nx() const { return nx_; }
  std::size_t elements() const { return ne_; }

 private:
  std::size_t index(std::size_t iz, std::size_t ix) const { return (ix * nz_ + iz) * ne_; }
  std::size_t nz_, nx_, ne_;
  std::vector<double> data_;
};

inline void check_angle(double transmit_angle) {
  if (!(std::abs(transmit_angle) < std::numbers::pi / 2)) {
    throw ConfigError("transmit angle must be in (-pi/2, pi/2)");
  }
}

/// delay(p, e) = (z cos(theta) + x sin(theta)) / c + |p - e| / c for one pixel.
inline void pixel_delays(double x, double z, const ProbeGeometry& geometry, double transmit_angle,
                         std::span<double> out) {
  const double c = geometry.sound_speed;
  const double tx = (z * std::cos(transmit_angle) + x * std::sin(transmit_angle)) / c;
  for (std::size_t e = 0; e < out.size(); ++e) {
    const double dx = x - geometry.element_positions[e];
    out[e] = tx + std::sqrt(dx * dx + z * z) / c;
  }
}

inline DelayTable compute_delays(const ImagingGrid& grid, const ProbeGeometry& geometry, double transmit_angle) {
  check_angle(transmit_angle);
  DelayTable table(grid.nz(), grid.nx(), geometry.element_count());
  for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
    for (std::size_t iz = 0; iz < grid.nz(); ++iz) {
      pixel_delays(grid.lateral[ix], grid.axial[iz], geometry, transmit_angle, table.pixel(iz, ix));
    }
  }
  return table;
}

/// Contiguous range of receive elements used for one pixel.
struct Aperture {
  std::size_t first = 0;
  std::size_t count = 0;  // >= 1 for any valid geometry
};

/// Expanding receive aperture of width z / f_number centered on the pixel.
/// At least the nearest element is always active; f_number = 0 keeps every element.
inline Aperture receive_aperture(double x, double z, const ProbeGeometry& geometry, double f_number) {
  const auto& pos = geometry.element_positions;
  if (f_number <= 0.0) return {0, pos.size()};
  const double half = 0.5 * z / f_number;
  std::size_t first = pos.size();
  std::size_t last = 0;
  std::size_t nearest = 0;
  for (std::size_t e = 0; e < pos.size(); ++e) {
    if (std::abs(pos[e] - x) < std::abs(pos[nearest] - x)) nearest = e;
    if (std::abs(pos[e] - x) <= half) {
      first = std::min(first, e);
      last = e;
    }
  }
  if (first == pos.size()) return {nearest, 1};
  return {first, last - first + 1};
}

/// Receive weights over the aperture (zero outside it).
inline std::vector<double> apodization_weights(double x, double z, const ProbeGeometry& geometry,
                                               double f_number, Apodization kind) {
  const auto ap = receive_aperture(x, z, geometry, f_number);
  std::vector<double> w(geometry.element_count(), 0.0);
  const auto& pos = geometry.element_positions;
  double width = 0.0;
  if (f_number > 0.0) {
    width = z / f_number;
  } else {
    width = pos.back() - pos.front() + (pos[1] - pos[0]);
  }
  for (std::size_t e = ap.first; e < ap.first + ap.count; ++e) {
    if (kind == Apodization::none || ap.count == 1 || width <= 0.0) {
      w[e] = 1.0;
    } else {
      const double r = (pos[e] - x) / width;
      w[e] = std::abs(r) <= 0.5 ? 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * r)) : 0.0;
    }
  }
  return w;
}

}  // namespace usvar::beamform
