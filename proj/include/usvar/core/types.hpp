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

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "usvar/core/error.hpp"

namespace usvar {

/// Dense real matrix used for channel data and images. Images are [Nz x Nx]
/// (rows axial, columns lateral); channel data is [Nt x Ne].
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultSoundSpeed = 1540.0;
inline constexpr double kDefaultDynamicRange = 60.0;

/// Linear-array probe description. Elements sit on the z = 0 line.
struct ProbeGeometry {
  std::vector<double> element_positions;  // lateral, meters
  double center_frequency = 5.0e6;        // Hz
  double sampling_frequency = 40.0e6;     // Hz
  double sound_speed = kDefaultSoundSpeed;

  std::size_t element_count() const { return element_positions.size(); }
  double wavelength() const { return sound_speed / center_frequency; }

  /// Evenly spaced array centered on x = 0.
  static ProbeGeometry linear(std::size_t elements, double pitch, double center_frequency,
                              double sampling_frequency, double sound_speed = kDefaultSoundSpeed) {
    ProbeGeometry g;
    g.center_frequency = center_frequency;
    g.sampling_frequency = sampling_frequency;
    g.sound_speed = sound_speed;
    g.element_positions.resize(elements);
    const double half = 0.5 * (static_cast<double>(elements) - 1.0);
    for (std::size_t e = 0; e < elements; ++e) {
      g.element_positions[e] = (static_cast<double>(e) - half) * pitch;
    }
    g.validate();
    return g;
  }

  void validate() const {
    if (element_positions.size() < 2) throw ConfigError("probe needs at least 2 elements");
    for (std::size_t e = 1; e < element_positions.size(); ++e) {
      if (!(element_positions[e] > element_positions[e - 1])) {
        throw ConfigError("element positions must be strictly increasing");
      }
    }
    if (!(center_frequency > 0.0) || !(sampling_frequency > 0.0)) {
      throw ConfigError("probe frequencies must be positive");
    }
    if (!(sound_speed > 0.0)) throw ConfigError("sound speed must be positive");
  }
};

/// Uniform 1-D axis: origin + i * spacing for i in [0, count).
struct Axis {
  double origin = 0.0;
  double spacing = 1.0;
  std::size_t count = 1;

  double operator[](std::size_t i) const { return origin + static_cast<double>(i) * spacing; }
  double back() const { return (*this)[count - 1]; }

  static Axis span(double first, double last, std::size_t count) {
    if (count == 1) return Axis{first, 1.0, 1};
    return Axis{first, (last - first) / static_cast<double>(count - 1), count};
  }
};

/// Pixel grid of an image. Lateral axis indexes columns, axial axis rows.
struct ImagingGrid {
  Axis lateral;
  Axis axial;

  std::size_t nx() const { return lateral.count; }
  std::size_t nz() const { return axial.count; }

  void validate() const {
    if (lateral.count < 1 || axial.count < 1) throw ConfigError("grid must have at least one pixel");
    if (!(lateral.spacing > 0.0) || !(axial.spacing > 0.0)) {
      throw ConfigError("grid spacing must be positive");
    }
  }

  bool contains(double x, double z) const {
    const double hx = 0.5 * lateral.spacing;
    const double hz = 0.5 * axial.spacing;
    return x >= lateral.origin - hx && x <= lateral.back() + hx && z >= axial.origin - hz &&
           z <= axial.back() + hz;
  }

  bool operator==(const ImagingGrid& o) const {
    return lateral.origin == o.lateral.origin && lateral.spacing == o.lateral.spacing &&
           lateral.count == o.lateral.count && axial.origin == o.axial.origin &&
           axial.spacing == o.axial.spacing && axial.count == o.axial.count;
  }
};

/// Raw element signals, [Nt x Ne], sample k taken at start_time + k / fs.
struct ChannelData {
  Matrix samples;
  double transmit_angle = 0.0;
  double start_time = 0.0;
  ProbeGeometry geometry;

  std::size_t sample_count() const { return static_cast<std::size_t>(samples.rows()); }
};

/// Beamformed signed RF image, or any real image on a grid (envelopes, variance maps).
struct RfImage {
  Matrix values;
  ImagingGrid grid;
};

/// Log-compressed image in decibels, values in [-dynamic_range, 0].
struct BModeImage {
  Matrix values_db;
  double dynamic_range = kDefaultDynamicRange;
  ImagingGrid grid;
};

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw DataError(std::string(what) + " contains non-finite values");
}

}  // namespace usvar
