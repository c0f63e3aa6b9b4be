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

#include <cmath>
#include <span>
#include <vector>

#include "usvar/beamform/config.hpp"
#include "usvar/beamform/delays.hpp"
#include "usvar/core/parallel.hpp"
#include "usvar/core/types.hpp"

namespace usvar::beamform {

/// Per-pixel delayed channel samples, [Ne x Np]; rows in element order.
struct DelayedDataMatrix {
  Matrix y;

  Eigen::Index elements() const { return y.rows(); }
  Eigen::Index taps() const { return y.cols(); }
  Eigen::Index center_tap() const { return (y.cols() - 1) / 2; }
};

/// Linear interpolation of one channel at time t. Reads outside the
/// recorded span return zero.
inline double sample_at(const ChannelData& data, Eigen::Index element, double t) {
  const double f = (t - data.start_time) * data.geometry.sampling_frequency;
  const auto last = static_cast<double>(data.samples.rows() - 1);
  if (!(f >= 0.0) || f > last) return 0.0;
  const double base = std::floor(f);
  const auto i0 = static_cast<Eigen::Index>(base);
  const double frac = f - base;
  const double s0 = data.samples(i0, element);
  if (frac == 0.0) return s0;
  return s0 + frac * (data.samples(i0 + 1, element) - s0);
}

/// Delayed samples of elements [first, first + count) into a [count x taps]
/// matrix; `delays` is indexed by absolute element number.
inline DelayedDataMatrix extract_delayed_range(const ChannelData& data, std::span<const double> delays,
                                               std::size_t first, std::size_t count, std::size_t taps) {
  const auto np = static_cast<Eigen::Index>(taps);
  DelayedDataMatrix out{Matrix::Zero(static_cast<Eigen::Index>(count), np)};
  const double dt = 1.0 / data.geometry.sampling_frequency;
  const double center = 0.5 * static_cast<double>(np - 1);
  for (std::size_t r = 0; r < count; ++r) {
    const std::size_t e = first + r;
    for (Eigen::Index k = 0; k < np; ++k) {
      out.y(static_cast<Eigen::Index>(r), k) =
          sample_at(data, static_cast<Eigen::Index>(e), delays[e] + (static_cast<double>(k) - center) * dt);
    }
  }
  return out;
}

/// y(e, k) = channel e at delay(e) + (k - (Np - 1) / 2) / fs; elements with
/// mask[e] == false stay zero. An empty mask keeps every element.
inline DelayedDataMatrix extract_delayed(const ChannelData& data, std::span<const double> delays,
                                         const std::vector<bool>& mask = {}, std::size_t taps = 1) {
  auto out = extract_delayed_range(data, delays, 0, delays.size(), taps);
  if (!mask.empty()) {
    for (std::size_t e = 0; e < delays.size(); ++e) {
      if (!mask[e]) out.y.row(static_cast<Eigen::Index>(e)).setZero();
    }
  }
  return out;
}

/// Delay-and-sum: pixel = sum_e a_e y(e, center tap).
inline RfImage das(const ChannelData& data, const ImagingGrid& grid, const BeamformerConfig& config,
                   unsigned threads = 1) {
  grid.validate();
  data.geometry.validate();
  check_angle(data.transmit_angle);
  require_finite(data.samples, "channel data");
  if (static_cast<std::size_t>(data.samples.cols()) != data.geometry.element_count()) {
    throw DataError("channel data columns do not match the probe element count");
  }
  const auto apod = config.resolved_apodization(Method::das);
  const std::size_t ne = data.geometry.element_count();

  RfImage image{Matrix::Zero(static_cast<Eigen::Index>(grid.nz()), static_cast<Eigen::Index>(grid.nx())), grid};
  parallel_for(grid.nx(), threads, [&](std::size_t ix) {
    std::vector<double> delays(ne);
    const double x = grid.lateral[ix];
    for (std::size_t iz = 0; iz < grid.nz(); ++iz) {
      const double z = grid.axial[iz];
      pixel_delays(x, z, data.geometry, data.transmit_angle, delays);
      const auto weights = apodization_weights(x, z, data.geometry, config.f_number, apod);
      double acc = 0.0;
      for (std::size_t e = 0; e < ne; ++e) {
        if (weights[e] != 0.0) acc += weights[e] * sample_at(data, static_cast<Eigen::Index>(e), delays[e]);
      }
      image.values(static_cast<Eigen::Index>(iz), static_cast<Eigen::Index>(ix)) = acc;
    }
  });
  return image;
}

}  // namespace usvar::beamform
