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
#include <vector>

#include "usvar/beamform/config.hpp"
#include "usvar/beamform/das.hpp"
#include "usvar/beamform/delays.hpp"
#include "usvar/beamform/minimum_variance.hpp"
#include "usvar/core/parallel.hpp"
#include "usvar/core/types.hpp"

namespace usvar::beamform {

struct BeamformStats {
  std::size_t degenerate_pixels = 0;
};

/// Eigenspace-based minimum-variance image. For each pixel the delayed
/// snapshot is restricted to the f-number aperture; the subarray length is
/// clamped to the active element count. Pixels with an all-zero snapshot are 0.
inline RfImage ebmv_image(const ChannelData& data, const ImagingGrid& grid, const BeamformerConfig& config,
                          unsigned threads = 1, BeamformStats* stats = nullptr) {
  grid.validate();
  data.geometry.validate();
  check_angle(data.transmit_angle);
  require_finite(data.samples, "channel data");
  const std::size_t ne = data.geometry.element_count();
  if (static_cast<std::size_t>(data.samples.cols()) != ne) {
    throw DataError("channel data columns do not match the probe element count");
  }
  config.validate(ne);
  const std::size_t subarray = config.resolved_subarray(ne);

  RfImage image{Matrix::Zero(static_cast<Eigen::Index>(grid.nz()), static_cast<Eigen::Index>(grid.nx())), grid};
  std::vector<std::size_t> degenerate(grid.nx(), 0);
  parallel_for(grid.nx(), threads, [&](std::size_t ix) {
    std::vector<double> delays(ne);
    const double x = grid.lateral[ix];
    for (std::size_t iz = 0; iz < grid.nz(); ++iz) {
      const double z = grid.axial[iz];
      pixel_delays(x, z, data.geometry, data.transmit_angle, delays);
      const auto ap = receive_aperture(x, z, data.geometry, config.f_number);
      const auto snapshot = extract_delayed_range(data, delays, ap.first, ap.count, config.temporal_window);
      double value = 0.0;
      try {
        value = ebmv_pixel(snapshot, std::min(subarray, ap.count), config.loading_coefficient,
                           config.subspace_criterion);
      } catch (const DegenerateInputError&) {
        ++degenerate[ix];
      }
      image.values(static_cast<Eigen::Index>(iz), static_cast<Eigen::Index>(ix)) = value;
    }
  });
  if (stats) {
    stats->degenerate_pixels = 0;
    for (auto d : degenerate) stats->degenerate_pixels += d;
  }
  return image;
}

}  // namespace usvar::beamform
