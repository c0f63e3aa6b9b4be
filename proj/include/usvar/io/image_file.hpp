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

#include <filesystem>
#include <string>

#include "usvar/core/types.hpp"
#include "usvar/io/tensor_file.hpp"

namespace usvar::io {

// Tensor + sidecar conventions for the pipeline's file products.
//   channel data: [Nt x Ne] tensor; sidecar kind=channel, sampling_frequency,
//                 center_frequency, sound_speed, transmit_angle, start_time,
//                 element_count, element_position_<i>
//   images:       [Nz x Nx] tensor; sidecar kind=<label>, x_origin, x_spacing,
//                 nx, z_origin, z_spacing, nz

inline Metadata grid_metadata(const ImagingGrid& g, const std::string& kind) {
  return {{"kind", kind},
          {"x_origin", format_double(g.lateral.origin)},
          {"x_spacing", format_double(g.lateral.spacing)},
          {"nx", std::to_string(g.lateral.count)},
          {"z_origin", format_double(g.axial.origin)},
          {"z_spacing", format_double(g.axial.spacing)},
          {"nz", std::to_string(g.axial.count)}};
}

inline ImagingGrid grid_from_metadata(const Metadata& meta, const std::string& origin) {
  ImagingGrid g{{get_double(meta, "x_origin", origin), get_double(meta, "x_spacing", origin),
                 static_cast<std::size_t>(get_double(meta, "nx", origin))},
                {get_double(meta, "z_origin", origin), get_double(meta, "z_spacing", origin),
                 static_cast<std::size_t>(get_double(meta, "nz", origin))}};
  try {
    g.validate();
  } catch (const ConfigError& e) {
    throw DataError(origin + ": " + e.what());
  }
  return g;
}

inline void write_image(const std::filesystem::path& path, const RfImage& img, const std::string& kind) {
  write_matrix(path, img.values);
  write_metadata(sidecar_path(path), grid_metadata(img.grid, kind));
}

inline RfImage read_image(const std::filesystem::path& path) {
  RfImage img{read_matrix(path), {}};
  img.grid = grid_from_metadata(read_metadata(sidecar_path(path)), path.string());
  if (img.grid.nz() != static_cast<std::size_t>(img.values.rows()) ||
      img.grid.nx() != static_cast<std::size_t>(img.values.cols())) {
    throw DataError(path.string() + ": tensor shape does not match its grid metadata");
  }
  return img;
}

inline void write_channel_data(const std::filesystem::path& path, const ChannelData& data) {
  write_matrix(path, data.samples);
  const auto& g = data.geometry;
  Metadata meta{{"kind", "channel"},
                {"sampling_frequency", format_double(g.sampling_frequency)},
                {"center_frequency", format_double(g.center_frequency)},
                {"sound_speed", format_double(g.sound_speed)},
                {"transmit_angle", format_double(data.transmit_angle)},
                {"start_time", format_double(data.start_time)},
                {"element_count", std::to_string(g.element_count())}};
  for (std::size_t e = 0; e < g.element_count(); ++e) {
    meta["element_position_" + std::to_string(e)] = format_double(g.element_positions[e]);
  }
  write_metadata(sidecar_path(path), meta);
}

inline ChannelData read_channel_data(const std::filesystem::path& path) {
  const std::string origin = path.string();
  ChannelData data;
  data.samples = read_matrix(path);
  const auto meta = read_metadata(sidecar_path(path));
  auto& g = data.geometry;
  g.sampling_frequency = get_double(meta, "sampling_frequency", origin);
  g.center_frequency = get_double(meta, "center_frequency", origin);
  g.sound_speed = get_double(meta, "sound_speed", origin);
  data.transmit_angle = get_double(meta, "transmit_angle", origin);
  data.start_time = get_double(meta, "start_time", origin);
  const auto n = static_cast<std::size_t>(get_double(meta, "element_count", origin));
  for (std::size_t e = 0; e < n; ++e) {
    g.element_positions.push_back(get_double(meta, "element_position_" + std::to_string(e), origin));
  }
  if (static_cast<std::size_t>(data.samples.cols()) != n) {
    throw DataError(origin + ": channel tensor has " + std::to_string(data.samples.cols()) + " columns but " +
                    std::to_string(n) + " elements");
  }
  try {
    g.validate();
  } catch (const ConfigError& e) {
    throw DataError(origin + ": " + e.what());
  }
  return data;
}

}  // namespace usvar::io
