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
#include <cstdint>
#include <numbers>
#include <vector>

#include "usvar/core/parallel.hpp"
#include "usvar/core/types.hpp"
#include "usvar/phantom/phantom.hpp"
#include "usvar/random/philox.hpp"

namespace usvar::phantom {

struct Scatterer {
  double x = 0.0;  // lateral, m
  double z = 0.0;  // axial, m
  double amplitude = 0.0;
};

using ScattererCloud = std::vector<Scatterer>;

/// One scatterer per phantom pixel carrying o(i, j); zero-amplitude pixels are skipped.
inline ScattererCloud cloud_from_reflectivity(const TissueReflectivity& tissue) {
  ScattererCloud cloud;
  for (Eigen::Index j = 0; j < tissue.o.cols(); ++j) {
    for (Eigen::Index i = 0; i < tissue.o.rows(); ++i) {
      const double a = tissue.o(i, j);
      if (a != 0.0) {
        cloud.push_back({tissue.grid.lateral[static_cast<std::size_t>(j)],
                         tissue.grid.axial[static_cast<std::size_t>(i)], a});
      }
    }
  }
  return cloud;
}

/// Gaussian-windowed sinusoid at the probe center frequency. The fractional
/// bandwidth is measured at -6 dB of the amplitude spectrum.
struct Pulse {
  double center_frequency = 5.0e6;
  double fractional_bandwidth = 0.6;
  double cutoff_sigmas = 6.0;  // support is +-cutoff_sigmas * temporal std

  double temporal_sigma() const {
    const double spectral_sigma = fractional_bandwidth * center_frequency / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    return 1.0 / (2.0 * std::numbers::pi * spectral_sigma);
  }
  double half_support() const { return cutoff_sigmas * temporal_sigma(); }

  double operator()(double t) const {
    const double s = temporal_sigma();
    if (std::abs(t) > cutoff_sigmas * s) return 0.0;
    return std::exp(-0.5 * t * t / (s * s)) * std::cos(2.0 * std::numbers::pi * center_frequency * t);
  }

  void validate() const {
    if (!(center_frequency > 0.0)) throw ConfigError("pulse center frequency must be positive");
    if (!(fractional_bandwidth > 0.0)) throw ConfigError("fractional bandwidth must be positive");
    if (!(cutoff_sigmas > 0.0)) throw ConfigError("pulse cutoff must be positive");
  }
};

struct TimeAxis {
  double start_time = 0.0;
  std::size_t sample_count = 0;
};

/// Transmit delay of a plane wave at angle theta reaching (x, z).
inline double transmit_delay(double x, double z, double angle, double c) {
  return (z * std::cos(angle) + x * std::sin(angle)) / c;
}

inline double receive_delay(double x, double z, double element_x, double c) {
  return std::hypot(x - element_x, z) / c;
}

/// Time span covering every echo from points inside `grid`, starting at t = 0.
inline TimeAxis time_axis_for(const ImagingGrid& grid, const ProbeGeometry& geometry, double angle,
                              const Pulse& pulse) {
  const double c = geometry.sound_speed;
  double latest = 0.0;
  for (double x : {grid.lateral.origin, grid.lateral.back()}) {
    const double z = grid.axial.back();
    const double tx = transmit_delay(x, z, angle, c);
    for (double ex : {geometry.element_positions.front(), geometry.element_positions.back()}) {
      latest = std::max(latest, tx + receive_delay(x, z, ex, c));
    }
  }
  latest += pulse.half_support();
  return {0.0, static_cast<std::size_t>(std::ceil(latest * geometry.sampling_frequency)) + 1};
}

/// Linear point-scatterer model of a single plane-wave acquisition:
///   s_e(t) = sum_k a_k pulse(t - tau_tx(k) - tau_rx(k, e)) + noise_std * n_e(t).
/// No directivity, attenuation, or multiple scattering.
inline ChannelData simulate_channel_data(const ScattererCloud& cloud, const ProbeGeometry& geometry,
                                         double transmit_angle, const Pulse& pulse, const TimeAxis& time,
                                         double noise_std, std::uint64_t seed, unsigned threads = 1) {
  geometry.validate();
  pulse.validate();
  if (!(std::abs(transmit_angle) < std::numbers::pi / 2)) throw ConfigError("transmit angle must be in (-pi/2, pi/2)");
  if (!(noise_std >= 0.0)) throw ConfigError("noise standard deviation must be non-negative");
  if (time.sample_count < 1) throw ConfigError("time axis needs at least one sample");

  const auto nt = static_cast<Eigen::Index>(time.sample_count);
  const auto ne = static_cast<Eigen::Index>(geometry.element_count());
  ChannelData data{Matrix::Zero(nt, ne), transmit_angle, time.start_time, geometry};

  const double c = geometry.sound_speed;
  const double fs = geometry.sampling_frequency;
  const double support = pulse.half_support();

  std::vector<double> tx(cloud.size());
  for (std::size_t k = 0; k < cloud.size(); ++k) tx[k] = transmit_delay(cloud[k].x, cloud[k].z, transmit_angle, c);

  // each element owns one output column; scatterers accumulate in cloud order
  parallel_for(static_cast<std::size_t>(ne), threads, [&](std::size_t e) {
    const double ex = geometry.element_positions[e];
    auto column = data.samples.col(static_cast<Eigen::Index>(e));
    for (std::size_t k = 0; k < cloud.size(); ++k) {
      const double arrival = tx[k] + receive_delay(cloud[k].x, cloud[k].z, ex, c);
      const double first = std::ceil((arrival - support - time.start_time) * fs);
      const double last = std::floor((arrival + support - time.start_time) * fs);
      const auto lo = static_cast<Eigen::Index>(std::max(first, 0.0));
      const auto hi = static_cast<Eigen::Index>(std::min(last, static_cast<double>(nt - 1)));
      for (Eigen::Index n = lo; n <= hi; ++n) {
        const double t = time.start_time + static_cast<double>(n) / fs;
        column(n) += cloud[k].amplitude * pulse(t - arrival);
      }
    }
    if (noise_std > 0.0) {
      const random::NormalStream noise(seed, random::stream_id(random::Purpose::channel_noise, e));
      for (Eigen::Index n = 0; n < nt; ++n) column(n) += noise_std * noise(static_cast<std::uint64_t>(n));
    }
  });
  return data;
}

}  // namespace usvar::phantom
