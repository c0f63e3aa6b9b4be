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
#include <vector>

#include "usvar/core/types.hpp"
#include "usvar/metrics/region.hpp"

namespace usvar::metrics {

enum class ProfileAxis { axial, lateral };

inline const char* to_string(ProfileAxis a) { return a == ProfileAxis::axial ? "axial" : "lateral"; }

/// Width, in samples, between the two half-maximum crossings of a 1-D profile
/// around sample `peak`. The peak height is refined by a 3-point parabola;
/// crossings are located by linear interpolation.
inline double half_max_width_samples(const std::vector<double>& profile, std::size_t peak) {
  const std::size_t n = profile.size();
  if (peak == 0 || peak + 1 >= n) throw NoPeakError("peak touches the profile boundary");
  const double left = profile[peak - 1];
  const double mid = profile[peak];
  const double right = profile[peak + 1];
  if (!(mid > left && mid > right)) throw NoPeakError("profile has no strict local maximum at the peak");

  const double curvature = left - 2.0 * mid + right;
  const double offset = 0.5 * (left - right) / curvature;
  const double height = mid - 0.25 * (left - right) * offset;
  const double half = 0.5 * height;

  double lo = -1.0;
  for (std::size_t k = peak; k-- > 0;) {
    if (profile[k] <= half) {
      lo = static_cast<double>(k) + (half - profile[k]) / (profile[k + 1] - profile[k]);
      break;
    }
  }
  double hi = -1.0;
  for (std::size_t k = peak + 1; k < n; ++k) {
    if (profile[k] <= half) {
      hi = static_cast<double>(k) - (half - profile[k]) / (profile[k - 1] - profile[k]);
      break;
    }
  }
  if (lo < 0.0 || hi < 0.0) throw NoPeakError("profile never drops to half maximum on one side");
  return hi - lo;
}

/// Full width at half maximum (meters) of the brightest pixel inside `region`,
/// measured along `axis` across the whole image.
inline double fwhm(const RfImage& envelope, const BoolMatrix& region, ProfileAxis axis) {
  require_finite(envelope.values, "envelope");
  const Matrix& v = envelope.values;
  if (v.rows() != region.rows() || v.cols() != region.cols()) throw DataError("mask and image shapes differ");

  Eigen::Index pi = -1;
  Eigen::Index pj = -1;
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (region(i, j) && (pi < 0 || v(i, j) > v(pi, pj))) {
        pi = i;
        pj = j;
      }
    }
  }
  if (pi < 0) throw ConfigError("FWHM region is empty");

  std::vector<double> profile;
  std::size_t peak = 0;
  double spacing = 0.0;
  if (axis == ProfileAxis::axial) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) profile.push_back(v(i, pj));
    peak = static_cast<std::size_t>(pi);
    spacing = envelope.grid.axial.spacing;
  } else {
    for (Eigen::Index j = 0; j < v.cols(); ++j) profile.push_back(v(pi, j));
    peak = static_cast<std::size_t>(pj);
    spacing = envelope.grid.lateral.spacing;
  }
  return half_max_width_samples(profile, peak) * spacing;
}

}  // namespace usvar::metrics
