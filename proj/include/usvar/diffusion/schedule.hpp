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
#include <cstddef>
#include <vector>

#include "usvar/core/error.hpp"

namespace usvar::diffusion {

/// Noise levels visited by the sampler, strictly decreasing and positive.
struct NoiseSchedule {
  std::vector<double> sigmas;

  std::size_t steps() const { return sigmas.size(); }

  void validate() const {
    if (sigmas.empty()) throw ConfigError("noise schedule is empty");
    for (std::size_t t = 0; t < sigmas.size(); ++t) {
      if (!(sigmas[t] > 0.0) || !std::isfinite(sigmas[t])) throw ConfigError("noise levels must be positive and finite");
      if (t > 0 && !(sigmas[t] < sigmas[t - 1])) throw ConfigError("noise levels must be strictly decreasing");
    }
  }
};

/// Geometric ladder sigma_t = sigma_max (sigma_min / sigma_max)^((t-1)/(T-1)).
inline NoiseSchedule make_schedule(std::size_t steps, double sigma_max, double sigma_min) {
  if (steps < 2) throw ConfigError("schedule needs at least 2 steps");
  if (!(sigma_min > 0.0) || !(sigma_max > sigma_min) || !std::isfinite(sigma_max)) {
    throw ConfigError("schedule requires sigma_max > sigma_min > 0");
  }
  NoiseSchedule s;
  s.sigmas.resize(steps);
  const double ratio = sigma_min / sigma_max;
  const double last = static_cast<double>(steps - 1);
  for (std::size_t t = 0; t < steps; ++t) {
    s.sigmas[t] = sigma_max * std::pow(ratio, static_cast<double>(t) / last);
  }
  s.sigmas.front() = sigma_max;
  s.sigmas.back() = sigma_min;
  return s;
}

}  // namespace usvar::diffusion
