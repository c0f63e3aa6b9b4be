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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "usvar/core/parallel.hpp"
#include "usvar/core/types.hpp"
#include "usvar/diffusion/denoiser.hpp"
#include "usvar/diffusion/schedule.hpp"
#include "usvar/random/philox.hpp"

namespace usvar::diffusion {

/// How the sampler moves between noise levels below the measurement noise.
///   ancestral: bridge from the measurement at level gamma, then reverse
///              Gaussian steps x0 + (s'/s)^2 (x_t - x0) + s' sqrt(1 - (s'/s)^2) eps.
///              Conditional mean is exact for linear-Gaussian denoisers.
///   ddrm:      x0 + sqrt(1 - eta^2) s' (x - x0) / gamma + eta s' eps
///              (identity-operator DDRM update).
enum class Refinement { ancestral, ddrm };

inline Refinement parse_refinement(const std::string& s) {
  if (s == "ancestral") return Refinement::ancestral;
  if (s == "ddrm") return Refinement::ddrm;
  throw ConfigError("unknown refinement '" + s + "' (expected ancestral|ddrm)");
}

inline const char* to_string(Refinement r) { return r == Refinement::ancestral ? "ancestral" : "ddrm"; }

struct SamplerConfig {
  std::size_t sample_count = 10;
  NoiseSchedule schedule = make_schedule(50, 1.0, 0.002);
  double measurement_noise = 0.0;  // gamma, in normalized signal units
  double eta = 0.85;
  double eta_b = 1.0;
  std::uint64_t base_seed = 0;
  Refinement refinement = Refinement::ancestral;
  double sigma_floor = 1e-12;

  void validate() const {
    schedule.validate();
    if (!(measurement_noise >= 0.0) || !std::isfinite(measurement_noise)) {
      throw ConfigError("measurement noise must be finite and non-negative");
    }
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
    if (!(eta_b >= 0.0 && eta_b <= 1.0)) throw ConfigError("eta_b must lie in [0, 1]");
    if (sample_count < 1) throw ConfigError("sample count must be positive");
  }
};

inline std::uint64_t sampler_stream(std::size_t sample_index, std::size_t step) {
  return random::stream_id(random::Purpose::sampler, sample_index, step);
}

/// Requires max |x| <= 1 (normalized RF), with a small tolerance for float32 round trips.
inline void require_normalized(const Matrix& x) {
  require_finite(x, "measurement");
  if (x.size() > 0 && x.cwiseAbs().maxCoeff() > 1.0 + 1e-6) {
    throw ConfigError("measurement must be normalized to [-1, 1]");
  }
}

/// One conditional sampling run. Deterministic in (x, denoiser, config, sample_index).
inline RfImage sample_once(const RfImage& measurement, const DenoiserSpec& denoiser, const SamplerConfig& config,
                           std::size_t sample_index) {
  config.validate();
  require_normalized(measurement.values);

  const Matrix& x = measurement.values;
  const auto& sigma = config.schedule.sigmas;
  const std::size_t steps = sigma.size();
  const double gamma = config.measurement_noise;

  std::size_t calls = 0;
  auto den = [&](const Matrix& a, double s) { return denoise(denoiser, a, s, {sample_index, ++calls}); };
  auto noise = [&](std::size_t step) {
    Matrix e(x.rows(), x.cols());
    random::NormalStream(config.base_seed, sampler_stream(sample_index, step))
        .fill(std::span<double>(e.data(), static_cast<std::size_t>(e.size())));
    return e;
  };
  auto check = [&](const Matrix& m, std::size_t step) {
    if (!m.allFinite()) {
      throw NumericalError("sampler produced non-finite values at step " + std::to_string(step + 1) + " of sample " +
                           std::to_string(sample_index));
    }
  };
  // draw from the Gaussian bridge between the measurement (level gamma) and level s < gamma
  auto bridge = [&](double s, std::size_t step) {
    const Matrix h = den(x, gamma);
    const double r = s / gamma;
    return Matrix(h + r * r * (x - h) + s * std::sqrt(std::max(1.0 - r * r, 0.0)) * noise(step));
  };

  Matrix xt;
  if (sigma[0] > gamma) {
    xt = x + std::sqrt(sigma[0] * sigma[0] - gamma * gamma) * noise(0);
  } else if (config.refinement == Refinement::ddrm) {
    xt = x;
  } else {
    xt = bridge(sigma[0], 0);
  }
  check(xt, 0);

  for (std::size_t t = 0;; ++t) {
    const Matrix x0 = den(xt, sigma[t]);
    check(x0, t);
    if (t + 1 == steps) return {x0, measurement.grid};

    const double next = sigma[t + 1];
    if (next >= gamma) {
      const double spread = std::sqrt(std::max(next * next - config.eta_b * config.eta_b * gamma * gamma, 0.0));
      xt = (1.0 - config.eta_b) * x0 + config.eta_b * x + spread * noise(t + 1);
    } else if (config.refinement == Refinement::ddrm) {
      const double guide = std::sqrt(1.0 - config.eta * config.eta) * next / std::max(gamma, config.sigma_floor);
      xt = x0 + guide * (x - x0) + config.eta * next * noise(t + 1);
    } else if (sigma[t] >= gamma) {
      xt = bridge(next, t + 1);
    } else {
      const double r = next / sigma[t];
      xt = x0 + r * r * (xt - x0) + next * std::sqrt(1.0 - r * r) * noise(t + 1);
    }
    check(xt, t + 1);
  }
}

struct SampleSet {
  std::vector<Matrix> samples;
  std::vector<std::size_t> sample_indices;  // seeds are (base_seed, index)
  SamplerConfig config;
  ImagingGrid grid;

  std::size_t size() const { return samples.size(); }
};

/// sample_count independent runs with sample indices 1..C.
inline SampleSet sample_many(const RfImage& measurement, const DenoiserSpec& denoiser, const SamplerConfig& config,
                             unsigned threads = 1) {
  config.validate();
  require_normalized(measurement.values);
  SampleSet set{std::vector<Matrix>(config.sample_count), {}, config, measurement.grid};
  for (std::size_t c = 1; c <= config.sample_count; ++c) set.sample_indices.push_back(c);

  parallel_for(config.sample_count, threads, [&](std::size_t i) {
    const std::size_t index = i + 1;
    try {
      set.samples[i] = sample_once(measurement, denoiser, config, index).values;
    } catch (const DenoiserError& e) {
      throw DenoiserError("sample " + std::to_string(index) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("sample " + std::to_string(index) + ": " + e.what());
    }
  });
  return set;
}

}  // namespace usvar::diffusion
