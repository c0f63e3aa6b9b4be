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
#include <string>

#include "usvar/beamform/das.hpp"
#include "usvar/beamform/ebmv.hpp"
#include "usvar/core/envelope.hpp"
#include "usvar/diffusion/aggregate.hpp"
#include "usvar/diffusion/denoiser.hpp"
#include "usvar/diffusion/noise_estimate.hpp"
#include "usvar/diffusion/sampler.hpp"
#include "usvar/io/config.hpp"
#include "usvar/metrics/contrast.hpp"
#include "usvar/metrics/fwhm.hpp"
#include "usvar/metrics/report.hpp"
#include "usvar/phantom/phantom.hpp"
#include "usvar/phantom/simulate.hpp"

namespace usvar::pipeline {

struct Simulation {
  phantom::Phantom phantom;        // on the scatterer grid
  phantom::Phantom image_phantom;  // same primitives rasterized on the imaging grid (labels for metrics)
  ChannelData channels;
};

/// Scatterer grid covering the imaging grid at the configured density.
inline ImagingGrid scatterer_grid(const ImagingGrid& image, const ProbeGeometry& probe,
                                  const io::PhantomSection& section) {
  const double lambda = probe.wavelength();
  auto axis = [](const Axis& a, double step) {
    const double extent = a.back() - a.origin;
    const auto count = static_cast<std::size_t>(std::floor(extent / step)) + 1;
    return Axis{a.origin, step, count};
  };
  return {axis(image.lateral, lambda / section.lateral_per_wavelength),
          axis(image.axial, lambda / section.axial_per_wavelength)};
}

/// Phantom -> speckle reflectivity -> point scatterers -> single plane-wave channel data.
inline Simulation simulate(const io::RunConfig& rc, unsigned threads = 1) {
  rc.probe.validate();
  rc.grid.validate();
  const auto sgrid = scatterer_grid(rc.grid, rc.probe, rc.phantom);
  Simulation sim{phantom::make_phantom(rc.phantom.spec, sgrid), phantom::make_phantom(rc.phantom.spec, rc.grid), {}};

  auto cloud = phantom::cloud_from_reflectivity(phantom::draw_reflectivity(sim.phantom, rc.seed));
  for (const auto& p : rc.phantom.points) {
    if (!rc.grid.contains(p.x, p.z)) throw ConfigError("point target lies outside the imaging grid");
    cloud.push_back({p.x, p.z, p.amplitude});
  }

  const phantom::Pulse pulse{rc.probe.center_frequency, rc.simulation.fractional_bandwidth};
  auto time = phantom::time_axis_for(rc.grid, rc.probe, rc.simulation.transmit_angle, pulse);
  if (rc.simulation.samples) time.sample_count = *rc.simulation.samples;
  sim.channels = phantom::simulate_channel_data(cloud, rc.probe, rc.simulation.transmit_angle, pulse, time,
                                                rc.simulation.noise_std, rc.seed, threads);
  return sim;
}

inline RfImage beamform_image(const ChannelData& data, const ImagingGrid& grid, const io::BeamformSection& section,
                              unsigned threads = 1, beamform::BeamformStats* stats = nullptr) {
  RfImage img = section.method == beamform::Method::das
                    ? beamform::das(data, grid, section.config, threads)
                    : beamform::ebmv_image(data, grid, section.config, threads, stats);
  return section.normalize ? normalize_unit(img) : img;
}

inline diffusion::DenoiserSpec make_denoiser(const io::DenoiserSection& section, const RfImage& measurement,
                                             double measurement_noise) {
  if (section.kind == io::DenoiserSection::Kind::external) {
    return {diffusion::ExternalDenoiser{section.executable, section.work_dir}};
  }
  if (section.prior == io::PriorKind::scalar) {
    return {diffusion::AnalyticWiener{Matrix::Constant(1, 1, section.prior_variance)}};
  }
  return {diffusion::AnalyticWiener{
      diffusion::local_prior_variance(measurement.values, section.window_radius, measurement_noise)}};
}

struct Enhancement {
  diffusion::SampleSet samples;
  RfImage variance;
  RfImage median;
  double measurement_noise = 0.0;
};

inline Enhancement enhance(const RfImage& measurement, const io::SamplerSection& sampler,
                           const io::DenoiserSection& denoiser, unsigned threads = 1) {
  diffusion::require_normalized(measurement.values);
  auto config = sampler.config;
  if (sampler.estimate_noise) config.measurement_noise = diffusion::estimate_noise_std(measurement.values);
  const auto spec = make_denoiser(denoiser, measurement, config.measurement_noise);
  auto set = diffusion::sample_many(measurement, spec, config, threads);
  Enhancement out{std::move(set), {}, {}, config.measurement_noise};
  out.variance = diffusion::variance_image(out.samples);
  out.median = diffusion::median_image(out.samples);
  return out;
}

/// B-mode of a signed RF image: envelope, then log compression.
inline BModeImage render_rf(const RfImage& rf, double dynamic_range = kDefaultDynamicRange) {
  return log_compress(envelope_detect(rf), dynamic_range);
}

/// Variance maps are already non-negative: normalize, then log-compress.
inline BModeImage render_variance(const RfImage& variance, double dynamic_range = kDefaultDynamicRange) {
  return log_compress(normalize_unit(variance), dynamic_range);
}

/// Computes every requested metric on a non-negative image. Failures are
/// recorded per metric instead of aborting the report.
inline metrics::MetricReport evaluate(const RfImage& envelope, const io::MetricsSection& section,
                                      const Eigen::MatrixXi* labels, const std::string& image_name) {
  metrics::MetricReport report{image_name, {}};
  std::map<std::string, metrics::BoolMatrix> masks;
  for (const auto& [name, region] : section.regions) masks.emplace(name, region.resolve(envelope.grid, labels));
  auto count = [&](const std::string& name) { return static_cast<std::size_t>(masks.at(name).count()); };

  for (const auto& req : section.fwhm) {
    for (auto axis : req.axes) {
      metrics::MetricEntry e{std::string("fwhm_") + metrics::to_string(axis), {}, "m", {req.region}, {count(req.region)}, {}};
      try {
        e.value = metrics::fwhm(envelope, masks.at(req.region), axis);
      } catch (const Error& err) {
        e.failure = err.what();
      }
      report.entries.push_back(e);
    }
  }
  for (const auto& req : section.gcnr) {
    metrics::MetricEntry e{"gcnr", {}, "", {req.inside, req.outside}, {count(req.inside), count(req.outside)}, {}};
    try {
      e.value = metrics::gcnr(envelope, masks.at(req.inside), masks.at(req.outside), req.bins, req.domain);
    } catch (const Error& err) {
      e.failure = err.what();
    }
    report.entries.push_back(e);
  }
  for (const auto& req : section.snr) {
    metrics::MetricEntry e{"snr", {}, "", {req.region}, {count(req.region)}, {}};
    try {
      e.value = metrics::snr(envelope, masks.at(req.region));
    } catch (const Error& err) {
      e.failure = err.what();
    }
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace usvar::pipeline
