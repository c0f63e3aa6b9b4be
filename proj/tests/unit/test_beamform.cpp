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
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "usvar/beamform/das.hpp"
#include "usvar/beamform/delays.hpp"
#include "usvar/beamform/ebmv.hpp"
#include "usvar/core/envelope.hpp"
#include "usvar/metrics/fwhm.hpp"
#include "usvar/phantom/simulate.hpp"

namespace {

using namespace usvar;
using namespace usvar::beamform;

ProbeGeometry small_probe() { return ProbeGeometry::linear(32, 3e-4, 5e6, 40e6); }

TEST(Delays, ZeroAngleBeneathElement) {
  auto probe = ProbeGeometry::linear(3, 1e-3, 5e6, 40e6);
  std::vector<double> d(3);
  pixel_delays(0.0, 0.02, probe, 0.0, d);
  EXPECT_DOUBLE_EQ(d[1], 2.0 * 0.02 / 1540.0);
  pixel_delays(1e-3, 0.02, probe, 0.0, d);
  EXPECT_DOUBLE_EQ(d[2], 2.0 * 0.02 / 1540.0);
}

TEST(Delays, SteeredMatchesScalarFormula) {
  const auto probe = small_probe();
  const double theta = 10.0 * std::numbers::pi / 180.0;
  const ImagingGrid g{Axis::span(-2e-3, 3e-3, 4), Axis::span(5e-3, 2.5e-2, 5)};
  const auto table = compute_delays(g, probe, theta);
  for (std::size_t ix = 0; ix < 4; ++ix) {
    for (std::size_t iz = 0; iz < 5; ++iz) {
      for (std::size_t e = 0; e < 32; ++e) {
        const double x = g.lateral[ix];
        const double z = g.axial[iz];
        const double xe = probe.element_positions[e];
        const double ref = z * std::cos(theta) / 1540.0 + x * std::sin(theta) / 1540.0 +
                           std::hypot(x - xe, z) / 1540.0;
        EXPECT_NEAR(table(iz, ix, e), ref, 1e-15 * ref);
      }
    }
  }
  EXPECT_THROW(compute_delays(g, probe, std::numbers::pi / 2), ConfigError);
}

ChannelData ramp_data() {
  ChannelData d;
  d.geometry = ProbeGeometry::linear(2, 1e-3, 5e6, 1e6);  // fs = 1 MHz -> dt = 1 us
  d.samples = Matrix(5, 2);
  d.samples << 0, 10, 1, 20, 4, 30, 9, 40, 16, 50;
  d.start_time = 1e-6;
  return d;
}

TEST(Interpolation, OnSampleMidpointAndOutOfRange) {
  const auto d = ramp_data();
  EXPECT_NEAR(sample_at(d, 0, 3e-6), 4.0, 1e-9);
  EXPECT_NEAR(sample_at(d, 0, 3.5e-6), 6.5, 1e-9);
  EXPECT_NEAR(sample_at(d, 1, 1.5e-6), 15.0, 1e-9);
  EXPECT_NEAR(sample_at(d, 0, 5e-6 - 1e-13), 16.0, 1e-6);
  EXPECT_EQ(sample_at(d, 0, 6e-6), 0.0);
  EXPECT_NEAR(sample_at(d, 0, 5.5e-6), 0.0, 1e-9);
  EXPECT_NEAR(sample_at(d, 0, 0.5e-6), 0.0, 1e-9);
}

TEST(Interpolation, ExtractDelayedTapsAndMask) {
  const auto d = ramp_data();
  const std::vector<double> delays{3e-6, 2e-6};
  const auto y = extract_delayed(d, delays, {}, 3);
  ASSERT_EQ(y.y.rows(), 2);
  ASSERT_EQ(y.y.cols(), 3);
  EXPECT_EQ(y.center_tap(), 1);
  EXPECT_NEAR(y.y(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(y.y(0, 1), 4.0, 1e-9);
  EXPECT_NEAR(y.y(0, 2), 9.0, 1e-9);
  EXPECT_NEAR(y.y(1, 0), 10.0, 1e-9);
  const auto masked = extract_delayed(d, delays, {true, false}, 1);
  EXPECT_NEAR(masked.y(0, 0), 4.0, 1e-9);
  EXPECT_NEAR(masked.y(1, 0), 0.0, 1e-9);
}

TEST(Aperture, ExpandsWithDepthAndKeepsNearest) {
  const auto probe = small_probe();
  const auto shallow = receive_aperture(0.0, 1e-4, probe, 1.75);
  EXPECT_EQ(shallow.count, 1u);
  const auto deep = receive_aperture(0.0, 1e-2, probe, 1.75);
  EXPECT_GT(deep.count, 10u);
  EXPECT_EQ(receive_aperture(0.0, 1e-2, probe, 0.0).count, 32u);
  const auto w = apodization_weights(0.0, 1e-2, probe, 1.75, Apodization::hann);
  EXPECT_EQ(w[0], 0.0);
  EXPECT_GT(w[15], 0.9);
  EXPECT_NEAR(w[15], w[16], 1e-12);
}

ChannelData point_data(double x, double z, const ProbeGeometry& probe, double amp = 1.0) {
  const phantom::Pulse pulse{5e6, 0.6};
  const ImagingGrid g{Axis::span(-3e-3, 3e-3, 3), Axis::span(5e-3, 1.5e-2, 3)};
  return phantom::simulate_channel_data({{x, z, amp}}, probe, 0.0, pulse, phantom::time_axis_for(g, probe, 0.0, pulse),
                                        0.0, 1);
}

TEST(Das, ZeroDataZeroImage) {
  ChannelData d;
  d.geometry = small_probe();
  d.samples = Matrix::Zero(600, 32);
  const ImagingGrid g{Axis::span(-1e-3, 1e-3, 5), Axis::span(5e-3, 1e-2, 7)};
  EXPECT_EQ(das(d, g, {}).values, Matrix::Zero(7, 5));
  EXPECT_EQ(ebmv_image(d, g, {}).values, Matrix::Zero(7, 5));
}

TEST(Das, PointLandsOnItsPixel) {
  const auto probe = small_probe();
  const auto d = point_data(0.6e-3, 1e-2, probe);
  const ImagingGrid g{Axis::span(-2e-3, 2e-3, 41), Axis::span(8e-3, 12e-3, 161)};
  const auto env = envelope_detect(das(d, g, {}));
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  env.values.maxCoeff(&i, &j);
  EXPECT_NEAR(g.lateral[std::size_t(j)], 0.6e-3, g.lateral.spacing);
  EXPECT_NEAR(g.axial[std::size_t(i)], 1e-2, g.axial.spacing);
}

TEST(Das, Linear) {
  const auto probe = small_probe();
  auto d = point_data(0.0, 1e-2, probe);
  const ImagingGrid g{Axis::span(-1e-3, 1e-3, 9), Axis::span(9e-3, 11e-3, 21)};
  const auto a = das(d, g, {});
  d.samples *= 4.0;  // power of two keeps the scaling exact
  EXPECT_EQ(das(d, g, {}).values, 4.0 * a.values);
}

TEST(Das, ThreadsBitIdentical) {
  const auto probe = small_probe();
  const auto d = point_data(0.2e-3, 1e-2, probe);
  const ImagingGrid g{Axis::span(-1e-3, 1e-3, 9), Axis::span(9e-3, 11e-3, 21)};
  EXPECT_EQ(das(d, g, {}, 1).values, das(d, g, {}, 4).values);
}

TEST(Das, RejectsMismatchedChannels) {
  ChannelData d;
  d.geometry = small_probe();
  d.samples = Matrix::Zero(10, 31);
  const ImagingGrid g{Axis::span(-1e-3, 1e-3, 2), Axis::span(9e-3, 11e-3, 2)};
  EXPECT_THROW(das(d, g, {}), DataError);
  d.samples = Matrix::Zero(10, 32);
  d.samples(0, 0) = std::nan("");
  EXPECT_THROW(das(d, g, {}), DataError);
}

TEST(EbmvImage, NarrowerLateralPeakThanDas) {
  const auto probe = small_probe();
  const auto d = point_data(0.0, 1e-2, probe);
  const ImagingGrid g{Axis::span(-2e-3, 2e-3, 81), Axis::span(9e-3, 11e-3, 81)};
  BeamformerConfig cfg;
  cfg.subarray_length = 16;
  const auto e_das = envelope_detect(das(d, g, cfg));
  BeamformStats stats;
  const auto e_mv = envelope_detect(ebmv_image(d, g, cfg, 1, &stats));
  metrics::BoolMatrix all = metrics::BoolMatrix::Constant(81, 81, true);
  const double w_das = metrics::fwhm(e_das, all, metrics::ProfileAxis::lateral);
  const double w_mv = metrics::fwhm(e_mv, all, metrics::ProfileAxis::lateral);
  EXPECT_LE(w_mv, w_das);
}

TEST(EbmvImage, DeterministicAcrossThreads) {
  const auto probe = small_probe();
  const auto d = point_data(0.3e-3, 1e-2, probe);
  const ImagingGrid g{Axis::span(-1e-3, 1e-3, 7), Axis::span(9e-3, 11e-3, 9)};
  BeamformerConfig cfg;
  cfg.subarray_length = 12;
  const auto a = ebmv_image(d, g, cfg, 1);
  EXPECT_EQ(a.values, ebmv_image(d, g, cfg, 1).values);
  EXPECT_EQ(a.values, ebmv_image(d, g, cfg, 3).values);
}

TEST(EbmvImage, DegeneratePixelsAreCountedAndZero) {
  auto probe = small_probe();
  ChannelData d;
  d.geometry = probe;
  d.samples = Matrix::Zero(1000, 32);
  const ImagingGrid g{Axis::span(-1e-3, 1e-3, 3), Axis::span(9e-3, 11e-3, 4)};
  BeamformStats stats;
  const auto img = ebmv_image(d, g, {}, 1, &stats);
  EXPECT_EQ(stats.degenerate_pixels, 12u);
  EXPECT_EQ(img.values, Matrix::Zero(4, 3));
}

TEST(EbmvImage, SubarrayLongerThanArrayIsConfigError) {
  ChannelData d;
  d.geometry = small_probe();
  d.samples = Matrix::Zero(10, 32);
  BeamformerConfig cfg;
  cfg.subarray_length = 33;
  const ImagingGrid g{Axis::span(-1e-3, 1e-3, 2), Axis::span(9e-3, 11e-3, 2)};
  EXPECT_THROW(ebmv_image(d, g, cfg), ConfigError);
  cfg.subarray_length = 8;
  cfg.temporal_window = 2;
  EXPECT_THROW(ebmv_image(d, g, cfg), ConfigError);
}

TEST(Config, DefaultsAndParsing) {
  BeamformerConfig cfg;
  EXPECT_EQ(cfg.resolved_subarray(128), 80u);
  EXPECT_EQ(cfg.resolved_subarray(64), 64u);
  EXPECT_EQ(cfg.loading_coefficient, 0.01);
  EXPECT_EQ(cfg.subspace_criterion, 0.05);
  EXPECT_EQ(cfg.temporal_window, 1u);
  EXPECT_EQ(cfg.resolved_apodization(Method::das), Apodization::hann);
  EXPECT_EQ(cfg.resolved_apodization(Method::ebmv), Apodization::none);
  EXPECT_EQ(parse_method("ebmv"), Method::ebmv);
  EXPECT_THROW(parse_method("mv"), ConfigError);
  EXPECT_THROW(parse_apodization("tukey"), ConfigError);
  cfg.subspace_criterion = 0.0;
  EXPECT_THROW(cfg.validate(64), ConfigError);
}

}  // namespace
