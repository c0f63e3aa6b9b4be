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

#include "usvar/core/envelope.hpp"
#include "usvar/phantom/phantom.hpp"
#include "usvar/phantom/simulate.hpp"

namespace {

using namespace usvar;
using namespace usvar::phantom;

ImagingGrid unit_grid(std::size_t nz, std::size_t nx) {
  return {Axis::span(0.0, double(nx - 1), nx), Axis::span(0.0, double(nz - 1), nz)};
}

double sample_variance(const Matrix& m) {
  const double mean = m.mean();
  return (m.array() - mean).square().sum() / double(m.size() - 1);
}

TEST(MakePhantom, CircleInBackground) {
  const auto g = unit_grid(21, 21);
  const auto ph = make_phantom({1.0, {{Circle{10, 10, 4}, 0.0, "cyst"}}}, g);
  EXPECT_EQ(ph.echo_map(10, 10), 0.0);
  EXPECT_EQ(ph.echo_map(10, 14), 0.0);
  EXPECT_EQ(ph.echo_map(10, 15), 1.0);
  EXPECT_EQ(ph.echo_map(0, 0), 1.0);
  EXPECT_EQ(ph.region_labels(10, 10), 1);
  EXPECT_EQ(ph.region_labels(0, 0), 0);
  EXPECT_EQ(ph.region_names, (std::vector<std::string>{"background", "cyst"}));
}

TEST(MakePhantom, EmptySpecIsUniform) {
  const auto ph = make_phantom({1.0, {}}, unit_grid(5, 6));
  EXPECT_EQ(ph.echo_map, Matrix::Ones(5, 6));
  EXPECT_EQ(ph.region_labels, Eigen::MatrixXi::Zero(5, 6));
}

TEST(MakePhantom, LaterPrimitiveOverwrites) {
  const auto ph = make_phantom({1.0, {{Circle{8, 10, 4}, 0.0, "a"}, {Circle{12, 10, 4}, 2.0, "b"}}}, unit_grid(21, 21));
  EXPECT_EQ(ph.echo_map(10, 10), 2.0);  // in both circles
  EXPECT_EQ(ph.region_labels(10, 10), 2);
  EXPECT_EQ(ph.echo_map(10, 5), 0.0);   // only in the first
  EXPECT_EQ(ph.echo_map(10, 15), 2.0);  // only in the second
}

TEST(MakePhantom, Rejections) {
  const auto g = unit_grid(10, 10);
  EXPECT_THROW(make_phantom({1.0, {{Circle{9, 5, 3}, 0.0, ""}}}, g), ConfigError);
  EXPECT_THROW(make_phantom({1.0, {{Rectangle{2, 12, 2, 4}, 0.0, ""}}}, g), ConfigError);
  EXPECT_THROW(make_phantom({1.0, {{Circle{5, 5, 1}, -1.0, ""}}}, g), ConfigError);
  EXPECT_THROW(make_phantom({-1.0, {}}, g), ConfigError);
  EXPECT_NO_THROW(make_phantom({1.0, {{Rectangle{0, 9, 0, 9}, 3.0, ""}}}, g));
}

TEST(Speckle, ReproducibleFromSeed) {
  const auto g = unit_grid(16, 9);
  EXPECT_EQ(draw_speckle(g, 5).m, draw_speckle(g, 5).m);
  EXPECT_NE(draw_speckle(g, 5).m, draw_speckle(g, 6).m);
}

TEST(Reflectivity, ZeroEchogenicityGivesZero) {
  const auto g = unit_grid(20, 20);
  const auto ph = make_phantom({0.0, {}}, g);
  for (std::uint64_t seed : {0u, 1u, 99u}) EXPECT_EQ(draw_reflectivity(ph, seed).o, Matrix::Zero(20, 20));
}

TEST(Reflectivity, UnitEchogenicityVariance) {
  const auto ph = make_phantom({1.0, {}}, unit_grid(1000, 1000));
  const double v = sample_variance(draw_reflectivity(ph, 3).o);
  EXPECT_GE(v, 0.99);
  EXPECT_LE(v, 1.01);
}

TEST(Reflectivity, VarianceScalesWithSquaredLevel) {
  // Var(m p) = p^2; the p = 4 rectangle holds 100 000 pixels
  const auto ph = make_phantom({1.0, {{Rectangle{0, 99, 0, 999}, 4.0, "bright"}}}, unit_grid(1000, 200));
  const auto o = draw_reflectivity(ph, 11).o;
  const double v = sample_variance(o.leftCols(100));
  EXPECT_NEAR(v / 16.0, 1.0, 0.03);
}

TEST(Reflectivity, ShapeMismatch) {
  const auto ph = make_phantom({1.0, {}}, unit_grid(4, 4));
  EXPECT_THROW(reflectivity(ph, draw_speckle(unit_grid(4, 5), 1)), DataError);
}

TEST(EmpiricalSample, ZeroEchogenicityIsZero) {
  const auto g = unit_grid(6, 6);
  const auto ph = make_phantom({0.0, {}}, g);
  const auto sp = draw_speckle(g, 1);
  for (std::uint64_t c = 1; c <= 5; ++c) EXPECT_EQ(empirical_sample(ph, sp, c).values, Matrix::Zero(6, 6));
}

TEST(EmpiricalSample, MeanAndVarianceOverSamples) {
  // p = 1 in column 0, p = 2 in column 1; mean -> m p, variance -> p
  const auto g = unit_grid(2, 2);
  const auto ph = make_phantom({1.0, {{Rectangle{0.6, 1, 0, 1}, 2.0, "p2"}}}, g);
  const auto sp = draw_speckle(g, 17);
  const std::size_t n = 10000;
  Matrix sum = Matrix::Zero(2, 2);
  Matrix sum2 = Matrix::Zero(2, 2);
  for (std::size_t c = 1; c <= n; ++c) {
    const auto s = empirical_sample(ph, sp, c).values;
    sum += s;
    sum2 += s.cwiseProduct(s);
  }
  const Matrix mean = sum / double(n);
  const Matrix var = (sum2 - sum.cwiseProduct(sum) / double(n)) / double(n - 1);
  const Matrix mp = sp.m.cwiseProduct(ph.echo_map);
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double se = std::sqrt(ph.echo_map(i) / double(n));
    EXPECT_LE(std::abs(mean(i) - mp(i)), 3.0 * se) << "pixel " << i;
    EXPECT_NEAR(var(i) / ph.echo_map(i), 1.0, 0.05) << "pixel " << i;
  }
  EXPECT_NE(empirical_sample(ph, sp, 1).values, empirical_sample(ph, sp, 2).values);
}

TEST(Pulse, BandwidthAtMinusSixDecibels) {
  const Pulse p{5e6, 0.6};
  // amplitude spectrum of the Gaussian envelope drops to 1/2 at f0 +- B f0 / 2
  const double sf = 1.0 / (2.0 * std::numbers::pi * p.temporal_sigma());
  const double half_band = 0.5 * 0.6 * 5e6;
  EXPECT_NEAR(std::exp(-0.5 * half_band * half_band / (sf * sf)), 0.5, 1e-12);
  EXPECT_EQ(p(1.01 * p.half_support()), 0.0);
  EXPECT_DOUBLE_EQ(p(0.0), 1.0);
}

class SimulatorTest : public ::testing::Test {
 protected:
  ProbeGeometry probe = ProbeGeometry::linear(5, 3e-4, 5e6, 40e6);  // element 2 at x = 0
  Pulse pulse{5e6, 0.6};
  TimeAxis time{0.0, 1200};
};

TEST_F(SimulatorTest, EmptyCloudIsSilent) {
  const auto d = simulate_channel_data({}, probe, 0.0, pulse, time, 0.0, 1);
  EXPECT_EQ(d.samples, Matrix::Zero(1200, 5));
}

TEST_F(SimulatorTest, EmptyCloudWithNoiseIsPureNoise) {
  const auto d = simulate_channel_data({}, probe, 0.0, pulse, time, 0.5, 1);
  EXPECT_NEAR(sample_variance(d.samples), 0.25, 0.02);
}

TEST_F(SimulatorTest, RoundTripTimeBeneathElement) {
  const double z0 = 0.01;
  const auto d = simulate_channel_data({{0.0, z0, 1.0}}, probe, 0.0, pulse, time, 0.0, 1);
  RfImage col{d.samples.col(2), {Axis{0, 1, 1}, Axis{0, 1, 1200}}};
  const auto env = envelope_detect(col);
  Eigen::Index peak = 0;
  env.values.col(0).maxCoeff(&peak);
  const double t_peak = double(peak) / probe.sampling_frequency;
  EXPECT_NEAR(t_peak, 2.0 * z0 / probe.sound_speed, pulse.temporal_sigma());
}

TEST_F(SimulatorTest, MatchesDirectEvaluation) {
  const double z0 = 0.012;
  const double amp = -1.7;
  const auto d = simulate_channel_data({{0.0, z0, amp}}, probe, 0.0, pulse, time, 0.0, 1);
  const double c = probe.sound_speed;
  const double s = 1.0 / (2.0 * std::numbers::pi * (0.6 * 5e6 / (2.0 * std::sqrt(2.0 * std::log(2.0)))));
  for (std::size_t e = 0; e < 5; ++e) {
    const double dx = probe.element_positions[e];
    const double arrival = z0 / c + std::sqrt(z0 * z0 + dx * dx) / c;
    for (Eigen::Index n = 0; n < 1200; ++n) {
      const double t = double(n) / probe.sampling_frequency - arrival;
      const double expect =
          std::abs(t) > 6.0 * s ? 0.0 : amp * std::exp(-t * t / (2 * s * s)) * std::cos(2 * std::numbers::pi * 5e6 * t);
      ASSERT_NEAR(d.samples(n, Eigen::Index(e)), expect, 1e-12) << "e=" << e << " n=" << n;
    }
  }
}

TEST_F(SimulatorTest, LinearInAmplitudes) {
  ScattererCloud cloud{{0.0, 0.01, 1.0}, {0.5e-3, 0.011, -0.3}, {-1e-3, 0.009, 0.8}};
  auto scaled = cloud;
  for (auto& s : scaled) s.amplitude *= 2.5;
  const auto a = simulate_channel_data(cloud, probe, 0.1, pulse, time, 0.0, 1);
  const auto b = simulate_channel_data(scaled, probe, 0.1, pulse, time, 0.0, 1);
  EXPECT_LE((b.samples - 2.5 * a.samples).cwiseAbs().maxCoeff(), 1e-14);
}

TEST_F(SimulatorTest, AxialShiftDelaysEcho) {
  const int k = 13;
  const double dz = k * probe.sound_speed / (2.0 * probe.sampling_frequency);
  const auto a = simulate_channel_data({{0.0, 0.01, 1.0}}, probe, 0.0, pulse, time, 0.0, 1);
  const auto b = simulate_channel_data({{0.0, 0.01 + dz, 1.0}}, probe, 0.0, pulse, time, 0.0, 1);
  EXPECT_LE((b.samples.col(2).segment(k, 1200 - k) - a.samples.col(2).head(1200 - k)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST_F(SimulatorTest, ThreadCountDoesNotChangeBits) {
  ScattererCloud cloud;
  for (int i = 0; i < 50; ++i) cloud.push_back({-1e-3 + 4e-5 * i, 0.008 + 6e-5 * i, std::sin(double(i))});
  const auto a = simulate_channel_data(cloud, probe, 0.05, pulse, time, 0.1, 9, 1);
  const auto b = simulate_channel_data(cloud, probe, 0.05, pulse, time, 0.1, 9, 3);
  EXPECT_EQ(a.samples, b.samples);
}

TEST_F(SimulatorTest, Rejections) {
  EXPECT_THROW(simulate_channel_data({}, probe, 0.0, pulse, time, -1.0, 1), ConfigError);
  EXPECT_THROW(simulate_channel_data({}, probe, 2.0, pulse, time, 0.0, 1), ConfigError);
  EXPECT_THROW(simulate_channel_data({}, probe, 0.0, pulse, TimeAxis{0.0, 0}, 0.0, 1), ConfigError);
}

TEST_F(SimulatorTest, TimeAxisCoversGrid) {
  const ImagingGrid g{Axis::span(-1e-3, 1e-3, 3), Axis::span(5e-3, 2e-2, 4)};
  const auto t = time_axis_for(g, probe, 0.0, pulse);
  const double far = (2e-2 + std::hypot(1e-3 + 6e-4, 2e-2)) / probe.sound_speed;
  EXPECT_GE(double(t.sample_count - 1) / probe.sampling_frequency, far + pulse.half_support() - 1e-12);
}

TEST(CloudFromReflectivity, SkipsZeros) {
  const auto g = unit_grid(3, 3);
  TissueReflectivity t{Matrix::Zero(3, 3), g};
  t.o(1, 2) = 0.5;
  const auto cloud = cloud_from_reflectivity(t);
  ASSERT_EQ(cloud.size(), 1u);
  EXPECT_EQ(cloud[0].x, 2.0);
  EXPECT_EQ(cloud[0].z, 1.0);
  EXPECT_EQ(cloud[0].amplitude, 0.5);
}

}  // namespace
