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

#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "usvar/core/envelope.hpp"
#include "usvar/core/error.hpp"
#include "usvar/core/parallel.hpp"
#include "usvar/core/types.hpp"

namespace {

using namespace usvar;

ImagingGrid column_grid(std::size_t nz, std::size_t nx = 1) {
  return {Axis{0.0, 1e-4, nx}, Axis{0.0, 1e-5, nz}};
}

// O(N^2) analytic-signal magnitude straight from the DFT definition.
std::vector<double> dft_envelope(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> spec(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t t = 0; t < n; ++t) {
      spec[k] += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * t % n) / double(n));
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    double h = 0.0;
    if (k == 0 || (n % 2 == 0 && k == n / 2)) {
      h = 1.0;
    } else if (k < (n + 1) / 2) {
      h = 2.0;
    }
    spec[k] *= h;
  }
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += spec[k] * std::polar(1.0, 2.0 * std::numbers::pi * double(k * t % n) / double(n));
    }
    out[t] = std::abs(acc) / double(n);
  }
  return out;
}

TEST(Envelope, PureToneHasUnitMagnitude) {
  const std::size_t n = 64;
  RfImage rf{Matrix(n, 1), column_grid(n)};
  for (std::size_t i = 0; i < n; ++i) rf.values(i, 0) = std::cos(2.0 * std::numbers::pi * 8.0 * double(i) / double(n));
  const auto env = envelope_detect(rf);
  for (std::size_t i = 1; i + 1 < n; ++i) EXPECT_NEAR(env.values(i, 0), 1.0, 1e-6);
}

TEST(Envelope, ZeroImageGivesZero) {
  RfImage rf{Matrix::Zero(32, 3), column_grid(32, 3)};
  EXPECT_EQ(envelope_detect(rf).values, Matrix::Zero(32, 3));
}

TEST(Envelope, MatchesDirectDftOddAndEven) {
  for (std::size_t n : {37u, 48u}) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 0.7 + 0.01 * double(i);
      x[i] = 1.3 * std::cos(w * double(i)) + 1.3 * std::sin(w * double(i)) + 0.2 * std::cos(2.9 * double(i));
    }
    const auto fast = analytic_magnitude(x);
    const auto slow = dft_envelope(x);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(fast[i], slow[i], 1e-9) << "n=" << n << " i=" << i;
  }
}

TEST(Envelope, ColumnsAreIndependent) {
  const std::size_t n = 40;
  RfImage rf{Matrix(n, 2), column_grid(n, 2)};
  for (std::size_t i = 0; i < n; ++i) {
    rf.values(i, 0) = std::sin(0.9 * double(i));
    rf.values(i, 1) = 0.0;
  }
  const auto env = envelope_detect(rf);
  EXPECT_EQ(env.values.col(1), Vector::Zero(n));
  EXPECT_GT(env.values.col(0).minCoeff(), 0.0);
}

TEST(Envelope, RejectsNonFiniteAndShortColumns) {
  RfImage rf{Matrix::Zero(8, 1), column_grid(8)};
  rf.values(3, 0) = std::nan("");
  EXPECT_THROW(envelope_detect(rf), DataError);
  RfImage tiny{Matrix::Zero(3, 1), column_grid(3)};
  EXPECT_THROW(envelope_detect(tiny), ConfigError);
}

TEST(LogCompress, ReferencePoints) {
  RfImage env{Matrix(1, 4), column_grid(1, 4)};
  env.values << 2.0, 2.0e-3, 1.0, 1.0e-6;
  const auto b = log_compress(env, 60.0);
  EXPECT_DOUBLE_EQ(b.values_db(0, 0), 0.0);
  EXPECT_NEAR(b.values_db(0, 1), -60.0, 1e-12);
  EXPECT_NEAR(b.values_db(0, 2), -6.0206, 1e-4);
  EXPECT_DOUBLE_EQ(b.values_db(0, 3), -60.0);
}

TEST(LogCompress, Errors) {
  RfImage env{Matrix::Ones(2, 2), column_grid(2, 2)};
  EXPECT_THROW(log_compress(env, 0.0), ConfigError);
  EXPECT_THROW(log_compress(env, -5.0), ConfigError);
  env.values(0, 0) = -1.0;
  EXPECT_THROW(log_compress(env), DataError);
}

TEST(LogCompress, AllZeroMapsToFloor) {
  RfImage env{Matrix::Zero(2, 2), column_grid(2, 2)};
  EXPECT_EQ(log_compress(env, 40.0).values_db, Matrix::Constant(2, 2, -40.0));
}

TEST(Normalize, ScalesByPeakMagnitude) {
  RfImage rf{Matrix(1, 2), column_grid(1, 2)};
  rf.values << -2.0, 1.0;
  const auto n = normalize_unit(rf);
  EXPECT_DOUBLE_EQ(n.values(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(n.values(0, 1), 0.5);
  RfImage zero{Matrix::Zero(2, 2), column_grid(2, 2)};
  EXPECT_EQ(normalize_unit(zero).values, Matrix::Zero(2, 2));
}

TEST(Grid, AxisSpanAndContains) {
  const auto a = Axis::span(-1.0, 1.0, 5);
  EXPECT_DOUBLE_EQ(a.spacing, 0.5);
  EXPECT_DOUBLE_EQ(a.back(), 1.0);
  const ImagingGrid g{a, Axis::span(0.0, 2.0, 3)};
  EXPECT_TRUE(g.contains(1.2, 2.4));
  EXPECT_FALSE(g.contains(1.3, 1.0));
  EXPECT_FALSE(g.contains(0.0, -0.6));
  EXPECT_THROW((ImagingGrid{Axis{0, 0.0, 3}, Axis{}}.validate()), ConfigError);
}

TEST(Probe, LinearArrayIsCentered) {
  const auto p = ProbeGeometry::linear(4, 1e-3, 5e6, 40e6);
  EXPECT_DOUBLE_EQ(p.element_positions[0], -1.5e-3);
  EXPECT_DOUBLE_EQ(p.element_positions[3], 1.5e-3);
  EXPECT_DOUBLE_EQ(p.wavelength(), 1540.0 / 5e6);
  EXPECT_THROW(ProbeGeometry::linear(1, 1e-3, 5e6, 40e6), ConfigError);
  auto bad = p;
  std::swap(bad.element_positions[0], bad.element_positions[1]);
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Errors, ExitCodes) {
  EXPECT_EQ(ConfigError("x").code(), ExitCode::config);
  EXPECT_EQ(DataError("x").code(), ExitCode::data);
  EXPECT_EQ(DegenerateInputError("x").code(), ExitCode::data);
  EXPECT_EQ(NumericalError("x").code(), ExitCode::data);
  EXPECT_EQ(NoPeakError("x").code(), ExitCode::data);
  EXPECT_EQ(DenoiserError("x").code(), ExitCode::external_tool);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (unsigned threads : {1u, 2u, 5u, 64u}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  for (unsigned threads : {1u, 4u}) {
    try {
      parallel_for(20, threads, [](std::size_t i) {
        if (i == 7 || i == 13) throw std::runtime_error(std::to_string(i));
      });
      FAIL() << "no exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "7");
    }
  }
}

}  // namespace
