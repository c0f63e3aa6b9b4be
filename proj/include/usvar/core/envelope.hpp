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

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "usvar/core/types.hpp"

namespace usvar {

/// Magnitude of the discrete analytic signal of a real sequence.
///
/// Spectrum weights: DC kept, positive frequencies doubled, negative
/// frequencies zeroed; for even lengths the Nyquist bin is kept at unit weight.
inline std::vector<double> analytic_magnitude(const std::vector<double>& signal) {
  const std::size_t n = signal.size();
  std::vector<std::complex<double>> in(signal.begin(), signal.end());
  std::vector<std::complex<double>> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, in);

  const std::size_t positive_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  for (std::size_t k = 1; k < positive_end; ++k) spectrum[k] *= 2.0;
  for (std::size_t k = (n % 2 == 0) ? n / 2 + 1 : positive_end; k < n; ++k) spectrum[k] = 0.0;

  std::vector<std::complex<double>> analytic;
  fft.inv(analytic, spectrum);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::abs(analytic[i]);
  return out;
}

/// Column-wise (axial) envelope of an RF image.
inline RfImage envelope_detect(const RfImage& img) {
  require_finite(img.values, "RF image");
  const auto nz = img.values.rows();
  if (nz < 4) throw ConfigError("envelope detection needs at least 4 axial samples");

  RfImage out{Matrix(img.values.rows(), img.values.cols()), img.grid};
  std::vector<double> column(static_cast<std::size_t>(nz));
  for (Eigen::Index j = 0; j < img.values.cols(); ++j) {
    for (Eigen::Index i = 0; i < nz; ++i) column[static_cast<std::size_t>(i)] = img.values(i, j);
    const auto env = analytic_magnitude(column);
    for (Eigen::Index i = 0; i < nz; ++i) out.values(i, j) = env[static_cast<std::size_t>(i)];
  }
  return out;
}

/// 20 log10(env / max(env)) clipped to [-dynamic_range, 0].
inline BModeImage log_compress(const RfImage& envelope, double dynamic_range = kDefaultDynamicRange) {
  if (!(dynamic_range > 0.0)) throw ConfigError("dynamic range must be positive");
  require_finite(envelope.values, "envelope");
  if (envelope.values.size() > 0 && envelope.values.minCoeff() < 0.0) {
    throw DataError("log compression expects a non-negative envelope");
  }

  BModeImage out{Matrix(envelope.values.rows(), envelope.values.cols()), dynamic_range, envelope.grid};
  const double peak = envelope.values.size() > 0 ? envelope.values.maxCoeff() : 0.0;
  if (peak == 0.0) {
    out.values_db.setConstant(-dynamic_range);
    return out;
  }
  out.values_db = envelope.values.unaryExpr([&](double v) {
    if (v <= 0.0) return -dynamic_range;
    return std::clamp(20.0 * std::log10(v / peak), -dynamic_range, 0.0);
  });
  return out;
}

/// Scale to max |value| = 1. An all-zero image is returned unchanged.
inline RfImage normalize_unit(const RfImage& img) {
  const double peak = img.values.size() > 0 ? img.values.cwiseAbs().maxCoeff() : 0.0;
  if (peak == 0.0) return img;
  return RfImage{img.values / peak, img.grid};
}

}  // namespace usvar
