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

#include <cstddef>
#include <optional>
#include <string>

#include "usvar/core/error.hpp"

namespace usvar::beamform {

enum class Apodization { none, hann };
enum class Method { das, ebmv };

inline Apodization parse_apodization(const std::string& s) {
  if (s == "none") return Apodization::none;
  if (s == "hann") return Apodization::hann;
  throw ConfigError("unknown apodization '" + s + "' (expected none|hann)");
}

inline Method parse_method(const std::string& s) {
  if (s == "das") return Method::das;
  if (s == "ebmv") return Method::ebmv;
  throw ConfigError("unknown beamforming method '" + s + "' (expected das|ebmv)");
}

inline const char* to_string(Apodization a) { return a == Apodization::none ? "none" : "hann"; }
inline const char* to_string(Method m) { return m == Method::das ? "das" : "ebmv"; }

/// Defaults: subarray 80, loading 0.01,
/// signal-space criterion 0.05, no temporal averaging.
struct BeamformerConfig {
  std::optional<std::size_t> subarray_length;  // unset: 80 when Ne >= 80, else Ne
  double loading_coefficient = 0.01;
  double subspace_criterion = 0.05;
  std::size_t temporal_window = 1;  // Np, odd
  double f_number = 1.75;           // 0 disables the expanding aperture
  std::optional<Apodization> apodization;  // unset: hann for DAS, none for EBMV

  std::size_t resolved_subarray(std::size_t element_count) const {
    if (subarray_length) return *subarray_length;
    return element_count >= 80 ? 80 : element_count;
  }

  Apodization resolved_apodization(Method method) const {
    if (apodization) return *apodization;
    return method == Method::das ? Apodization::hann : Apodization::none;
  }

  void validate(std::size_t element_count) const {
    const std::size_t l = resolved_subarray(element_count);
    if (l < 1 || l > element_count) {
      throw ConfigError("subarray length " + std::to_string(l) + " must lie in [1, " +
                        std::to_string(element_count) + "]");
    }
    if (!(loading_coefficient >= 0.0)) throw ConfigError("loading coefficient must be non-negative");
    if (!(subspace_criterion > 0.0 && subspace_criterion <= 1.0)) {
      throw ConfigError("subspace criterion must lie in (0, 1]");
    }
    if (temporal_window < 1 || temporal_window % 2 == 0) {
      throw ConfigError("temporal window must be a positive odd number of samples");
    }
    if (!(f_number >= 0.0)) throw ConfigError("f-number must be non-negative");
  }
};

}  // namespace usvar::beamform
