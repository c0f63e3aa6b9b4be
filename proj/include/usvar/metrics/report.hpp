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

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace usvar::metrics {

/// One computed (or failed) metric with the regions it was evaluated on.
struct MetricEntry {
  std::string name;  // fwhm_axial | fwhm_lateral | gcnr | snr
  std::optional<double> value;
  std::string unit;  // "m" for FWHM, empty for ratios
  std::vector<std::string> regions;
  std::vector<std::size_t> pixels;
  std::string failure;  // set when value is absent

  bool operator==(const MetricEntry&) const = default;
};

struct MetricReport {
  std::string image;
  std::vector<MetricEntry> entries;

  bool all_computed() const {
    for (const auto& e : entries) {
      if (!e.value) return false;
    }
    return true;
  }

  bool operator==(const MetricReport&) const = default;
};

// Document keys: {"image": str, "metrics": [{"name", "value" (number|null),
// "unit", "regions", "pixels", "error" (only on failure)}]}

inline void to_json(nlohmann::json& j, const MetricEntry& e) {
  j = nlohmann::json{{"name", e.name}, {"unit", e.unit}, {"regions", e.regions}, {"pixels", e.pixels}};
  j["value"] = e.value ? nlohmann::json(*e.value) : nlohmann::json(nullptr);
  if (!e.value) j["error"] = e.failure;
}

inline void from_json(const nlohmann::json& j, MetricEntry& e) {
  j.at("name").get_to(e.name);
  j.at("unit").get_to(e.unit);
  j.at("regions").get_to(e.regions);
  j.at("pixels").get_to(e.pixels);
  if (j.at("value").is_null()) {
    e.value.reset();
    e.failure = j.value("error", std::string{});
  } else {
    e.value = j.at("value").get<double>();
    e.failure.clear();
  }
}

inline void to_json(nlohmann::json& j, const MetricReport& r) {
  j = nlohmann::json{{"image", r.image}, {"metrics", r.entries}};
}

inline void from_json(const nlohmann::json& j, MetricReport& r) {
  j.at("image").get_to(r.image);
  j.at("metrics").get_to(r.entries);
}

}  // namespace usvar::metrics
