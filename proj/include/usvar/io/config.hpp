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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "usvar/beamform/config.hpp"
#include "usvar/core/types.hpp"
#include "usvar/diffusion/sampler.hpp"
#include "usvar/metrics/contrast.hpp"
#include "usvar/metrics/fwhm.hpp"
#include "usvar/metrics/region.hpp"
#include "usvar/phantom/phantom.hpp"
#include "usvar/phantom/simulate.hpp"

namespace usvar::io {

using nlohmann::json;

// Run configuration: a JSON document with one object per pipeline stage.
// Unknown keys are rejected so typos surface as configuration errors.

struct PointTarget {
  double x = 0.0;
  double z = 0.0;
  double amplitude = 1.0;
};

struct PhantomSection {
  phantom::PhantomSpec spec;
  std::vector<PointTarget> points;
  double axial_per_wavelength = 4.0;    // scatterer density of the speckle grid
  double lateral_per_wavelength = 2.0;
};

struct SimulationSection {
  double transmit_angle = 0.0;
  double fractional_bandwidth = 0.6;
  double noise_std = 0.0;
  std::optional<std::size_t> samples;  // unset: cover the imaging grid
};

struct BeamformSection {
  beamform::Method method = beamform::Method::ebmv;
  beamform::BeamformerConfig config;
  bool normalize = true;
};

struct SamplerSection {
  diffusion::SamplerConfig config;
  std::size_t steps = 50;
  double sigma_max = 1.0;
  double sigma_min = 0.002;
  bool estimate_noise = false;  // "measurement_noise": "auto"
};

enum class PriorKind { scalar, local };

struct DenoiserSection {
  enum class Kind { analytic_wiener, external } kind = Kind::analytic_wiener;
  PriorKind prior = PriorKind::local;
  double prior_variance = 1.0;
  std::size_t window_radius = 3;
  std::filesystem::path executable;
  std::filesystem::path work_dir;
};

struct FwhmRequest {
  std::string region;
  std::vector<metrics::ProfileAxis> axes{metrics::ProfileAxis::axial, metrics::ProfileAxis::lateral};
};

struct GcnrRequest {
  std::string inside;
  std::string outside;
  std::size_t bins = metrics::kDefaultGcnrBins;
  metrics::ContrastDomain domain = metrics::ContrastDomain::linear;
};

struct SnrRequest {
  std::string region;
};

struct MetricsSection {
  std::map<std::string, metrics::RegionMask> regions;
  std::vector<FwhmRequest> fwhm;
  std::vector<GcnrRequest> gcnr;
  std::vector<SnrRequest> snr;
};

struct RunConfig {
  std::uint64_t seed = 0;
  ProbeGeometry probe;
  ImagingGrid grid;
  PhantomSection phantom;
  SimulationSection simulation;
  BeamformSection beamform;
  SamplerSection sampler;
  DenoiserSection denoiser;
  MetricsSection metrics;
  std::optional<std::filesystem::path> output_dir;
  unsigned threads = 1;
  json source;  // the document as read, minus location-only keys
};

namespace detail {

inline void check_keys(const json& j, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("'" + section + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in '" + section + "'");
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& section) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("'" + section + "." + key + "' is missing or has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& section) {
  if (!j.contains(key)) return fallback;
  return get<T>(j, key, section);
}

inline std::pair<double, double> get_pair(const json& j, const char* key, const std::string& section) {
  const auto v = get<std::vector<double>>(j, key, section);
  if (v.size() != 2) throw ConfigError("'" + section + "." + key + "' must have two entries");
  return {v[0], v[1]};
}

inline phantom::Shape parse_shape(const json& j, const std::string& where) {
  const auto type = get<std::string>(j, "type", where);
  if (type == "circle") {
    const auto [cx, cz] = get_pair(j, "center", where);
    return phantom::Circle{cx, cz, get<double>(j, "radius", where)};
  }
  if (type == "rectangle") {
    const auto [x0, x1] = get_pair(j, "x", where);
    const auto [z0, z1] = get_pair(j, "z", where);
    return phantom::Rectangle{x0, x1, z0, z1};
  }
  throw ConfigError("'" + where + ".type' must be circle or rectangle");
}

}  // namespace detail

inline ProbeGeometry parse_probe(const json& j) {
  detail::check_keys(j, "probe",
                     {"elements", "pitch", "element_positions", "center_frequency", "sampling_frequency", "sound_speed"});
  const double f0 = detail::get<double>(j, "center_frequency", "probe");
  const double fs = detail::get<double>(j, "sampling_frequency", "probe");
  const double c = detail::get_or<double>(j, "sound_speed", kDefaultSoundSpeed, "probe");
  if (j.contains("element_positions")) {
    ProbeGeometry g{detail::get<std::vector<double>>(j, "element_positions", "probe"), f0, fs, c};
    g.validate();
    return g;
  }
  const auto n = detail::get<std::size_t>(j, "elements", "probe");
  const double pitch = detail::get<double>(j, "pitch", "probe");
  if (!(pitch > 0.0)) throw ConfigError("'probe.pitch' must be positive");
  return ProbeGeometry::linear(n, pitch, f0, fs, c);
}

inline ImagingGrid parse_grid(const json& j, const std::string& section = "grid") {
  detail::check_keys(j, section, {"x", "z", "nx", "nz"});
  const auto [x0, x1] = detail::get_pair(j, "x", section);
  const auto [z0, z1] = detail::get_pair(j, "z", section);
  const auto nx = detail::get<std::size_t>(j, "nx", section);
  const auto nz = detail::get<std::size_t>(j, "nz", section);
  if (nx < 1 || nz < 1) throw ConfigError("'" + section + "' needs nx, nz >= 1");
  if ((nx > 1 && !(x1 > x0)) || (nz > 1 && !(z1 > z0))) throw ConfigError("'" + section + "' bounds must increase");
  ImagingGrid g{Axis::span(x0, x1, nx), Axis::span(z0, z1, nz)};
  g.validate();
  return g;
}

inline PhantomSection parse_phantom(const json& j) {
  detail::check_keys(j, "phantom", {"background", "primitives", "points", "axial_per_wavelength", "lateral_per_wavelength"});
  PhantomSection p;
  p.spec.background_level = detail::get_or<double>(j, "background", 1.0, "phantom");
  p.axial_per_wavelength = detail::get_or<double>(j, "axial_per_wavelength", 4.0, "phantom");
  p.lateral_per_wavelength = detail::get_or<double>(j, "lateral_per_wavelength", 2.0, "phantom");
  if (!(p.axial_per_wavelength >= 4.0)) throw ConfigError("'phantom.axial_per_wavelength' must be at least 4");
  if (!(p.lateral_per_wavelength > 0.0)) throw ConfigError("'phantom.lateral_per_wavelength' must be positive");
  if (j.contains("primitives")) {
    std::size_t k = 0;
    for (const auto& pj : j.at("primitives")) {
      const std::string where = "phantom.primitives[" + std::to_string(k++) + "]";
      detail::check_keys(pj, where, {"type", "center", "radius", "x", "z", "level", "name"});
      p.spec.primitives.push_back({detail::parse_shape(pj, where), detail::get<double>(pj, "level", where),
                                   detail::get_or<std::string>(pj, "name", "", where)});
    }
  }
  if (j.contains("points")) {
    std::size_t k = 0;
    for (const auto& pj : j.at("points")) {
      const std::string where = "phantom.points[" + std::to_string(k++) + "]";
      detail::check_keys(pj, where, {"position", "amplitude"});
      const auto [x, z] = detail::get_pair(pj, "position", where);
      p.points.push_back({x, z, detail::get<double>(pj, "amplitude", where)});
    }
  }
  return p;
}

inline SimulationSection parse_simulation(const json& j) {
  detail::check_keys(j, "simulation", {"transmit_angle", "fractional_bandwidth", "noise_std", "samples"});
  SimulationSection s;
  s.transmit_angle = detail::get_or<double>(j, "transmit_angle", 0.0, "simulation");
  s.fractional_bandwidth = detail::get_or<double>(j, "fractional_bandwidth", 0.6, "simulation");
  s.noise_std = detail::get_or<double>(j, "noise_std", 0.0, "simulation");
  if (j.contains("samples")) s.samples = detail::get<std::size_t>(j, "samples", "simulation");
  if (!(s.noise_std >= 0.0)) throw ConfigError("'simulation.noise_std' must be non-negative");
  return s;
}

inline BeamformSection parse_beamform(const json& j) {
  detail::check_keys(j, "beamformer",
                     {"method", "subarray_length", "loading_coefficient", "subspace_criterion", "temporal_window",
                      "f_number", "apodization", "normalize"});
  BeamformSection b;
  b.method = beamform::parse_method(detail::get_or<std::string>(j, "method", "ebmv", "beamformer"));
  if (j.contains("subarray_length")) b.config.subarray_length = detail::get<std::size_t>(j, "subarray_length", "beamformer");
  b.config.loading_coefficient = detail::get_or<double>(j, "loading_coefficient", 0.01, "beamformer");
  b.config.subspace_criterion = detail::get_or<double>(j, "subspace_criterion", 0.05, "beamformer");
  b.config.temporal_window = detail::get_or<std::size_t>(j, "temporal_window", 1, "beamformer");
  b.config.f_number = detail::get_or<double>(j, "f_number", 1.75, "beamformer");
  if (j.contains("apodization")) {
    b.config.apodization = beamform::parse_apodization(detail::get<std::string>(j, "apodization", "beamformer"));
  }
  b.normalize = detail::get_or<bool>(j, "normalize", true, "beamformer");
  return b;
}

inline SamplerSection parse_sampler(const json& j) {
  detail::check_keys(j, "sampler",
                     {"samples", "steps", "sigma_max", "sigma_min", "measurement_noise", "eta", "eta_b", "refinement"});
  SamplerSection s;
  s.config.sample_count = detail::get_or<std::size_t>(j, "samples", 10, "sampler");
  s.steps = detail::get_or<std::size_t>(j, "steps", 50, "sampler");
  s.sigma_max = detail::get_or<double>(j, "sigma_max", 1.0, "sampler");
  s.sigma_min = detail::get_or<double>(j, "sigma_min", 0.002, "sampler");
  s.config.schedule = diffusion::make_schedule(s.steps, s.sigma_max, s.sigma_min);
  if (j.contains("measurement_noise") && j.at("measurement_noise").is_string()) {
    if (j.at("measurement_noise").get<std::string>() != "auto") {
      throw ConfigError("'sampler.measurement_noise' must be a number or \"auto\"");
    }
    s.estimate_noise = true;
  } else {
    s.config.measurement_noise = detail::get_or<double>(j, "measurement_noise", 0.0, "sampler");
  }
  s.config.eta = detail::get_or<double>(j, "eta", 0.85, "sampler");
  s.config.eta_b = detail::get_or<double>(j, "eta_b", 1.0, "sampler");
  s.config.refinement = diffusion::parse_refinement(detail::get_or<std::string>(j, "refinement", "ancestral", "sampler"));
  if (s.config.sample_count < 2) throw ConfigError("'sampler.samples' must be at least 2 for a variance image");
  s.config.validate();
  return s;
}

inline DenoiserSection parse_denoiser(const json& j) {
  detail::check_keys(j, "denoiser", {"kind", "prior_variance", "window_radius", "executable", "work_dir"});
  DenoiserSection d;
  const auto kind = detail::get_or<std::string>(j, "kind", "analytic-wiener", "denoiser");
  if (kind == "analytic-wiener") {
    d.kind = DenoiserSection::Kind::analytic_wiener;
    if (j.contains("prior_variance") && j.at("prior_variance").is_string()) {
      if (j.at("prior_variance").get<std::string>() != "local") {
        throw ConfigError("'denoiser.prior_variance' must be a number or \"local\"");
      }
      d.prior = PriorKind::local;
    } else if (j.contains("prior_variance")) {
      d.prior = PriorKind::scalar;
      d.prior_variance = detail::get<double>(j, "prior_variance", "denoiser");
      if (!(d.prior_variance >= 0.0)) throw ConfigError("'denoiser.prior_variance' must be non-negative");
    }
    d.window_radius = detail::get_or<std::size_t>(j, "window_radius", 3, "denoiser");
  } else if (kind == "external-protocol") {
    d.kind = DenoiserSection::Kind::external;
    d.executable = detail::get<std::string>(j, "executable", "denoiser");
    d.work_dir = detail::get_or<std::string>(j, "work_dir", "denoiser_work", "denoiser");
    if (!std::filesystem::exists(d.executable)) {
      throw ConfigError("denoiser executable not found: " + d.executable.string());
    }
  } else {
    throw ConfigError("'denoiser.kind' must be analytic-wiener or external-protocol");
  }
  return d;
}

inline metrics::RegionMask parse_region(const std::string& name, const json& j) {
  const std::string where = "metrics.regions." + name;
  detail::check_keys(j, where, {"type", "center", "radius", "x", "z", "label"});
  metrics::RegionMask r;
  r.name = name;
  if (detail::get<std::string>(j, "type", where) == "label") {
    r.shape = metrics::LabelRef{detail::get<int>(j, "label", where)};
  } else {
    const auto s = detail::parse_shape(j, where);
    if (const auto* c = std::get_if<phantom::Circle>(&s)) {
      r.shape = *c;
    } else {
      r.shape = std::get<phantom::Rectangle>(s);
    }
  }
  return r;
}

inline MetricsSection parse_metrics(const json& j) {
  detail::check_keys(j, "metrics", {"regions", "fwhm", "gcnr", "snr"});
  MetricsSection m;
  if (j.contains("regions")) {
    for (const auto& [name, rj] : j.at("regions").items()) m.regions.emplace(name, parse_region(name, rj));
  }
  auto known = [&](const std::string& name) {
    if (!m.regions.count(name)) throw ConfigError("metric refers to undefined region '" + name + "'");
    return name;
  };
  if (j.contains("fwhm")) {
    for (const auto& fj : j.at("fwhm")) {
      detail::check_keys(fj, "metrics.fwhm", {"region", "axes"});
      FwhmRequest req{known(detail::get<std::string>(fj, "region", "metrics.fwhm")), {}};
      for (const auto& a : detail::get_or<std::vector<std::string>>(fj, "axes", {"axial", "lateral"}, "metrics.fwhm")) {
        if (a == "axial") {
          req.axes.push_back(metrics::ProfileAxis::axial);
        } else if (a == "lateral") {
          req.axes.push_back(metrics::ProfileAxis::lateral);
        } else {
          throw ConfigError("FWHM axis must be axial or lateral");
        }
      }
      m.fwhm.push_back(req);
    }
  }
  if (j.contains("gcnr")) {
    for (const auto& gj : j.at("gcnr")) {
      detail::check_keys(gj, "metrics.gcnr", {"inside", "outside", "bins", "domain"});
      m.gcnr.push_back({known(detail::get<std::string>(gj, "inside", "metrics.gcnr")),
                        known(detail::get<std::string>(gj, "outside", "metrics.gcnr")),
                        detail::get_or<std::size_t>(gj, "bins", metrics::kDefaultGcnrBins, "metrics.gcnr"),
                        metrics::parse_domain(detail::get_or<std::string>(gj, "domain", "linear", "metrics.gcnr"))});
      if (m.gcnr.back().bins < 2) throw ConfigError("'metrics.gcnr.bins' must be at least 2");
    }
  }
  if (j.contains("snr")) {
    for (const auto& sj : j.at("snr")) {
      detail::check_keys(sj, "metrics.snr", {"region"});
      m.snr.push_back({known(detail::get<std::string>(sj, "region", "metrics.snr"))});
    }
  }
  return m;
}

/// Parses a full run configuration. `seed` is mandatory; every other section
/// falls back to defaults when absent (probe and grid are required by the
/// stages that use them and checked there).
inline RunConfig parse_run_config(const json& doc) {
  detail::check_keys(doc, "config",
                     {"seed", "probe", "grid", "phantom", "simulation", "beamformer", "sampler", "denoiser", "metrics",
                      "output", "threads"});
  RunConfig rc;
  if (!doc.contains("seed")) throw ConfigError("config must set 'seed'");
  rc.seed = detail::get<std::uint64_t>(doc, "seed", "config");
  if (doc.contains("probe")) rc.probe = parse_probe(doc.at("probe"));
  if (doc.contains("grid")) rc.grid = parse_grid(doc.at("grid"));
  rc.phantom = parse_phantom(doc.value("phantom", json::object()));
  rc.simulation = parse_simulation(doc.value("simulation", json::object()));
  rc.beamform = parse_beamform(doc.value("beamformer", json::object()));
  rc.sampler = parse_sampler(doc.value("sampler", json::object()));
  rc.sampler.config.base_seed = rc.seed;
  rc.denoiser = parse_denoiser(doc.value("denoiser", json::object()));
  rc.metrics = parse_metrics(doc.value("metrics", json::object()));
  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    detail::check_keys(o, "output", {"dir"});
    if (o.contains("dir")) rc.output_dir = detail::get<std::string>(o, "dir", "output");
  }
  rc.threads = detail::get_or<unsigned>(doc, "threads", 1u, "config");
  rc.source = doc;
  rc.source.erase("output");
  rc.source.erase("threads");
  return rc;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(f, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(doc);
}

/// 64-bit FNV-1a, used for config and file fingerprints in manifests.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

}  // namespace usvar::io
