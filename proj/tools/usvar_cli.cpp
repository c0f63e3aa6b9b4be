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
// usvar: simulate -> beamform -> enhance -> metrics -> render.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "usvar/io/config.hpp"
#include "usvar/io/image_file.hpp"
#include "usvar/io/pgm.hpp"
#include "usvar/io/tensor_file.hpp"
#include "usvar/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
  std::string config;
  std::string out;
  unsigned threads = 0;  // 0 = not given on the command line
};

unsigned resolve_threads(const Common& c, const usvar::io::RunConfig* rc) {
  if (c.threads > 0) return c.threads;
  if (const char* env = std::getenv("USVAR_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    throw usvar::ConfigError(std::string("USVAR_THREADS is not a positive integer: ") + env);
  }
  return rc ? rc->threads : 1;
}

fs::path resolve_out(const Common& c, const usvar::io::RunConfig* rc) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("USVAR_OUTPUT_DIR")) return env;
  if (rc && rc->output_dir) return *rc->output_dir;
  return "usvar_out";
}

/// Run record: enough to replay the command. Paths of outputs are relative
/// to the output directory; thread count and output location are omitted
/// because they do not affect results.
class Manifest {
 public:
  Manifest(std::string command, const usvar::io::RunConfig* rc) {
    doc_["tool"] = "usvar";
    doc_["version"] = kVersion;
    doc_["command"] = std::move(command);
    doc_["stages"] = json::array();
    doc_["inputs"] = json::array();
    doc_["outputs"] = json::array();
    if (rc) {
      doc_["seed"] = rc->seed;
      doc_["config"] = rc->source;
      doc_["config_hash"] = usvar::io::hex64(usvar::io::fnv1a(rc->source.dump()));
    }
  }

  void stage(const std::string& s) { doc_["stages"].push_back(s); }
  void option(const std::string& k, const json& v) { doc_["options"][k] = v; }

  void input(const fs::path& p) {
    doc_["inputs"].push_back({{"path", p.string()}, {"fnv1a", usvar::io::hex64(usvar::io::fnv1a(usvar::io::read_bytes(p)))}});
  }

  void output(const fs::path& dir, const fs::path& p) {
    doc_["outputs"].push_back({{"file", fs::relative(p, dir).generic_string()},
                               {"fnv1a", usvar::io::hex64(usvar::io::fnv1a(usvar::io::read_bytes(p)))}});
  }

  void write(const fs::path& dir) const {
    usvar::io::write_bytes(dir / ("manifest_" + doc_["command"].get<std::string>() + ".json"), doc_.dump(2) + "\n");
  }

 private:
  json doc_;
};

void write_image_out(Manifest& m, const fs::path& dir, const fs::path& file, const usvar::RfImage& img,
                     const std::string& kind) {
  usvar::io::write_image(file, img, kind);
  m.output(dir, file);
}

void write_pgm_out(Manifest& m, const fs::path& dir, const fs::path& file, const usvar::BModeImage& img) {
  usvar::io::write_pgm(file, img);
  m.output(dir, file);
}

int cmd_simulate(const Common& c) {
  const auto rc = usvar::io::load_run_config(c.config);
  const auto out = resolve_out(c, &rc);
  const auto sim = usvar::pipeline::simulate(rc, resolve_threads(c, &rc));
  Manifest m("simulate", &rc);
  m.stage("simulate");
  write_image_out(m, out, out / "phantom.ust", {sim.phantom.echo_map, sim.phantom.grid}, "echogenicity");
  write_image_out(m, out, out / "labels.ust", {sim.image_phantom.region_labels.cast<double>(), rc.grid}, "labels");
  usvar::io::write_channel_data(out / "channels.ust", sim.channels);
  m.output(out, out / "channels.ust");
  m.write(out);
  std::cerr << "simulate: " << sim.channels.samples.rows() << " x " << sim.channels.samples.cols()
            << " channel samples -> " << (out / "channels.ust").string() << "\n";
  return 0;
}

int cmd_beamform(const Common& c, const std::string& input, const std::string& method,
                 const std::optional<bool>& normalize) {
  const auto rc = usvar::io::load_run_config(c.config);
  const auto out = resolve_out(c, &rc);
  auto section = rc.beamform;
  if (!method.empty()) section.method = usvar::beamform::parse_method(method);
  if (normalize) section.normalize = *normalize;
  const auto data = usvar::io::read_channel_data(input);
  if (rc.grid.nx() < 1) throw usvar::ConfigError("config must define 'grid' for beamforming");

  usvar::beamform::BeamformStats stats;
  const auto img = usvar::pipeline::beamform_image(data, rc.grid, section, resolve_threads(c, &rc), &stats);
  if (stats.degenerate_pixels > 0) {
    std::cerr << "beamform: " << stats.degenerate_pixels << " pixel(s) had a degenerate covariance and were set to 0\n";
  }
  Manifest m("beamform", &rc);
  m.input(input);
  m.stage(std::string("beamform:") + usvar::beamform::to_string(section.method));
  m.option("method", usvar::beamform::to_string(section.method));
  m.option("normalize", section.normalize);
  const auto file = out / (std::string("rf_") + usvar::beamform::to_string(section.method) + ".ust");
  write_image_out(m, out, file, img, "rf");
  m.write(out);
  return 0;
}

int cmd_enhance(const Common& c, const std::string& input) {
  const auto rc = usvar::io::load_run_config(c.config);
  const auto out = resolve_out(c, &rc);
  const auto x = usvar::io::read_image(input);
  try {
    usvar::diffusion::require_normalized(x.values);
  } catch (const usvar::ConfigError&) {
    throw usvar::ConfigError(input + " is not normalized to [-1, 1]; beamform with normalization enabled");
  }
  const auto result = usvar::pipeline::enhance(x, rc.sampler, rc.denoiser, resolve_threads(c, &rc));

  Manifest m("enhance", &rc);
  m.input(input);
  m.stage("sample");
  m.stage("aggregate");
  m.stage("render");
  m.option("measurement_noise", result.measurement_noise);
  for (std::size_t i = 0; i < result.samples.size(); ++i) {
    const auto file = out / "samples" / ("sample_" + std::to_string(result.samples.sample_indices[i]) + ".ust");
    write_image_out(m, out, file, {result.samples.samples[i], x.grid}, "sample");
  }
  write_image_out(m, out, out / "variance.ust", result.variance, "variance");
  write_image_out(m, out, out / "median.ust", result.median, "median");
  write_pgm_out(m, out, out / "variance.pgm", usvar::pipeline::render_variance(result.variance));
  write_pgm_out(m, out, out / "median.pgm", usvar::pipeline::render_rf(result.median));
  m.write(out);
  std::cerr << "enhance: " << result.samples.size() << " samples, measurement noise "
            << result.measurement_noise << "\n";
  return 0;
}

usvar::RfImage as_envelope(const usvar::RfImage& img, const std::string& kind) {
  if (kind == "envelope") return img;
  if (kind == "rf") return usvar::envelope_detect(img);
  if (kind != "auto") throw usvar::ConfigError("--kind must be auto, rf or envelope");
  return img.values.minCoeff() < 0.0 ? usvar::envelope_detect(img) : img;
}

int cmd_metrics(const Common& c, const std::string& input, const std::string& labels_path, const std::string& kind,
                const std::string& report_path, bool lenient) {
  const auto rc = usvar::io::load_run_config(c.config);
  const auto envelope = as_envelope(usvar::io::read_image(input), kind);
  std::optional<Eigen::MatrixXi> labels;
  if (!labels_path.empty()) labels = usvar::io::read_image(labels_path).values.cast<int>();
  const auto report = usvar::pipeline::evaluate(envelope, rc.metrics, labels ? &*labels : nullptr, input);
  const std::string text = json(report).dump(2) + "\n";
  if (report_path.empty()) {
    std::cout << text;
  } else {
    usvar::io::write_bytes(report_path, text);
  }
  if (!report.all_computed() && !lenient) {
    for (const auto& e : report.entries) {
      if (!e.value) std::cerr << "metrics: " << e.name << " failed: " << e.failure << "\n";
    }
    return static_cast<int>(usvar::ExitCode::data);
  }
  return 0;
}

int cmd_report(const std::string& input) {
  const auto doc = json::parse(usvar::io::read_bytes(input));
  const auto report = doc.get<usvar::metrics::MetricReport>();
  std::cout << json(report).dump(2) << "\n";
  return 0;
}

int cmd_render(const std::string& input, const std::string& output, const std::string& kind, double dynamic_range) {
  const auto img = usvar::io::read_image(input);
  usvar::BModeImage bmode;
  if (kind == "variance") {
    bmode = usvar::pipeline::render_variance(img, dynamic_range);
  } else if (kind == "envelope") {
    bmode = usvar::log_compress(img, dynamic_range);
  } else if (kind == "rf") {
    bmode = usvar::pipeline::render_rf(img, dynamic_range);
  } else {
    throw usvar::ConfigError("--kind must be rf, envelope or variance");
  }
  usvar::io::write_pgm(output, bmode);
  return 0;
}

/// Full synthetic comparison: DAS, DAS+variance,
/// EBMV, EBMV+median, EBMV+variance (plus DAS+median), with metrics per panel.
int cmd_demo(const Common& c) {
  const auto rc = usvar::io::load_run_config(c.config);
  const auto out = resolve_out(c, &rc);
  const unsigned threads = resolve_threads(c, &rc);
  Manifest m("demo", &rc);

  const auto sim = usvar::pipeline::simulate(rc, threads);
  m.stage("simulate");
  usvar::io::write_channel_data(out / "channels.ust", sim.channels);
  m.output(out, out / "channels.ust");

  json metrics_doc = json::object();
  auto evaluate = [&](const std::string& panel, const usvar::RfImage& envelope) {
    metrics_doc[panel] = usvar::pipeline::evaluate(envelope, rc.metrics, &sim.image_phantom.region_labels, panel);
  };

  for (auto method : {usvar::beamform::Method::das, usvar::beamform::Method::ebmv}) {
    const std::string name = usvar::beamform::to_string(method);
    auto section = rc.beamform;
    section.method = method;
    section.normalize = true;
    const auto rf = usvar::pipeline::beamform_image(sim.channels, rc.grid, section, threads);
    m.stage("beamform:" + name);
    write_image_out(m, out, out / (name + ".ust"), rf, "rf");
    write_pgm_out(m, out, out / (name + ".pgm"), usvar::pipeline::render_rf(rf));
    evaluate(name, usvar::envelope_detect(rf));

    const auto enhanced = usvar::pipeline::enhance(rf, rc.sampler, rc.denoiser, threads);
    m.stage("enhance:" + name);
    write_image_out(m, out, out / (name + "_dusvar.ust"), enhanced.variance, "variance");
    write_image_out(m, out, out / (name + "_dusmedian.ust"), enhanced.median, "median");
    write_pgm_out(m, out, out / (name + "_dusvar.pgm"), usvar::pipeline::render_variance(enhanced.variance));
    write_pgm_out(m, out, out / (name + "_dusmedian.pgm"), usvar::pipeline::render_rf(enhanced.median));
    evaluate(name + "_dusvar", enhanced.variance);
    evaluate(name + "_dusmedian", usvar::envelope_detect(enhanced.median));
  }
  m.stage("metrics");
  usvar::io::write_bytes(out / "metrics.json", metrics_doc.dump(2) + "\n");
  m.output(out, out / "metrics.json");
  m.write(out);
  std::cout << metrics_doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"usvar: plane-wave beamforming and diffusion variance imaging"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    auto* opt = sub->add_option("-c,--config", common.config, "Run configuration (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", common.out, "Output directory (env USVAR_OUTPUT_DIR, then config output.dir)");
    sub->add_option("-t,--threads", common.threads, "Worker threads (env USVAR_THREADS); output bytes do not depend on it")
        ->check(CLI::PositiveNumber);
  };

  auto* simulate = app.add_subcommand("simulate", "Simulate single plane-wave channel data from the phantom config");
  add_common(simulate);

  std::string input;
  std::string method;
  bool normalize_flag = false;
  bool no_normalize_flag = false;
  auto* beam = app.add_subcommand("beamform", "Beamform a channel-data tensor into an RF image");
  add_common(beam);
  beam->add_option("-i,--input", input, "Channel data tensor (.ust with .meta sidecar)")->required()->check(CLI::ExistingFile);
  beam->add_option("-m,--method", method, "das | ebmv (default: config beamformer.method)");
  beam->add_flag("--normalize", normalize_flag, "Scale the image to max |x| = 1");
  beam->add_flag("--no-normalize", no_normalize_flag, "Keep the raw beamformer scale");

  auto* enhance = app.add_subcommand("enhance", "Draw diffusion samples and write variance/median images");
  add_common(enhance);
  enhance->add_option("-i,--input", input, "Normalized RF image tensor")->required()->check(CLI::ExistingFile);

  std::string labels;
  std::string kind = "auto";
  std::string report_path;
  bool lenient = false;
  auto* metrics = app.add_subcommand("metrics", "Compute FWHM / gCNR / SNR over configured regions");
  add_common(metrics);
  metrics->add_option("-i,--input", input, "Image tensor")->required()->check(CLI::ExistingFile);
  metrics->add_option("--labels", labels, "Label image for label-referenced regions")->check(CLI::ExistingFile);
  metrics->add_option("--kind", kind, "auto | rf | envelope (auto: envelope-detect signed images)");
  metrics->add_option("--report", report_path, "Write the report here instead of stdout");
  metrics->add_flag("--lenient", lenient, "Exit 0 even when a metric could not be computed");

  auto* report = app.add_subcommand("report", "Re-read a metric report and print it");
  report->add_option("-i,--input", input, "Report JSON")->required()->check(CLI::ExistingFile);

  std::string output;
  double dynamic_range = usvar::kDefaultDynamicRange;
  std::string render_kind = "rf";
  auto* render = app.add_subcommand("render", "Write a log-compressed PGM of an image tensor");
  render->add_option("-i,--input", input, "Image tensor")->required()->check(CLI::ExistingFile);
  render->add_option("-o,--output", output, "PGM file")->required();
  render->add_option("--kind", render_kind, "rf | envelope | variance");
  render->add_option("--dynamic-range", dynamic_range, "Displayed range in dB")->check(CLI::PositiveNumber);

  auto* demo = app.add_subcommand("demo", "Run the full synthetic comparison (e.g. configs/ec-demo.json)");
  add_common(demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(usvar::ExitCode::config);
  }

  try {
    if (*simulate) return cmd_simulate(common);
    if (*beam) {
      if (normalize_flag && no_normalize_flag) throw usvar::ConfigError("--normalize and --no-normalize conflict");
      std::optional<bool> normalize;
      if (normalize_flag) normalize = true;
      if (no_normalize_flag) normalize = false;
      return cmd_beamform(common, input, method, normalize);
    }
    if (*enhance) return cmd_enhance(common, input);
    if (*metrics) return cmd_metrics(common, input, labels, kind, report_path, lenient);
    if (*report) return cmd_report(input);
    if (*render) return cmd_render(input, output, render_kind, dynamic_range);
    if (*demo) return cmd_demo(common);
  } catch (const usvar::Error& e) {
    std::cerr << "usvar: error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "usvar: error: " << e.what() << "\n";
    return static_cast<int>(usvar::ExitCode::data);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "usvar: error: " << e.what() << "\n";
    return static_cast<int>(usvar::ExitCode::data);
  }
  return 0;
}
