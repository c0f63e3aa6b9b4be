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

#include <spawn.h>
#include <sys/wait.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "usvar/core/types.hpp"
#include "usvar/io/tensor_file.hpp"

extern char** environ;

namespace usvar::diffusion {

/// Posterior mean under a zero-mean Gaussian prior of variance v (per pixel,
/// or a 1x1 matrix broadcast to every pixel): x0 = v / (v + sigma^2) * x_t.
struct AnalyticWiener {
  Matrix prior_variance = Matrix::Ones(1, 1);
};

/// Out-of-process denoiser reached through the tensor-file protocol:
///   <work_dir>/sample_<c>/req_<n>.ust       x_t
///   <work_dir>/sample_<c>/req_<n>.ust.meta  "sigma=<decimal>"
///   <executable> <req> <resp>               exit 0 on success
///   <work_dir>/sample_<c>/resp_<n>.ust      x0 estimate, same shape
struct ExternalDenoiser {
  std::filesystem::path executable;
  std::filesystem::path work_dir;
};

struct DenoiserSpec {
  std::variant<AnalyticWiener, ExternalDenoiser> kind;
};

/// Identifies one denoiser invocation within a sampling run.
struct DenoiseCall {
  std::size_t sample_index = 0;
  std::size_t call_index = 0;
};

inline Matrix wiener_denoise(const AnalyticWiener& w, const Matrix& x_t, double sigma) {
  const double s2 = sigma * sigma;
  if (w.prior_variance.size() == 0 || !(w.prior_variance.minCoeff() >= 0.0)) {
    throw ConfigError("prior variance must be non-negative");
  }
  if (w.prior_variance.size() == 1) {
    const double v = w.prior_variance(0, 0);
    return (v / (v + s2)) * x_t;
  }
  if (w.prior_variance.rows() != x_t.rows() || w.prior_variance.cols() != x_t.cols()) {
    throw DataError("prior variance map does not match the image shape");
  }
  return (w.prior_variance.array() / (w.prior_variance.array() + s2) * x_t.array()).matrix();
}

/// Spawns `argv[0]` with the given arguments and waits; returns the exit status.
inline int run_process(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  argv.reserve(args.size() + 1);
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, argv[0], nullptr, nullptr, argv.data(), environ);
  if (rc != 0) throw DenoiserError("cannot launch " + args[0] + ": " + std::strerror(rc));
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw DenoiserError("waitpid failed for " + args[0]);
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

inline Matrix external_denoise(const ExternalDenoiser& ext, const Matrix& x_t, double sigma, const DenoiseCall& call) {
  namespace fs = std::filesystem;
  const fs::path dir = ext.work_dir / ("sample_" + std::to_string(call.sample_index));
  const fs::path req = dir / ("req_" + std::to_string(call.call_index) + ".ust");
  const fs::path resp = dir / ("resp_" + std::to_string(call.call_index) + ".ust");
  fs::create_directories(dir);
  std::error_code ignored;
  fs::remove(resp, ignored);
  io::write_matrix(req, x_t);
  io::write_metadata(io::sidecar_path(req), {{"sigma", io::format_double(sigma)}});

  const int status = run_process({ext.executable.string(), req.string(), resp.string()});
  if (status != 0) {
    throw DenoiserError("denoiser exited with status " + std::to_string(status) + " on sample " +
                        std::to_string(call.sample_index) + ", call " + std::to_string(call.call_index));
  }
  Matrix out;
  try {
    out = io::read_matrix(resp);
  } catch (const Error& e) {
    throw DenoiserError(std::string("malformed denoiser response: ") + e.what());
  }
  if (out.rows() != x_t.rows() || out.cols() != x_t.cols()) {
    throw DenoiserError("denoiser response shape differs from the request on sample " +
                        std::to_string(call.sample_index));
  }
  return out;
}

inline Matrix denoise(const DenoiserSpec& spec, const Matrix& x_t, double sigma, const DenoiseCall& call = {}) {
  if (!(sigma > 0.0)) throw ConfigError("denoiser noise level must be positive");
  if (const auto* w = std::get_if<AnalyticWiener>(&spec.kind)) return wiener_denoise(*w, x_t, sigma);
  return external_denoise(std::get<ExternalDenoiser>(spec.kind), x_t, sigma, call);
}

/// Empirical-Bayes prior variance: local mean of x^2 over a (2r+1)^2 window
/// (clipped at the borders) minus the measurement noise power, floored at 0.
inline Matrix local_prior_variance(const Matrix& x, std::size_t radius, double noise_std) {
  const Eigen::Index nz = x.rows();
  const Eigen::Index nx = x.cols();
  Matrix integral = Matrix::Zero(nz + 1, nx + 1);
  for (Eigen::Index j = 0; j < nx; ++j) {
    for (Eigen::Index i = 0; i < nz; ++i) {
      integral(i + 1, j + 1) = x(i, j) * x(i, j) + integral(i, j + 1) + integral(i + 1, j) - integral(i, j);
    }
  }
  const auto r = static_cast<Eigen::Index>(radius);
  const double floor = noise_std * noise_std;
  Matrix v(nz, nx);
  for (Eigen::Index j = 0; j < nx; ++j) {
    const Eigen::Index j0 = std::max<Eigen::Index>(0, j - r);
    const Eigen::Index j1 = std::min<Eigen::Index>(nx, j + r + 1);
    for (Eigen::Index i = 0; i < nz; ++i) {
      const Eigen::Index i0 = std::max<Eigen::Index>(0, i - r);
      const Eigen::Index i1 = std::min<Eigen::Index>(nz, i + r + 1);
      const double sum = integral(i1, j1) - integral(i0, j1) - integral(i1, j0) + integral(i0, j0);
      const double mean = sum / static_cast<double>((i1 - i0) * (j1 - j0));
      v(i, j) = std::max(mean - floor, 0.0);
    }
  }
  return v;
}

}  // namespace usvar::diffusion
