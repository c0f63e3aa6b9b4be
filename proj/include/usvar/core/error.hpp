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

#include <stdexcept>
#include <string>

namespace usvar {

/// Process exit codes shared by every command-line entry point.
enum class ExitCode : int {
  ok = 0,
  config = 2,
  data = 3,
  external_tool = 4,
};

/// Base of all library errors. Each subclass carries the exit code the CLI
/// reports when the error escapes a command.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, ExitCode code) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Invalid parameters, malformed config, or a violated precondition on caller-supplied settings.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what, ExitCode::config) {}
};

/// Non-finite samples, corrupt files, shape mismatches.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what, ExitCode::data) {}
};

/// Input carries no information for the requested estimate (all-zero covariance, constant region).
class DegenerateInputError : public DataError {
 public:
  using DataError::DataError;
};

/// Solver failure, lost positive definiteness, NaN produced mid-iteration.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what, ExitCode::data) {}
};

/// No usable peak for a resolution measurement.
class NoPeakError : public DataError {
 public:
  using DataError::DataError;
};

/// External denoiser process failed or returned something unusable.
class DenoiserError : public Error {
 public:
  explicit DenoiserError(const std::string& what) : Error(what, ExitCode::external_tool) {}
};

}  // namespace usvar
