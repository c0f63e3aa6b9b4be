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

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "usvar/core/error.hpp"
#include "usvar/core/types.hpp"

namespace usvar::io {

// Layout: "USTN1\0", u32 rank, u32 dims[rank], float32 payload; all
// little-endian, payload row-major.
inline constexpr std::array<char, 6> kTensorMagic{'U', 'S', 'T', 'N', '1', '\0'};

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}

}  // namespace detail

inline std::string encode_tensor(const Tensor& t) {
  if (t.dims.empty() || t.dims.size() > 4) throw ConfigError("tensor rank must lie in [1, 4]");
  if (t.values.size() != t.element_count()) throw DataError("tensor payload does not match its dimensions");
  std::string out(kTensorMagic.begin(), kTensorMagic.end());
  detail::put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) detail::put_u32(out, d);
  out.reserve(out.size() + 4 * t.values.size());
  for (float v : t.values) detail::put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

inline Tensor decode_tensor(const std::string& bytes, const std::string& origin = "tensor") {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < kTensorMagic.size() + 4 || std::memcmp(p, kTensorMagic.data(), kTensorMagic.size()) != 0) {
    throw DataError(origin + ": not a USTN1 tensor file");
  }
  std::size_t pos = kTensorMagic.size();
  const std::uint32_t rank = detail::get_u32(p + pos);
  pos += 4;
  if (rank < 1 || rank > 4) throw DataError(origin + ": tensor rank " + std::to_string(rank) + " outside [1, 4]");
  if (n < pos + 4 * rank) throw DataError(origin + ": truncated tensor header");
  Tensor t;
  for (std::uint32_t r = 0; r < rank; ++r, pos += 4) t.dims.push_back(detail::get_u32(p + pos));
  const std::size_t count = t.element_count();
  if (n - pos != 4 * count) {
    throw DataError(origin + ": payload is " + std::to_string(n - pos) + " bytes, expected " +
                    std::to_string(4 * count));
  }
  t.values.resize(count);
  for (std::size_t i = 0; i < count; ++i, pos += 4) t.values[i] = std::bit_cast<float>(detail::get_u32(p + pos));
  return t;
}

inline void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("failed writing " + path.string());
}

inline std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_tensor(const std::filesystem::path& path, const Tensor& t) { write_bytes(path, encode_tensor(t)); }

inline Tensor read_tensor(const std::filesystem::path& path) { return decode_tensor(read_bytes(path), path.string()); }

/// Row-major [rows x cols] float32 tensor. This is the one place where the
/// 64-bit pipeline is narrowed to 32 bits.
inline Tensor to_tensor(const Matrix& m) {
  Tensor t{{static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())}, {}};
  t.values.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) t.values.push_back(static_cast<float>(m(i, j)));
  }
  return t;
}

inline Matrix to_matrix(const Tensor& t, const std::string& origin = "tensor") {
  if (t.dims.size() != 2) throw DataError(origin + ": expected a rank-2 tensor");
  Matrix m(t.dims[0], t.dims[1]);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = static_cast<double>(t.values[k++]);
  }
  if (!m.allFinite()) throw DataError(origin + ": non-finite values in payload");
  return m;
}

inline void write_matrix(const std::filesystem::path& path, const Matrix& m) { write_tensor(path, to_tensor(m)); }

inline Matrix read_matrix(const std::filesystem::path& path) { return to_matrix(read_tensor(path), path.string()); }

// ---- sidecar metadata: one `key=value` per line, keys sorted ----

using Metadata = std::map<std::string, std::string>;

inline std::filesystem::path sidecar_path(const std::filesystem::path& tensor_path) {
  return std::filesystem::path(tensor_path.string() + ".meta");
}

inline std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return ss.str();
}

inline void write_metadata(const std::filesystem::path& path, const Metadata& meta) {
  std::string text;
  for (const auto& [k, v] : meta) {
    if (k.find('=') != std::string::npos || k.find('\n') != std::string::npos || v.find('\n') != std::string::npos) {
      throw ConfigError("metadata key/value contains a reserved character: " + k);
    }
    text += k + "=" + v + "\n";
  }
  write_bytes(path, text);
}

inline Metadata read_metadata(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open metadata " + path.string());
  Metadata meta;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError(path.string() + ": malformed metadata line '" + line + "'");
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

inline const std::string& require_key(const Metadata& meta, const std::string& key, const std::string& origin) {
  const auto it = meta.find(key);
  if (it == meta.end()) throw DataError(origin + ": missing metadata key '" + key + "'");
  return it->second;
}

inline double get_double(const Metadata& meta, const std::string& key, const std::string& origin) {
  const auto& s = require_key(meta, key, origin);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(origin + ": metadata '" + key + "' is not a number: " + s);
  }
}

}  // namespace usvar::io
