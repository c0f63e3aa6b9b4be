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
// Minimal external denoiser speaking the tensor-file protocol:
//   wiener_denoiser <req.ust> <resp.ust>
// Reads sigma from <req.ust>.meta and writes v / (v + sigma^2) * x_t.
// The prior variance v comes from USVAR_WIENER_PRIOR (default 1).
// Setting USVAR_WIENER_FAIL makes it exit with status 7 (for tests).

#include <cstdlib>
#include <iostream>

#include "usvar/io/tensor_file.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: wiener_denoiser <request.ust> <response.ust>\n";
    return 2;
  }
  if (std::getenv("USVAR_WIENER_FAIL")) return 7;
  try {
    const auto x = usvar::io::read_matrix(argv[1]);
    const auto meta = usvar::io::read_metadata(usvar::io::sidecar_path(argv[1]));
    const double sigma = usvar::io::get_double(meta, "sigma", argv[1]);
    const char* prior = std::getenv("USVAR_WIENER_PRIOR");
    const double v = prior ? std::atof(prior) : 1.0;
    usvar::io::write_matrix(argv[2], (v / (v + sigma * sigma)) * x);
  } catch (const std::exception& e) {
    std::cerr << "wiener_denoiser: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
