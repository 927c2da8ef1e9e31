// Copyright 2026 The manipkd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef MANIPKD_NUM_FORMAT_HPP_
#define MANIPKD_NUM_FORMAT_HPP_

#include <charconv>
#include <span>
#include <string>
#include <system_error>

namespace manipkd {

// Locale-independent decimal formatting, 17 significant digits (exact
// double round trip). All machine-readable output goes through here so
// that identical inputs produce byte-identical text.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string format_csv(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace manipkd

#endif  // MANIPKD_NUM_FORMAT_HPP_
