// Copyright 2026 The qnas Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qnas/error.hpp"

namespace qnas::textio {

// Shortest representation that parses back to the identical double.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Accepts everything format_double emits, including "inf"/"-inf"/"+inf".
inline bool parse_double(std::string_view tok, double& out) {
  if (tok == "inf" || tok == "+inf" || tok == "Inf" || tok == "+Inf") {
    out = HUGE_VAL;
    return true;
  }
  if (tok == "-inf" || tok == "-Inf") {
    out = -HUGE_VAL;
    return true;
  }
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

template <class Int>
bool parse_int(std::string_view tok, Int& out) {
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line);

// Splits text into lines, keeping 1-based numbering and skipping nothing.
std::vector<std::string_view> split_lines(std::string_view text);

std::string read_file(const std::filesystem::path& path);

// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace qnas::textio
