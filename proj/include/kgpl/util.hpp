/* Copyright 2026 The KGPL Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef KGPL_UTIL_HPP_
#define KGPL_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kgpl {

// Whitespace-delimited fields of a line (tabs and spaces).
std::vector<std::string_view> split_fields(std::string_view line);

// Splits on a single-character delimiter, keeping empty fields.
std::vector<std::string> split_on(std::string_view text, char delim);

std::string_view trim(std::string_view s);

// Strict non-negative integer parse; returns false on any junk.
bool parse_u64(std::string_view s, std::uint64_t& out);

// 64-bit FNV-1a over file contents, lowercase hex.
std::string file_hash(const std::filesystem::path& path);

// Shortest round-trippable decimal form.
std::string format_double(double v);

// Logging goes through spdlog inside the library; this only sets the level
// ("trace", "debug", "info", "warn", "error", "off").
void set_log_level(const std::string& level);

}  // namespace kgpl

#endif  // KGPL_UTIL_HPP_
