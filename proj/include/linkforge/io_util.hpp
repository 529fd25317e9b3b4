// Copyright 2026 The Authors.
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

#ifndef LINKFORGE_IO_UTIL_HPP_
#define LINKFORGE_IO_UTIL_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace linkforge {

std::vector<std::string_view> SplitTabs(std::string_view line);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

double ParseDouble(std::string_view text);
std::int64_t ParseInt(std::string_view text);

std::string ReadFile(const std::string& path);
std::vector<std::string> ReadLines(const std::string& path);

// Writes to `path.tmp` and renames over `path`.
void WriteFileAtomic(const std::string& path, std::string_view contents);

std::string Sha256Hex(std::string_view bytes);
std::string Sha256File(const std::string& path);

}  // namespace linkforge

#endif  // LINKFORGE_IO_UTIL_HPP_
