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

// Pipeline driver. Each stage reads and writes files, writes its outputs
// atomically and leaves a manifest next to its primary output.

#ifndef LINKFORGE_CLI_HPP_
#define LINKFORGE_CLI_HPP_

#include <string>
#include <vector>

namespace linkforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNonConvergent = 4;

inline constexpr const char* kVersion = "linkforge 1.0.0";

// args excludes the program name.
int Run(const std::vector<std::string>& args);
int Main(int argc, char** argv);

}  // namespace linkforge::cli

#endif  // LINKFORGE_CLI_HPP_
