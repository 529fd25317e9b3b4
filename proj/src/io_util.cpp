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

#include "linkforge/io_util.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "linkforge/error.hpp"

namespace linkforge {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kBadTimestamp: return "BadTimestamp";
    case ErrorCode::kBadStatus: return "BadStatus";
    case ErrorCode::kWindowMismatch: return "WindowMismatch";
    case ErrorCode::kZeroViews: return "ZeroViews";
    case ErrorCode::kAllStops: return "AllStops";
    case ErrorCode::kUnknownSource: return "UnknownSource";
    case ErrorCode::kNonConvergent: return "NonConvergent";
    case ErrorCode::kNoExistingLinks: return "NoExistingLinks";
    case ErrorCode::kUnknownCandidate: return "UnknownCandidate";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kEmptySeries: return "EmptySeries";
    case ErrorCode::kDegenerateVariance: return "DegenerateVariance";
    case ErrorCode::kBadK: return "BadK";
    case ErrorCode::kDisconnectedPair: return "DisconnectedPair";
    case ErrorCode::kInvalidProblem: return "InvalidProblem";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kUnknownLink: return "UnknownLink";
    case ErrorCode::kAlreadyDecided: return "AlreadyDecided";
    case ErrorCode::kBudgetExhausted: return "BudgetExhausted";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kUsage: return "Usage";
  }
  return "Unknown";
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string FormatDouble(double value) {
  std::array<char, 64> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error(ErrorCode::kIo, "cannot format double");
  return std::string(buf.data(), end);
}

double ParseDouble(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::kMalformedLine,
                "not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::int64_t ParseInt(std::string_view text) {
  std::int64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::kMalformedLine,
                "not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

void WriteFileAtomic(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "rename failed for " + path);
}

std::string Sha256Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(),
             nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xf]);
  }
  return out;
}

std::string Sha256File(const std::string& path) {
  return Sha256Hex(ReadFile(path));
}

}  // namespace linkforge
