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

// Access-log ingestion: TSV parsing, URL normalization, user-id hashing and
// bot filtering. Everything here is pure and thread-safe.

#ifndef LINKFORGE_LOG_INGEST_HPP_
#define LINKFORGE_LOG_INGEST_HPP_

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace linkforge {

using Timestamp = std::int64_t;  // epoch milliseconds, UTC

// 32 lowercase hex characters.
struct UserId {
  std::string digest;

  friend bool operator==(const UserId&, const UserId&) = default;
  friend auto operator<=>(const UserId&, const UserId&) = default;
};

struct LogRecord {
  Timestamp timestamp = 0;
  std::string ip;
  std::string xff;
  std::string user_agent;
  std::string url;
  std::string referer;
  int status = 0;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

// Column positions of the seven fields inside a line. The default is the
// canonical order: timestamp, ip, xff, user_agent, url, referer, status.
struct LogFormat {
  int timestamp = 0;
  int ip = 1;
  int xff = 2;
  int user_agent = 3;
  int url = 4;
  int referer = 5;
  int status = 6;
  // Hosts served by this site. Absolute referers on these hosts are rewritten
  // to their path so they join against requested URLs.
  std::set<std::string> site_hosts;

  static constexpr int kColumns = 7;
};

// Lowercases scheme and host, strips the fragment and trailing slashes.
// Idempotent.
std::string NormalizeUrl(std::string_view url);

// The join key used for referer matching: the normalized URL without its
// query string.
std::string PageIdentifier(std::string_view normalized_url);

// Host part of an absolute URL, lowercased; empty for relative URLs.
std::string UrlHost(std::string_view url);

// Throws Error{kMalformedLine | kBadTimestamp | kBadStatus}.
LogRecord ParseLogLine(std::string_view line,
                       const LogFormat& format = LogFormat{});

// MD5 over ip + "|" + xff + "|" + user_agent.
UserId DeriveUserId(std::string_view ip, std::string_view xff,
                    std::string_view user_agent);

// Hex MD5 of arbitrary bytes.
std::string Md5Hex(std::string_view bytes);

const std::vector<std::string>& DefaultBotPatterns();

// Case-insensitive substring match against any pattern.
bool IsBot(std::string_view user_agent,
           const std::vector<std::string>& denylist);

// One pattern per line; blank lines and lines starting with '#' are skipped.
std::vector<std::string> LoadPatternFile(const std::string& path);

// Streams lines from a plain or gzip-compressed file.
void ForEachLine(const std::string& path,
                 const std::function<void(std::string_view)>& fn);

struct IngestedRecord {
  UserId user;
  LogRecord record;
};

struct IngestCounters {
  std::int64_t lines = 0;
  std::int64_t kept = 0;
  std::int64_t malformed = 0;
  std::int64_t bad_timestamp = 0;
  std::int64_t bad_status = 0;
  std::int64_t bots = 0;
  std::int64_t non_success = 0;
};

struct IngestOptions {
  LogFormat format;
  std::vector<std::string> bot_patterns = DefaultBotPatterns();
};

struct IngestResult {
  // Sorted by (user, timestamp), ties kept in input order.
  std::vector<IngestedRecord> records;
  IngestCounters counters;
};

// Parses, filters bots and non-2xx responses, derives user ids. Bad lines
// are counted, never fatal. Files are processed in parallel.
IngestResult IngestLogFiles(const std::vector<std::string>& paths,
                            const IngestOptions& options);

IngestResult IngestLines(const std::vector<std::string>& lines,
                         const IngestOptions& options);

// Ingested-record TSV: user, timestamp, url, referer.
std::string FormatIngestedRecord(const IngestedRecord& r);
IngestedRecord ParseIngestedRecord(std::string_view line);

}  // namespace linkforge

#endif  // LINKFORGE_LOG_INGEST_HPP_
