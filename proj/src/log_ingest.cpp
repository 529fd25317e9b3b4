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

#include "linkforge/log_ingest.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

#include "linkforge/error.hpp"
#include "linkforge/io_util.hpp"

namespace linkforge {
namespace {

char Lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), Lower);
  return out;
}

// Drops trailing '/' from the path portion of `s` (everything before '?'),
// never reducing a bare "/" or an authority to nothing.
std::string StripTrailingSlashes(std::string s, std::size_t path_start) {
  const std::size_t q = s.find('?');
  std::size_t path_end = q == std::string::npos ? s.size() : q;
  std::size_t cut = path_end;
  while (cut > path_start && s[cut - 1] == '/') --cut;
  if (cut == 0) cut = 1;  // keep a lone "/"
  if (cut < path_end) s.erase(cut, path_end - cut);
  return s;
}

}  // namespace

std::string NormalizeUrl(std::string_view url) {
  std::string_view u = url;
  if (const auto hash = u.find('#'); hash != std::string_view::npos) {
    u = u.substr(0, hash);
  }
  const std::size_t scheme_end = u.find("://");
  if (scheme_end == std::string_view::npos) {
    return StripTrailingSlashes(std::string(u), 0);
  }
  const std::size_t host_start = scheme_end + 3;
  std::size_t host_end = u.find_first_of("/?", host_start);
  if (host_end == std::string_view::npos) host_end = u.size();
  std::string out = ToLower(u.substr(0, host_end));
  out.append(u.substr(host_end));
  return StripTrailingSlashes(std::move(out), host_end);
}

std::string PageIdentifier(std::string_view normalized_url) {
  const auto q = normalized_url.find('?');
  return std::string(normalized_url.substr(0, q));
}

std::string UrlHost(std::string_view url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) return {};
  const std::size_t host_start = scheme_end + 3;
  std::size_t host_end = url.find_first_of("/?:", host_start);
  if (host_end == std::string_view::npos) host_end = url.size();
  return ToLower(url.substr(host_start, host_end - host_start));
}

LogRecord ParseLogLine(std::string_view line, const LogFormat& format) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto cols = SplitTabs(line);
  if (static_cast<int>(cols.size()) != LogFormat::kColumns) {
    throw Error(ErrorCode::kMalformedLine,
                "expected 7 columns, got " + std::to_string(cols.size()));
  }
  LogRecord r;
  {
    const auto ts = cols[format.timestamp];
    auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(),
                                     r.timestamp);
    if (ts.empty() || ec != std::errc() || ptr != ts.data() + ts.size() ||
        r.timestamp <= 0) {
      throw Error(ErrorCode::kBadTimestamp,
                  "bad timestamp '" + std::string(ts) + "'");
    }
  }
  {
    const auto st = cols[format.status];
    auto [ptr, ec] =
        std::from_chars(st.data(), st.data() + st.size(), r.status);
    if (st.empty() || ec != std::errc() || ptr != st.data() + st.size() ||
        r.status < 100 || r.status > 599) {
      throw Error(ErrorCode::kBadStatus,
                  "bad status '" + std::string(st) + "'");
    }
  }
  r.ip = cols[format.ip];
  r.xff = cols[format.xff];
  r.user_agent = cols[format.user_agent];
  r.url = NormalizeUrl(cols[format.url]);
  if (r.url.empty()) throw Error(ErrorCode::kMalformedLine, "empty url");
  r.referer = NormalizeUrl(cols[format.referer]);
  if (!r.referer.empty() && !format.site_hosts.empty()) {
    const std::string host = UrlHost(r.referer);
    if (!host.empty() && format.site_hosts.contains(host)) {
      const std::size_t path =
          r.referer.find_first_of("/?", r.referer.find("://") + 3);
      r.referer = path == std::string::npos ? std::string("/")
                                            : NormalizeUrl(r.referer.substr(path));
    }
  }
  return r;
}

std::string Md5Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_md5(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xf]);
  }
  return out;
}

UserId DeriveUserId(std::string_view ip, std::string_view xff,
                    std::string_view user_agent) {
  std::string joined;
  joined.reserve(ip.size() + xff.size() + user_agent.size() + 2);
  joined.append(ip).append("|").append(xff).append("|").append(user_agent);
  return UserId{Md5Hex(joined)};
}

const std::vector<std::string>& DefaultBotPatterns() {
  static const std::vector<std::string> kPatterns = {"bot", "crawler",
                                                     "spider", "slurp"};
  return kPatterns;
}

bool IsBot(std::string_view user_agent,
           const std::vector<std::string>& denylist) {
  const std::string ua = ToLower(user_agent);
  for (const auto& pattern : denylist) {
    if (pattern.empty()) continue;
    if (ua.find(ToLower(pattern)) != std::string::npos) return true;
  }
  return false;
}

std::vector<std::string> LoadPatternFile(const std::string& path) {
  std::vector<std::string> out;
  for (auto& line : ReadLines(path)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

void ForEachLine(const std::string& path,
                 const std::function<void(std::string_view)>& fn) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::array<char, 1 << 16> buf;
  std::string pending;
  while (gzgets(file, buf.data(), static_cast<int>(buf.size())) != nullptr) {
    pending.append(buf.data());
    if (pending.empty() || pending.back() != '\n') continue;
    pending.pop_back();
    if (!pending.empty() && pending.back() == '\r') pending.pop_back();
    fn(pending);
    pending.clear();
  }
  int err = 0;
  gzerror(file, &err);
  gzclose(file);
  if (err != Z_OK && err != Z_STREAM_END) {
    throw Error(ErrorCode::kIo, "read error in " + path);
  }
  if (!pending.empty()) fn(pending);
}

namespace {

struct Tagged {
  IngestedRecord rec;
  std::size_t order;
};

void IngestOne(std::string_view line, std::size_t order,
               const IngestOptions& options, std::vector<Tagged>& out,
               IngestCounters& counters) {
  if (line.empty()) return;
  ++counters.lines;
  LogRecord r;
  try {
    r = ParseLogLine(line, options.format);
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::kBadTimestamp: ++counters.bad_timestamp; break;
      case ErrorCode::kBadStatus: ++counters.bad_status; break;
      default: ++counters.malformed; break;
    }
    return;
  }
  if (IsBot(r.user_agent, options.bot_patterns)) {
    ++counters.bots;
    return;
  }
  if (r.status < 200 || r.status > 299) {
    ++counters.non_success;
    return;
  }
  ++counters.kept;
  UserId user = DeriveUserId(r.ip, r.xff, r.user_agent);
  out.push_back(Tagged{IngestedRecord{std::move(user), std::move(r)}, order});
}

void Accumulate(IngestCounters& into, const IngestCounters& c) {
  into.lines += c.lines;
  into.kept += c.kept;
  into.malformed += c.malformed;
  into.bad_timestamp += c.bad_timestamp;
  into.bad_status += c.bad_status;
  into.bots += c.bots;
  into.non_success += c.non_success;
}

IngestResult Finish(std::vector<std::vector<Tagged>> shards,
                    std::vector<IngestCounters> counters) {
  IngestResult result;
  std::vector<Tagged> all;
  for (auto& shard : shards) {
    for (auto& t : shard) all.push_back(std::move(t));
  }
  for (const auto& c : counters) Accumulate(result.counters, c);
  std::stable_sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
    if (a.rec.user != b.rec.user) return a.rec.user < b.rec.user;
    if (a.rec.record.timestamp != b.rec.record.timestamp) {
      return a.rec.record.timestamp < b.rec.record.timestamp;
    }
    return a.order < b.order;
  });
  result.records.reserve(all.size());
  for (auto& t : all) result.records.push_back(std::move(t.rec));
  return result;
}

}  // namespace

IngestResult IngestLogFiles(const std::vector<std::string>& paths,
                            const IngestOptions& options) {
  const auto n = static_cast<std::int64_t>(paths.size());
  std::vector<std::vector<Tagged>> shards(paths.size());
  std::vector<IngestCounters> counters(paths.size());
  std::vector<std::string> errors(paths.size());
  // Order key: file index in the high bits keeps ties in input order.
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      std::size_t line_no = 0;
      ForEachLine(paths[i], [&](std::string_view line) {
        IngestOne(line, (static_cast<std::size_t>(i) << 40) | line_no++,
                  options, shards[i], counters[i]);
      });
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(ErrorCode::kIo, e);
  }
  return Finish(std::move(shards), std::move(counters));
}

IngestResult IngestLines(const std::vector<std::string>& lines,
                         const IngestOptions& options) {
  std::vector<std::vector<Tagged>> shards(1);
  std::vector<IngestCounters> counters(1);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    IngestOne(lines[i], i, options, shards[0], counters[0]);
  }
  return Finish(std::move(shards), std::move(counters));
}

std::string FormatIngestedRecord(const IngestedRecord& r) {
  std::string out = r.user.digest;
  out.push_back('\t');
  out += std::to_string(r.record.timestamp);
  out.push_back('\t');
  out += r.record.url;
  out.push_back('\t');
  out += r.record.referer;
  return out;
}

IngestedRecord ParseIngestedRecord(std::string_view line) {
  const auto cols = SplitTabs(line);
  if (cols.size() != 4) {
    throw Error(ErrorCode::kMalformedLine,
                "ingested record needs 4 columns, got " +
                    std::to_string(cols.size()));
  }
  IngestedRecord r;
  r.user.digest = cols[0];
  try {
    r.record.timestamp = ParseInt(cols[1]);
  } catch (const Error&) {
    throw Error(ErrorCode::kBadTimestamp, "bad timestamp in ingested record");
  }
  r.record.url = cols[2];
  r.record.referer = cols[3];
  r.record.status = 200;
  return r;
}

}  // namespace linkforge
