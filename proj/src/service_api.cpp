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

#include "linkforge/service_api.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>

#include <json.hpp>

#include "linkforge/error.hpp"
#include "linkforge/io_util.hpp"

namespace linkforge {

using Json = nlohmann::json;

std::string_view VerdictName(Verdict v) {
  return v == Verdict::kAccept ? "accept" : "decline";
}

Verdict ParseVerdict(std::string_view name) {
  if (name == "accept") return Verdict::kAccept;
  if (name == "decline") return Verdict::kDecline;
  throw Error(ErrorCode::kUsage, "verdict must be accept or decline");
}

ReviewSession::ReviewSession(std::string id, PlacementProblem problem)
    : id_(std::move(id)), problem_(std::move(problem)) {
  problem_.Validate();
  for (std::size_t i = 0; i < problem_.candidates.size(); ++i) {
    index_.emplace(problem_.candidates[i].link(), i);
  }
  Rerank();
}

int ReviewSession::remaining_budget() const {
  return problem_.budget - static_cast<int>(accepted_.size());
}

bool ReviewSession::Eligible(const Candidate& c) const {
  if (!(c.p > 0.0)) return false;
  const Link l = c.link();
  if (accepted_set_.contains(l) || declined_.contains(l)) return false;
  if (problem_.max_per_source) {
    auto it = accepted_per_source_.find(c.source);
    if (it != accepted_per_source_.end() && it->second >= *problem_.max_per_source) {
      return false;
    }
  }
  return true;
}

void ReviewSession::Rerank() {
  ranking_.clear();
  for (const auto& c : problem_.candidates) {
    if (!Eligible(c)) continue;
    RankingEntry e;
    e.candidate = c;
    auto st = state_.find(c.source);
    const SourceState state = st == state_.end() ? SourceState{} : st->second;
    e.gain = MarginalGain(problem_.objective, problem_.Source(c.source), state, c.p);
    auto acc = accepted_per_source_.find(c.source);
    e.accepted_on_source = acc == accepted_per_source_.end() ? 0 : acc->second;
    ranking_.push_back(std::move(e));
  }
  std::sort(ranking_.begin(), ranking_.end(),
            [](const RankingEntry& a, const RankingEntry& b) {
              return RanksBefore(a.gain, a.candidate, b.gain, b.candidate);
            });
  for (std::size_t i = 0; i < ranking_.size(); ++i) {
    ranking_[i].rank = static_cast<int>(i) + 1;
  }
}

std::vector<RankingEntry> ReviewSession::Suggestions(std::size_t n) const {
  const std::size_t k = std::min(n, ranking_.size());
  return {ranking_.begin(), ranking_.begin() + static_cast<std::ptrdiff_t>(k)};
}

void ReviewSession::Check(const Decision& d) const {
  auto it = index_.find(d.link);
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownLink,
                "not a candidate: " + d.link.source + " -> " + d.link.target);
  }
  if (accepted_set_.contains(d.link) || declined_.contains(d.link)) {
    throw Error(ErrorCode::kAlreadyDecided,
                d.link.source + " -> " + d.link.target + " already decided");
  }
  if (!Eligible(problem_.candidates[it->second])) {
    throw Error(ErrorCode::kUnknownLink,
                d.link.source + " -> " + d.link.target + " is not in the ranking");
  }
  if (d.verdict == Verdict::kAccept && remaining_budget() <= 0) {
    throw Error(ErrorCode::kBudgetExhausted, "no budget left");
  }
}

DecisionResult ReviewSession::Apply(const Decision& d) {
  Check(d);
  std::map<Link, std::pair<int, double>> before;
  for (const auto& e : ranking_) before[e.candidate.link()] = {e.rank, e.gain};

  const Candidate& c = problem_.candidates[index_.at(d.link)];
  if (d.verdict == Verdict::kAccept) {
    const SourceInfo& info = problem_.Source(c.source);
    SourceState& state = state_[c.source];
    accepted_.push_back({c.source, c.target, c.p,
                         MarginalGain(problem_.objective, info, state, c.p)});
    state = Advance(problem_.objective, info, state, c.p);
    accepted_set_.insert(d.link);
    ++accepted_per_source_[c.source];
  } else {
    declined_.insert(d.link);
  }
  decisions_.push_back(d);
  Rerank();

  DecisionResult result;
  result.remaining_budget = remaining_budget();
  std::map<Link, std::pair<int, double>> after;
  for (const auto& e : ranking_) after[e.candidate.link()] = {e.rank, e.gain};
  for (const auto& [link, rg] : before) {
    auto it = after.find(link);
    if (it == after.end()) {
      result.changed_ranks.push_back({link, rg.first, 0, rg.second, 0.0});
    } else if (it->second != rg) {
      result.changed_ranks.push_back(
          {link, rg.first, it->second.first, rg.second, it->second.second});
    }
  }
  for (const auto& [link, rg] : after) {
    if (!before.contains(link)) {
      result.changed_ranks.push_back({link, 0, rg.first, 0.0, rg.second});
    }
  }
  std::sort(result.changed_ranks.begin(), result.changed_ranks.end(),
            [](const RankChange& a, const RankChange& b) {
              const int ra = a.new_rank == 0 ? INT32_MAX : a.new_rank;
              const int rb = b.new_rank == 0 ? INT32_MAX : b.new_rank;
              if (ra != rb) return ra < rb;
              return a.link < b.link;
            });
  return result;
}

std::string ReviewSession::ExportJsonl() const {
  PlacementSolution s;
  s.chosen = accepted_;
  return SolutionJsonl(s);
}

std::string ReviewSession::StateJson() const {
  Json j;
  Json acc = Json::array();
  for (const auto& a : accepted_) {
    acc.push_back({a.source, a.target, a.p, a.marginal_gain});
  }
  j["accepted"] = std::move(acc);
  Json dec = Json::array();
  for (const auto& l : declined_) dec.push_back({l.source, l.target});
  j["declined"] = std::move(dec);
  Json rank = Json::array();
  for (const auto& e : ranking_) {
    rank.push_back({e.rank, e.candidate.source, e.candidate.target, e.candidate.p,
                    e.gain, e.accepted_on_source});
  }
  j["ranking"] = std::move(rank);
  j["remaining_budget"] = remaining_budget();
  return j.dump();
}

namespace {

namespace fs = std::filesystem;

Json DecisionToJson(const Decision& d) {
  return Json{{"source", d.link.source},
              {"target", d.link.target},
              {"verdict", VerdictName(d.verdict)},
              {"actor", d.actor},
              {"ts", d.timestamp}};
}

Decision DecisionFromJson(const Json& j) {
  Decision d;
  d.link = {j.at("source").get<std::string>(), j.at("target").get<std::string>()};
  d.verdict = ParseVerdict(j.at("verdict").get<std::string>());
  d.actor = j.value("actor", std::string());
  d.timestamp = j.value("ts", Timestamp{0});
  return d;
}

void AppendDurably(const fs::path& path, const std::string& line) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw Error(ErrorCode::kIo, "cannot open journal " + path.string());
  const std::string data = line + "\n";
  const ssize_t written = ::write(fd, data.data(), data.size());
  const bool ok = written == static_cast<ssize_t>(data.size()) && ::fsync(fd) == 0;
  ::close(fd);
  if (!ok) throw Error(ErrorCode::kIo, "journal write failed for " + path.string());
}

Timestamp NowMs() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string FormatId(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%06llu", static_cast<unsigned long long>(n));
  return buf;
}

}  // namespace

SessionStore::SessionStore(std::optional<fs::path> dir, Clock clock)
    : dir_(std::move(dir)), clock_(clock ? std::move(clock) : Clock(NowMs)) {
  if (!dir_) return;
  fs::create_directories(*dir_);
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(*dir_)) {
    if (entry.is_directory() && fs::exists(entry.path() / "problem.json")) {
      subdirs.push_back(entry.path());
    }
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& d : subdirs) {
    ReviewSession s = Replay(d);
    const std::string id = s.id();
    if (id.size() > 1 && id[0] == 's') {
      try {
        next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(id.substr(1)) + 1);
      } catch (const std::exception&) {
      }
    }
    sessions_.emplace(id, std::make_shared<Slot>(std::move(s)));
  }
}

ReviewSession SessionStore::Replay(const fs::path& session_dir) {
  ReviewSession session(session_dir.filename().string(),
                        ProblemFromJson(ReadFile((session_dir / "problem.json").string())));
  const fs::path journal = session_dir / "journal.jsonl";
  if (fs::exists(journal)) {
    for (const auto& line : ReadLines(journal.string())) {
      if (line.empty()) continue;
      Json j;
      try {
        j = Json::parse(line);
      } catch (const nlohmann::json::exception&) {
        break;  // torn final write
      }
      session.Apply(DecisionFromJson(j));
    }
  }
  return session;
}

std::string SessionStore::Create(PlacementProblem problem) {
  std::lock_guard lock(mu_);
  const std::string id = FormatId(next_id_++);
  ReviewSession session(id, std::move(problem));
  if (dir_) {
    const fs::path d = *dir_ / id;
    fs::create_directories(d);
    WriteFileAtomic((d / "problem.json").string(), ProblemToJson(session.problem()));
  }
  sessions_.emplace(id, std::make_shared<Slot>(std::move(session)));
  return id;
}

std::shared_ptr<SessionStore::Slot> SessionStore::Find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::kUnknownSession, "no session " + id);
  }
  return it->second;
}

std::vector<RankingEntry> SessionStore::Suggestions(const std::string& id,
                                                    std::size_t n) const {
  auto slot = Find(id);
  std::shared_lock lock(slot->mu);
  return slot->session.Suggestions(n);
}

DecisionResult SessionStore::Decide(const std::string& id, Link link,
                                    Verdict verdict, const std::string& actor) {
  auto slot = Find(id);
  std::unique_lock lock(slot->mu);
  Decision d{std::move(link), verdict, actor, clock_()};
  slot->session.Check(d);
  if (dir_) {
    AppendDurably(*dir_ / id / "journal.jsonl", DecisionToJson(d).dump());
  }
  return slot->session.Apply(d);
}

std::string SessionStore::Export(const std::string& id) const {
  auto slot = Find(id);
  std::shared_lock lock(slot->mu);
  return slot->session.ExportJsonl();
}

std::string SessionStore::StateJson(const std::string& id) const {
  auto slot = Find(id);
  std::shared_lock lock(slot->mu);
  return slot->session.StateJson();
}

std::vector<std::string> SessionStore::Ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

}  // namespace linkforge
