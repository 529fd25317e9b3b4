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

// Interactive review of link suggestions. A session ranks the remaining
// candidates by their marginal gain given the links accepted so far and
// re-ranks a source's candidates whenever one of its links is accepted.

#ifndef LINKFORGE_SERVICE_API_HPP_
#define LINKFORGE_SERVICE_API_HPP_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "linkforge/link_placement.hpp"

namespace linkforge {

enum class Verdict { kAccept, kDecline };

std::string_view VerdictName(Verdict v);
Verdict ParseVerdict(std::string_view name);  // throws Error{kUsage}

struct Decision {
  Link link;
  Verdict verdict = Verdict::kAccept;
  std::string actor;
  Timestamp timestamp = 0;
};

struct RankingEntry {
  Candidate candidate;
  double gain = 0.0;
  int rank = 0;  // 1-based
  int accepted_on_source = 0;
};

struct RankChange {
  Link link;
  int old_rank = 0;  // 0 when newly present
  int new_rank = 0;  // 0 when removed
  double old_gain = 0.0;
  double new_gain = 0.0;
};

struct DecisionResult {
  int remaining_budget = 0;
  std::vector<RankChange> changed_ranks;
};

class ReviewSession {
 public:
  // Throws Error{kInvalidProblem}.
  ReviewSession(std::string id, PlacementProblem problem);

  const std::string& id() const { return id_; }
  const PlacementProblem& problem() const { return problem_; }
  int remaining_budget() const;

  // Top n of the current ranking.
  std::vector<RankingEntry> Suggestions(std::size_t n) const;
  const std::vector<RankingEntry>& ranking() const { return ranking_; }

  // Throws Error{kUnknownLink | kAlreadyDecided | kBudgetExhausted} without
  // changing anything.
  void Check(const Decision& decision) const;
  DecisionResult Apply(const Decision& decision);

  // Accepted links in decision order; gains as of acceptance.
  const std::vector<ChosenLink>& accepted() const { return accepted_; }
  const std::vector<Decision>& decisions() const { return decisions_; }
  std::string ExportJsonl() const;

  // Canonical dump of accepted, declined and ranking for equality checks.
  std::string StateJson() const;

 private:
  void Rerank();
  bool Eligible(const Candidate& c) const;

  std::string id_;
  PlacementProblem problem_;
  std::map<Link, std::size_t> index_;  // candidate position
  std::set<Link> accepted_set_;
  std::set<Link> declined_;
  std::vector<ChosenLink> accepted_;
  std::vector<Decision> decisions_;
  std::map<std::string, SourceState> state_;
  std::map<std::string, int> accepted_per_source_;
  std::vector<RankingEntry> ranking_;
};

// Sessions with an append-only decision journal per session. Without a
// directory the store is memory-only.
class SessionStore {
 public:
  using Clock = std::function<Timestamp()>;

  explicit SessionStore(std::optional<std::filesystem::path> dir = std::nullopt,
                        Clock clock = nullptr);

  std::string Create(PlacementProblem problem);
  std::vector<RankingEntry> Suggestions(const std::string& id,
                                        std::size_t n) const;
  // Journals the decision before applying it.
  DecisionResult Decide(const std::string& id, Link link, Verdict verdict,
                        const std::string& actor);
  std::string Export(const std::string& id) const;
  std::string StateJson(const std::string& id) const;
  std::vector<std::string> Ids() const;

  // Rebuilds a session from its problem snapshot and journal.
  static ReviewSession Replay(const std::filesystem::path& session_dir);

 private:
  struct Slot {
    explicit Slot(ReviewSession s) : session(std::move(s)) {}
    mutable std::shared_mutex mu;
    ReviewSession session;
  };
  std::shared_ptr<Slot> Find(const std::string& id) const;

  std::optional<std::filesystem::path> dir_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::uint64_t next_id_ = 1;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> data_dir;
  std::optional<std::filesystem::path> problems_dir;
};

// HTTP+JSON front end over a SessionStore.
class ReviewServer {
 public:
  ReviewServer(ServerOptions options, SessionStore::Clock clock = nullptr);
  ~ReviewServer();

  // Binds; returns the bound port (useful with port 0).
  int Bind();
  // Blocks until Stop().
  void Serve();
  void Stop();

  SessionStore& store() { return *store_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::unique_ptr<SessionStore> store_;
};

}  // namespace linkforge

#endif  // LINKFORGE_SERVICE_API_HPP_
