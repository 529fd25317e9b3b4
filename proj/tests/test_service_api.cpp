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


#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <json.hpp>

#include "linkforge/error.hpp"
#include "linkforge/service_api.hpp"
#include "oracles.hpp"

using namespace linkforge;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kIo;
}

PlacementProblem Siblings(Objective o, int budget = 3) {
  PlacementProblem p;
  p.objective = o;
  p.budget = budget;
  p.sources = {{"s", {1.0, 0.0}}, {"r", {1.0, 0.3}}};
  p.candidates = {{"s", "t", 0.2}, {"s", "u", 0.2}, {"r", "x", 0.15}, {"r", "y", 0.1}};
  return p;
}

const RankingEntry* Find(const std::vector<RankingEntry>& r, const std::string& s,
                         const std::string& t) {
  for (const auto& e : r) {
    if (e.candidate.source == s && e.candidate.target == t) return &e;
  }
  return nullptr;
}

Decision Accept(std::string s, std::string t) {
  return Decision{{std::move(s), std::move(t)}, Verdict::kAccept, "tester", 0};
}
Decision Decline(std::string s, std::string t) {
  return Decision{{std::move(s), std::move(t)}, Verdict::kDecline, "tester", 0};
}

fs::path FreshDir(const std::string& name) {
  const auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("f3 sibling loses its gain after an accept") {
  ReviewSession session("x", Siblings(Objective::kF3));
  const auto& r0 = session.ranking();
  REQUIRE(r0.size() == 4);
  CHECK(Find(r0, "s", "u")->gain == 1.0);
  CHECK(Find(r0, "s", "u")->rank == 2);
  const int rank_before = Find(r0, "s", "u")->rank;
  const auto result = session.Apply(Accept("s", "t"));
  CHECK(result.remaining_budget == 2);
  const auto& r1 = session.ranking();
  REQUIRE(r1.size() == 3);
  const auto* u = Find(r1, "s", "u");
  CHECK(std::abs(u->gain) <= 1e-12);
  CHECK(u->rank > rank_before);
  CHECK(u->rank == 3);
  CHECK(u->accepted_on_source == 1);
  bool reported = false;
  for (const auto& c : result.changed_ranks) {
    if (c.link == Link{"s", "u"}) {
      reported = true;
      CHECK(c.old_gain == 1.0);
      CHECK(c.new_rank == 3);
    }
    if (c.link == Link{"s", "t"}) CHECK(c.new_rank == 0);
  }
  CHECK(reported);
}

TEST_CASE("f1 accepts leave other gains alone") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    auto p = oracle::RandomProblem(rng, Objective::kF1);
    p.budget = std::max(p.budget, 1);
    ReviewSession session("x", p);
    if (session.ranking().empty()) continue;
    std::map<Link, double> before;
    for (const auto& e : session.ranking()) before[e.candidate.link()] = e.gain;
    const auto head = session.ranking().front().candidate.link();
    session.Apply(Accept(head.source, head.target));
    for (const auto& e : session.ranking()) {
      CHECK(e.gain == before.at(e.candidate.link()));
    }
  }
}

TEST_CASE("decisions on one source leave other sources untouched") {
  std::mt19937_64 rng(2);
  for (auto o : {Objective::kF2, Objective::kF3}) {
    for (int i = 0; i < 30; ++i) {
      auto p = oracle::RandomProblem(rng, o);
      p.budget = std::max(p.budget, 1);
      ReviewSession session("x", p);
      if (session.ranking().empty()) continue;
      std::map<Link, double> before;
      for (const auto& e : session.ranking()) before[e.candidate.link()] = e.gain;
      const auto head = session.ranking().front().candidate.link();
      session.Apply(Accept(head.source, head.target));
      for (const auto& e : session.ranking()) {
        if (e.candidate.source != head.source) {
          CHECK(e.gain == before.at(e.candidate.link()));
        }
      }
    }
  }
}

TEST_CASE("declining the head promotes the next entry") {
  ReviewSession session("x", Siblings(Objective::kF2));
  const auto second = session.ranking()[1].candidate.link();
  std::map<Link, double> before;
  for (const auto& e : session.ranking()) before[e.candidate.link()] = e.gain;
  const auto head = session.ranking().front().candidate.link();
  const auto r = session.Apply(Decline(head.source, head.target));
  CHECK(r.remaining_budget == 3);
  CHECK(session.ranking().front().candidate.link() == second);
  for (const auto& e : session.ranking()) CHECK(e.gain == before.at(e.candidate.link()));
}

TEST_CASE("decision errors") {
  ReviewSession session("x", Siblings(Objective::kF1, 1));
  CHECK(CodeOf([&] { session.Apply(Accept("s", "zzz")); }) == ErrorCode::kUnknownLink);
  session.Apply(Decline("r", "y"));
  CHECK(CodeOf([&] { session.Apply(Decline("r", "y")); }) == ErrorCode::kAlreadyDecided);
  session.Apply(Accept("s", "t"));
  CHECK(CodeOf([&] { session.Apply(Accept("s", "t")); }) == ErrorCode::kAlreadyDecided);
  CHECK(CodeOf([&] { session.Apply(Accept("s", "u")); }) == ErrorCode::kBudgetExhausted);
  CHECK_NOTHROW(session.Apply(Decline("s", "u")));
  CHECK(session.remaining_budget() == 0);
  CHECK(CodeOf([] { ParseVerdict("maybe"); }) == ErrorCode::kUsage);

  auto bad = Siblings(Objective::kF1);
  bad.candidates.push_back(bad.candidates.front());
  CHECK(CodeOf([&] { ReviewSession s("y", bad); }) == ErrorCode::kInvalidProblem);
}

TEST_CASE("suggestions and initial ranking") {
  PlacementProblem empty;
  empty.budget = 2;
  ReviewSession none("e", empty);
  CHECK(none.Suggestions(10).empty());

  std::mt19937_64 rng(3);
  for (auto o : {Objective::kF1, Objective::kF2, Objective::kF3}) {
    auto p = oracle::RandomProblem(rng, o);
    p.budget = 2;
    ReviewSession session("x", p);
    CHECK(session.Suggestions(0).empty());
    CHECK(session.Suggestions(1000).size() == session.ranking().size());
    const auto g = GreedyPlace(p);
    if (!g.chosen.empty()) {
      CHECK(session.Suggestions(1)[0].candidate.link() ==
            Link{g.chosen[0].source, g.chosen[0].target});
    }
    for (std::size_t i = 0; i < session.ranking().size(); ++i) {
      CHECK(session.ranking()[i].rank == static_cast<int>(i) + 1);
      if (i > 0) CHECK(session.ranking()[i].gain <= session.ranking()[i - 1].gain);
    }
  }
}

TEST_CASE("accepting the head until the budget runs out reproduces greedy") {
  std::mt19937_64 rng(4);
  for (auto o : {Objective::kF1, Objective::kF2, Objective::kF3}) {
    for (int i = 0; i < 30; ++i) {
      const auto p = oracle::RandomProblem(rng, o);
      ReviewSession session("x", p);
      while (session.remaining_budget() > 0 && !session.ranking().empty()) {
        const auto head = session.ranking().front().candidate.link();
        session.Apply(Accept(head.source, head.target));
      }
      const auto g = GreedyPlace(p);
      CHECK(session.accepted() == g.chosen);
      CHECK(session.ExportJsonl() == SolutionJsonl(g));
    }
  }
}

TEST_CASE("export lists accepts in decision order") {
  ReviewSession session("x", Siblings(Objective::kF1));
  CHECK(session.ExportJsonl().empty());
  session.Apply(Accept("r", "y"));
  session.Apply(Decline("s", "u"));
  session.Apply(Accept("s", "t"));
  session.Apply(Accept("r", "x"));
  const auto text = session.ExportJsonl();
  std::vector<std::string> targets;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    targets.push_back(Json::parse(text.substr(start, end - start)).at("target"));
    start = end + 1;
  }
  CHECK(targets == std::vector<std::string>{"y", "t", "x"});
}

TEST_CASE("journal replay restores the session") {
  const auto dir = FreshDir("linkforge_store_replay");
  std::string id, state, exported;
  {
    SessionStore store(dir, [] { return Timestamp{1234}; });
    id = store.Create(Siblings(Objective::kF3));
    const auto other = store.Create(Siblings(Objective::kF3));
    CHECK(other != id);
    store.Decide(id, {"s", "t"}, Verdict::kAccept, "a");
    store.Decide(id, {"r", "y"}, Verdict::kDecline, "b");
    store.Decide(id, {"r", "x"}, Verdict::kAccept, "a");
    CHECK(CodeOf([&] { store.Decide(id, {"r", "x"}, Verdict::kAccept, "a"); }) ==
          ErrorCode::kAlreadyDecided);
    state = store.StateJson(id);
    exported = store.Export(id);
  }
  // Rejected decisions never reach the journal.
  std::ifstream journal(dir / id / "journal.jsonl");
  int lines = 0;
  for (std::string line; std::getline(journal, line);) ++lines;
  CHECK(lines == 3);

  SessionStore reopened(dir);
  CHECK(reopened.StateJson(id) == state);
  CHECK(reopened.Export(id) == exported);
  CHECK(SessionStore::Replay(dir / id).StateJson() == state);
  // New ids continue after the replayed ones.
  const auto next = reopened.Create(Siblings(Objective::kF1));
  CHECK(next > id);
  CHECK(reopened.Ids().size() == 3);

  // A torn trailing write is ignored.
  {
    std::ofstream f(dir / id / "journal.jsonl", std::ios::app);
    f << R"({"source":"s","target":"u","verd)";
  }
  CHECK(SessionStore::Replay(dir / id).StateJson() == state);
  fs::remove_all(dir);
}

TEST_CASE("store errors") {
  SessionStore store;
  CHECK(CodeOf([&] { store.Suggestions("nope", 3); }) == ErrorCode::kUnknownSession);
  CHECK(CodeOf([&] { store.Export("nope"); }) == ErrorCode::kUnknownSession);
  const auto id = store.Create(Siblings(Objective::kF1));
  CHECK(CodeOf([&] { store.Decide(id, {"a", "b"}, Verdict::kAccept, ""); }) ==
        ErrorCode::kUnknownLink);
}

TEST_CASE("concurrent writers on one session are serialized") {
  const auto dir = FreshDir("linkforge_store_concurrent");
  PlacementProblem p;
  p.objective = Objective::kF2;
  p.budget = 40;
  for (int s = 0; s < 8; ++s) {
    p.sources[oracle::Name("s", s)] = {1.0 + s, 0.5};
    for (int t = 0; t < 10; ++t) {
      p.candidates.push_back({oracle::Name("s", s), oracle::Name("t", t), 0.05 + 0.01 * t});
    }
  }
  SessionStore store(dir);
  const auto id = store.Create(p);
  std::atomic<int> ok{0}, exhausted{0};
  std::vector<std::thread> threads;
  for (int w = 0; w < 8; ++w) {
    threads.emplace_back([&, w] {
      for (int t = 0; t < 10; ++t) {
        try {
          store.Decide(id, {oracle::Name("s", w), oracle::Name("t", t)}, Verdict::kAccept,
                       "w");
          ++ok;
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kBudgetExhausted) ++exhausted;
        }
        (void)store.Suggestions(id, 5);
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(ok == 40);
  CHECK(exhausted == 40);
  const auto state = store.StateJson(id);
  CHECK(Json::parse(state).at("remaining_budget") == 0);
  CHECK(SessionStore(dir).StateJson(id) == state);
  fs::remove_all(dir);
}

TEST_CASE("http api") {
  const auto data = FreshDir("linkforge_http_data");
  const auto problems = FreshDir("linkforge_http_problems");
  {
    std::ofstream f(problems / "demo.json");
    f << ProblemToJson(Siblings(Objective::kF1, 5));
  }
  ServerOptions opt;
  opt.port = 0;
  opt.data_dir = data;
  opt.problems_dir = problems;
  ReviewServer server(opt);
  const int port = server.Bind();
  REQUIRE(port > 0);
  std::thread serving([&] { server.Serve(); });
  httplib::Client cli("127.0.0.1", port);
  for (int i = 0; i < 200; ++i) {
    if (auto r = cli.Get("/healthz"); r && r->status == 200) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  auto health = cli.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);

  const auto json = [](const httplib::Result& r) { return Json::parse(r->body); };

  // Create from a stored problem, overriding objective and budget.
  auto created = cli.Post("/sessions",
                          R"({"problem_ref":"demo","objective":"f3","budget":2})",
                          "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const std::string id = json(created).at("session_id");

  auto sugg = cli.Get("/sessions/" + id + "/suggestions?n=2");
  REQUIRE(sugg);
  CHECK(sugg->status == 200);
  const auto list = json(sugg);
  REQUIRE(list.size() == 2);
  CHECK(list[0].at("rank") == 1);
  for (const char* key : {"source", "target", "p_est", "gain", "rank", "accepted_on_source"}) {
    CHECK(list[0].contains(key));
  }
  CHECK(json(cli.Get("/sessions/" + id + "/suggestions")).size() == 4);

  auto decided = cli.Post("/sessions/" + id + "/decisions",
                          R"({"source":"s","target":"t","verdict":"accept","actor":"ed"})",
                          "application/json");
  REQUIRE(decided);
  CHECK(decided->status == 200);
  const auto d = json(decided);
  CHECK(d.at("remaining_budget") == 1);
  bool sibling_dropped = false;
  for (const auto& c : d.at("changed_ranks")) {
    if (c.at("target") == "u") sibling_dropped = c.at("new_gain").get<double>() == 0.0;
  }
  CHECK(sibling_dropped);

  auto again = cli.Post("/sessions/" + id + "/decisions",
                        R"({"source":"s","target":"t","verdict":"decline"})",
                        "application/json");
  CHECK(again->status == 409);
  CHECK(json(again).at("code") == "AlreadyDecided");

  auto unknown_link = cli.Post("/sessions/" + id + "/decisions",
                               R"({"source":"s","target":"q","verdict":"accept"})",
                               "application/json");
  CHECK(unknown_link->status == 404);
  CHECK(json(unknown_link).at("code") == "UnknownLink");

  cli.Post("/sessions/" + id + "/decisions",
           R"({"source":"r","target":"x","verdict":"accept"})", "application/json");
  auto broke = cli.Post("/sessions/" + id + "/decisions",
                        R"({"source":"r","target":"y","verdict":"accept"})",
                        "application/json");
  CHECK(broke->status == 409);
  CHECK(json(broke).at("code") == "BudgetExhausted");

  auto exported = cli.Get("/sessions/" + id + "/export");
  REQUIRE(exported);
  CHECK(exported->status == 200);
  CHECK(exported->body == server.store().Export(id));
  CHECK(std::count(exported->body.begin(), exported->body.end(), '\n') == 2);

  auto missing = cli.Get("/sessions/nope/suggestions");
  CHECK(missing->status == 404);
  CHECK(json(missing).at("code") == "UnknownSession");
  CHECK(cli.Get("/sessions/nope/export")->status == 404);

  auto traversal = cli.Post("/sessions", R"({"problem_ref":"../demo"})", "application/json");
  CHECK(traversal->status == 400);
  CHECK(json(traversal).at("code") == "InvalidProblem");
  auto garbage = cli.Post("/sessions", "{not json", "application/json");
  CHECK(garbage->status == 400);
  CHECK(json(garbage).at("code") == "BadRequest");
  auto bad_verdict = cli.Post("/sessions/" + id + "/decisions",
                              R"({"source":"r","target":"y","verdict":"maybe"})",
                              "application/json");
  CHECK(bad_verdict->status == 400);

  // Inline problems work too and get distinct ids.
  const auto inline_body =
      Json{{"problem", Json::parse(ProblemToJson(Siblings(Objective::kF2)))}}.dump();
  const std::string a = json(cli.Post("/sessions", inline_body, "application/json")).at("session_id");
  const std::string b = json(cli.Post("/sessions", inline_body, "application/json")).at("session_id");
  CHECK(a != b);

  server.Stop();
  serving.join();

  // The journal survives the server.
  SessionStore reopened(data);
  CHECK(reopened.Export(id) == exported->body);
  fs::remove_all(data);
  fs::remove_all(problems);
}
