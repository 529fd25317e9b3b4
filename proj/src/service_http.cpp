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

#include <httplib.h>

#include <json.hpp>

#include "linkforge/error.hpp"
#include "linkforge/io_util.hpp"
#include "linkforge/service_api.hpp"

namespace linkforge {
namespace {

using Json = nlohmann::json;

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSession:
    case ErrorCode::kUnknownLink:
      return 404;
    case ErrorCode::kAlreadyDecided:
    case ErrorCode::kBudgetExhausted:
      return 409;
    case ErrorCode::kIo:
      return 500;
    default:
      return 400;
  }
}

void SendError(httplib::Response& res, int status, std::string_view code,
               const std::string& message) {
  res.status = status;
  res.set_content(Json{{"code", code}, {"message", message}}.dump(),
                  "application/json");
}

Json EntryJson(const RankingEntry& e) {
  return Json{{"source", e.candidate.source},
              {"target", e.candidate.target},
              {"p_est", e.candidate.p},
              {"gain", e.gain},
              {"rank", e.rank},
              {"accepted_on_source", e.accepted_on_source}};
}

bool SafeRef(const std::string& ref) {
  return !ref.empty() && ref.find('/') == std::string::npos &&
         ref.find('\\') == std::string::npos && ref.find("..") == std::string::npos;
}

// Runs a handler and turns exceptions into {code, message} bodies.
template <typename F>
void Guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    SendError(res, HttpStatusFor(e.code()), ErrorCodeName(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    SendError(res, 400, "BadRequest", e.what());
  } catch (const std::exception& e) {
    SendError(res, 500, "Internal", e.what());
  }
}

}  // namespace

struct ReviewServer::Impl {
  ServerOptions options;
  httplib::Server server;
  int port = -1;

  PlacementProblem ResolveProblem(const Json& body) const {
    PlacementProblem problem;
    if (body.contains("problem")) {
      problem = ProblemFromJson(body.at("problem").dump());
    } else if (body.contains("problem_ref")) {
      const std::string ref = body.at("problem_ref").get<std::string>();
      if (!options.problems_dir) {
        throw Error(ErrorCode::kInvalidProblem, "server has no problems directory");
      }
      if (!SafeRef(ref)) {
        throw Error(ErrorCode::kInvalidProblem, "bad problem_ref " + ref);
      }
      const auto path = *options.problems_dir / (ref + ".json");
      if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::kInvalidProblem, "no problem named " + ref);
      }
      problem = ProblemFromJson(ReadFile(path.string()));
    } else {
      throw Error(ErrorCode::kInvalidProblem, "need problem or problem_ref");
    }
    if (body.contains("objective")) {
      problem.objective = ParseObjective(body.at("objective").get<std::string>());
    }
    if (body.contains("budget")) problem.budget = body.at("budget").get<int>();
    problem.Validate();
    return problem;
  }
};

ReviewServer::ReviewServer(ServerOptions options, SessionStore::Clock clock)
    : impl_(std::make_unique<Impl>()),
      store_(std::make_unique<SessionStore>(options.data_dir, std::move(clock))) {
  impl_->options = std::move(options);
  auto& srv = impl_->server;
  SessionStore* store = store_.get();
  Impl* impl = impl_.get();

  srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });

  srv.Post("/sessions", [store, impl](const httplib::Request& req,
                                      httplib::Response& res) {
    Guarded(res, [&] {
      const Json body = Json::parse(req.body);
      const std::string id = store->Create(impl->ResolveProblem(body));
      res.status = 201;
      res.set_content(Json{{"session_id", id}}.dump(), "application/json");
    });
  });

  srv.Get(R"(/sessions/([^/]+)/suggestions)",
          [store](const httplib::Request& req, httplib::Response& res) {
            Guarded(res, [&] {
              std::size_t n = 50;
              if (req.has_param("n")) {
                const auto v = ParseInt(req.get_param_value("n"));
                if (v < 0) throw Error(ErrorCode::kUsage, "n must be >= 0");
                n = static_cast<std::size_t>(v);
              }
              Json out = Json::array();
              for (const auto& e : store->Suggestions(req.matches[1], n)) {
                out.push_back(EntryJson(e));
              }
              res.set_content(out.dump(), "application/json");
            });
          });

  srv.Post(R"(/sessions/([^/]+)/decisions)",
           [store](const httplib::Request& req, httplib::Response& res) {
             Guarded(res, [&] {
               const Json body = Json::parse(req.body);
               Link link{body.at("source").get<std::string>(),
                         body.at("target").get<std::string>()};
               const Verdict verdict = ParseVerdict(body.at("verdict").get<std::string>());
               const std::string actor = body.value("actor", std::string());
               const DecisionResult r =
                   store->Decide(req.matches[1], std::move(link), verdict, actor);
               Json changes = Json::array();
               for (const auto& c : r.changed_ranks) {
                 changes.push_back({{"source", c.link.source},
                                    {"target", c.link.target},
                                    {"old_rank", c.old_rank},
                                    {"new_rank", c.new_rank},
                                    {"old_gain", c.old_gain},
                                    {"new_gain", c.new_gain}});
               }
               res.set_content(Json{{"remaining_budget", r.remaining_budget},
                                    {"changed_ranks", std::move(changes)}}
                                   .dump(),
                               "application/json");
             });
           });

  srv.Get(R"(/sessions/([^/]+)/export)",
          [store](const httplib::Request& req, httplib::Response& res) {
            Guarded(res, [&] {
              res.set_content(store->Export(req.matches[1]), "application/x-ndjson");
            });
          });
}

ReviewServer::~ReviewServer() { Stop(); }

int ReviewServer::Bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(o.host);
  } else {
    impl_->port = impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
  }
  if (impl_->port < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  return impl_->port;
}

void ReviewServer::Serve() {
  if (impl_->port < 0) Bind();
  impl_->server.listen_after_bind();
}

void ReviewServer::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace linkforge
