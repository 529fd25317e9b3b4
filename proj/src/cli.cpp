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

#include "linkforge/cli.hpp"

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "linkforge/ctr_estimators.hpp"
#include "linkforge/error.hpp"
#include "linkforge/evaluation.hpp"
#include "linkforge/io_util.hpp"
#include "linkforge/kernels.hpp"
#include "linkforge/link_placement.hpp"
#include "linkforge/log_ingest.hpp"
#include "linkforge/service_api.hpp"
#include "linkforge/synth_gen.hpp"
#include "linkforge/trace_builder.hpp"
#include "linkforge/transition_stats.hpp"

namespace linkforge::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

// Records what a stage read and wrote. No clock values, so identical runs
// give identical manifests.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  Json& params() { return params_; }
  void Input(const std::string& path) { inputs_.push_back(path); }
  void Output(const std::string& path) { outputs_.push_back(path); }

  void Write(const std::string& path) const {
    Json j;
    j["command"] = command_;
    j["version"] = kVersion;
    j["parameters"] = params_;
    j["inputs"] = Digests(inputs_);
    j["outputs"] = Digests(outputs_);
    WriteFileAtomic(path, j.dump(2) + "\n");
  }

 private:
  static Json Digests(const std::vector<std::string>& paths) {
    Json out = Json::array();
    for (const auto& p : paths) {
      out.push_back({{"path", p}, {"sha256", Sha256File(p)}});
    }
    return out;
  }

  std::string command_;
  Json params_ = Json::object();
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

void RequireFile(const std::string& path) {
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::kUsage, "missing input file " + path);
  }
}

std::string ManifestPath(const std::string& flag, const std::string& primary) {
  return flag.empty() ? primary + ".manifest.json" : flag;
}

std::string JoinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::vector<std::pair<std::string, std::string>> ReadPairs(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& line : ReadLines(path)) {
    if (line.empty()) continue;
    const auto cols = SplitTabs(line);
    if (cols.size() < 2) {
      throw Error(ErrorCode::kMalformedLine, "expected source<TAB>target in " + path);
    }
    out.emplace_back(std::string(cols[0]), std::string(cols[1]));
  }
  return out;
}

std::vector<std::string> ReadNonEmptyLines(const std::string& path) {
  std::vector<std::string> out;
  for (auto& l : ReadLines(path)) {
    if (!l.empty()) out.push_back(std::move(l));
  }
  return out;
}

StatsFiles StatsIn(const std::string& dir) {
  const fs::path d(dir);
  return {(d / "transitions.tsv").string(), (d / "path_counts.tsv").string(),
          (d / "search_counts.tsv").string(), (d / "page_views.tsv").string(),
          (d / "links.tsv").string()};
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::vector<std::string> logs;
  std::string out;
  std::string bots;
  std::vector<std::string> site_hosts;
  std::string manifest;
};

int DoIngest(const IngestArgs& a) {
  Manifest m("ingest");
  IngestOptions options;
  for (const auto& l : a.logs) {
    RequireFile(l);
    m.Input(l);
  }
  if (!a.bots.empty()) {
    RequireFile(a.bots);
    m.Input(a.bots);
    options.bot_patterns = LoadPatternFile(a.bots);
  }
  options.format.site_hosts = {a.site_hosts.begin(), a.site_hosts.end()};
  const IngestResult r = IngestLogFiles(a.logs, options);
  std::string text;
  for (const auto& rec : r.records) text += FormatIngestedRecord(rec) + "\n";
  WriteFileAtomic(a.out, text);
  m.Output(a.out);
  m.params()["site_hosts"] = a.site_hosts;
  m.params()["counters"] = {{"lines", r.counters.lines},
                            {"kept", r.counters.kept},
                            {"malformed", r.counters.malformed},
                            {"bad_timestamp", r.counters.bad_timestamp},
                            {"bad_status", r.counters.bad_status},
                            {"bots", r.counters.bots},
                            {"non_success", r.counters.non_success}};
  m.Write(ManifestPath(a.manifest, a.out));
  return kExitOk;
}

// ----------------------------------------------------------------- trees

struct TreesArgs {
  std::string records;
  std::string trees_out;
  std::string sessions_out;
  std::string searches_out;
  std::string engines;
  std::string search_pattern = "/search?q=";
  Timestamp session_gap_ms = kSessionGapMs;
  Timestamp lookback_ms = kSessionGapMs;
  std::string manifest;
};

int DoTrees(const TreesArgs& a) {
  Manifest m("trees");
  RequireFile(a.records);
  m.Input(a.records);
  TraceConfig config;
  config.internal_search_pattern = a.search_pattern;
  config.session_gap_ms = a.session_gap_ms;
  config.lookback_ms = a.lookback_ms;
  if (!a.engines.empty()) {
    RequireFile(a.engines);
    m.Input(a.engines);
    const auto domains = ReadNonEmptyLines(a.engines);
    config.engine_domains = {domains.begin(), domains.end()};
  }
  std::vector<IngestedRecord> records;
  for (const auto& line : ReadLines(a.records)) {
    if (!line.empty()) records.push_back(ParseIngestedRecord(line));
  }
  const TraceResult r = BuildTraces(records, config);

  std::string trees, sessions, searches;
  for (const auto& t : r.trees) trees += TreeToJson(t) + "\n";
  for (const auto& s : r.sessions) sessions += SessionToJson(s) + "\n";
  for (const auto& e : r.searches) searches += SearchEventToTsv(e) + "\n";
  WriteFileAtomic(a.trees_out, trees);
  m.Output(a.trees_out);
  if (!a.sessions_out.empty()) {
    WriteFileAtomic(a.sessions_out, sessions);
    m.Output(a.sessions_out);
  }
  if (!a.searches_out.empty()) {
    WriteFileAtomic(a.searches_out, searches);
    m.Output(a.searches_out);
  }
  m.params()["search_pattern"] = a.search_pattern;
  m.params()["session_gap_ms"] = a.session_gap_ms;
  m.params()["lookback_ms"] = a.lookback_ms;
  m.params()["engine_domains"] = config.engine_domains;
  m.params()["trees"] = r.trees.size();
  m.Write(ManifestPath(a.manifest, a.trees_out));
  return kExitOk;
}

// ----------------------------------------------------------------- stats

struct StatsArgs {
  std::string trees;
  std::string sessions;
  std::string searches;
  std::string links;
  std::string out_dir;
  std::string path_source = "trees";
  std::string path_mode = "per_branch";
  std::string manifest;
};

int DoStats(const StatsArgs& a) {
  Manifest m("stats");
  RequireFile(a.trees);
  m.Input(a.trees);
  std::vector<NavigationTree> trees;
  for (const auto& l : ReadLines(a.trees)) {
    if (!l.empty()) trees.push_back(TreeFromJson(l));
  }
  std::vector<Session> sessions;
  if (!a.sessions.empty()) {
    RequireFile(a.sessions);
    m.Input(a.sessions);
    for (const auto& l : ReadLines(a.sessions)) {
      if (!l.empty()) sessions.push_back(SessionFromJson(l));
    }
  }
  std::vector<SearchEvent> searches;
  if (!a.searches.empty()) {
    RequireFile(a.searches);
    m.Input(a.searches);
    for (const auto& l : ReadLines(a.searches)) {
      if (!l.empty()) searches.push_back(SearchEventFromTsv(l));
    }
  }
  AccumulateOptions options;
  if (a.path_source == "sessions") {
    if (a.sessions.empty()) {
      throw Error(ErrorCode::kUsage, "--path-source sessions needs --sessions");
    }
    options.path_source = PathSource::kSessions;
  } else if (a.path_source != "trees") {
    throw Error(ErrorCode::kUsage, "--path-source must be trees or sessions");
  }
  if (a.path_mode == "per_view") {
    options.path_mode = PathCountMode::kPerView;
  } else if (a.path_mode != "per_branch") {
    throw Error(ErrorCode::kUsage, "--path-mode must be per_branch or per_view");
  }
  if (!a.links.empty()) {
    RequireFile(a.links);
    m.Input(a.links);
    options.existing_links = ReadPairs(a.links);
  }
  const TransitionStats stats = Accumulate(trees, sessions, searches, options);
  fs::create_directories(a.out_dir);
  const StatsFiles files = StatsIn(a.out_dir);
  WriteStats(stats, files);
  const std::string ctr = (fs::path(a.out_dir) / "clickthrough.tsv").string();
  WriteFileAtomic(ctr, ClickthroughTsv(BuildClickthroughMatrix(stats)));
  for (const auto& p : {files.transitions, files.path_counts, files.search_counts,
                        files.page_views, files.links, ctr}) {
    m.Output(p);
  }
  m.params()["path_source"] = a.path_source;
  m.params()["path_mode"] = a.path_mode;
  m.params()["link_anomalies"] = stats.link_anomalies;
  m.Write(a.manifest.empty() ? (fs::path(a.out_dir) / "manifest.json").string()
                             : a.manifest);
  return kExitOk;
}

// -------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string stats_dir;
  std::string transitions;
  std::vector<std::string> methods;
  std::string candidates;
  Count min_support = 1;
  double eps = 1e-8;
  int max_iterations = 10000;
  std::string out;
  std::string manifest;
};

int DoEstimate(const EstimateArgs& a) {
  Manifest m("estimate");
  if (a.stats_dir.empty() == a.transitions.empty()) {
    throw Error(ErrorCode::kUsage, "give exactly one of --stats-dir or --transitions");
  }
  std::vector<Method> methods;
  for (const auto& name : a.methods) methods.push_back(ParseMethod(name));
  if (methods.empty()) methods = AllMethods();

  TransitionStats stats;
  if (!a.transitions.empty()) {
    RequireFile(a.transitions);
    m.Input(a.transitions);
    for (Method x : methods) {
      if (x != Method::kRandomWalk && x != Method::kMeanBaseline) {
        throw Error(ErrorCode::kUsage, std::string(MethodName(x)) +
                                           " needs path or search counts");
      }
    }
    if (a.candidates.empty()) {
      throw Error(ErrorCode::kUsage, "--transitions mode needs --candidates");
    }
    stats = LoadTransitionsOnly(a.transitions);
  } else {
    const StatsFiles files = StatsIn(a.stats_dir);
    for (const auto& p : {files.transitions, files.path_counts, files.search_counts,
                          files.page_views, files.links}) {
      RequireFile(p);
      m.Input(p);
    }
    stats = LoadStats(files);
  }

  std::vector<std::pair<std::string, std::string>> universe;
  if (!a.candidates.empty()) {
    RequireFile(a.candidates);
    m.Input(a.candidates);
    universe = ReadPairs(a.candidates);
  } else {
    universe = CandidateUniverse(stats, CandidateOptions{a.min_support});
  }
  const auto estimates =
      EstimateCandidates(stats, universe, methods, {a.eps, a.max_iterations});
  WriteFileAtomic(a.out, EstimatesTsv(estimates));
  m.Output(a.out);
  // Proportions above 1 are legal (several searches per view) but suspicious.
  const auto above_one = std::count_if(estimates.begin(), estimates.end(),
                                       [](const auto& e) { return e.estimate > 1.0; });
  if (above_one > 0) {
    std::cerr << "warning: " << above_one << " estimates exceed 1\n";
  }
  m.params()["estimates_above_one"] = above_one;
  Json names = Json::array();
  for (Method x : methods) names.push_back(MethodName(x));
  m.params()["methods"] = names;
  m.params()["min_support"] = a.min_support;
  m.params()["eps"] = a.eps;
  m.params()["max_iterations"] = a.max_iterations;
  m.params()["candidates"] = universe.size();
  m.Write(ManifestPath(a.manifest, a.out));
  return kExitOk;
}

// ----------------------------------------------------------------- place

struct PlaceArgs {
  std::string estimates;
  std::string stats_dir;
  std::string method = "path";
  std::string objective = "f3";
  int budget = 0;
  int max_per_source = 0;
  std::string out;
  std::string problem_out;
  std::string manifest;
};

int DoPlace(const PlaceArgs& a) {
  Manifest m("place");
  if (a.budget < 0) throw Error(ErrorCode::kUsage, "--budget must be >= 0");
  RequireFile(a.estimates);
  m.Input(a.estimates);
  const StatsFiles files = StatsIn(a.stats_dir);
  for (const auto& p : {files.transitions, files.path_counts, files.search_counts,
                        files.page_views, files.links}) {
    RequireFile(p);
    m.Input(p);
  }
  const TransitionStats stats = LoadStats(files);
  const auto estimates = ParseEstimatesTsv(ReadFile(a.estimates));
  const Method method = ParseMethod(a.method);
  const Objective objective = ParseObjective(a.objective);
  PlacementProblem problem = BuildProblem(estimates, method, stats,
                                          BuildClickthroughMatrix(stats),
                                          objective, a.budget);
  if (a.max_per_source > 0) problem.max_per_source = a.max_per_source;
  const PlacementSolution solution = GreedyPlace(problem);
  WriteFileAtomic(a.out, SolutionJsonl(solution));
  m.Output(a.out);
  if (!a.problem_out.empty()) {
    WriteFileAtomic(a.problem_out, ProblemToJson(problem));
    m.Output(a.problem_out);
  }
  m.params()["method"] = a.method;
  m.params()["objective"] = a.objective;
  m.params()["budget"] = a.budget;
  m.params()["max_per_source"] = a.max_per_source;
  m.params()["objective_value"] = solution.objective_value;
  m.Write(ManifestPath(a.manifest, a.out));
  return kExitOk;
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
  std::string estimates;
  std::string truth;
  std::vector<std::string> metrics;
  int resamples = 1000;
  double level = 0.95;
  std::uint64_t seed = 1;
  std::vector<std::string> compare;
  std::string out;
  std::string manifest;
};

std::vector<Link> SolutionLinks(const std::string& path) {
  std::vector<Link> out;
  for (const auto& line : ReadLines(path)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line);
    out.push_back({j.at("source").get<std::string>(), j.at("target").get<std::string>()});
  }
  return out;
}

int DoEval(const EvalArgs& a) {
  Manifest m("eval");
  Json report;
  report["parameters"] = {{"resamples", a.resamples},
                          {"level", a.level},
                          {"seed", a.seed}};
  if (!a.estimates.empty() || !a.truth.empty()) {
    if (a.estimates.empty() || a.truth.empty()) {
      throw Error(ErrorCode::kUsage, "--estimates and --truth go together");
    }
    RequireFile(a.estimates);
    RequireFile(a.truth);
    m.Input(a.estimates);
    m.Input(a.truth);
    const auto estimates = ParseEstimatesTsv(ReadFile(a.estimates));
    std::map<Link, double> truth;
    for (const auto& row : ParseGroundTruthTsv(ReadFile(a.truth))) {
      truth[{row.source, row.target}] = row.p;
    }
    std::vector<Metric> metrics;
    for (const auto& name : a.metrics) {
      if (name == "mae") {
        metrics.push_back(Metric::kMae);
      } else if (name == "pearson") {
        metrics.push_back(Metric::kPearson);
      } else if (name == "spearman") {
        metrics.push_back(Metric::kSpearman);
      } else {
        throw Error(ErrorCode::kUsage, "unknown metric " + name);
      }
    }
    if (metrics.empty()) metrics = {Metric::kMae, Metric::kPearson, Metric::kSpearman};

    std::map<Method, PairedSeries> by_method;
    for (const auto& e : estimates) {
      auto it = truth.find({e.source, e.target});
      if (it == truth.end()) continue;
      by_method[e.method].predictions.push_back(e.estimate);
      by_method[e.method].truths.push_back(it->second);
    }
    Json rows = Json::array();
    const BootstrapOptions boot{a.resamples, a.level, a.seed};
    for (const auto& [method, series] : by_method) {
      for (Metric metric : metrics) {
        Json row{{"method", MethodName(method)},
                 {"metric", MetricName(metric)},
                 {"n", series.size()}};
        const MetricFn fn = MetricFunction(metric);
        try {
          row["point"] = fn(series);
          const Interval ci = BootstrapCi(series, fn, boot);
          row["ci"] = {{"low", ci.low}, {"high", ci.high},
                       {"resamples", ci.resamples}, {"skipped", ci.skipped}};
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kUsage) throw;
          row["point"] = nullptr;
          row["error"] = ErrorCodeName(e.code());
        }
        rows.push_back(std::move(row));
      }
    }
    report["metrics"] = std::move(rows);
    // Only pairs present in both files are scored.
    report["filter"] = "estimate pairs with ground truth";
  }
  if (!a.compare.empty()) {
    if (a.compare.size() != 2) {
      throw Error(ErrorCode::kUsage, "--compare takes two solution files");
    }
    for (const auto& p : a.compare) {
      RequireFile(p);
      m.Input(p);
    }
    report["jaccard"] =
        SolutionJaccard(SolutionLinks(a.compare[0]), SolutionLinks(a.compare[1]));
  }
  Json inputs = Json::array();
  for (const auto& p : {a.estimates, a.truth}) {
    if (!p.empty()) inputs.push_back({{"path", p}, {"sha256", Sha256File(p)}});
  }
  for (const auto& p : a.compare) inputs.push_back({{"path", p}, {"sha256", Sha256File(p)}});
  report["inputs"] = std::move(inputs);
  WriteFileAtomic(a.out, report.dump(2) + "\n");
  m.Output(a.out);
  m.params() = report["parameters"];
  m.Write(ManifestPath(a.manifest, a.out));
  return kExitOk;
}

// ----------------------------------------------------------------- synth

struct SynthArgs {
  std::string model;
  int random_pages = 50;
  int out_degree = 4;
  std::uint64_t seed = 1;
  std::int64_t walks = 1000;
  int max_depth = kDefaultMaxDepth;
  int hide = 0;
  std::uint64_t hide_seed = 1;
  int hide_max_route = 0;
  std::string log_out;
  std::string truth_out;
  std::string model_out;
  std::string links_out;
  std::string manifest;
};

int DoSynth(const SynthArgs& a) {
  Manifest m("synth");
  GroundTruthModel model;
  if (!a.model.empty()) {
    RequireFile(a.model);
    m.Input(a.model);
    model = ModelFromJson(ReadFile(a.model));
  } else {
    RandomModelOptions o;
    o.pages = a.random_pages;
    o.out_degree = a.out_degree;
    o.seed = a.seed;
    model = RandomModel(o);
  }
  std::vector<ModelLink> truth;
  if (a.hide > 0) {
    const auto chosen = ChooseHideableLinks(model, a.hide, a.hide_seed, a.hide_max_route);
    HideResult h = HideLinks(model, chosen);
    model = std::move(h.model);
    truth = std::move(h.ground_truth);
  }
  const GeneratedTraces traces = GenerateTraces(model, a.walks, a.max_depth);
  WriteFileAtomic(a.log_out, JoinLines(EmitSyntheticLog(traces.trees)));
  m.Output(a.log_out);
  if (!a.truth_out.empty()) {
    WriteFileAtomic(a.truth_out, GroundTruthTsv(truth));
    m.Output(a.truth_out);
  }
  if (!a.model_out.empty()) {
    WriteFileAtomic(a.model_out, ModelToJson(model) + "\n");
    m.Output(a.model_out);
  }
  if (!a.links_out.empty()) {
    std::string text;
    for (const auto& l : model.links) text += l.source + "\t" + l.target + "\n";
    WriteFileAtomic(a.links_out, text);
    m.Output(a.links_out);
  }
  m.params()["random_pages"] = a.model.empty() ? a.random_pages : 0;
  m.params()["out_degree"] = a.out_degree;
  m.params()["seed"] = a.seed;
  m.params()["walks"] = a.walks;
  m.params()["max_depth"] = a.max_depth;
  m.params()["hide"] = a.hide;
  m.params()["hide_seed"] = a.hide_seed;
  m.params()["hide_max_route"] = a.hide_max_route;
  m.params()["truncated"] = traces.truncated;
  m.Write(ManifestPath(a.manifest, a.log_out));
  return kExitOk;
}

// ----------------------------------------------------------------- serve

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir;
  std::string problems_dir;
};

ReviewServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server) g_server->Stop();
}

int DoServe(const ServeArgs& a) {
  ServerOptions o;
  o.host = a.host;
  o.port = a.port;
  if (!a.data_dir.empty()) o.data_dir = a.data_dir;
  if (!a.problems_dir.empty()) o.problems_dir = a.problems_dir;
  ReviewServer server(o);
  const int port = server.Bind();
  std::cerr << "listening on " << a.host << ":" << port << "\n";
  g_server = &server;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  server.Serve();
  g_server = nullptr;
  return kExitOk;
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
      return kExitUsage;
    case ErrorCode::kNonConvergent:
      return kExitNonConvergent;
    case ErrorCode::kIo:
      return kExitOther;
    default:
      return kExitData;
  }
}

}  // namespace

int Run(const std::vector<std::string>& args) {
  kernels::ConfigureThreadsFromEnv();
  CLI::App app{"linkforge: link suggestions from navigation logs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse, filter and key log records");
  c_ingest->add_option("--log", ingest.logs, "Log file (plain or gzip)")->required();
  c_ingest->add_option("--out", ingest.out, "Ingested records TSV")->required();
  c_ingest->add_option("--bots", ingest.bots, "Bot pattern file");
  c_ingest->add_option("--site-host", ingest.site_hosts, "Host treated as internal");
  c_ingest->add_option("--manifest", ingest.manifest);

  TreesArgs trees;
  auto* c_trees = app.add_subcommand("trees", "Rebuild navigation trees and sessions");
  c_trees->add_option("--records", trees.records)->required();
  c_trees->add_option("--trees-out", trees.trees_out)->required();
  c_trees->add_option("--sessions-out", trees.sessions_out);
  c_trees->add_option("--searches-out", trees.searches_out);
  c_trees->add_option("--engines", trees.engines, "Search engine domains, one per line");
  c_trees->add_option("--search-pattern", trees.search_pattern);
  c_trees->add_option("--session-gap-ms", trees.session_gap_ms);
  c_trees->add_option("--lookback-ms", trees.lookback_ms);
  c_trees->add_option("--manifest", trees.manifest);

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Count transitions, paths and searches");
  c_stats->add_option("--trees", stats.trees)->required();
  c_stats->add_option("--sessions", stats.sessions);
  c_stats->add_option("--searches", stats.searches);
  c_stats->add_option("--links", stats.links, "Existing links, source<TAB>target");
  c_stats->add_option("--out-dir", stats.out_dir)->required();
  c_stats->add_option("--path-source", stats.path_source, "trees | sessions");
  c_stats->add_option("--path-mode", stats.path_mode, "per_branch | per_view");
  c_stats->add_option("--manifest", stats.manifest);

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Estimate clickthrough of candidate links");
  c_est->add_option("--stats-dir", est.stats_dir);
  c_est->add_option("--transitions", est.transitions,
                    "Pairwise transition TSV as sole input");
  c_est->add_option("--method", est.methods,
                    "search | path | path_and_search | random_walk | mean_baseline");
  c_est->add_option("--candidates", est.candidates, "Candidate pairs TSV");
  c_est->add_option("--min-support", est.min_support);
  c_est->add_option("--eps", est.eps);
  c_est->add_option("--max-iter", est.max_iterations);
  c_est->add_option("--out", est.out)->required();
  c_est->add_option("--manifest", est.manifest);

  PlaceArgs place;
  auto* c_place = app.add_subcommand("place", "Choose links under a budget");
  c_place->add_option("--estimates", place.estimates)->required();
  c_place->add_option("--stats-dir", place.stats_dir)->required();
  c_place->add_option("--method", place.method);
  c_place->add_option("--objective", place.objective, "f1 | f2 | f3");
  c_place->add_option("--budget", place.budget)->required();
  c_place->add_option("--max-per-source", place.max_per_source);
  c_place->add_option("--out", place.out)->required();
  c_place->add_option("--problem-out", place.problem_out);
  c_place->add_option("--manifest", place.manifest);

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Score estimates and compare solutions");
  c_eval->add_option("--estimates", eval.estimates);
  c_eval->add_option("--truth", eval.truth, "Ground truth TSV");
  c_eval->add_option("--metric", eval.metrics, "mae | pearson | spearman");
  c_eval->add_option("--resamples", eval.resamples);
  c_eval->add_option("--level", eval.level);
  c_eval->add_option("--seed", eval.seed);
  c_eval->add_option("--compare", eval.compare, "Two solution JSONL files")
      ->expected(2);
  c_eval->add_option("--out", eval.out)->required();
  c_eval->add_option("--manifest", eval.manifest);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate synthetic logs from a model");
  c_synth->add_option("--model", synth.model, "Model JSON; random model if absent");
  c_synth->add_option("--pages", synth.random_pages);
  c_synth->add_option("--out-degree", synth.out_degree);
  c_synth->add_option("--seed", synth.seed);
  c_synth->add_option("--walks", synth.walks);
  c_synth->add_option("--max-depth", synth.max_depth);
  c_synth->add_option("--hide", synth.hide, "Number of links to hide");
  c_synth->add_option("--hide-seed", synth.hide_seed);
  c_synth->add_option("--hide-max-route", synth.hide_max_route,
                      "Longest detour (clicks) allowed for a hidden link; 0 = any");
  c_synth->add_option("--log-out", synth.log_out)->required();
  c_synth->add_option("--truth-out", synth.truth_out);
  c_synth->add_option("--model-out", synth.model_out);
  c_synth->add_option("--links-out", synth.links_out);
  c_synth->add_option("--manifest", synth.manifest);

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Run the review service");
  c_serve->add_option("--host", serve.host);
  c_serve->add_option("--port", serve.port);
  c_serve->add_option("--data-dir", serve.data_dir);
  c_serve->add_option("--problems-dir", serve.problems_dir);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_ingest->parsed()) return DoIngest(ingest);
    if (c_trees->parsed()) return DoTrees(trees);
    if (c_stats->parsed()) return DoStats(stats);
    if (c_est->parsed()) return DoEstimate(est);
    if (c_place->parsed()) return DoPlace(place);
    if (c_eval->parsed()) return DoEval(eval);
    if (c_synth->parsed()) return DoSynth(synth);
    if (c_serve->parsed()) return DoServe(serve);
  } catch (const Error& e) {
    std::cerr << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitUsage;
}

int Main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return Run(args);
}

}  // namespace linkforge::cli
