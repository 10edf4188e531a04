#pragma once

// HTTP API over the store: bots, maps, paths, goals, sessions, reports,
// error groups, suggestions and trends. Simulation runs execute on
// background threads; clients poll the session record.

#include <cstdlib>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "botsim/adaptors.hpp"
#include "botsim/pipeline.hpp"
#include "botsim/store.hpp"

namespace botsim {

// Every endpoint and the CLI subcommand that covers the same capability.
struct RouteSpec {
  const char* method;
  const char* path;
  const char* cli;
};

inline const std::vector<RouteSpec>& api_routes() {
  static const std::vector<RouteSpec> routes = {
      {"POST", "/bots", "parse"},
      {"GET", "/bots", "parse"},
      {"GET", "/bots/{id}", "parse"},
      {"POST", "/bots/{id}/parse", "parse"},
      {"GET", "/bots/{id}/dialog-act-maps", "parse"},
      {"PUT", "/bots/{id}/dialog-act-maps", "parse"},
      {"GET", "/bots/{id}/graph/paths", "paths"},
      {"POST", "/bots/{id}/paraphrases", "paraphrase"},
      {"POST", "/bots/{id}/goals", "goals"},
      {"POST", "/sessions", "simulate"},
      {"POST", "/sessions/{id}/run", "simulate"},
      {"GET", "/sessions", "report"},
      {"GET", "/sessions/{id}", "report"},
      {"GET", "/sessions/{id}/report", "report"},
      {"GET", "/sessions/{id}/errors", "suggest"},
      {"GET", "/sessions/{id}/suggestions", "suggest"},
      {"POST", "/sessions/{id}/suggestions/accept", "export-augmented"},
      {"GET", "/trend", "report"},
  };
  return routes;
}

struct ServiceOptions {
  std::string paraphrase_url;
  std::string scorer_url;

  static ServiceOptions from_env() {
    ServiceOptions o;
    if (const char* v = std::getenv("PARAPHRASE_URL")) o.paraphrase_url = v;
    if (const char* v = std::getenv("SCORER_URL")) o.scorer_url = v;
    return o;
  }
};

inline int http_status_for(const std::string& code) {
  static const std::set<std::string> not_found = {"NotFound", "UnknownNode", "UnknownSuggestion", "UnknownAct"};
  static const std::set<std::string> conflict = {"VersionConflict"};
  static const std::set<std::string> unavailable = {"ProviderUnavailable", "ScorerUnavailable"};
  if (not_found.count(code)) return 404;
  if (conflict.count(code)) return 409;
  if (unavailable.count(code)) return 503;
  if (code == "IoError") return 500;
  return 422;
}

class ApiServer {
 public:
  ApiServer(Store& store, ServiceOptions opt = {}) : store_(store), opt_(std::move(opt)) { routes(); }

  ~ApiServer() {
    stop();
    wait_for_runs();
  }

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  bool listen(const std::string& host, int port) { return server_.listen(host, port); }
  int bind_to_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  bool is_running() const { return server_.is_running(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

  void wait_for_runs() {
    std::vector<std::thread> runs;
    {
      std::lock_guard lock(runs_mu_);
      runs.swap(runs_);
    }
    for (auto& t : runs)
      if (t.joinable()) t.join();
  }

 private:
  using Req = httplib::Request;
  using Res = httplib::Response;

  static void reply(Res& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(2), "application/json");
  }

  static void reply_error(Res& res, int status, const std::string& code, const std::string& msg,
                          Json extra = Json::object()) {
    Json body{{"error", {{"code", code}, {"message", msg}}}};
    for (auto it = extra.begin(); it != extra.end(); ++it) body[it.key()] = *it;
    reply(res, status, body);
  }

  static Json body_json(const Req& req) {
    if (req.body.empty()) return Json::object();
    try {
      return Json::parse(req.body);
    } catch (const Json::parse_error& e) {
      throw SchemaError(std::string("request body is not valid JSON: ") + e.what());
    }
  }

  // Wraps a handler so every failure becomes a structured response.
  template <typename Fn>
  static httplib::Server::Handler guarded(Fn fn) {
    return [fn](const Req& req, Res& res) {
      try {
        fn(req, res);
      } catch (const ValidationError& e) {
        reply_error(res, 422, e.code(), e.what());
      } catch (const Error& e) {
        reply_error(res, http_status_for(e.code()), e.code(), e.what());
      } catch (const Json::exception& e) {
        reply_error(res, 400, "SchemaError", e.what());
      } catch (const std::exception& e) {
        reply_error(res, 500, "InternalError", e.what());
      }
    };
  }

  void routes() {
    server_.Post("/bots", guarded([this](const Req& req, Res& res) { post_bot(req, res); }));
    server_.Get("/bots", guarded([this](const Req&, Res& res) {
      Json out = Json::array();
      for (const auto& b : store_.list_bots())
        out.push_back(Json{{"id", b.id}, {"bot_name", b.label}, {"created_at", b.created_at}});
      reply(res, 200, out);
    }));
    server_.Get(R"(/bots/([^/]+))", guarded([this](const Req& req, Res& res) {
      const auto id = req.matches[1].str();
      const auto def = store_.load_bot(id);
      Json out{{"id", id}, {"definition", to_json(def)}};
      out["maps_version"] = store_.has_maps(id) ? Json(store_.load_maps(id).version) : Json(nullptr);
      reply(res, 200, out);
    }));
    server_.Post(R"(/bots/([^/]+)/parse)", guarded([this](const Req& req, Res& res) {
      const auto id = req.matches[1].str();
      auto parsed = parse_bot(store_.load_bot(id));
      const auto version = store_.save_maps(id, parsed.global_maps);
      store_.save_graph(id, parsed.graph);
      reply(res, 200, Json{{"maps_version", version},
                           {"pending_reviews", pending_reviews(parsed.global_maps)},
                           {"maps", to_json(parsed.global_maps)},
                           {"graph", to_json(parsed.graph)}});
    }));
    server_.Get(R"(/bots/([^/]+)/dialog-act-maps)", guarded([this](const Req& req, Res& res) {
      auto vm = store_.load_maps(req.matches[1].str());
      reply(res, 200, maps_body(vm));
    }));
    server_.Put(R"(/bots/([^/]+)/dialog-act-maps)", guarded([this](const Req& req, Res& res) {
      revise(req.matches[1].str(), body_json(req), res);
    }));
    server_.Get(R"(/bots/([^/]+)/graph/paths)", guarded([this](const Req& req, Res& res) {
      const auto g = store_.load_graph(req.matches[1].str());
      if (!req.has_param("src") || !req.has_param("dst"))
        throw ContractError("query parameters src and dst are required");
      const auto depth = req.has_param("max_depth") ? std::stoul(req.get_param_value("max_depth")) : kDefaultMaxDepth;
      const auto limit = req.has_param("max_paths") ? std::stoul(req.get_param_value("max_paths")) : kDefaultMaxPaths;
      const auto set = enumerate_simple_paths(g, req.get_param_value("src"), req.get_param_value("dst"), depth, limit);
      Json paths = Json::array();
      for (const auto& p : set.paths) paths.push_back(to_json(p));
      reply(res, 200, Json{{"paths", paths}, {"truncated", set.truncated}});
    }));
    server_.Post(R"(/bots/([^/]+)/paraphrases)", guarded([this](const Req& req, Res& res) {
      post_paraphrases(req.matches[1].str(), body_json(req), res);
    }));
    server_.Post(R"(/bots/([^/]+)/goals)", guarded([this](const Req& req, Res& res) {
      post_goals(req.matches[1].str(), body_json(req), res);
    }));
    server_.Post("/sessions", guarded([this](const Req& req, Res& res) { post_session(body_json(req), res); }));
    server_.Post(R"(/sessions/([^/]+)/run)", guarded([this](const Req& req, Res& res) {
      auto body = body_json(req);
      const bool force = body.value("force", false) ||
                         (req.has_param("force") && req.get_param_value("force") != "0" &&
                          req.get_param_value("force") != "false");
      run(req.matches[1].str(), force, res);
    }));
    server_.Get("/sessions", guarded([this](const Req&, Res& res) {
      Json out = Json::array();
      for (const auto& s : store_.list_sessions()) out.push_back(to_json(s));
      reply(res, 200, out);
    }));
    server_.Get(R"(/sessions/([^/]+))", guarded([this](const Req& req, Res& res) {
      reply(res, 200, to_json(store_.load_session(req.matches[1].str())));
    }));
    server_.Get(R"(/sessions/([^/]+)/report)", guarded([this](const Req& req, Res& res) {
      const auto rec = store_.load_session(req.matches[1].str());
      if (rec.status != SessionStatus::Done) {
        reply_error(res, 404, "NotFound", "session '" + rec.id + "' has no report yet",
                    Json{{"status", std::string(to_string(rec.status))}, {"reason", rec.reason}});
        return;
      }
      reply(res, 200, Json::parse(store_.read_artifact(rec.id, "report")));
    }));
    server_.Get(R"(/sessions/([^/]+)/errors)", guarded([this](const Req& req, Res& res) {
      const auto id = require_done(req.matches[1].str());
      auto groups = Json::parse(store_.read_artifact(id, "errors"));
      if (req.has_param("intent")) {
        const auto want = req.get_param_value("intent");
        Json filtered = Json::array();
        for (const auto& g : groups)
          if (g.at("true_intent") == want) filtered.push_back(g);
        groups = std::move(filtered);
      }
      reply(res, 200, groups);
    }));
    server_.Get(R"(/sessions/([^/]+)/suggestions)", guarded([this](const Req& req, Res& res) {
      const auto id = require_done(req.matches[1].str());
      reply(res, 200, Json::parse(store_.read_artifact(id, "suggestions")));
    }));
    server_.Post(R"(/sessions/([^/]+)/suggestions/accept)", guarded([this](const Req& req, Res& res) {
      accept(req.matches[1].str(), body_json(req), res);
    }));
    server_.Get("/trend", guarded([this](const Req& req, Res& res) {
      const auto bot = req.has_param("bot_id") ? req.get_param_value("bot_id") : std::string{};
      std::vector<SessionReport> reports;
      for (const auto& s : store_.list_sessions())
        if (s.status == SessionStatus::Done && (bot.empty() || s.bot_id == bot))
          reports.push_back(report_from_json(Json::parse(store_.read_artifact(s.id, "report"))));
      reply(res, 200, reports.empty() ? Json::array() : to_json(compare_sessions(reports)));
    }));
  }

  std::string require_done(const std::string& id) {
    const auto rec = store_.load_session(id);
    if (rec.status != SessionStatus::Done)
      throw NotFound("session '" + id + "' is " + std::string(to_string(rec.status)) + ", not Done");
    return id;
  }

  static Json maps_body(const VersionedMaps& vm) {
    return Json{{"version", vm.version}, {"pending_reviews", pending_reviews(vm.maps)}, {"maps", to_json(vm.maps)}};
  }

  void post_bot(const Req& req, Res& res) {
    const auto body = body_json(req);
    BotDefinition def;
    if (body.contains("adaptor")) {
      const auto registry = AdaptorRegistry::with_builtins();
      def = registry.convert(body.at("adaptor").get<std::string>(), body.at("document").get<std::string>());
    } else {
      def = definition_from_json(body);
      ensure_valid(def);
    }
    const auto id = store_.save_bot(def);
    reply(res, 201, Json{{"id", id}, {"bot_name", def.bot_name}});
  }

  // Body: {base_version, revision: {...}} or {base_version, approve: ["dialog/act", ...]}
  void revise(const std::string& bot_id, const Json& body, Res& res) {
    if (!body.contains("base_version")) throw ContractError("base_version is required");
    const auto base = body.at("base_version").get<std::string>();
    auto vm = store_.revise_maps(bot_id, base, [&](DialogActMaps& maps) {
      if (body.contains("revision")) {
        const auto rev = revision_from_json(body.at("revision"));
        auto it = maps.find(rev.dialog);
        if (it == maps.end()) throw UnknownNode("no dialog '" + rev.dialog + "'");
        it->second = apply_revision(it->second, rev);
      }
      if (body.contains("approve")) {
        for (const auto& key : body.at("approve")) {
          const auto s = key.get<std::string>();
          const auto slash = s.find('/');
          if (slash == std::string::npos) throw ContractError("approve entries look like 'dialog/act'");
          auto it = maps.find(s.substr(0, slash));
          if (it == maps.end()) throw UnknownNode("no dialog '" + s.substr(0, slash) + "'");
          if (!it->second.contains(s.substr(slash + 1)))
            throw UnknownAct("dialog '" + it->first + "' has no act '" + s.substr(slash + 1) + "'");
          it->second.clear_review(s.substr(slash + 1));
        }
      }
      if (!body.contains("revision") && !body.contains("approve"))
        throw ContractError("body needs a revision or an approve list");
    });
    reply(res, 200, maps_body(vm));
  }

  // Body: {n, provider, sim_low, sim_high, fuzz_max}
  ParaphraseExpansion expand(const BotDefinition& def, const Json& p, std::uint64_t seed) const {
    FilterConfig filter;
    filter.sim_low = p.value("sim_low", filter.sim_low);
    filter.sim_high = p.value("sim_high", filter.sim_high);
    filter.fuzz_max = p.value("fuzz_max", filter.fuzz_max);
    filter.validate();
    ParaphraseRegistry registry;
    registry.register_provider("builtin", std::make_shared<BuiltinParaphraser>(seed));
    if (!opt_.paraphrase_url.empty())
      registry.register_provider("remote", std::make_shared<RemoteParaphraser>(opt_.paraphrase_url));
    std::unique_ptr<SimilarityScorer> scorer;
    if (!opt_.scorer_url.empty()) scorer = std::make_unique<RemoteScorer>(opt_.scorer_url);
    else scorer = std::make_unique<TfidfScorer>(training_corpus(def));
    return expand_with_paraphrases(def, registry, p.value("provider", std::string("builtin")),
                                   p.value("n", std::size_t{10}), *scorer, filter);
  }

  void post_paraphrases(const std::string& bot_id, const Json& body, Res& res) {
    const auto def = store_.load_bot(bot_id);
    const auto x = expand(def, body, body.value("seed", std::uint64_t{0}));
    Json cands = Json::array();
    for (const auto& c : x.candidates) cands.push_back(to_json(c));
    Json kept = Json::object();
    for (const auto& [k, v] : x.queries) kept[k] = v;
    reply(res, 200, Json{{"candidates", cands}, {"kept", kept}, {"provenance", to_json(x.provenance)}});
  }

  // Body: {seed, per_query, pool_size, force, ontology, paraphrase: {n, provider, sim_low, sim_high, fuzz_max}}
  void post_goals(const std::string& bot_id, const Json& body, Res& res) {
    const auto def = store_.load_bot(bot_id);
    const auto vm = store_.load_maps(bot_id);
    const auto seed = body.value("seed", std::uint64_t{0});
    auto ontology = generate_ontology(def, seed, body.value("pool_size", kDefaultPoolSize));
    if (body.contains("ontology")) apply_overlay(ontology, def, body.at("ontology"));

    std::map<std::string, std::vector<std::string>> extra;
    Provenance provenance;
    if (body.contains("paraphrase")) {
      auto exp = expand(def, body.at("paraphrase"), seed);
      extra = std::move(exp.queries);
      provenance = std::move(exp.provenance);
    }
    const auto goals = generate_all_goals(def, vm.maps, ontology, body.value("per_query", std::size_t{1}), seed,
                                          body.value("force", false), extra);
    const auto id = store_.save_goals(bot_id, goals, Json{{"provenance", to_json(provenance)}, {"ontology", to_json(ontology)}});
    reply(res, 201, Json{{"goals_id", id}, {"count", goals.size()}});
  }

  // Body: {bot_id, goals_id, config: {fuzzy_threshold, max_turns, episodes_parallelism, seed,
  //        connector, faults, bot_url, n_resamples}}
  void post_session(const Json& body, Res& res) {
    SessionRecord rec;
    rec.bot_id = body.at("bot_id").get<std::string>();
    rec.goals_id = body.at("goals_id").get<std::string>();
    if (store_.goals_owner(rec.goals_id) != rec.bot_id)
      throw ContractError("goal set '" + rec.goals_id + "' belongs to another bot");
    rec.config = body.value("config", Json::object());
    const auto def = store_.load_bot(rec.bot_id);
    sim_config_from_json(rec.config);
    if (rec.config.contains("faults")) validate_profile(profile_from_json(rec.config.at("faults")), def);
    const auto kind = rec.config.value("connector", std::string("mock"));
    if (kind != "mock" && kind != "http") throw ContractError("unknown connector '" + kind + "'");
    const auto id = store_.create_session(rec);
    reply(res, 201, to_json(store_.load_session(id)));
  }

  void run(const std::string& id, bool force, Res& res) {
    auto rec = store_.load_session(id);
    if (rec.status == SessionStatus::Running) {
      reply_error(res, 409, "VersionConflict", "session '" + id + "' is already running",
                  Json{{"status", "Running"}});
      return;
    }
    if (rec.status == SessionStatus::Done || rec.status == SessionStatus::Failed) {
      reply_error(res, 409, "VersionConflict", "session '" + id + "' has already run",
                  Json{{"status", std::string(to_string(rec.status))}});
      return;
    }
    const auto vm = store_.load_maps(rec.bot_id);
    const auto pending = pending_reviews(vm.maps);
    if (!pending.empty() && !force) {
      if (rec.status == SessionStatus::Draft) store_.transition(id, SessionStatus::NeedsReview);
      reply_error(res, 409, "NeedsReview", "dialog-act maps have labels awaiting review",
                  Json{{"status", "NeedsReview"}, {"pending_reviews", pending}});
      return;
    }
    store_.transition(id, SessionStatus::Running);
    std::lock_guard lock(runs_mu_);
    runs_.emplace_back([this, id, force] { execute(id, force); });
    reply(res, 202, Json{{"id", id}, {"status", "Running"}});
  }

  void execute(const std::string& id, bool force) {
    try {
      const auto rec = store_.load_session(id);
      auto def = std::make_shared<const BotDefinition>(store_.load_bot(rec.bot_id));
      const auto vm = store_.load_maps(rec.bot_id);
      const auto goals = store_.load_goals(rec.goals_id);
      const auto meta = store_.load_goals_meta(rec.goals_id);
      const auto provenance = complete_provenance(
          *def, goals, meta.contains("provenance") ? provenance_from_json(meta.at("provenance")) : Provenance{});

      auto cfg = sim_config_from_json(rec.config);
      cfg.force = force;
      ConnectorChoice choice;
      choice.kind = rec.config.value("connector", std::string("mock"));
      if (rec.config.contains("faults")) choice.faults = profile_from_json(rec.config.at("faults"));
      choice.url = rec.config.value("bot_url", std::string{});

      const auto result = run_session(make_factory(def, choice, provenance), goals, vm.maps,
                                      default_templates(), cfg);
      const auto analysis = analyze_session(
          result.episodes,
          meta_for(*def, id, rec.bot_id, now_iso(), cfg.seed,
                   rec.config.value("n_resamples", kDefaultResamples)),
          provenance);
      store_.put_artifact(id, "transcripts", "transcripts.jsonl", episodes_to_jsonl(result.episodes));
      store_.put_artifact(id, "errors", "errors.json", groups_to_json(analysis.groups).dump(2) + "\n");
      store_.put_artifact(id, "suggestions", "suggestions.json",
                          suggestions_to_json(analysis.suggestions).dump(2) + "\n");
      store_.put_artifact(id, "provenance", "provenance.json", to_json(provenance).dump(2) + "\n");
      store_.put_artifact(id, "report", "report.json", to_json(analysis.report).dump(2) + "\n");
      store_.transition(id, SessionStatus::Done);
    } catch (const std::exception& e) {
      try {
        store_.transition(id, SessionStatus::Failed, e.what());
      } catch (...) {
      }
    }
  }

  // Body: {ids: [...]}. Marks suggestions accepted and returns the export.
  void accept(const std::string& id, const Json& body, Res& res) {
    require_done(id);
    const auto rec = store_.load_session(id);
    auto suggestions = suggestions_from_json(Json::parse(store_.read_artifact(id, "suggestions")));
    const auto ids = body.value("ids", std::vector<std::string>{});
    const auto def = store_.load_bot(rec.bot_id);
    std::vector<std::string> all_accepted;
    for (auto& s : suggestions) {
      if (std::find(ids.begin(), ids.end(), s.id) != ids.end()) s.accepted = true;
      if (s.accepted) all_accepted.push_back(s.id);
    }
    auto dataset = export_augmented_training(def, suggestions, ids);  // validates ids
    dataset = export_augmented_training(def, suggestions, all_accepted);
    store_.put_artifact(id, "suggestions", "suggestions.json", suggestions_to_json(suggestions).dump(2) + "\n");
    Json counts = Json::object();
    for (const auto& [k, v] : dataset.intents) counts[k] = v.size();
    reply(res, 200, Json{{"suggestions", suggestions_to_json(suggestions)},
                         {"dataset", to_json(dataset)},
                         {"counts", counts}});
  }

  Store& store_;
  ServiceOptions opt_;
  httplib::Server server_;
  std::mutex runs_mu_;
  std::vector<std::thread> runs_;
};

}  // namespace botsim
