#pragma once

// Command-line front end. run_cli() is the whole program; main() only
// forwards to it so tests can drive subcommands in-process.

#include <csignal>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "botsim/adaptors.hpp"
#include "botsim/pipeline.hpp"
#include "botsim/service.hpp"

namespace botsim {

inline const std::vector<std::string>& cli_subcommands() {
  static const std::vector<std::string> names = {"parse",   "goals",  "paraphrase",       "simulate", "report",
                                                  "suggest", "export-augmented", "paths", "serve"};
  return names;
}

// 1 = the input was rejected, 2 = something failed while running.
inline int exit_code_for(const std::string& code) {
  static const std::set<std::string> runtime = {"NotFound", "IoError", "ProviderUnavailable",
                                                "ScorerUnavailable", "ConnectorError", "InternalError"};
  return runtime.count(code) ? 2 : 1;
}

namespace cli_detail {

inline std::filesystem::path maps_file(const std::string& arg) {
  std::filesystem::path p(arg);
  return std::filesystem::is_directory(p) ? p / "maps.json" : p;
}

inline BotDefinition load_bot(const std::string& path, const std::string& adaptor) {
  if (adaptor.empty() || adaptor == "native") return load_bot_definition_file(path);
  return AdaptorRegistry::with_builtins().convert(adaptor, read_file(path));
}

inline void write_or_print(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") out << content;
  else write_file_atomic(path, content);
}

inline std::pair<std::string, int> split_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw ContractError("bind address must look like host:port");
  return {bind.substr(0, colon), std::stoi(bind.substr(colon + 1))};
}

inline ApiServer* g_server = nullptr;
inline void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Simulation-based testing and remediation for task-oriented bots", "botsim"};
  app.require_subcommand(1);

  std::string bot, adaptor = "native", maps, goals_path, out_path, transcripts, provenance_path, faults;
  std::string templates_path, generated_at, session_id = "session", bot_url, suggestions_path;
  std::uint64_t seed = 0;
  int threshold = 85, max_turns = 30, parallelism = 1;
  bool force = false;
  double sim_low = 0.50, sim_high = 0.99, move_threshold = 0.8;
  int fuzz_max = 70;

  // parse
  auto* parse = app.add_subcommand("parse", "Validate a bot definition and infer dialog-act maps and graph");
  std::vector<std::string> revisions, approvals;
  bool approve_all = false;
  parse->add_option("--bot", bot, "Bot definition file")->required();
  parse->add_option("--adaptor", adaptor, "Input format (native, csv-flow)");
  parse->add_option("--maps", maps, "Start from existing maps instead of inferring them");
  parse->add_option("--out", out_path, "Output directory")->required();
  parse->add_option("--revise", revisions, "Revision file(s) to apply");
  parse->add_option("--approve", approvals, "Approve a label awaiting review (dialog/act)");
  parse->add_flag("--approve-all", approve_all, "Approve every label awaiting review");

  // goals
  auto* goals = app.add_subcommand("goals", "Generate simulation goals");
  std::size_t per_query = 1, pool_size = kDefaultPoolSize;
  std::string ontology_path, paraphrases_path, provenance_out;
  bool no_training = false;
  goals->add_option("--bot", bot)->required();
  goals->add_option("--adaptor", adaptor);
  goals->add_option("--maps", maps)->required();
  goals->add_option("--out", out_path, "Goals file")->required();
  goals->add_option("--seed", seed);
  goals->add_option("--per-query", per_query, "Goals per intent query");
  goals->add_option("--pool-size", pool_size, "Synthetic values per entity");
  goals->add_option("--ontology", ontology_path, "Entity value overlay {entity: [values]}");
  goals->add_option("--paraphrases", paraphrases_path, "Output of the paraphrase subcommand");
  goals->add_option("--provenance-out", provenance_out, "Where to write paraphrase provenance");
  goals->add_flag("--no-training", no_training, "Use only paraphrases as intent queries");
  goals->add_flag("--force", force, "Ignore labels awaiting review");

  // paraphrase
  auto* para = app.add_subcommand("paraphrase", "Paraphrase intent utterances and filter candidates");
  std::size_t n_para = 10;
  std::string provider = "builtin", utterance, scorer_url;
  para->add_option("--bot", bot);
  para->add_option("--adaptor", adaptor);
  para->add_option("--utterance", utterance, "Paraphrase a single utterance");
  para->add_option("--out", out_path);
  para->add_option("--n", n_para, "Candidates per utterance");
  para->add_option("--provider", provider, "builtin or remote");
  para->add_option("--url", bot_url, "Paraphrase service URL for --provider remote");
  para->add_option("--scorer-url", scorer_url, "Similarity service URL (default: TF-IDF)");
  para->add_option("--seed", seed);
  para->add_option("--sim-low", sim_low);
  para->add_option("--sim-high", sim_high);
  para->add_option("--fuzz-max", fuzz_max);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run simulated conversations against a bot");
  std::string connector = "mock";
  sim->add_option("--bot", bot)->required();
  sim->add_option("--adaptor", adaptor);
  sim->add_option("--maps", maps)->required();
  sim->add_option("--goals", goals_path)->required();
  sim->add_option("--out", out_path, "Transcript file (line-delimited)")->required();
  sim->add_option("--seed", seed);
  sim->add_option("--threshold", threshold, "Fuzzy match threshold 0-100");
  sim->add_option("--max-turns", max_turns);
  sim->add_option("--parallelism", parallelism);
  sim->add_option("--connector", connector, "mock or http");
  sim->add_option("--faults", faults, "Fault profile for the mock bot");
  sim->add_option("--bot-url", bot_url, "Base URL for the http connector");
  sim->add_option("--templates", templates_path, "NLG template file");
  sim->add_option("--provenance", provenance_path, "Paraphrase provenance file");
  sim->add_flag("--force", force, "Run even with labels awaiting review");

  // report
  auto* report = app.add_subcommand("report", "Aggregate transcripts into a health report");
  std::vector<std::string> compare;
  std::size_t n_resamples = kDefaultResamples;
  report->add_option("--bot", bot);
  report->add_option("--adaptor", adaptor);
  report->add_option("--transcripts", transcripts);
  report->add_option("--provenance", provenance_path);
  report->add_option("--out", out_path);
  report->add_option("--session-id", session_id);
  report->add_option("--seed", seed);
  report->add_option("--n-resamples", n_resamples);
  report->add_option("--generated-at", generated_at, "Report timestamp (default SOURCE_DATE_EPOCH or now)");
  report->add_option("--compare", compare, "Build a trend from existing report files");

  // suggest
  auto* suggest = app.add_subcommand("suggest", "Group intent errors and propose remediations");
  std::string errors_out, intent_filter;
  suggest->add_option("--transcripts", transcripts)->required();
  suggest->add_option("--bot", bot)->required();
  suggest->add_option("--adaptor", adaptor);
  suggest->add_option("--provenance", provenance_path);
  suggest->add_option("--out", out_path, "Suggestions file");
  suggest->add_option("--errors-out", errors_out, "Error groups file");
  suggest->add_option("--intent", intent_filter, "Only groups whose true intent matches");
  suggest->add_option("--move-threshold", move_threshold);

  // export-augmented
  auto* exp = app.add_subcommand("export-augmented", "Export training data with accepted suggestions");
  std::vector<std::string> accept_ids;
  bool accept_all = false;
  exp->add_option("--bot", bot)->required();
  exp->add_option("--adaptor", adaptor);
  exp->add_option("--suggestions", suggestions_path)->required();
  exp->add_option("--accept", accept_ids, "Suggestion id(s) to accept");
  exp->add_flag("--accept-all", accept_all);
  exp->add_option("--out", out_path);

  // paths
  auto* paths = app.add_subcommand("paths", "Enumerate conversation paths between two dialogs");
  std::string src, dst;
  std::size_t max_depth = kDefaultMaxDepth, max_paths = kDefaultMaxPaths;
  paths->add_option("--bot", bot)->required();
  paths->add_option("--adaptor", adaptor);
  paths->add_option("--src", src)->required();
  paths->add_option("--dst", dst)->required();
  paths->add_option("--max-depth", max_depth);
  paths->add_option("--max-paths", max_paths);
  paths->add_option("--out", out_path);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  std::string store_dir, bind;
  serve->add_option("--store", store_dir, "Store directory (default $STORE_DIR or ./store)");
  serve->add_option("--bind", bind, "host:port (default $BIND_ADDR or 127.0.0.1:8080)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*parse) {
      const auto def = cli_detail::load_bot(bot, adaptor);
      ParsedBot parsed;
      if (maps.empty()) {
        parsed = parse_bot(def);
      } else {
        parsed.graph = build_graph(def);
        parsed.global_maps = dialog_act_maps_from_json(read_json_file(cli_detail::maps_file(maps)));
      }
      for (const auto& r : revisions) {
        const auto rev = revision_from_json(read_json_file(r));
        auto it = parsed.global_maps.find(rev.dialog);
        if (it == parsed.global_maps.end()) throw UnknownNode("no dialog '" + rev.dialog + "'");
        it->second = apply_revision(it->second, rev);
      }
      for (const auto& a : approvals) {
        const auto slash = a.find('/');
        if (slash == std::string::npos) throw ContractError("--approve takes dialog/act");
        auto it = parsed.global_maps.find(a.substr(0, slash));
        if (it == parsed.global_maps.end()) throw UnknownNode("no dialog '" + a.substr(0, slash) + "'");
        it->second.clear_review(a.substr(slash + 1));
      }
      if (approve_all)
        for (auto& [_, m] : parsed.global_maps)
          for (const auto& act : std::vector<std::string>(m.needs_review())) m.clear_review(act);
      const std::filesystem::path dir(out_path);
      write_json_file(dir / "maps.json", to_json(parsed.global_maps));
      write_json_file(dir / "graph.json", to_json(parsed.graph));
      write_json_file(dir / "definition.json", to_json(def));
      out << Json{{"maps_version", maps_version(parsed.global_maps)},
                  {"dialogs", parsed.global_maps.size()},
                  {"pending_reviews", pending_reviews(parsed.global_maps)}}
                 .dump(2)
          << "\n";
      return 0;
    }

    if (*goals) {
      const auto def = cli_detail::load_bot(bot, adaptor);
      const auto m = dialog_act_maps_from_json(read_json_file(cli_detail::maps_file(maps)));
      auto ontology = generate_ontology(def, seed, pool_size);
      if (!ontology_path.empty()) apply_overlay(ontology, def, read_json_file(ontology_path));
      std::map<std::string, std::vector<std::string>> extra;
      Provenance prov;
      if (!paraphrases_path.empty()) {
        const auto doc = read_json_file(paraphrases_path);
        for (auto it = doc.at("kept").begin(); it != doc.at("kept").end(); ++it)
          extra[it.key()] = it->get<std::vector<std::string>>();
        prov = provenance_from_json(doc.at("provenance"));
      }
      const auto g = generate_all_goals(def, m, ontology, per_query, seed, force, extra, !no_training);
      write_json_file(out_path, goals_to_json(g));
      if (!provenance_out.empty()) write_json_file(provenance_out, to_json(prov));
      out << Json{{"goals", g.size()}}.dump() << "\n";
      return 0;
    }

    if (*para) {
      ParaphraseRegistry registry;
      registry.register_provider("builtin", std::make_shared<BuiltinParaphraser>(seed));
      if (!bot_url.empty()) registry.register_provider("remote", std::make_shared<RemoteParaphraser>(bot_url));
      FilterConfig filter{sim_low, sim_high, fuzz_max};
      filter.validate();
      if (!utterance.empty()) {
        std::unique_ptr<SimilarityScorer> scorer;
        if (!scorer_url.empty()) scorer = std::make_unique<RemoteScorer>(scorer_url);
        else scorer = std::make_unique<TfidfScorer>(std::vector<std::string>{utterance});
        auto cands = paraphrase(registry, provider, utterance, n_para);
        score_candidates(cands, *scorer);
        Json arr = Json::array();
        for (auto c : cands) {
          c.kept = c.sim >= filter.sim_low && c.sim <= filter.sim_high && c.fuzz <= filter.fuzz_max;
          arr.push_back(to_json(c));
        }
        cli_detail::write_or_print(out_path, arr.dump(2) + "\n", out);
        return 0;
      }
      if (bot.empty()) throw ContractError("paraphrase needs --bot or --utterance");
      const auto def = cli_detail::load_bot(bot, adaptor);
      std::unique_ptr<SimilarityScorer> scorer;
      if (!scorer_url.empty()) scorer = std::make_unique<RemoteScorer>(scorer_url);
      else scorer = std::make_unique<TfidfScorer>(training_corpus(def));
      const auto x = expand_with_paraphrases(def, registry, provider, n_para, *scorer, filter);
      Json cands = Json::array();
      for (const auto& c : x.candidates) cands.push_back(to_json(c));
      Json kept = Json::object();
      for (const auto& [k, v] : x.queries) kept[k] = v;
      cli_detail::write_or_print(
          out_path,
          Json{{"candidates", cands}, {"kept", kept}, {"provenance", to_json(x.provenance)}}.dump(2) + "\n", out);
      return 0;
    }

    if (*sim) {
      auto def = std::make_shared<const BotDefinition>(cli_detail::load_bot(bot, adaptor));
      const auto m = dialog_act_maps_from_json(read_json_file(cli_detail::maps_file(maps)));
      const auto g = goals_from_json(read_json_file(goals_path));
      SimConfig cfg;
      cfg.seed = seed;
      cfg.fuzzy_threshold = threshold;
      cfg.max_turns = max_turns;
      cfg.episodes_parallelism = parallelism;
      cfg.force = force;
      cfg.validate();
      if (!force && !pending_reviews(m).empty())
        throw ContractError("dialog-act maps have labels awaiting review (" +
                            std::to_string(pending_reviews(m).size()) + "); approve them or pass --force");
      ConnectorChoice choice;
      choice.kind = connector;
      choice.url = bot_url;
      if (!faults.empty()) choice.faults = profile_from_json(read_json_file(faults));
      Provenance prov;
      if (!provenance_path.empty()) prov = provenance_from_json(read_json_file(provenance_path));
      const auto templates = templates_path.empty() ? default_templates()
                                                    : templates_from_json(read_json_file(templates_path));
      const auto result = run_session(make_factory(def, choice, prov), g, m, templates, cfg);
      write_file_atomic(out_path, episodes_to_jsonl(result.episodes));
      Json counts = Json::object();
      for (const auto& [k, v] : result.counts) counts[k] = v;
      out << Json{{"episodes", result.episodes.size()}, {"success_rate", result.success_rate()}, {"counts", counts}}
                 .dump(2)
          << "\n";
      return 0;
    }

    if (*report) {
      if (!compare.empty()) {
        std::vector<SessionReport> reports;
        for (const auto& f : compare) reports.push_back(report_from_json(read_json_file(f)));
        cli_detail::write_or_print(out_path, to_json(compare_sessions(reports)).dump(2) + "\n", out);
        return 0;
      }
      if (bot.empty() || transcripts.empty()) throw ContractError("report needs --bot and --transcripts");
      const auto def = cli_detail::load_bot(bot, adaptor);
      const auto eps = episodes_from_jsonl(transcripts);
      const auto meta = meta_for(def, session_id, def.bot_name, resolve_generated_at(generated_at), seed, n_resamples);
      const auto r = aggregate_metrics(eps, meta);
      cli_detail::write_or_print(out_path, to_json(r).dump(2) + "\n", out);
      return 0;
    }

    if (*suggest) {
      const auto def = cli_detail::load_bot(bot, adaptor);
      const auto eps = episodes_from_jsonl(transcripts);
      Provenance prov;
      if (!provenance_path.empty()) prov = provenance_from_json(read_json_file(provenance_path));
      std::vector<Goal> none;
      prov = complete_provenance(def, none, std::move(prov));
      for (const auto& e : eps) prov.emplace(e.intent_query, e.intent_query);
      auto groups = group_intent_errors(eps, prov);
      SuggestConfig cfg;
      cfg.move_threshold = move_threshold;
      auto s = suggest_remediations(groups, paraphrase_totals(eps, prov), cfg);
      if (!intent_filter.empty()) {
        std::erase_if(groups, [&](const ErrorGroup& g) { return g.true_intent != intent_filter; });
        std::erase_if(s, [&](const RemediationSuggestion& x) { return x.true_intent != intent_filter; });
      }
      if (!errors_out.empty()) write_json_file(errors_out, groups_to_json(groups));
      cli_detail::write_or_print(out_path, suggestions_to_json(s).dump(2) + "\n", out);
      return 0;
    }

    if (*exp) {
      const auto def = cli_detail::load_bot(bot, adaptor);
      const auto s = suggestions_from_json(read_json_file(suggestions_path));
      std::vector<std::string> ids = accept_ids;
      for (const auto& x : s)
        if (accept_all || x.accepted) ids.push_back(x.id);
      const auto d = export_augmented_training(def, s, ids);
      Json counts = Json::object();
      for (const auto& [k, v] : d.intents) counts[k] = v.size();
      cli_detail::write_or_print(out_path, to_json(d).dump(2) + "\n", out);
      if (!out_path.empty() && out_path != "-") out << Json{{"counts", counts}}.dump(2) << "\n";
      return 0;
    }

    if (*paths) {
      const auto def = cli_detail::load_bot(bot, adaptor);
      const auto set = enumerate_simple_paths(build_graph(def), src, dst, max_depth, max_paths);
      cli_detail::write_or_print(out_path, export_paths_jsonl(set), out);
      if (set.truncated) err << "note: more than " << max_paths << " paths exist; output truncated\n";
      return 0;
    }

    if (*serve) {
      if (store_dir.empty()) {
        const char* env = std::getenv("STORE_DIR");
        store_dir = env && *env ? env : "store";
      }
      if (bind.empty()) {
        const char* env = std::getenv("BIND_ADDR");
        bind = env && *env ? env : "127.0.0.1:8080";
      }
      const auto [host, port] = cli_detail::split_bind(bind);
      Store store(store_dir);
      ApiServer server(store, ServiceOptions::from_env());
      cli_detail::g_server = &server;
      std::signal(SIGINT, cli_detail::on_signal);
      std::signal(SIGTERM, cli_detail::on_signal);
      err << "listening on " << host << ":" << port << " (store " << store_dir << ")\n";
      const bool ok = server.listen(host, port);
      cli_detail::g_server = nullptr;
      if (!ok) throw Error("IoError", "cannot listen on " + bind);
      return 0;
    }
  } catch (const Error& e) {
    err << "error[" << e.code() << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const Json::exception& e) {
    err << "error[SchemaError]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error[InternalError]: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace botsim
