#pragma once

// End-to-end helpers shared by the CLI and the HTTP service.

#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "botsim/mockbot.hpp"
#include "botsim/remediator.hpp"
#include "botsim/remote.hpp"
#include "botsim/simulator.hpp"

namespace botsim {

// Intent queries for a dialog: training utterances of the same-named intent.
inline std::vector<std::string> intent_queries_for(const BotDefinition& def, const std::string& dialog) {
  if (const auto* i = def.find_intent(dialog)) return i->utterances;
  return {};
}

// Goals for every intent-root dialog. `extra_queries` adds per-dialog
// queries (typically kept paraphrases) after the training utterances.
inline std::vector<Goal> generate_all_goals(const BotDefinition& def, const DialogActMaps& maps,
                                            const Ontology& ontology, std::size_t per_query,
                                            std::uint64_t seed, bool force,
                                            const std::map<std::string, std::vector<std::string>>& extra_queries = {},
                                            bool include_training = true) {
  std::vector<Goal> out;
  for (const auto& d : def.dialogs) {
    if (!d.is_intent_root) continue;
    std::vector<std::string> queries;
    if (include_training) queries = intent_queries_for(def, d.name);
    if (auto it = extra_queries.find(d.name); it != extra_queries.end())
      queries.insert(queries.end(), it->second.begin(), it->second.end());
    if (queries.empty()) continue;
    auto goals = generate_goals(maps.at(d.name), ontology, queries, per_query, seed, force);
    out.insert(out.end(), goals.begin(), goals.end());
  }
  if (out.empty()) throw ContractError("no intent dialog has any query to build goals from");
  return out;
}

// Training utterances and any query without recorded provenance count as
// their own originals.
inline Provenance complete_provenance(const BotDefinition& def, const std::vector<Goal>& goals,
                                      Provenance provenance) {
  for (const auto& i : def.intents)
    for (const auto& u : i.utterances) provenance.emplace(u, u);
  for (const auto& g : goals)
    for (const auto& [k, v] : g.inform_slots)
      if (is_intent_key(k)) provenance.emplace(v, v);
  return provenance;
}

inline Provenance provenance_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("provenance: expected {paraphrase: original}");
  Provenance p;
  for (auto it = j.begin(); it != j.end(); ++it) p[it.key()] = it->get<std::string>();
  return p;
}

inline Json to_json(const Provenance& p) {
  Json j = Json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

struct ConnectorChoice {
  std::string kind = "mock";  // mock | http
  FaultProfile faults;
  std::string url;
};

inline ConnectorFactory make_factory(std::shared_ptr<const BotDefinition> def, const ConnectorChoice& c,
                                     const Provenance& provenance) {
  if (c.kind == "mock") return make_mock_factory(std::move(def), c.faults, provenance);
  if (c.kind == "http") {
    if (c.url.empty()) throw ContractError("http connector needs a bot url");
    return make_http_factory(c.url);
  }
  throw ContractError("unknown connector '" + c.kind + "' (expected mock or http)");
}

struct ParaphraseExpansion {
  std::map<std::string, std::vector<std::string>> queries;  // dialog -> kept paraphrases
  Provenance provenance;
  std::vector<ParaphraseCandidate> candidates;  // every scored candidate
};

// Paraphrases every training utterance of every intent-root dialog and keeps
// the candidates that pass the filter.
inline ParaphraseExpansion expand_with_paraphrases(const BotDefinition& def,
                                                   const ParaphraseRegistry& registry,
                                                   const std::string& provider, std::size_t n,
                                                   const SimilarityScorer& scorer,
                                                   const FilterConfig& filter) {
  filter.validate();
  ParaphraseExpansion out;
  for (const auto& d : def.dialogs) {
    if (!d.is_intent_root) continue;
    for (const auto& u : intent_queries_for(def, d.name)) {
      auto cands = paraphrase(registry, provider, u, n);
      score_candidates(cands, scorer);
      for (auto& c : filter_candidates(cands, filter)) {
        if (out.provenance.emplace(c.text, u).second) out.queries[d.name].push_back(c.text);
      }
      for (auto& c : cands) {
        c.kept = c.sim >= filter.sim_low && c.sim <= filter.sim_high && c.fuzz <= filter.fuzz_max;
        out.candidates.push_back(std::move(c));
      }
    }
  }
  return out;
}

// Training corpus for the default TF-IDF scorer.
inline std::vector<std::string> training_corpus(const BotDefinition& def) {
  std::vector<std::string> out;
  for (const auto& i : def.intents) out.insert(out.end(), i.utterances.begin(), i.utterances.end());
  return out;
}

struct Analysis {
  SessionReport report;
  std::vector<ErrorGroup> groups;
  std::vector<RemediationSuggestion> suggestions;
};

inline SessionMeta meta_for(const BotDefinition& def, std::string session_id, std::string bot_id,
                            std::string generated_at, std::uint64_t seed,
                            std::size_t n_resamples = kDefaultResamples) {
  SessionMeta m;
  m.session_id = std::move(session_id);
  m.bot_id = std::move(bot_id);
  m.generated_at = std::move(generated_at);
  m.seed = seed;
  m.n_resamples = n_resamples;
  for (const auto& d : def.dialogs)
    if (d.is_intent_root) m.intents.push_back(d.name);
  for (const auto& e : def.entities) m.entities.push_back(e.name);
  return m;
}

inline Analysis analyze_session(const std::vector<Episode>& episodes, const SessionMeta& meta,
                                const Provenance& provenance, const SuggestConfig& cfg = {}) {
  Analysis a;
  a.report = aggregate_metrics(episodes, meta);
  a.groups = group_intent_errors(episodes, provenance);
  a.suggestions = suggest_remediations(a.groups, paraphrase_totals(episodes, provenance), cfg);
  return a;
}

inline Json groups_to_json(const std::vector<ErrorGroup>& groups) {
  Json j = Json::array();
  for (const auto& g : groups) j.push_back(to_json(g));
  return j;
}

// Report timestamp: explicit value, else SOURCE_DATE_EPOCH, else now.
inline std::string resolve_generated_at(const std::string& explicit_value) {
  if (!explicit_value.empty()) return explicit_value;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    try {
      return iso_utc(static_cast<std::time_t>(std::stoll(epoch)));
    } catch (const std::exception&) {
      throw ContractError(std::string("SOURCE_DATE_EPOCH is not an integer: ") + epoch);
    }
  }
  return now_iso();
}

}  // namespace botsim
