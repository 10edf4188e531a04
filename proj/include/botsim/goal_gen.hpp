#pragma once

// Ontology of synthetic entity values and simulation goals.

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "botsim/bot_def.hpp"
#include "botsim/conv_graph.hpp"
#include "botsim/dialog_act_map.hpp"
#include "botsim/entity_values.hpp"

namespace botsim {

inline constexpr const char* kIntentSlot = "Intent";
inline constexpr const char* kUnknownValue = "UNK";
inline constexpr std::size_t kDefaultPoolSize = 50;

struct Ontology {
  std::map<std::string, std::vector<std::string>> values;
  std::uint64_t seed = 0;
  // Entities whose pool was generated rather than supplied by the user.
  std::set<std::string> synthetic;

  bool operator==(const Ontology&) const = default;
};

namespace detail {

inline constexpr std::array<const char*, 16> kNames = {
    "andrews", "baker", "carter", "diaz", "evans", "foster", "garcia", "hughes",
    "ingram", "jensen", "kim", "lopez", "morgan", "nolan", "ortiz", "patel"};
inline constexpr std::array<const char*, 4> kHosts = {"ms-mail.com", "example-mail.com",
                                                      "fastpost.net", "inboxly.org"};
inline constexpr std::array<const char*, 6> kSubjects = {
    "my laptop", "the mobile app", "my router", "the checkout page", "my headset", "the printer"};
inline constexpr std::array<const char*, 5> kProblems = {
    "keeps restarting", "will not turn on", "shows an error", "is very slow", "stopped syncing"};

inline std::string digits(Rng& rng, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + uniform_index(rng, 10)));
  return s;
}

inline std::string synthetic_value(const EntitySpec& e, Rng& rng) {
  switch (e.value_type) {
    case ValueType::Email: {
      std::string name = kNames[uniform_index(rng, kNames.size())];
      if (uniform_index(rng, 2) == 1) name += digits(rng, 2);
      return name + "@" + kHosts[uniform_index(rng, kHosts.size())];
    }
    case ValueType::Number:
      return std::to_string(10000 + uniform_index(rng, 9990000));
    case ValueType::AlphaNumericId: {
      std::string s(1, static_cast<char>('A' + uniform_index(rng, 26)));
      return s + digits(rng, 6);
    }
    case ValueType::Date: {
      auto pad = [](std::size_t v) { return (v < 10 ? "0" : "") + std::to_string(v); };
      return std::to_string(2020 + uniform_index(rng, 6)) + "-" + pad(1 + uniform_index(rng, 12)) +
             "-" + pad(1 + uniform_index(rng, 28));
    }
    case ValueType::FreeText:
      return std::string(kSubjects[uniform_index(rng, kSubjects.size())]) + " " +
             kProblems[uniform_index(rng, kProblems.size())];
    case ValueType::Enumerated:
      return e.allowed_values->at(uniform_index(rng, e.allowed_values->size()));
  }
  return {};
}

inline std::size_t distinct_capacity(const EntitySpec& e) {
  switch (e.value_type) {
    case ValueType::FreeText: return kSubjects.size() * kProblems.size();
    case ValueType::Enumerated: return e.allowed_values ? e.allowed_values->size() : 0;
    default: return std::numeric_limits<std::size_t>::max();
  }
}

}  // namespace detail

// Deterministic in (def, seed). Pools hold up to `pool_size` distinct values.
inline Ontology generate_ontology(const BotDefinition& def, std::uint64_t seed,
                                  std::size_t pool_size = kDefaultPoolSize) {
  Ontology o;
  o.seed = seed;
  for (const auto& e : def.entities) {
    auto rng = make_rng(seed, fnv1a64(e.name));
    const auto target = std::min(pool_size, detail::distinct_capacity(e));
    std::vector<std::string> pool;
    std::set<std::string> seen;
    for (std::size_t attempt = 0; pool.size() < target && attempt < target * 50; ++attempt) {
      auto v = detail::synthetic_value(e, rng);
      if (seen.insert(v).second) pool.push_back(std::move(v));
    }
    o.values[e.name] = std::move(pool);
    o.synthetic.insert(e.name);
  }
  return o;
}

// User-supplied {entity: [values]} replaces the synthetic pools.
inline void apply_overlay(Ontology& o, const BotDefinition& def, const Json& overlay) {
  if (!overlay.is_object()) throw SchemaError("ontology overlay: expected {entity: [values]}");
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    const auto* entity = def.find_entity(it.key());
    if (!entity) throw SchemaError("ontology overlay: unknown entity '" + it.key() + "'");
    if (!it->is_array() || it->empty())
      throw SchemaError("ontology overlay: '" + it.key() + "' needs a non-empty value list");
    std::vector<std::string> vals;
    for (const auto& v : *it) {
      auto s = v.get<std::string>();
      if (!matches_value_type(*entity, s))
        throw SchemaError("ontology overlay: value '" + s + "' is not a valid " +
                          std::string(to_string(entity->value_type)));
      vals.push_back(std::move(s));
    }
    o.values[it.key()] = std::move(vals);
    o.synthetic.erase(it.key());
  }
}

inline Json to_json(const Ontology& o) {
  Json values = Json::object();
  for (const auto& [k, v] : o.values) values[k] = v;
  return Json{{"seed", o.seed}, {"values", values}, {"synthetic", o.synthetic}};
}

inline Ontology ontology_from_json(const Json& j) {
  Ontology o;
  o.seed = j.value("seed", std::uint64_t{0});
  for (auto it = j.at("values").begin(); it != j.at("values").end(); ++it)
    o.values[it.key()] = it->get<std::vector<std::string>>();
  if (j.contains("synthetic")) o.synthetic = j.at("synthetic").get<std::set<std::string>>();
  return o;
}

using SlotList = std::vector<std::pair<std::string, std::string>>;

struct Goal {
  std::string id;
  std::string goal_name;
  // Declaration order matters: each "Intent"/"Intent_k" key closes the
  // segment of slots that belongs to that intent.
  SlotList inform_slots;
  SlotList request_slots;
  std::optional<std::vector<std::string>> path;

  const std::string* inform(std::string_view slot) const {
    for (const auto& [k, v] : inform_slots)
      if (k == slot) return &v;
    return nullptr;
  }

  bool operator==(const Goal&) const = default;
};

inline bool is_intent_key(std::string_view key) {
  return key == kIntentSlot || starts_with(key, "Intent_");
}

inline std::string intent_key(std::size_t ordinal) {
  return ordinal == 0 ? std::string(kIntentSlot) : "Intent_" + std::to_string(ordinal + 1);
}

// Slot names requested by a map, in act order.
inline std::vector<std::string> requested_slots(const DialogActMap& map) {
  std::vector<std::string> out;
  for (const auto& a : map.acts())
    if (starts_with(a.name, "request_")) out.push_back(a.name.substr(8));
  return out;
}

namespace detail {
inline const std::string& sample_value(const Ontology& o, const std::string& slot, Rng& rng) {
  auto it = o.values.find(slot);
  if (it == o.values.end() || it->second.empty())
    throw MissingOntologyValue("no ontology values for slot '" + slot + "'");
  return it->second[uniform_index(rng, it->second.size())];
}
}  // namespace detail

// One goal per (query, repetition), ids "<dialog>_<k>". Values are drawn
// from a stream keyed by (seed, dialog, k).
inline std::vector<Goal> generate_goals(const DialogActMap& map, const Ontology& ontology,
                                        const std::vector<std::string>& intent_queries,
                                        std::size_t per_query, std::uint64_t seed,
                                        bool force = false) {
  if (map.has_pending_review() && !force)
    throw ContractError("dialog '" + map.dialog() + "' has success labels awaiting review");
  const auto slots = requested_slots(map);
  const auto stream = mix_seed(seed, fnv1a64(map.dialog()));
  std::vector<Goal> goals;
  std::size_t k = 0;
  for (const auto& query : intent_queries) {
    for (std::size_t r = 0; r < per_query; ++r, ++k) {
      auto rng = make_rng(stream, k);
      Goal g;
      g.id = map.dialog() + "_" + std::to_string(k);
      g.goal_name = map.dialog();
      for (const auto& s : slots) g.inform_slots.emplace_back(s, detail::sample_value(ontology, s, rng));
      g.inform_slots.emplace_back(kIntentSlot, query);
      g.request_slots.emplace_back(map.dialog(), kUnknownValue);
      goals.push_back(std::move(g));
    }
  }
  return goals;
}

// Goal covering every node of a graph path. Nodes with an entry in
// `intent_queries_per_node` are treated as intent nodes and contribute an
// Intent / Intent_2 / ... query in path order.
inline Goal generate_path_goal(const ConversationGraph& g, const DialogActMaps& local_maps,
                               const Path& path, const Ontology& ontology,
                               const std::map<std::string, std::string>& intent_queries_per_node,
                               std::uint64_t seed, std::size_t index = 0) {
  if (path.nodes.empty()) throw ContractError("empty path");
  for (const auto& n : path.nodes)
    if (!g.contains(n)) throw UnknownNode("unknown dialog '" + n + "' on path");
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    bool linked = false;
    for (const auto& e : g.out_edges(path.nodes[i])) linked = linked || e.target == path.nodes[i + 1];
    if (!linked)
      throw ContractError("no transition " + path.nodes[i] + " -> " + path.nodes[i + 1]);
  }

  Goal goal;
  goal.goal_name = path.nodes.front();
  goal.path = path.nodes;
  std::string joined;
  for (const auto& n : path.nodes) joined += (joined.empty() ? "" : "/") + n;
  auto rng = make_rng(mix_seed(seed, fnv1a64(joined)), index);

  std::set<std::string> seen;
  std::size_t intents = 0;
  for (const auto& node : path.nodes) {
    auto lm = local_maps.find(node);
    if (lm == local_maps.end()) throw ContractError("no local map for dialog '" + node + "'");
    for (const auto& s : requested_slots(lm->second)) {
      if (!seen.insert(s).second) continue;
      goal.inform_slots.emplace_back(s, detail::sample_value(ontology, s, rng));
    }
    if (auto q = intent_queries_per_node.find(node); q != intent_queries_per_node.end()) {
      goal.inform_slots.emplace_back(intent_key(intents++), q->second);
      goal.request_slots.emplace_back(node, kUnknownValue);
    }
  }
  if (intents == 0) throw ContractError("path has no intent node with a query");
  goal.id = goal.goal_name + "_path_" + std::to_string(index);
  return goal;
}

inline Json slots_to_json(const SlotList& slots) {
  Json j = Json::object();
  for (const auto& [k, v] : slots) j[k] = v;
  return j;
}

inline SlotList slots_from_json(const Json& j) {
  SlotList out;
  for (auto it = j.begin(); it != j.end(); ++it) out.emplace_back(it.key(), it->get<std::string>());
  return out;
}

// {goal_id: {goal, inform_slots, request_slots, path?}}
inline Json goals_to_json(const std::vector<Goal>& goals) {
  Json j = Json::object();
  for (const auto& g : goals) {
    Json entry{{"goal", g.goal_name},
               {"inform_slots", slots_to_json(g.inform_slots)},
               {"request_slots", slots_to_json(g.request_slots)}};
    if (g.path) entry["path"] = *g.path;
    j[g.id] = std::move(entry);
  }
  return j;
}

inline std::vector<Goal> goals_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("goals file: expected {goal_id: goal}");
  std::vector<Goal> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    try {
      Goal g;
      g.id = it.key();
      g.goal_name = it->at("goal").get<std::string>();
      g.inform_slots = slots_from_json(it->at("inform_slots"));
      g.request_slots = slots_from_json(it->at("request_slots"));
      if (it->contains("path")) g.path = it->at("path").get<std::vector<std::string>>();
      if (!g.inform(kIntentSlot)) throw SchemaError("goal '" + g.id + "' lacks an Intent slot");
      out.push_back(std::move(g));
    } catch (const Json::exception& e) {
      throw SchemaError("goal '" + it.key() + "': " + e.what());
    }
  }
  return out;
}

}  // namespace botsim
