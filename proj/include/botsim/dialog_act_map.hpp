#pragma once

// Dialog-act inference: per-message heuristics, local maps per dialog,
// global maps for dialogs that route into others, the two success labels,
// and human revisions on top.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "botsim/bot_def.hpp"
#include "botsim/conv_graph.hpp"

namespace botsim {

inline constexpr const char* kIntentSuccess = "intent_success_message";
inline constexpr const char* kDialogSuccess = "dialog_success_message";

struct ActEntry {
  std::string name;
  std::vector<std::string> variants;

  bool operator==(const ActEntry&) const = default;
};

class DialogActMap {
 public:
  DialogActMap() = default;
  explicit DialogActMap(std::string dialog) : dialog_(std::move(dialog)) {}

  const std::string& dialog() const { return dialog_; }
  const std::vector<ActEntry>& acts() const { return acts_; }
  bool empty() const { return acts_.empty(); }

  const ActEntry* find(std::string_view act) const {
    for (const auto& a : acts_)
      if (a.name == act) return &a;
    return nullptr;
  }
  bool contains(std::string_view act) const { return find(act) != nullptr; }

  // Plain append, the local-map semantics.
  void append(const std::string& act, const std::string& variant) {
    entry(act).variants.push_back(variant);
  }

  // Append unless the exact string is already present.
  void add_unique(const std::string& act, const std::string& variant) {
    auto& e = entry(act);
    for (const auto& v : e.variants)
      if (v == variant) return;
    e.variants.push_back(variant);
  }

  // Union of another map into this one; first appearance wins the order.
  void merge(const DialogActMap& other) {
    for (const auto& a : other.acts_)
      for (const auto& v : a.variants) add_unique(a.name, v);
  }

  // Returns false when the act does not exist.
  bool remove_variant(const std::string& act, const std::string& variant) {
    for (auto it = acts_.begin(); it != acts_.end(); ++it) {
      if (it->name != act) continue;
      std::erase(it->variants, variant);
      if (it->variants.empty()) {
        acts_.erase(it);
        clear_review(act);
      }
      return true;
    }
    return false;
  }

  const std::vector<std::string>& needs_review() const { return needs_review_; }
  bool has_pending_review() const { return !needs_review_.empty(); }
  void flag_review(const std::string& act) {
    for (const auto& a : needs_review_)
      if (a == act) return;
    needs_review_.push_back(act);
  }
  void clear_review(const std::string& act) { std::erase(needs_review_, act); }

  bool operator==(const DialogActMap&) const = default;

 private:
  ActEntry& entry(const std::string& act) {
    for (auto& a : acts_)
      if (a.name == act) return a;
    acts_.push_back(ActEntry{act, {}});
    return acts_.back();
  }

  std::string dialog_;
  std::vector<ActEntry> acts_;
  std::vector<std::string> needs_review_;
};

using DialogActMaps = std::map<std::string, DialogActMap>;

// `unknown_ordinal` is the 1-based count of unknown acts in the dialog so far.
// Inform/Confirm without a slot have no slot-bearing act and count as unknown.
inline std::string infer_local_dialog_act(const BotMessage& msg, int unknown_ordinal) {
  switch (msg.action) {
    case Action::Collect:
      if (msg.slot) return "request_" + *msg.slot;
      break;
    case Action::Confirm:
      if (msg.slot) return "confirm_" + *msg.slot;
      break;
    case Action::Inform:
      if (msg.slot) return "inform_" + *msg.slot;
      break;
    case Action::Transfer:
      return "transfer";
    case Action::End:
      return "end";
    case Action::Unknown:
      break;
  }
  return "unknown_" + std::to_string(unknown_ordinal);
}

inline DialogActMap build_local_map(const DialogSpec& dialog) {
  DialogActMap map(dialog.name);
  int unknowns = 0;
  for (const auto& m : dialog.messages) {
    const bool slotless = (m.action == Action::Collect || m.action == Action::Confirm ||
                           m.action == Action::Inform) && !m.slot;
    if (m.action == Action::Unknown || slotless) ++unknowns;
    map.append(infer_local_dialog_act(m, unknowns), m.text);
  }
  return map;
}

inline DialogActMaps build_local_maps(const BotDefinition& def) {
  DialogActMaps out;
  for (const auto& d : def.dialogs) out.emplace(d.name, build_local_map(d));
  return out;
}

// Terminal dialogs keep their local map. Every other dialog gets the union of
// the local maps of all nodes on any simple path from it to a terminal,
// contributed in graph declaration order with the dialog itself first.
inline DialogActMaps build_global_maps(const DialogActMaps& local, const ConversationGraph& g) {
  DialogActMaps out;
  for (const auto& d : g.nodes()) {
    auto lit = local.find(d);
    if (lit == local.end()) throw ContractError("no local map for dialog '" + d + "'");
    if (g.is_terminal(d)) {
      out.emplace(d, lit->second);
      continue;
    }
    const auto contributing = nodes_on_terminal_paths(g, d);
    DialogActMap global(d);
    global.merge(lit->second);
    for (const auto& n : g.nodes()) {
      if (n == d || !contributing.count(n)) continue;
      auto it = local.find(n);
      if (it == local.end()) throw ContractError("no local map for dialog '" + n + "'");
      global.merge(it->second);
    }
    out.emplace(d, std::move(global));
  }
  return out;
}

struct SuccessMessages {
  std::string intent_success_message;
  std::string dialog_success_message;
};

// First message of the intent-root dialog, and last message of the terminal
// dialog that closes it: the dialog itself when terminal, otherwise the
// lexicographically first reachable terminal with messages. Both acts are
// inserted into `map` and flagged for human review.
inline SuccessMessages infer_success_messages(const BotDefinition& def,
                                              const ConversationGraph& g,
                                              const std::string& dialog, DialogActMap& map) {
  const auto* spec = def.find_dialog(dialog);
  if (!spec) throw UnknownNode("unknown dialog '" + dialog + "'");
  if (!spec->is_intent_root) throw ContractError("dialog '" + dialog + "' is not an intent root");
  if (spec->messages.empty()) throw NoMessages("intent dialog '" + dialog + "' has no messages");

  const DialogSpec* closing = nullptr;
  if (g.is_terminal(dialog)) {
    closing = spec;
  } else {
    for (const auto& n : nodes_on_terminal_paths(g, dialog)) {  // std::set: sorted
      if (!g.is_terminal(n)) continue;
      const auto* t = def.find_dialog(n);
      if (t && !t->messages.empty()) {
        closing = t;
        break;
      }
    }
  }
  if (!closing) throw NoMessages("no terminal dialog with messages reachable from '" + dialog + "'");

  SuccessMessages out{spec->messages.front().text, closing->messages.back().text};
  map.add_unique(kIntentSuccess, out.intent_success_message);
  map.add_unique(kDialogSuccess, out.dialog_success_message);
  map.flag_review(kIntentSuccess);
  map.flag_review(kDialogSuccess);
  return out;
}

// Local maps, global maps, and success labels for every intent root.
struct ParsedBot {
  ConversationGraph graph;
  DialogActMaps local_maps;
  DialogActMaps global_maps;
};

inline ParsedBot parse_bot(const BotDefinition& def) {
  ParsedBot out;
  out.graph = build_graph(def);
  out.local_maps = build_local_maps(def);
  out.global_maps = build_global_maps(out.local_maps, out.graph);
  for (const auto& d : def.dialogs)
    if (d.is_intent_root) infer_success_messages(def, out.graph, d.name, out.global_maps.at(d.name));
  return out;
}

// --- revisions ---------------------------------------------------------------

struct Revision {
  std::string dialog;
  std::string act;
  std::vector<std::string> add_variants;
  std::vector<std::string> remove_variants;
  std::string author;
  std::string timestamp;

  bool operator==(const Revision&) const = default;
};

inline Revision inverse(const Revision& r) {
  Revision inv = r;
  std::swap(inv.add_variants, inv.remove_variants);
  return inv;
}

// Append-only audit trail of applied revisions.
class RevisionLog {
 public:
  void append(Revision r) { entries_.push_back(std::move(r)); }
  const std::vector<Revision>& entries() const { return entries_; }

 private:
  std::vector<Revision> entries_;
};

// Returns a new map version; the input is left untouched.
inline DialogActMap apply_revision(const DialogActMap& map, const Revision& rev,
                                   RevisionLog* log = nullptr) {
  if (rev.add_variants.empty() && rev.remove_variants.empty())
    throw ContractError("revision must add or remove at least one variant");
  if (rev.dialog != map.dialog())
    throw ContractError("revision targets dialog '" + rev.dialog + "' but map is '" +
                        map.dialog() + "'");
  if (!rev.remove_variants.empty() && !map.contains(rev.act))
    throw UnknownAct("dialog '" + rev.dialog + "' has no act '" + rev.act + "'");

  DialogActMap next = map;
  for (const auto& v : rev.add_variants) next.add_unique(rev.act, v);
  for (const auto& v : rev.remove_variants) next.remove_variant(rev.act, v);
  next.clear_review(rev.act);
  if (log) log->append(rev);
  return next;
}

// --- JSON --------------------------------------------------------------------

inline Json to_json(const DialogActMap& m) {
  Json acts = Json::object();
  for (const auto& a : m.acts()) acts[a.name] = a.variants;
  return Json{{"dialog", m.dialog()}, {"acts", acts}, {"needs_review", m.needs_review()}};
}

inline DialogActMap dialog_act_map_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dialog") || !j.contains("acts"))
    throw SchemaError("dialog act map: expected {dialog, acts, needs_review}");
  DialogActMap m(j.at("dialog").get<std::string>());
  for (auto it = j.at("acts").begin(); it != j.at("acts").end(); ++it) {
    if (!it->is_array() || it->empty())
      throw SchemaError("dialog act map '" + m.dialog() + "': act '" + it.key() +
                        "' needs a non-empty variant list");
    for (const auto& v : *it) m.append(it.key(), v.get<std::string>());
  }
  if (j.contains("needs_review"))
    for (const auto& a : j.at("needs_review")) m.flag_review(a.get<std::string>());
  return m;
}

inline Json to_json(const DialogActMaps& maps) {
  Json arr = Json::array();
  for (const auto& [_, m] : maps) arr.push_back(to_json(m));
  return arr;
}

inline DialogActMaps dialog_act_maps_from_json(const Json& j) {
  if (!j.is_array()) throw SchemaError("dialog act maps: expected array of per-dialog documents");
  DialogActMaps out;
  for (const auto& doc : j) {
    auto m = dialog_act_map_from_json(doc);
    auto name = m.dialog();
    out.emplace(std::move(name), std::move(m));
  }
  return out;
}

inline Json to_json(const Revision& r) {
  return Json{{"dialog", r.dialog},         {"act", r.act},
              {"add_variants", r.add_variants}, {"remove_variants", r.remove_variants},
              {"author", r.author},         {"timestamp", r.timestamp}};
}

inline Revision revision_from_json(const Json& j) {
  Revision r;
  try {
    r.dialog = j.at("dialog").get<std::string>();
    r.act = j.at("act").get<std::string>();
    r.add_variants = j.value("add_variants", std::vector<std::string>{});
    r.remove_variants = j.value("remove_variants", std::vector<std::string>{});
    r.author = j.value("author", std::string{});
    r.timestamp = j.value("timestamp", std::string{});
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("revision: ") + e.what());
  }
  return r;
}

// Content-derived version id for a map set.
inline std::string maps_version(const DialogActMaps& maps) { return fnv1a_hex(to_json(maps).dump()); }

inline std::vector<std::string> pending_reviews(const DialogActMaps& maps) {
  std::vector<std::string> out;
  for (const auto& [name, m] : maps)
    for (const auto& act : m.needs_review()) out.push_back(name + "/" + act);
  return out;
}

}  // namespace botsim
