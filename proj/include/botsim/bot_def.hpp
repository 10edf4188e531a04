#pragma once

// Universal bot-definition document model and its validator.
//
// The native file is JSON with top-level keys bot_name, version, dialogs[],
// entities[] and intents[]. Unknown keys are carried in `extra` so a
// load/serialize cycle does not drop them, but nothing downstream reads them.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "botsim/util.hpp"

namespace botsim {

enum class Action { Collect, Confirm, Inform, Transfer, End, Unknown };

enum class ValueType { Email, Number, AlphaNumericId, Date, FreeText, Enumerated };

inline std::string_view to_string(Action a) {
  switch (a) {
    case Action::Collect: return "Collect";
    case Action::Confirm: return "Confirm";
    case Action::Inform: return "Inform";
    case Action::Transfer: return "Transfer";
    case Action::End: return "End";
    case Action::Unknown: return "Unknown";
  }
  return "Unknown";
}

// Platform constructs we do not recognise degrade to Action::Unknown.
inline Action parse_action(std::string_view s) {
  const auto l = to_lower(s);
  if (l == "collect") return Action::Collect;
  if (l == "confirm") return Action::Confirm;
  if (l == "inform") return Action::Inform;
  if (l == "transfer") return Action::Transfer;
  if (l == "end") return Action::End;
  return Action::Unknown;
}

inline std::string_view to_string(ValueType t) {
  switch (t) {
    case ValueType::Email: return "Email";
    case ValueType::Number: return "Number";
    case ValueType::AlphaNumericId: return "AlphaNumericId";
    case ValueType::Date: return "Date";
    case ValueType::FreeText: return "FreeText";
    case ValueType::Enumerated: return "Enumerated";
  }
  return "FreeText";
}

inline std::optional<ValueType> parse_value_type(std::string_view s) {
  const auto l = to_lower(s);
  if (l == "email") return ValueType::Email;
  if (l == "number") return ValueType::Number;
  if (l == "alphanumericid") return ValueType::AlphaNumericId;
  if (l == "date") return ValueType::Date;
  if (l == "freetext") return ValueType::FreeText;
  if (l == "enumerated") return ValueType::Enumerated;
  return std::nullopt;
}

struct BotMessage {
  std::string text;
  Action action = Action::Unknown;
  std::optional<std::string> slot;
  std::optional<std::string> entity_type;
  Json extra = Json::object();

  bool operator==(const BotMessage&) const = default;
};

struct Transition {
  std::string label;
  std::string target;

  bool operator==(const Transition&) const = default;
};

struct DialogSpec {
  std::string name;
  std::vector<BotMessage> messages;
  std::vector<Transition> transitions;
  bool is_intent_root = false;
  Json extra = Json::object();

  bool is_terminal() const { return transitions.empty(); }
  bool operator==(const DialogSpec&) const = default;
};

struct EntitySpec {
  std::string name;
  ValueType value_type = ValueType::FreeText;
  std::optional<std::vector<std::string>> allowed_values;
  Json extra = Json::object();

  bool operator==(const EntitySpec&) const = default;
};

// Intent names match the name of the intent-root dialog they trigger.
struct IntentSpec {
  std::string name;
  std::vector<std::string> utterances;
  Json extra = Json::object();

  bool operator==(const IntentSpec&) const = default;
};

struct BotDefinition {
  std::string bot_name;
  std::string version;
  std::vector<DialogSpec> dialogs;
  std::vector<EntitySpec> entities;
  std::vector<IntentSpec> intents;
  Json extra = Json::object();

  const DialogSpec* find_dialog(std::string_view name) const {
    for (const auto& d : dialogs)
      if (d.name == name) return &d;
    return nullptr;
  }
  const EntitySpec* find_entity(std::string_view name) const {
    for (const auto& e : entities)
      if (e.name == name) return &e;
    return nullptr;
  }
  const IntentSpec* find_intent(std::string_view name) const {
    for (const auto& i : intents)
      if (i.name == name) return &i;
    return nullptr;
  }

  bool operator==(const BotDefinition&) const = default;
};

enum class Severity { Error, Warning };

struct Finding {
  Severity severity = Severity::Error;
  std::string path;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }
  std::string summary() const {
    std::string out;
    for (const auto& f : findings) {
      if (!out.empty()) out += "; ";
      out += f.path + ": " + f.message;
    }
    return out;
  }
};

inline ValidationReport validate_definition(const BotDefinition& def) {
  ValidationReport report;
  auto add = [&](std::string path, std::string msg) {
    report.findings.push_back({Severity::Error, std::move(path), std::move(msg)});
  };

  std::set<std::string> names;
  for (std::size_t i = 0; i < def.dialogs.size(); ++i) {
    if (!names.insert(def.dialogs[i].name).second)
      add("dialogs[" + std::to_string(i) + "].name",
          "duplicate dialog name '" + def.dialogs[i].name + "'");
  }

  bool has_terminal = false;
  for (std::size_t i = 0; i < def.dialogs.size(); ++i) {
    const auto& d = def.dialogs[i];
    const auto base = "dialogs[" + std::to_string(i) + "]";
    if (d.transitions.empty()) has_terminal = true;
    // Router dialogs may be message-less; intent roots may not.
    if (d.is_intent_root && d.messages.empty())
      add(base + ".messages", "intent-root dialog '" + d.name + "' has no messages");

    std::set<std::string> targets;
    for (std::size_t j = 0; j < d.transitions.size(); ++j) {
      const auto& t = d.transitions[j];
      const auto tpath = base + ".transitions[" + std::to_string(j) + "].target";
      if (!names.count(t.target))
        add(tpath, "transition targets unknown dialog '" + t.target + "'");
      if (!targets.insert(t.target).second)
        add(tpath, "duplicate transition target '" + t.target + "'");
    }

    for (std::size_t k = 0; k < d.messages.size(); ++k) {
      const auto& m = d.messages[k];
      const auto mpath = base + ".messages[" + std::to_string(k) + "]";
      if (m.action == Action::Collect) {
        if (!m.slot) add(mpath + ".slot", "Collect message without slot");
        if (!m.entity_type) add(mpath + ".entity_type", "Collect message without entity_type");
      }
      if (m.slot && !def.find_entity(*m.slot))
        add(mpath + ".slot", "slot '" + *m.slot + "' is not a declared entity");
    }
  }
  if (!has_terminal) add("dialogs", "no terminal dialog (one without transitions) exists");

  for (std::size_t i = 0; i < def.entities.size(); ++i) {
    const auto& e = def.entities[i];
    if (e.value_type == ValueType::Enumerated &&
        (!e.allowed_values || e.allowed_values->empty()))
      add("entities[" + std::to_string(i) + "].allowed_values",
          "Enumerated entity '" + e.name + "' has no allowed values");
  }
  return report;
}

// --- JSON mapping -----------------------------------------------------------

namespace detail {

inline const Json& require(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path + ": expected object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key + ": missing required field");
  return *it;
}

inline std::string require_string(const Json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key + ": expected string");
  return v.get<std::string>();
}

inline std::optional<std::string> optional_string(const Json& obj, const char* key,
                                                  const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw SchemaError(path + "." + key + ": expected string");
  return it->get<std::string>();
}

inline const Json& optional_array(const Json& obj, const char* key, const std::string& path) {
  static const Json empty = Json::array();
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return empty;
  if (!it->is_array()) throw SchemaError(path + "." + key + ": expected array");
  return *it;
}

inline Json extras(const Json& obj, std::initializer_list<const char*> known) {
  Json out = Json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool is_known = false;
    for (const char* k : known) is_known = is_known || it.key() == k;
    if (!is_known) out[it.key()] = it.value();
  }
  return out;
}

inline void merge_extras(Json& out, const Json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it)
    if (!out.contains(it.key())) out[it.key()] = it.value();
}

}  // namespace detail

inline BotMessage message_from_json(const Json& j, const std::string& path) {
  BotMessage m;
  m.text = detail::require_string(j, "text", path);
  m.action = parse_action(detail::optional_string(j, "action", path).value_or("Unknown"));
  m.slot = detail::optional_string(j, "slot", path);
  m.entity_type = detail::optional_string(j, "entity_type", path);
  m.extra = detail::extras(j, {"text", "action", "slot", "entity_type"});
  return m;
}

inline Json to_json(const BotMessage& m) {
  Json j;
  j["text"] = m.text;
  j["action"] = std::string(to_string(m.action));
  if (m.slot) j["slot"] = *m.slot;
  if (m.entity_type) j["entity_type"] = *m.entity_type;
  detail::merge_extras(j, m.extra);
  return j;
}

inline DialogSpec dialog_from_json(const Json& j, const std::string& path) {
  DialogSpec d;
  d.name = detail::require_string(j, "name", path);
  if (auto it = j.find("is_intent_root"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) throw SchemaError(path + ".is_intent_root: expected boolean");
    d.is_intent_root = it->get<bool>();
  }
  const auto& msgs = detail::optional_array(j, "messages", path);
  for (std::size_t i = 0; i < msgs.size(); ++i)
    d.messages.push_back(message_from_json(msgs[i], path + ".messages[" + std::to_string(i) + "]"));
  const auto& trs = detail::optional_array(j, "transitions", path);
  for (std::size_t i = 0; i < trs.size(); ++i) {
    const auto tpath = path + ".transitions[" + std::to_string(i) + "]";
    Transition t;
    t.target = detail::require_string(trs[i], "target", tpath);
    t.label = detail::optional_string(trs[i], "label", tpath).value_or(t.target);
    d.transitions.push_back(std::move(t));
  }
  d.extra = detail::extras(j, {"name", "is_intent_root", "messages", "transitions"});
  return d;
}

inline Json to_json(const DialogSpec& d) {
  Json j;
  j["name"] = d.name;
  j["is_intent_root"] = d.is_intent_root;
  j["messages"] = Json::array();
  for (const auto& m : d.messages) j["messages"].push_back(to_json(m));
  j["transitions"] = Json::array();
  for (const auto& t : d.transitions) j["transitions"].push_back({{"label", t.label}, {"target", t.target}});
  detail::merge_extras(j, d.extra);
  return j;
}

inline EntitySpec entity_from_json(const Json& j, const std::string& path) {
  EntitySpec e;
  e.name = detail::require_string(j, "name", path);
  const auto vt = detail::require_string(j, "value_type", path);
  auto parsed = parse_value_type(vt);
  if (!parsed) throw SchemaError(path + ".value_type: unknown value type '" + vt + "'");
  e.value_type = *parsed;
  if (auto it = j.find("allowed_values"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError(path + ".allowed_values: expected array");
    std::vector<std::string> vals;
    for (const auto& v : *it) {
      if (!v.is_string()) throw SchemaError(path + ".allowed_values: expected strings");
      vals.push_back(v.get<std::string>());
    }
    e.allowed_values = std::move(vals);
  }
  e.extra = detail::extras(j, {"name", "value_type", "allowed_values"});
  return e;
}

inline Json to_json(const EntitySpec& e) {
  Json j;
  j["name"] = e.name;
  j["value_type"] = std::string(to_string(e.value_type));
  if (e.allowed_values) j["allowed_values"] = *e.allowed_values;
  detail::merge_extras(j, e.extra);
  return j;
}

inline IntentSpec intent_from_json(const Json& j, const std::string& path) {
  IntentSpec i;
  i.name = detail::require_string(j, "name", path);
  const auto& utts = detail::optional_array(j, "utterances", path);
  for (const auto& u : utts) {
    if (!u.is_string()) throw SchemaError(path + ".utterances: expected strings");
    i.utterances.push_back(u.get<std::string>());
  }
  i.extra = detail::extras(j, {"name", "utterances"});
  return i;
}

inline Json to_json(const IntentSpec& i) {
  Json j;
  j["name"] = i.name;
  j["utterances"] = i.utterances;
  detail::merge_extras(j, i.extra);
  return j;
}

// Structural parse only; no invariant checks.
inline BotDefinition definition_from_json(const Json& j) {
  const std::string root = "$";
  if (!j.is_object()) throw SchemaError("$: expected object");
  BotDefinition def;
  def.bot_name = detail::require_string(j, "bot_name", root);
  def.version = detail::optional_string(j, "version", root).value_or("");
  detail::require(j, "dialogs", root);
  const auto& dialogs = detail::optional_array(j, "dialogs", root);
  for (std::size_t i = 0; i < dialogs.size(); ++i)
    def.dialogs.push_back(dialog_from_json(dialogs[i], "$.dialogs[" + std::to_string(i) + "]"));
  const auto& entities = detail::optional_array(j, "entities", root);
  for (std::size_t i = 0; i < entities.size(); ++i)
    def.entities.push_back(entity_from_json(entities[i], "$.entities[" + std::to_string(i) + "]"));
  const auto& intents = detail::optional_array(j, "intents", root);
  for (std::size_t i = 0; i < intents.size(); ++i)
    def.intents.push_back(intent_from_json(intents[i], "$.intents[" + std::to_string(i) + "]"));
  def.extra = detail::extras(j, {"bot_name", "version", "dialogs", "entities", "intents"});
  return def;
}

inline Json to_json(const BotDefinition& def) {
  Json j;
  j["bot_name"] = def.bot_name;
  j["version"] = def.version;
  j["dialogs"] = Json::array();
  for (const auto& d : def.dialogs) j["dialogs"].push_back(to_json(d));
  j["entities"] = Json::array();
  for (const auto& e : def.entities) j["entities"].push_back(to_json(e));
  j["intents"] = Json::array();
  for (const auto& i : def.intents) j["intents"].push_back(to_json(i));
  detail::merge_extras(j, def.extra);
  return j;
}

inline std::string serialize_definition(const BotDefinition& def) { return to_json(def).dump(2); }

inline void ensure_valid(const BotDefinition& def) {
  auto report = validate_definition(def);
  if (!report.ok()) throw ValidationError(report.summary());
}

inline BotDefinition load_bot_definition(std::string_view document) {
  Json j;
  try {
    j = Json::parse(document);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("$: malformed document: ") + e.what());
  }
  auto def = definition_from_json(j);
  ensure_valid(def);
  return def;
}

inline BotDefinition load_bot_definition_file(const std::filesystem::path& path) {
  return load_bot_definition(read_file(path));
}

}  // namespace botsim
