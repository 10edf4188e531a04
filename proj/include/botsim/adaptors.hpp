#pragma once

// Platform adaptors. Everything platform-specific lives behind Adaptor;
// the rest of the toolkit only sees BotDefinition.

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "botsim/bot_def.hpp"

namespace botsim {

class Adaptor {
 public:
  virtual ~Adaptor() = default;
  // Convert a raw platform export. Validation happens in the registry.
  virtual BotDefinition convert(std::string_view raw) const = 0;
};

class NativeAdaptor final : public Adaptor {
 public:
  BotDefinition convert(std::string_view raw) const override {
    Json j;
    try {
      j = Json::parse(raw);
    } catch (const Json::parse_error& e) {
      throw SchemaError(std::string("$: malformed document: ") + e.what());
    }
    return definition_from_json(j);
  }
};

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerant.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
        break;
      default:
        field.push_back(c);
        any = true;
    }
  }
  if (quoted) throw SchemaError("csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Flat flow export, one row per bot message:
//
//   dialog,intent_root,action,slot,entity_type,text,next
//
// `next` lists transitions as "label:target|label:target" (a bare target uses
// itself as label). Rows with empty action and text declare router dialogs.
// Entities are derived from (slot, entity_type) pairs where entity_type names
// a value type; intent-root dialogs become intents without utterances.
class CsvFlowAdaptor final : public Adaptor {
 public:
  BotDefinition convert(std::string_view raw) const override {
    auto rows = parse_csv(raw);
    if (rows.empty()) throw SchemaError("csv: empty document");
    const std::vector<std::string> expected = {"dialog", "intent_root", "action", "slot",
                                               "entity_type", "text", "next"};
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < rows[0].size(); ++i) col[trim(rows[0][i])] = i;
    for (const auto& name : expected)
      if (!col.count(name)) throw SchemaError("csv: missing column '" + name + "'");

    BotDefinition def;
    def.bot_name = "csv-flow";
    def.version = "1";
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      auto cell = [&](const std::string& name) -> std::string {
        auto idx = col.at(name);
        return idx < row.size() ? trim(row[idx]) : std::string{};
      };
      const auto where = "csv row " + std::to_string(r + 1);
      const auto dialog_name = cell("dialog");
      if (dialog_name.empty()) throw SchemaError(where + ": empty dialog name");

      DialogSpec* dialog = nullptr;
      for (auto& d : def.dialogs)
        if (d.name == dialog_name) dialog = &d;
      if (!dialog) {
        def.dialogs.push_back(DialogSpec{dialog_name, {}, {}, false, Json::object()});
        dialog = &def.dialogs.back();
      }
      const auto root = to_lower(cell("intent_root"));
      if (root == "true" || root == "1" || root == "yes") dialog->is_intent_root = true;

      const auto action = cell("action");
      const auto text = cell("text");
      if (!action.empty() || !text.empty()) {
        BotMessage m;
        m.text = text;
        m.action = parse_action(action);
        if (auto s = cell("slot"); !s.empty()) m.slot = s;
        if (auto e = cell("entity_type"); !e.empty()) m.entity_type = e;
        if (m.slot && m.entity_type) add_entity(def, *m.slot, *m.entity_type, where);
        dialog->messages.push_back(std::move(m));
      }
      for (const auto& spec : split(cell("next"), '|')) {
        if (spec.empty()) continue;
        Transition t;
        if (auto colon = spec.find(':'); colon != std::string::npos) {
          t.label = trim(spec.substr(0, colon));
          t.target = trim(spec.substr(colon + 1));
        } else {
          t.label = t.target = spec;
        }
        bool dup = false;
        for (const auto& existing : dialog->transitions) dup = dup || existing == t;
        if (!dup) dialog->transitions.push_back(std::move(t));
      }
    }
    for (const auto& d : def.dialogs)
      if (d.is_intent_root) def.intents.push_back(IntentSpec{d.name, {}, Json::object()});
    return def;
  }

 private:
  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == sep) {
        out.push_back(trim(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    out.push_back(trim(cur));
    return out;
  }

  static void add_entity(BotDefinition& def, const std::string& slot, const std::string& type,
                         const std::string& where) {
    if (def.find_entity(slot)) return;
    auto vt = parse_value_type(type);
    if (!vt) throw SchemaError(where + ": unknown entity type '" + type + "'");
    def.entities.push_back(EntitySpec{slot, *vt, std::nullopt, Json::object()});
  }
};

class AdaptorRegistry {
 public:
  // Registry preloaded with the built-in "native" and "csv-flow" adaptors.
  static AdaptorRegistry with_builtins() {
    AdaptorRegistry reg;
    reg.register_adaptor("native", std::make_shared<NativeAdaptor>());
    reg.register_adaptor("csv-flow", std::make_shared<CsvFlowAdaptor>());
    return reg;
  }

  void register_adaptor(std::string id, std::shared_ptr<const Adaptor> adaptor) {
    adaptors_[std::move(id)] = std::move(adaptor);
  }

  bool contains(const std::string& id) const { return adaptors_.count(id) > 0; }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : adaptors_) out.push_back(id);
    return out;
  }

  BotDefinition convert(const std::string& id, std::string_view raw) const {
    auto it = adaptors_.find(id);
    if (it == adaptors_.end()) throw UnknownAdaptor("no adaptor registered as '" + id + "'");
    BotDefinition def;
    try {
      def = it->second->convert(raw);
    } catch (const Error& e) {
      throw AdaptorError(id + ": [" + e.code() + "] " + e.what());
    } catch (const std::exception& e) {
      throw AdaptorError(id + ": " + e.what());
    }
    ensure_valid(def);
    return def;
  }

 private:
  std::map<std::string, std::shared_ptr<const Adaptor>> adaptors_;
};

}  // namespace botsim
