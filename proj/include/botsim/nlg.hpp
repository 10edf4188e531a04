#pragma once

// Template NLG: user dialog acts rendered from plug-in template sets.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "botsim/util.hpp"

namespace botsim {

using SlotValues = std::map<std::string, std::string>;

struct NLGTemplates {
  // act prefix -> templates with <name> placeholders
  std::map<std::string, std::vector<std::string>> by_prefix;

  // Longest key equal to `act` or followed by '_' in it.
  const std::vector<std::string>* lookup(const std::string& act) const {
    const std::vector<std::string>* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& [key, list] : by_prefix) {
      const bool hit = act == key || (starts_with(act, key) && act.size() > key.size() &&
                                      act[key.size()] == '_');
      if (hit && key.size() >= best_len && !list.empty()) {
        best = &list;
        best_len = key.size();
      }
    }
    return best;
  }
};

inline std::vector<std::string> placeholders(const std::string& tmpl) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] != '<') continue;
    auto close = tmpl.find('>', i + 1);
    if (close == std::string::npos) break;
    out.push_back(tmpl.substr(i + 1, close - i - 1));
    i = close;
  }
  return out;
}

// Built-in user response templates. inform_* rules fill <value> and <slot>
// (and <SlotName> for slot-specific keys); the rest take no placeholders.
inline NLGTemplates default_templates() {
  NLGTemplates t;
  t.by_prefix["inform"] = {"<value>", "It is <value>.", "Sure, it's <value>.",
                           "My <slot> is <value>."};
  t.by_prefix["inform_Email"] = {"my email is <Email>", "You can use <Email>.",
                                 "Sure, my email address is <Email>."};
  t.by_prefix["affirm"] = {"Yes.", "Yes, that is correct.", "Correct, go ahead."};
  t.by_prefix["fallback"] = {"Sorry, I did not get that.", "Could you say that again?"};
  t.by_prefix["dont_know"] = {"I am not sure about that."};
  return t;
}

// Throws SchemaError when a template uses placeholders its rule cannot fill.
inline void validate_templates(const NLGTemplates& t) {
  for (const auto& [key, list] : t.by_prefix) {
    std::set<std::string> allowed;
    bool needs_value = false;
    if (key == "inform") {
      allowed = {"value", "slot"};
      needs_value = true;
    } else if (starts_with(key, "inform_")) {
      allowed = {"value", "slot", key.substr(7)};
      needs_value = true;
    }
    for (const auto& tmpl : list) {
      bool has_value = false;
      for (const auto& p : placeholders(tmpl)) {
        if (!allowed.count(p))
          throw SchemaError("template '" + tmpl + "' for '" + key + "' uses unfillable <" + p + ">");
        has_value = has_value || p == "value" || (key.size() > 7 && p == key.substr(7));
      }
      if (needs_value && !has_value)
        throw SchemaError("template '" + tmpl + "' for '" + key + "' never mentions the value");
    }
  }
}

inline NLGTemplates templates_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("template file: expected {act_prefix: [templates]}");
  NLGTemplates t;
  for (auto it = j.begin(); it != j.end(); ++it)
    t.by_prefix[it.key()] = it->get<std::vector<std::string>>();
  validate_templates(t);
  return t;
}

inline Json to_json(const NLGTemplates& t) {
  Json j = Json::object();
  for (const auto& [k, v] : t.by_prefix) j[k] = v;
  return j;
}

inline std::string render_nlg(const std::string& act, const SlotValues& slots,
                              const NLGTemplates& templates, Rng& rng) {
  const auto* list = templates.lookup(act);
  if (!list) throw TemplateMissing("no templates for act '" + act + "'");
  const auto& tmpl = (*list)[uniform_index(rng, list->size())];
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '<') {
      auto close = tmpl.find('>', i + 1);
      if (close != std::string::npos) {
        const auto name = tmpl.substr(i + 1, close - i - 1);
        auto it = slots.find(name);
        if (it == slots.end())
          throw PlaceholderUnfilled("template '" + tmpl + "' needs <" + name + ">");
        out += it->second;
        i = close;
        continue;
      }
    }
    out.push_back(tmpl[i]);
  }
  return out;
}

}  // namespace botsim
