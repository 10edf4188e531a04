#pragma once

// Value-type patterns shared by ontology validation and the mock bot's
// entity extraction.

#include <optional>
#include <regex>
#include <string>

#include "botsim/bot_def.hpp"

namespace botsim {

namespace detail {
inline const std::regex& email_re() {
  static const std::regex re(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})");
  return re;
}
inline const std::regex& number_re() {
  static const std::regex re(R"((^|[^A-Za-z0-9])([0-9]+)([^A-Za-z0-9]|$))");
  return re;
}
inline const std::regex& alnum_id_re() {
  static const std::regex re(R"((^|[^A-Za-z0-9])([A-Za-z][0-9]+)([^A-Za-z0-9]|$))");
  return re;
}
inline const std::regex& date_re() {
  static const std::regex re(R"([0-9]{4}-[0-9]{2}-[0-9]{2})");
  return re;
}
}  // namespace detail

inline bool matches_value_type(const EntitySpec& e, const std::string& value) {
  switch (e.value_type) {
    case ValueType::Email: return std::regex_match(value, detail::email_re());
    case ValueType::Number: return std::regex_match(value, std::regex("[0-9]+"));
    case ValueType::AlphaNumericId: return std::regex_match(value, std::regex("[A-Za-z][0-9]+"));
    case ValueType::Date: return std::regex_match(value, detail::date_re());
    case ValueType::FreeText: return !trim(value).empty();
    case ValueType::Enumerated:
      if (!e.allowed_values) return false;
      for (const auto& v : *e.allowed_values)
        if (v == value) return true;
      return false;
  }
  return false;
}

// First substring of `text` that looks like a value of the entity's type.
inline std::optional<std::string> extract_value(const EntitySpec& e, const std::string& text) {
  std::smatch m;
  switch (e.value_type) {
    case ValueType::Email:
      if (std::regex_search(text, m, detail::email_re())) return m.str(0);
      return std::nullopt;
    case ValueType::Number:
      if (std::regex_search(text, m, detail::number_re())) return m.str(2);
      return std::nullopt;
    case ValueType::AlphaNumericId:
      if (std::regex_search(text, m, detail::alnum_id_re())) return m.str(2);
      return std::nullopt;
    case ValueType::Date:
      if (std::regex_search(text, m, detail::date_re())) return m.str(0);
      return std::nullopt;
    case ValueType::FreeText: {
      auto t = trim(text);
      if (t.empty()) return std::nullopt;
      return t;
    }
    case ValueType::Enumerated: {
      if (!e.allowed_values) return std::nullopt;
      const auto lower = to_lower(text);
      for (const auto& v : *e.allowed_values)
        if (lower.find(to_lower(v)) != std::string::npos) return v;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace botsim
