#pragma once

// Health reports over simulated episodes, error grouping, remediation
// suggestions and training-set export.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "botsim/bot_def.hpp"
#include "botsim/simulator.hpp"

namespace botsim {

// --- confusion matrix --------------------------------------------------------

struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t index(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw UnknownLabel("label '" + label + "' is not in the label set");
    return static_cast<std::size_t>(it - labels.begin());
  }
  std::size_t at(const std::string& truth, const std::string& pred) const {
    return counts[index(truth)][index(pred)];
  }
  std::size_t row_sum(std::size_t i) const {
    std::size_t s = 0;
    for (auto c : counts[i]) s += c;
    return s;
  }
  std::size_t col_sum(std::size_t j) const {
    std::size_t s = 0;
    for (const auto& row : counts) s += row[j];
    return s;
  }

  bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion_matrix(const std::vector<std::string>& truth,
                                        const std::vector<std::string>& pred,
                                        const std::vector<std::string>& labels) {
  if (truth.size() != pred.size())
    throw LengthMismatch("confusion_matrix: " + std::to_string(truth.size()) + " vs " +
                         std::to_string(pred.size()) + " labels");
  ConfusionMatrix m;
  m.labels = labels;
  m.counts.assign(labels.size(), std::vector<std::size_t>(labels.size(), 0));
  for (std::size_t k = 0; k < truth.size(); ++k) ++m.counts[m.index(truth[k])][m.index(pred[k])];
  return m;
}

// --- per-label scores --------------------------------------------------------

struct PRF {
  double precision = 0, recall = 0, f1 = 0;
  std::size_t support = 0;
};

// Undefined ratios are 0.
inline PRF prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  PRF r;
  r.support = tp + fn;
  r.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f1 = 2 * tp + fp + fn ? 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn) : 0.0;
  return r;
}

inline std::map<std::string, PRF> per_label_prf(const std::vector<std::string>& truth,
                                                const std::vector<std::string>& pred) {
  if (truth.size() != pred.size()) throw LengthMismatch("per_label_prf: length mismatch");
  std::map<std::string, std::array<std::size_t, 3>> c;  // tp, fp, fn
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k] == pred[k]) {
      ++c[truth[k]][0];
    } else {
      ++c[pred[k]][1];
      ++c[truth[k]][2];
    }
  }
  std::map<std::string, PRF> out;
  for (const auto& [label, v] : c) out[label] = prf_from_counts(v[0], v[1], v[2]);
  return out;
}

// numpy-style linear interpolation; `sorted` must be ascending.
inline double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ContractError("percentile of empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct F1Interval {
  double f1 = 0, lo = 0, hi = 0;

  bool operator==(const F1Interval&) const = default;
};

inline constexpr std::size_t kDefaultResamples = 10000;

// Per-label F1 with a percentile bootstrap interval. Resample i uses stream
// (seed, i); a label absent from a resample scores 0 there.
inline std::map<std::string, F1Interval> bootstrap_f1_ci(const std::vector<std::string>& truth,
                                                         const std::vector<std::string>& pred,
                                                         std::size_t n_resamples = kDefaultResamples,
                                                         double alpha = 0.05, std::uint64_t seed = 0) {
  if (truth.size() != pred.size())
    throw LengthMismatch("bootstrap_f1_ci: " + std::to_string(truth.size()) + " vs " +
                         std::to_string(pred.size()) + " labels");
  if (truth.empty()) throw ContractError("bootstrap_f1_ci: no labels");
  if (n_resamples == 0) throw ContractError("bootstrap_f1_ci: n_resamples must be >= 1");
  if (!(alpha > 0 && alpha < 1)) throw ContractError("bootstrap_f1_ci: alpha must be in (0, 1)");

  std::set<std::string> label_set(truth.begin(), truth.end());
  label_set.insert(pred.begin(), pred.end());
  const std::vector<std::string> labels(label_set.begin(), label_set.end());
  auto idx = [&](const std::string& l) {
    return static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), l) - labels.begin());
  };
  const std::size_t n = truth.size(), L = labels.size();
  std::vector<std::size_t> t(n), p(n);
  for (std::size_t k = 0; k < n; ++k) {
    t[k] = idx(truth[k]);
    p[k] = idx(pred[k]);
  }

  auto f1s = [&](auto&& draw) {
    std::vector<std::size_t> tp(L, 0), fp(L, 0), fn(L, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto s = draw(k);
      if (t[s] == p[s]) {
        ++tp[t[s]];
      } else {
        ++fp[p[s]];
        ++fn[t[s]];
      }
    }
    std::vector<double> out(L);
    for (std::size_t l = 0; l < L; ++l) out[l] = prf_from_counts(tp[l], fp[l], fn[l]).f1;
    return out;
  };

  const auto point = f1s([](std::size_t k) { return k; });
  std::vector<std::vector<double>> samples(L, std::vector<double>(n_resamples));
  for (std::size_t i = 0; i < n_resamples; ++i) {
    auto rng = make_rng(seed, i);
    const auto r = f1s([&](std::size_t) { return uniform_index(rng, n); });
    for (std::size_t l = 0; l < L; ++l) samples[l][i] = r[l];
  }

  std::map<std::string, F1Interval> out;
  for (std::size_t l = 0; l < L; ++l) {
    auto& s = samples[l];
    std::sort(s.begin(), s.end());
    out[labels[l]] = {point[l], percentile(s, alpha / 2), percentile(s, 1 - alpha / 2)};
  }
  return out;
}

// --- session report ----------------------------------------------------------

struct IntentMetrics {
  std::string intent;
  double precision = 0, recall = 0, f1 = 0, ci_low = 0, ci_high = 0;
  std::size_t support = 0;

  bool operator==(const IntentMetrics&) const = default;
};

struct SessionMeta {
  std::string session_id;
  std::string bot_id;
  std::vector<std::string> intents;   // label order; unseen labels are appended
  std::vector<std::string> entities;  // slots reported even with zero errors
  std::string generated_at;
  std::size_t n_resamples = kDefaultResamples;
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

struct SessionReport {
  std::string session_id;
  std::string bot_id;
  std::size_t episodes = 0, intents = 0, entities = 0;
  double goal_success_rate = 0;
  double macro_f1 = 0;
  std::map<std::string, std::size_t> outcome_counts;
  std::vector<IntentMetrics> intent_metrics;
  std::map<std::string, std::size_t> ner_error_counts;
  ConfusionMatrix confusion;
  std::string generated_at;

  const IntentMetrics* metrics_for(const std::string& intent) const {
    for (const auto& m : intent_metrics)
      if (m.intent == intent) return &m;
    return nullptr;
  }
  bool operator==(const SessionReport&) const = default;
};

// True label is the goal's dialog; the prediction is the routed dialog on
// intent errors and the goal's dialog otherwise.
inline std::string predicted_label(const Episode& e) {
  if (e.outcome == Outcome::IntentError) return e.intent_predicted.value_or(kOutOfDomain);
  return e.goal_name;
}

inline SessionReport aggregate_metrics(const std::vector<Episode>& episodes, const SessionMeta& meta) {
  if (episodes.empty()) throw EmptySession("session '" + meta.session_id + "' has no episodes");
  SessionReport r;
  r.session_id = meta.session_id;
  r.bot_id = meta.bot_id;
  r.generated_at = meta.generated_at;
  r.episodes = episodes.size();

  std::vector<std::string> truth, pred;
  for (const auto& e : episodes) {
    truth.push_back(e.goal_name);
    pred.push_back(predicted_label(e));
  }

  std::vector<std::string> labels;
  for (const auto& i : meta.intents)
    if (i != kOutOfDomain && std::find(labels.begin(), labels.end(), i) == labels.end()) labels.push_back(i);
  std::set<std::string> extra;
  for (const auto* v : {&truth, &pred})
    for (const auto& l : *v)
      if (l != kOutOfDomain && std::find(labels.begin(), labels.end(), l) == labels.end()) extra.insert(l);
  labels.insert(labels.end(), extra.begin(), extra.end());
  const std::size_t n_intents = labels.size();
  labels.push_back(kOutOfDomain);
  r.intents = n_intents;
  r.entities = meta.entities.size();

  for (auto o : kAllOutcomes) r.outcome_counts[std::string(to_string(o))] = 0;
  for (const auto& e : episodes) ++r.outcome_counts[std::string(to_string(e.outcome))];
  r.goal_success_rate =
      static_cast<double>(r.outcome_counts["Success"]) / static_cast<double>(episodes.size());

  r.confusion = confusion_matrix(truth, pred, labels);
  const auto ci = bootstrap_f1_ci(truth, pred, meta.n_resamples, meta.alpha, meta.seed);
  double f1_sum = 0;
  std::size_t f1_n = 0;
  for (std::size_t i = 0; i < n_intents; ++i) {
    const auto tp = r.confusion.counts[i][i];
    const auto support = r.confusion.row_sum(i);
    const auto predicted = r.confusion.col_sum(i);
    const auto prf = prf_from_counts(tp, predicted - tp, support - tp);
    IntentMetrics m{labels[i], prf.precision, prf.recall, prf.f1, 0, 0, support};
    if (auto it = ci.find(labels[i]); it != ci.end()) {
      m.ci_low = it->second.lo;
      m.ci_high = it->second.hi;
    }
    if (support > 0) {
      f1_sum += m.f1;
      ++f1_n;
    }
    r.intent_metrics.push_back(std::move(m));
  }
  r.macro_f1 = f1_n ? f1_sum / static_cast<double>(f1_n) : 0.0;

  for (const auto& s : meta.entities) r.ner_error_counts[s] = 0;
  for (const auto& e : episodes)
    if (e.outcome == Outcome::NERError)
      if (auto c = backtrack_root_cause(e); c.slot) ++r.ner_error_counts[*c.slot];
  return r;
}

// --- error groups and suggestions --------------------------------------------

struct ErrorMember {
  std::string paraphrase;
  std::string predicted_intent;
  std::string episode_id;

  bool operator==(const ErrorMember&) const = default;
};

struct ErrorGroup {
  std::string original_utterance;
  std::string true_intent;
  std::vector<ErrorMember> members;
  std::size_t size = 0;

  bool operator==(const ErrorGroup&) const = default;
};

using Provenance = std::map<std::string, std::string>;  // paraphrase -> original

inline std::vector<ErrorGroup> group_intent_errors(const std::vector<Episode>& episodes,
                                                   const Provenance& provenance) {
  std::map<std::pair<std::string, std::string>, ErrorGroup> groups;
  for (const auto& e : episodes) {
    if (e.outcome != Outcome::IntentError) continue;
    auto it = provenance.find(e.intent_query);
    if (it == provenance.end())
      throw MissingProvenance("no original utterance recorded for '" + e.intent_query + "'");
    auto& g = groups[{it->second, e.goal_name}];
    g.original_utterance = it->second;
    g.true_intent = e.goal_name;
    g.members.push_back({e.intent_query, e.intent_predicted.value_or(kOutOfDomain), e.goal_id});
  }
  std::vector<ErrorGroup> out;
  for (auto& [_, g] : groups) {
    g.size = g.members.size();
    out.push_back(std::move(g));
  }
  std::stable_sort(out.begin(), out.end(), [](const ErrorGroup& a, const ErrorGroup& b) {
    if (a.size != b.size) return a.size > b.size;
    return a.original_utterance < b.original_utterance;
  });
  return out;
}

// Original utterance -> number of simulated paraphrase queries derived from it.
inline std::map<std::string, std::size_t> paraphrase_totals(const std::vector<Episode>& episodes,
                                                            const Provenance& provenance) {
  std::map<std::string, std::size_t> out;
  for (const auto& e : episodes)
    if (auto it = provenance.find(e.intent_query); it != provenance.end()) ++out[it->second];
  return out;
}

enum class SuggestionKind { AugmentTraining, MoveIntent, Review };

inline std::string_view to_string(SuggestionKind k) {
  switch (k) {
    case SuggestionKind::AugmentTraining: return "AugmentTraining";
    case SuggestionKind::MoveIntent: return "MoveIntent";
    case SuggestionKind::Review: return "Review";
  }
  return "Review";
}

inline SuggestionKind parse_suggestion_kind(std::string_view s) {
  if (s == "AugmentTraining") return SuggestionKind::AugmentTraining;
  if (s == "MoveIntent") return SuggestionKind::MoveIntent;
  if (s == "Review") return SuggestionKind::Review;
  throw SchemaError("unknown suggestion kind '" + std::string(s) + "'");
}

struct RemediationSuggestion {
  std::string id;
  SuggestionKind kind = SuggestionKind::Review;
  std::string target_utterance;
  std::string true_intent;
  std::optional<std::string> proposed_intent;
  std::vector<std::string> queries;  // augmentation candidates, or the group's members
  std::string rationale;
  bool accepted = false;

  bool operator==(const RemediationSuggestion&) const = default;
};

struct SuggestConfig {
  double move_threshold = 0.8;
  std::string ood_label = kOutOfDomain;

  void validate() const {
    if (!(move_threshold > 0 && move_threshold <= 1))
      throw ContractError("move_threshold must be in (0, 1]");
  }
};

inline std::vector<RemediationSuggestion> suggest_remediations(
    const std::vector<ErrorGroup>& groups, const std::map<std::string, std::size_t>& totals,
    const SuggestConfig& cfg = {}) {
  cfg.validate();
  std::vector<RemediationSuggestion> out;
  for (const auto& g : groups) {
    std::map<std::string, std::size_t> by_label;
    for (const auto& m : g.members) ++by_label[m.predicted_intent];
    std::string top;
    std::size_t top_n = 0;
    for (const auto& [label, n] : by_label)
      if (label != cfg.ood_label && n > top_n) {
        top = label;
        top_n = n;
      }
    std::size_t total = g.size;
    if (auto it = totals.find(g.original_utterance); it != totals.end()) total = std::max(total, it->second);

    RemediationSuggestion s;
    s.target_utterance = g.original_utterance;
    s.true_intent = g.true_intent;
    const double share = total ? static_cast<double>(top_n) / static_cast<double>(total) : 0.0;
    if (top_n > 0 && share >= cfg.move_threshold) {
      s.kind = SuggestionKind::MoveIntent;
      s.proposed_intent = top;
      for (const auto& m : g.members)
        if (m.predicted_intent == top) s.queries.push_back(m.paraphrase);
      s.rationale = std::to_string(top_n) + " of " + std::to_string(total) +
                    " paraphrases were routed to '" + top + "'";
    } else if (by_label.count(cfg.ood_label)) {
      s.kind = SuggestionKind::AugmentTraining;
      for (const auto& m : g.members)
        if (m.predicted_intent == cfg.ood_label) s.queries.push_back(m.paraphrase);
      s.rationale = std::to_string(s.queries.size()) + " paraphrases were not recognised as any intent";
    } else {
      s.kind = SuggestionKind::Review;
      for (const auto& m : g.members) s.queries.push_back(m.paraphrase);
      s.rationale = std::to_string(g.size) + " of " + std::to_string(total) +
                    " paraphrases were misrouted, below the move threshold";
    }
    s.id = "sg-" + fnv1a_hex(std::string(to_string(s.kind)) + "\n" + s.true_intent + "\n" +
                             s.target_utterance + "\n" + s.proposed_intent.value_or(""));
    out.push_back(std::move(s));
  }
  return out;
}

struct AugmentedDataset {
  std::vector<std::pair<std::string, std::vector<std::string>>> intents;

  const std::vector<std::string>* find(const std::string& intent) const {
    for (const auto& [k, v] : intents)
      if (k == intent) return &v;
    return nullptr;
  }
  std::map<std::string, std::size_t> counts() const {
    std::map<std::string, std::size_t> c;
    for (const auto& [k, v] : intents) c[k] = v.size();
    return c;
  }
};

// Review selections are exported like augmentations: the operator looked at
// the members and chose to keep them under the true intent.
inline AugmentedDataset export_augmented_training(const BotDefinition& def,
                                                  const std::vector<RemediationSuggestion>& suggestions,
                                                  const std::vector<std::string>& accepted_ids) {
  AugmentedDataset out;
  for (const auto& i : def.intents) out.intents.emplace_back(i.name, i.utterances);
  auto list = [&](const std::string& intent) -> std::vector<std::string>& {
    for (auto& [k, v] : out.intents)
      if (k == intent) return v;
    out.intents.emplace_back(intent, std::vector<std::string>{});
    return out.intents.back().second;
  };
  auto add = [](std::vector<std::string>& v, const std::string& u) {
    if (std::find(v.begin(), v.end(), u) == v.end()) v.push_back(u);
  };

  std::set<std::string> chosen;
  for (const auto& id : accepted_ids) {
    const bool exists = std::any_of(suggestions.begin(), suggestions.end(),
                                    [&](const RemediationSuggestion& s) { return s.id == id; });
    if (!exists) throw UnknownSuggestion("no suggestion with id '" + id + "'");
    chosen.insert(id);
  }
  for (const auto& s : suggestions) {
    if (!chosen.count(s.id)) continue;
    if (s.kind == SuggestionKind::MoveIntent) {
      std::erase(list(s.true_intent), s.target_utterance);
      add(list(*s.proposed_intent), s.target_utterance);
    } else {
      auto& v = list(s.true_intent);
      for (const auto& q : s.queries) add(v, q);
    }
  }
  return out;
}

// --- trend -------------------------------------------------------------------

struct TrendPoint {
  std::string session_id;
  std::string generated_at;
  double goal_success_rate = 0;
  double macro_f1 = 0;
  std::optional<double> delta_success_rate;
  std::optional<double> delta_macro_f1;
};

inline std::vector<TrendPoint> compare_sessions(std::vector<SessionReport> reports) {
  if (reports.empty()) throw ContractError("compare_sessions: no reports");
  std::stable_sort(reports.begin(), reports.end(), [](const SessionReport& a, const SessionReport& b) {
    return a.generated_at < b.generated_at;
  });
  std::vector<TrendPoint> out;
  for (const auto& r : reports) {
    TrendPoint p{r.session_id, r.generated_at, r.goal_success_rate, r.macro_f1, std::nullopt, std::nullopt};
    if (!out.empty()) {
      p.delta_success_rate = r.goal_success_rate - out.back().goal_success_rate;
      p.delta_macro_f1 = r.macro_f1 - out.back().macro_f1;
    }
    out.push_back(std::move(p));
  }
  return out;
}

// --- serialization -----------------------------------------------------------

inline Json to_json(const ConfusionMatrix& m) { return Json{{"labels", m.labels}, {"counts", m.counts}}; }

inline ConfusionMatrix confusion_from_json(const Json& j) {
  ConfusionMatrix m;
  m.labels = j.at("labels").get<std::vector<std::string>>();
  m.counts = j.at("counts").get<std::vector<std::vector<std::size_t>>>();
  if (m.counts.size() != m.labels.size()) throw SchemaError("confusion matrix is not square");
  for (const auto& row : m.counts)
    if (row.size() != m.labels.size()) throw SchemaError("confusion matrix is not square");
  return m;
}

inline Json to_json(const SessionReport& r) {
  Json metrics = Json::array();
  for (const auto& m : r.intent_metrics)
    metrics.push_back(Json{{"intent", m.intent}, {"precision", m.precision}, {"recall", m.recall},
                           {"f1", m.f1}, {"ci_low", m.ci_low}, {"ci_high", m.ci_high},
                           {"support", m.support}});
  Json outcomes = Json::object();
  for (const auto& [k, v] : r.outcome_counts) outcomes[k] = v;
  Json ner = Json::object();
  for (const auto& [k, v] : r.ner_error_counts) ner[k] = v;
  return Json{{"session_id", r.session_id},
              {"bot_id", r.bot_id},
              {"generated_at", r.generated_at},
              {"counts", {{"episodes", r.episodes}, {"intents", r.intents}, {"entities", r.entities}}},
              {"goal_success_rate", r.goal_success_rate},
              {"macro_f1", r.macro_f1},
              {"outcome_counts", outcomes},
              {"intent_metrics", metrics},
              {"ner_error_counts", ner},
              {"confusion", to_json(r.confusion)}};
}

inline SessionReport report_from_json(const Json& j) {
  try {
    SessionReport r;
    r.session_id = j.at("session_id").get<std::string>();
    r.bot_id = j.value("bot_id", std::string{});
    r.generated_at = j.value("generated_at", std::string{});
    r.episodes = j.at("counts").at("episodes").get<std::size_t>();
    r.intents = j.at("counts").at("intents").get<std::size_t>();
    r.entities = j.at("counts").at("entities").get<std::size_t>();
    r.goal_success_rate = j.at("goal_success_rate").get<double>();
    r.macro_f1 = j.value("macro_f1", 0.0);
    for (auto it = j.at("outcome_counts").begin(); it != j.at("outcome_counts").end(); ++it)
      r.outcome_counts[it.key()] = it->get<std::size_t>();
    for (const auto& m : j.at("intent_metrics"))
      r.intent_metrics.push_back({m.at("intent").get<std::string>(), m.at("precision").get<double>(),
                                  m.at("recall").get<double>(), m.at("f1").get<double>(),
                                  m.at("ci_low").get<double>(), m.at("ci_high").get<double>(),
                                  m.at("support").get<std::size_t>()});
    for (auto it = j.at("ner_error_counts").begin(); it != j.at("ner_error_counts").end(); ++it)
      r.ner_error_counts[it.key()] = it->get<std::size_t>();
    r.confusion = confusion_from_json(j.at("confusion"));
    return r;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("session report: ") + e.what());
  }
}

inline Json to_json(const ErrorGroup& g) {
  Json members = Json::array();
  for (const auto& m : g.members)
    members.push_back(Json{{"paraphrase", m.paraphrase}, {"predicted_intent", m.predicted_intent},
                           {"episode_id", m.episode_id}});
  return Json{{"original_utterance", g.original_utterance}, {"true_intent", g.true_intent},
              {"size", g.size}, {"members", members}};
}

inline ErrorGroup error_group_from_json(const Json& j) {
  ErrorGroup g;
  g.original_utterance = j.at("original_utterance").get<std::string>();
  g.true_intent = j.at("true_intent").get<std::string>();
  for (const auto& m : j.at("members"))
    g.members.push_back({m.at("paraphrase").get<std::string>(), m.at("predicted_intent").get<std::string>(),
                         m.value("episode_id", std::string{})});
  g.size = g.members.size();
  return g;
}

inline Json to_json(const RemediationSuggestion& s) {
  Json j{{"id", s.id},
         {"kind", std::string(to_string(s.kind))},
         {"target_utterance", s.target_utterance},
         {"true_intent", s.true_intent}};
  j["proposed_intent"] = s.proposed_intent ? Json(*s.proposed_intent) : Json(nullptr);
  j["queries"] = s.queries;
  j["rationale"] = s.rationale;
  j["accepted"] = s.accepted;
  return j;
}

inline RemediationSuggestion suggestion_from_json(const Json& j) {
  try {
    RemediationSuggestion s;
    s.id = j.at("id").get<std::string>();
    s.kind = parse_suggestion_kind(j.at("kind").get<std::string>());
    s.target_utterance = j.at("target_utterance").get<std::string>();
    s.true_intent = j.at("true_intent").get<std::string>();
    if (j.contains("proposed_intent") && !j.at("proposed_intent").is_null())
      s.proposed_intent = j.at("proposed_intent").get<std::string>();
    if (s.kind == SuggestionKind::MoveIntent && !s.proposed_intent)
      throw SchemaError("MoveIntent suggestion '" + s.id + "' lacks proposed_intent");
    s.queries = j.value("queries", std::vector<std::string>{});
    s.rationale = j.value("rationale", std::string{});
    s.accepted = j.value("accepted", false);
    return s;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("suggestion: ") + e.what());
  }
}

inline Json suggestions_to_json(const std::vector<RemediationSuggestion>& v) {
  Json j = Json::array();
  for (const auto& s : v) j.push_back(to_json(s));
  return j;
}

inline std::vector<RemediationSuggestion> suggestions_from_json(const Json& j) {
  if (!j.is_array()) throw SchemaError("suggestions: expected a list");
  std::vector<RemediationSuggestion> out;
  for (const auto& s : j) out.push_back(suggestion_from_json(s));
  return out;
}

inline Json to_json(const AugmentedDataset& d) {
  Json j = Json::object();
  for (const auto& [k, v] : d.intents) j[k] = v;
  return j;
}

inline Json to_json(const std::vector<TrendPoint>& pts) {
  Json j = Json::array();
  for (const auto& p : pts) {
    Json e{{"session_id", p.session_id}, {"generated_at", p.generated_at},
           {"goal_success_rate", p.goal_success_rate}, {"macro_f1", p.macro_f1}};
    e["delta_success_rate"] = p.delta_success_rate ? Json(*p.delta_success_rate) : Json(nullptr);
    e["delta_macro_f1"] = p.delta_macro_f1 ? Json(*p.delta_macro_f1) : Json(nullptr);
    j.push_back(std::move(e));
  }
  return j;
}

}  // namespace botsim
