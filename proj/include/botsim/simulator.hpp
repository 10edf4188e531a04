#pragma once

// Agenda-based user simulator: fuzzy NLU over dialog-act maps, a rule table
// for the dialog manager, template NLG, and the episode/session loops.

#include <algorithm>
#include <array>
#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "botsim/connector.hpp"
#include "botsim/dialog_act_map.hpp"
#include "botsim/goal_gen.hpp"
#include "botsim/metrics.hpp"
#include "botsim/nlg.hpp"

namespace botsim {

inline constexpr const char* kNoMatch = "no_match";
inline constexpr const char* kInformIntent = "inform_intent";
inline constexpr const char* kInform = "inform";
inline constexpr const char* kExpectSuccess = "expect_dialog_success";
inline constexpr const char* kAffirm = "affirm";
inline constexpr const char* kFallback = "fallback";
inline constexpr const char* kDontKnow = "dont_know";

struct SimConfig {
  int fuzzy_threshold = 85;
  int max_turns = 30;
  int episodes_parallelism = 1;
  std::uint64_t seed = 0;
  int repeat_limit = 2;
  int no_match_limit = 3;
  // Acts without a rule are ignored unless this is set.
  bool strict_rules = false;
  bool force = false;

  void validate() const {
    if (fuzzy_threshold < 0 || fuzzy_threshold > 100)
      throw ContractError("fuzzy_threshold must be in [0, 100]");
    if (max_turns < 2) throw ContractError("max_turns must be >= 2");
    if (episodes_parallelism < 1) throw ContractError("episodes_parallelism must be >= 1");
    if (repeat_limit < 1 || no_match_limit < 1) throw ContractError("limits must be >= 1");
  }
};

// --- NLU ---------------------------------------------------------------------

struct ActMatch {
  std::string act;
  int score = 0;

  bool operator==(const ActMatch&) const = default;
};

inline ActMatch best_match(const std::string& message, const DialogActMap& map,
                           bool (*accept)(const std::string&)) {
  const auto norm = normalize_text(message);
  ActMatch best{kNoMatch, 0};
  bool found = false;
  for (const auto& a : map.acts()) {
    if (accept && !accept(a.name)) continue;
    for (const auto& v : a.variants) {
      const int s = fuzz_ratio(norm, normalize_text(v));
      if (!found || s > best.score) {
        best = {a.name, s};
        found = true;
      }
    }
  }
  return best;
}

inline ActMatch match_dialog_act(const std::string& message, const DialogActMap& map, int threshold) {
  if (map.empty()) throw ContractError("match_dialog_act: empty dialog act map");
  auto m = best_match(message, map, nullptr);
  if (m.score < threshold) m.act = kNoMatch;
  return m;
}

inline int variant_score(const std::string& message, const ActEntry* entry) {
  if (!entry) return 0;
  const auto norm = normalize_text(message);
  int best = 0;
  for (const auto& v : entry->variants) best = std::max(best, fuzz_ratio(norm, normalize_text(v)));
  return best;
}

inline bool is_golden(const std::string& act) { return act == kIntentSuccess || act == kDialogSuccess; }

// --- agenda ------------------------------------------------------------------

struct UserAct {
  std::string act;
  std::optional<std::string> slot;
  std::optional<std::string> value;

  std::string name() const { return act == kInform && slot ? "inform_" + *slot : act; }
  bool operator==(const UserAct&) const = default;
};

// back() is the top of the stack.
struct Agenda {
  std::vector<UserAct> stack;

  bool empty() const { return stack.empty(); }
  std::size_t depth() const { return stack.size(); }
  const UserAct& top() const { return stack.back(); }
  UserAct pop() {
    auto a = stack.back();
    stack.pop_back();
    return a;
  }
  // Removes the pending inform for `slot`, wherever it sits.
  std::optional<UserAct> take_inform(const std::string& slot) {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      if (it->act == kInform && it->slot == slot) {
        auto a = *it;
        stack.erase(std::next(it).base());
        return a;
      }
    }
    return std::nullopt;
  }
  // Top to bottom.
  std::vector<UserAct> listing() const { return {stack.rbegin(), stack.rend()}; }
};

// Each Intent/Intent_k key closes a segment; segments are stacked so the
// first intent query is on top, followed by its informs in declaration order.
inline Agenda init_agenda(const Goal& goal) {
  std::vector<std::vector<UserAct>> segments;
  std::vector<UserAct> pending;
  for (const auto& [k, v] : goal.inform_slots) {
    if (is_intent_key(k)) {
      std::vector<UserAct> seg{{kInformIntent, k, v}};
      seg.insert(seg.end(), pending.begin(), pending.end());
      segments.push_back(std::move(seg));
      pending.clear();
    } else {
      pending.push_back({kInform, k, v});
    }
  }
  if (segments.empty()) throw ContractError("goal '" + goal.id + "' has no Intent slot");
  // Trailing slots without a closing intent belong to the last segment.
  segments.back().insert(segments.back().end(), pending.begin(), pending.end());

  Agenda a;
  a.stack.push_back({kExpectSuccess, std::nullopt, std::nullopt});
  for (auto seg = segments.rbegin(); seg != segments.rend(); ++seg)
    for (auto act = seg->rbegin(); act != seg->rend(); ++act) a.stack.push_back(*act);
  return a;
}

// --- rules -------------------------------------------------------------------

enum class RuleKind { RespondInform, RespondAffirm, Acknowledge, FinishFailure };

inline std::string_view to_string(RuleKind k) {
  switch (k) {
    case RuleKind::RespondInform: return "respond_inform";
    case RuleKind::RespondAffirm: return "respond_affirm";
    case RuleKind::Acknowledge: return "acknowledge";
    case RuleKind::FinishFailure: return "finish_failure";
  }
  return "acknowledge";
}

inline RuleKind parse_rule_kind(std::string_view s) {
  if (s == "respond_inform") return RuleKind::RespondInform;
  if (s == "respond_affirm") return RuleKind::RespondAffirm;
  if (s == "acknowledge") return RuleKind::Acknowledge;
  if (s == "finish_failure") return RuleKind::FinishFailure;
  throw SchemaError("unknown rule id '" + std::string(s) + "'");
}

// Act prefix -> rule. Golden labels and no_match are handled by the
// simulator itself and never reach the table.
class RuleTable {
 public:
  static RuleTable defaults() {
    RuleTable t;
    t.set("request", RuleKind::RespondInform);
    t.set("confirm", RuleKind::RespondAffirm);
    t.set("inform", RuleKind::Acknowledge);
    t.set("unknown", RuleKind::Acknowledge);
    t.set("transfer", RuleKind::FinishFailure);
    t.set("end", RuleKind::FinishFailure);
    return t;
  }

  void set(const std::string& prefix, RuleKind kind) { rules_[prefix] = kind; }

  std::optional<RuleKind> lookup(const std::string& act) const {
    std::optional<RuleKind> best;
    std::size_t best_len = 0;
    for (const auto& [prefix, kind] : rules_) {
      const bool hit = act == prefix || (starts_with(act, prefix) && act.size() > prefix.size() &&
                                         act[prefix.size()] == '_');
      if (hit && prefix.size() >= best_len) {
        best = kind;
        best_len = prefix.size();
      }
    }
    return best;
  }

  const std::map<std::string, RuleKind>& rules() const { return rules_; }

 private:
  std::map<std::string, RuleKind> rules_;
};

// --- episode records ---------------------------------------------------------

enum class Outcome { Success, IntentError, NERError, OtherError, Timeout };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "Success";
    case Outcome::IntentError: return "IntentError";
    case Outcome::NERError: return "NERError";
    case Outcome::OtherError: return "OtherError";
    case Outcome::Timeout: return "Timeout";
  }
  return "OtherError";
}

inline Outcome parse_outcome(std::string_view s) {
  if (s == "Success") return Outcome::Success;
  if (s == "IntentError") return Outcome::IntentError;
  if (s == "NERError") return Outcome::NERError;
  if (s == "OtherError") return Outcome::OtherError;
  if (s == "Timeout") return Outcome::Timeout;
  throw SchemaError("unknown outcome '" + std::string(s) + "'");
}

inline constexpr std::array<Outcome, 5> kAllOutcomes = {
    Outcome::Success, Outcome::IntentError, Outcome::NERError, Outcome::OtherError, Outcome::Timeout};

struct Turn {
  std::vector<BotReply> bot_messages;
  std::vector<ActMatch> matches;  // one per bot message
  std::string matched_act;
  int match_score = 0;
  std::string user_act;
  std::optional<std::string> user_slot;
  std::string user_text;
  std::size_t agenda_depth = 0;  // after this turn's pop

  bool operator==(const Turn&) const = default;
};

struct Episode {
  std::string goal_id;
  std::string goal_name;
  std::string intent_query;
  std::vector<Turn> turns;
  Outcome outcome = Outcome::Success;
  std::optional<int> error_turn;
  std::optional<std::string> intent_predicted;
  std::string cause;
  std::optional<std::string> error_slot;

  bool operator==(const Episode&) const = default;
};

// --- simulator ---------------------------------------------------------------

struct UserResponse {
  UserAct act;
  std::string text;
  std::optional<Outcome> outcome;
  std::string cause;
  std::optional<std::string> slot;
};

// One user for one goal. `maps` are the reviewed global maps of all dialogs.
class UserSimulator {
 public:
  UserSimulator(const Goal& goal, const DialogActMaps& maps, const NLGTemplates& templates,
                const SimConfig& cfg, const RuleTable& rules, std::uint64_t seed)
      : goal_(goal), maps_(maps), templates_(templates), cfg_(cfg), rules_(rules),
        rng_(make_rng(seed, 0x5u)), agenda_(init_agenda(goal)) {
    for (const auto& [node, _] : goal.request_slots) {
      auto it = maps.find(node);
      if (it == maps.end()) throw UnknownNode("goal '" + goal.id + "' targets unknown dialog '" + node + "'");
      intent_nodes_.push_back(node);
      goal_map_.merge(it->second);
    }
    if (intent_nodes_.empty()) intent_nodes_.push_back(goal.goal_name);
    if (goal_map_.empty()) {
      auto it = maps.find(goal.goal_name);
      if (it == maps.end()) throw UnknownNode("unknown goal dialog '" + goal.goal_name + "'");
      goal_map_ = it->second;
    }
  }

  const Agenda& agenda() const { return agenda_; }
  const std::optional<std::string>& intent_predicted() const { return intent_predicted_; }

  // Turn 0: the intent query, sent verbatim.
  UserResponse start() { return pop_intent(); }

  UserResponse step(const std::vector<BotReply>& messages, Turn& turn) {
    turn.bot_messages = messages;
    for (const auto& m : messages) turn.matches.push_back(primary_match(m.text));
    if (!turn.matches.empty()) {
      turn.matched_act = turn.matches.front().act;
      turn.match_score = turn.matches.front().score;
    } else {
      turn.matched_act = kNoMatch;
    }

    if (awaiting_intent_) {
      awaiting_intent_ = false;
      if (auto bad = check_intent(messages, turn)) return *bad;
    }

    if (const auto* entry = goal_map_.find(kDialogSuccess)) {
      for (const auto& m : messages) {
        const int s = variant_score(m.text, entry);
        if (s >= cfg_.fuzzy_threshold) {
          turn.matched_act = kDialogSuccess;
          turn.match_score = s;
          return finish(Outcome::Success, "dialog_success");
        }
      }
    }

    std::optional<UserResponse> reply;
    for (std::size_t i = 0; i < turn.matches.size(); ++i) {
      const auto& act = turn.matches[i].act;
      if (act == kNoMatch) continue;
      auto rule = rules_.lookup(act);
      if (!rule) {
        if (cfg_.strict_rules) throw RuleMissing("no rule for dialog act '" + act + "'");
        continue;
      }
      switch (*rule) {
        case RuleKind::FinishFailure:
          turn.matched_act = act;
          turn.match_score = turn.matches[i].score;
          return finish(Outcome::OtherError, act.substr(0, act.find('_')));
        case RuleKind::RespondInform: {
          auto r = respond_inform(act.substr(act.find('_') + 1));
          turn.matched_act = act;
          turn.match_score = turn.matches[i].score;
          if (r.outcome) return r;
          reply = std::move(r);
          break;
        }
        case RuleKind::RespondAffirm:
          turn.matched_act = act;
          turn.match_score = turn.matches[i].score;
          reply = emit({kAffirm, std::nullopt, std::nullopt});
          break;
        case RuleKind::Acknowledge:
          break;
      }
    }
    if (reply) {
      no_match_run_ = 0;
      return *reply;
    }

    // Nothing to answer: move on to the next intent if one is pending,
    // otherwise restate and count toward the no-match limit.
    if (!agenda_.empty() && agenda_.top().act == kInformIntent) {
      no_match_run_ = 0;
      return pop_intent();
    }
    if (++no_match_run_ >= cfg_.no_match_limit) return finish(Outcome::OtherError, "no_match_limit");
    return emit({kFallback, std::nullopt, std::nullopt});
  }

 private:
  ActMatch primary_match(const std::string& text) const {
    auto m = best_match(text, goal_map_, [](const std::string& a) { return !is_golden(a); });
    if (m.score < cfg_.fuzzy_threshold) m.act = kNoMatch;
    return m;
  }

  std::optional<UserResponse> check_intent(const std::vector<BotReply>& messages, Turn& turn) {
    const auto& node = intent_nodes_.at(intent_index_ - 1);
    const auto* own = maps_.at(node).find(kIntentSuccess);
    for (const auto& m : messages) {
      const int s = variant_score(m.text, own);
      if (s >= cfg_.fuzzy_threshold) {
        if (intent_index_ == 1) intent_predicted_ = node;
        turn.matched_act = kIntentSuccess;
        turn.match_score = s;
        return std::nullopt;
      }
    }
    std::string predicted = kOutOfDomain;
    int best = cfg_.fuzzy_threshold - 1;
    for (const auto& [dialog, map] : maps_) {
      if (dialog == node) continue;
      for (const auto& m : messages) {
        const int s = variant_score(m.text, map.find(kIntentSuccess));
        if (s > best) {
          best = s;
          predicted = dialog;
        }
      }
    }
    intent_predicted_ = predicted;
    return finish(Outcome::IntentError, "intent_misroute");
  }

  UserResponse respond_inform(const std::string& slot) {
    if (auto a = agenda_.take_inform(slot)) return emit(*a);
    const auto* value = goal_.inform(slot);
    if (!value) return emit({kDontKnow, slot, std::nullopt});
    if (++repeats_[slot] >= cfg_.repeat_limit) {
      auto r = finish(Outcome::NERError, "repeat_limit");
      r.slot = slot;
      return r;
    }
    return emit({kInform, slot, *value});
  }

  UserResponse pop_intent() {
    auto a = agenda_.pop();
    if (a.act != kInformIntent) throw ContractError("agenda top is not an intent query");
    ++intent_index_;
    awaiting_intent_ = true;
    UserResponse r;
    r.text = *a.value;
    r.act = std::move(a);
    return r;
  }

  UserResponse emit(UserAct a) {
    SlotValues fill;
    if (a.slot && a.value) {
      fill["value"] = *a.value;
      fill[*a.slot] = *a.value;
      // a prefix key such as inform_Email also serves Email_for_Look_Up
      for (auto p = a.slot->find('_'); p != std::string::npos; p = a.slot->find('_', p + 1))
        fill.emplace(a.slot->substr(0, p), *a.value);
      auto label = *a.slot;
      std::replace(label.begin(), label.end(), '_', ' ');
      fill["slot"] = to_lower(label);
    }
    UserResponse r;
    r.text = render_nlg(a.name(), fill, templates_, rng_);
    r.act = std::move(a);
    return r;
  }

  UserResponse finish(Outcome o, std::string cause) {
    UserResponse r;
    r.outcome = o;
    r.cause = std::move(cause);
    return r;
  }

  const Goal& goal_;
  const DialogActMaps& maps_;
  const NLGTemplates& templates_;
  const SimConfig& cfg_;
  const RuleTable& rules_;
  Rng rng_;
  Agenda agenda_;
  DialogActMap goal_map_;
  std::vector<std::string> intent_nodes_;
  std::size_t intent_index_ = 0;
  bool awaiting_intent_ = false;
  std::optional<std::string> intent_predicted_;
  std::map<std::string, int> repeats_;
  int no_match_run_ = 0;
};

inline void record_user(Turn& t, const UserResponse& r) {
  t.user_act = r.act.act;
  t.user_slot = r.act.slot;
  t.user_text = r.text;
}

inline Episode run_episode(Connector& connector, const Goal& goal, const DialogActMaps& maps,
                           const NLGTemplates& templates, const SimConfig& cfg,
                           std::uint64_t episode_seed, const RuleTable& rules = RuleTable::defaults()) {
  cfg.validate();
  if (!cfg.force)
    for (const auto& [node, _] : goal.request_slots)
      if (auto it = maps.find(node); it != maps.end() && it->second.has_pending_review())
        throw ContractError("dialog '" + node + "' has success labels awaiting review");

  Episode ep;
  ep.goal_id = goal.id;
  ep.goal_name = goal.goal_name;
  if (const auto* q = goal.inform(kIntentSlot)) ep.intent_query = *q;

  UserSimulator sim(goal, maps, templates, cfg, rules, episode_seed);
  auto fail = [&](Outcome o, std::string cause) {
    ep.outcome = o;
    ep.cause = std::move(cause);
    ep.error_turn = static_cast<int>(ep.turns.size()) - 1;
  };

  std::string session;
  try {
    session = connector.start_session();
  } catch (const std::exception& e) {
    ep.turns.emplace_back();
    fail(Outcome::OtherError, std::string("connector: ") + e.what());
    return ep;
  }

  auto resp = sim.start();
  ep.turns.emplace_back();
  record_user(ep.turns.back(), resp);
  ep.turns.back().agenda_depth = sim.agenda().depth();

  for (int sends = 0;;) {
    std::vector<BotReply> replies;
    try {
      replies = connector.send(session, resp.text);
    } catch (const std::exception& e) {
      fail(Outcome::OtherError, std::string("connector: ") + e.what());
      break;
    }
    ++sends;
    ep.turns.emplace_back();
    auto& turn = ep.turns.back();
    resp = sim.step(replies, turn);
    turn.agenda_depth = sim.agenda().depth();
    if (resp.outcome) {
      if (*resp.outcome == Outcome::Success) {
        ep.outcome = Outcome::Success;
        ep.cause = resp.cause;
      } else {
        fail(*resp.outcome, resp.cause);
        ep.error_slot = resp.slot;
      }
      break;
    }
    if (sends >= cfg.max_turns) {
      fail(Outcome::Timeout, "max_turns");
      break;
    }
    record_user(turn, resp);
  }
  ep.intent_predicted = sim.intent_predicted();
  try {
    connector.close(session);
  } catch (const std::exception&) {
  }
  return ep;
}

struct SessionResult {
  std::vector<Episode> episodes;
  std::map<std::string, std::size_t> counts;  // outcome name -> episodes

  double success_rate() const {
    if (episodes.empty()) return 0.0;
    auto it = counts.find("Success");
    return it == counts.end() ? 0.0
                              : static_cast<double>(it->second) / static_cast<double>(episodes.size());
  }
};

// Episode i draws from stream (cfg.seed, i), so the worker count never
// changes a transcript.
inline SessionResult run_session(const ConnectorFactory& factory, const std::vector<Goal>& goals,
                                 const DialogActMaps& maps, const NLGTemplates& templates,
                                 const SimConfig& cfg, const RuleTable& rules = RuleTable::defaults()) {
  cfg.validate();
  if (goals.empty()) throw ContractError("run_session: no goals");

  std::vector<Episode> episodes(goals.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < goals.size(); i = next++) {
      try {
        const auto seed = mix_seed(cfg.seed, i);
        auto conn = factory(goals[i], seed);
        episodes[i] = run_episode(*conn, goals[i], maps, templates, cfg, seed, rules);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(cfg.episodes_parallelism), goals.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  std::stable_sort(episodes.begin(), episodes.end(),
                   [](const Episode& a, const Episode& b) { return a.goal_id < b.goal_id; });
  SessionResult out;
  for (auto o : kAllOutcomes) out.counts[std::string(to_string(o))] = 0;
  for (const auto& e : episodes) ++out.counts[std::string(to_string(e.outcome))];
  out.episodes = std::move(episodes);
  return out;
}

// --- root cause --------------------------------------------------------------

struct ErrorCause {
  std::string kind;
  int turn = 0;
  std::string expected_act;
  std::string observed_act;
  std::optional<std::string> slot;

  bool operator==(const ErrorCause&) const = default;
};

inline ErrorCause backtrack_root_cause(const Episode& ep) {
  if (ep.outcome == Outcome::Success) throw ContractError("backtrack_root_cause: episode succeeded");
  if (ep.turns.empty() || !ep.error_turn) throw ContractError("backtrack_root_cause: no error turn");
  const int last = *ep.error_turn;
  const auto& err = ep.turns.at(static_cast<std::size_t>(last));
  ErrorCause c;

  switch (ep.outcome) {
    case Outcome::IntentError: {
      c.kind = "intent_misroute";
      for (int t = last; t >= 0; --t)
        if (ep.turns[static_cast<std::size_t>(t)].user_act == kInformIntent) {
          c.turn = t;
          break;
        }
      c.expected_act = kIntentSuccess;
      const auto pred = ep.intent_predicted.value_or(kOutOfDomain);
      c.observed_act = pred == kOutOfDomain ? kNoMatch : pred + "." + kIntentSuccess;
      return c;
    }
    case Outcome::NERError: {
      c.kind = "entity_rejected";
      c.slot = ep.error_slot;
      if (!c.slot && starts_with(err.matched_act, "request_")) c.slot = err.matched_act.substr(8);
      c.turn = last;
      for (int t = 0; t <= last; ++t)
        if (ep.turns[static_cast<std::size_t>(t)].user_act == kInform &&
            ep.turns[static_cast<std::size_t>(t)].user_slot == c.slot) {
          c.turn = t;
          break;
        }
      c.expected_act = "inform_" + c.slot.value_or("");
      c.observed_act = "request_" + c.slot.value_or("");
      return c;
    }
    case Outcome::OtherError: {
      c.expected_act = kDialogSuccess;
      if (err.matched_act == kNoMatch && ep.cause == "no_match_limit") {
        c.kind = "no_match_loop";
        int t = last;
        while (t > 0 && ep.turns[static_cast<std::size_t>(t - 1)].matched_act == kNoMatch &&
               !ep.turns[static_cast<std::size_t>(t - 1)].bot_messages.empty())
          --t;
        c.turn = t;
        c.observed_act = kNoMatch;
      } else {
        c.kind = "unexpected_transition";
        c.turn = last;
        c.observed_act = starts_with(ep.cause, "connector") ? "connector_error" : err.matched_act;
      }
      return c;
    }
    case Outcome::Timeout: {
      c.kind = "timeout";
      // First turn after the agenda last shrank.
      int t = last;
      while (t > 1 && ep.turns[static_cast<std::size_t>(t - 1)].agenda_depth ==
                          ep.turns[static_cast<std::size_t>(t)].agenda_depth)
        --t;
      c.turn = t;
      c.expected_act = kDialogSuccess;
      c.observed_act = err.matched_act;
      return c;
    }
    case Outcome::Success: break;
  }
  throw ContractError("backtrack_root_cause: unreachable");
}

// --- serialization -----------------------------------------------------------

inline Json to_json(const ActMatch& m) { return Json{{"act", m.act}, {"score", m.score}}; }

inline Json to_json(const Turn& t) {
  Json msgs = Json::array();
  for (const auto& m : t.bot_messages) msgs.push_back(to_json(m));
  Json matches = Json::array();
  for (const auto& m : t.matches) matches.push_back(to_json(m));
  Json j{{"bot_messages", msgs},     {"matches", matches},  {"matched_act", t.matched_act},
         {"match_score", t.match_score}, {"user_act", t.user_act}};
  if (t.user_slot) j["user_slot"] = *t.user_slot;
  j["user_text"] = t.user_text;
  j["agenda_depth"] = t.agenda_depth;
  return j;
}

inline Turn turn_from_json(const Json& j) {
  Turn t;
  for (const auto& m : j.at("bot_messages")) t.bot_messages.push_back(bot_reply_from_json(m));
  if (j.contains("matches"))
    for (const auto& m : j.at("matches"))
      t.matches.push_back({m.at("act").get<std::string>(), m.at("score").get<int>()});
  t.matched_act = j.value("matched_act", std::string{});
  t.match_score = j.value("match_score", 0);
  t.user_act = j.value("user_act", std::string{});
  if (j.contains("user_slot")) t.user_slot = j.at("user_slot").get<std::string>();
  t.user_text = j.value("user_text", std::string{});
  t.agenda_depth = j.value("agenda_depth", std::size_t{0});
  return t;
}

inline Json to_json(const Episode& e) {
  Json turns = Json::array();
  for (const auto& t : e.turns) turns.push_back(to_json(t));
  Json j{{"goal_id", e.goal_id},
         {"goal_name", e.goal_name},
         {"intent_query", e.intent_query},
         {"outcome", std::string(to_string(e.outcome))},
         {"error_turn", e.error_turn ? Json(*e.error_turn) : Json(nullptr)},
         {"intent_predicted", e.intent_predicted ? Json(*e.intent_predicted) : Json(nullptr)},
         {"cause", e.cause}};
  if (e.error_slot) j["error_slot"] = *e.error_slot;
  j["turns"] = std::move(turns);
  return j;
}

inline Episode episode_from_json(const Json& j) {
  try {
    Episode e;
    e.goal_id = j.at("goal_id").get<std::string>();
    e.goal_name = j.value("goal_name", std::string{});
    e.intent_query = j.value("intent_query", std::string{});
    e.outcome = parse_outcome(j.at("outcome").get<std::string>());
    if (j.contains("error_turn") && !j.at("error_turn").is_null()) e.error_turn = j.at("error_turn").get<int>();
    if (j.contains("intent_predicted") && !j.at("intent_predicted").is_null())
      e.intent_predicted = j.at("intent_predicted").get<std::string>();
    e.cause = j.value("cause", std::string{});
    if (j.contains("error_slot")) e.error_slot = j.at("error_slot").get<std::string>();
    for (const auto& t : j.at("turns")) e.turns.push_back(turn_from_json(t));
    return e;
  } catch (const Json::exception& ex) {
    throw SchemaError(std::string("episode record: ") + ex.what());
  }
}

inline std::string episodes_to_jsonl(const std::vector<Episode>& eps) {
  std::vector<Json> recs;
  recs.reserve(eps.size());
  for (const auto& e : eps) recs.push_back(to_json(e));
  return to_jsonl(recs);
}

inline std::vector<Episode> episodes_from_jsonl(const std::filesystem::path& path) {
  std::vector<Episode> out;
  for (const auto& j : read_jsonl_file(path)) out.push_back(episode_from_json(j));
  return out;
}

inline Json to_json(const SimConfig& c) {
  return Json{{"fuzzy_threshold", c.fuzzy_threshold}, {"max_turns", c.max_turns},
              {"episodes_parallelism", c.episodes_parallelism}, {"seed", c.seed},
              {"repeat_limit", c.repeat_limit}, {"no_match_limit", c.no_match_limit}};
}

inline SimConfig sim_config_from_json(const Json& j) {
  SimConfig c;
  c.fuzzy_threshold = j.value("fuzzy_threshold", c.fuzzy_threshold);
  c.max_turns = j.value("max_turns", c.max_turns);
  c.episodes_parallelism = j.value("episodes_parallelism", c.episodes_parallelism);
  c.seed = j.value("seed", c.seed);
  c.repeat_limit = j.value("repeat_limit", c.repeat_limit);
  c.no_match_limit = j.value("no_match_limit", c.no_match_limit);
  c.validate();
  return c;
}

}  // namespace botsim
