#pragma once

// In-process bot scripted from a BotDefinition, with injectable intent
// confusion, entity misses and spurious re-prompts.

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "botsim/connector.hpp"
#include "botsim/entity_values.hpp"

namespace botsim {

inline constexpr const char* kMockFallback = "Sorry, I didn't quite get that. Could you rephrase?";
inline constexpr const char* kMockAnythingElse = "Is there anything else I can help you with?";

struct FaultProfile {
  // true intent -> predicted label -> probability; a missing row is identity
  std::map<std::string, std::map<std::string, double>> intent_confusion;
  std::map<std::string, double> ner_miss_prob;
  double extra_reprompt_prob = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const FaultProfile&) const = default;
};

inline void validate_profile(const FaultProfile& p, const BotDefinition& def) {
  auto prob_ok = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  auto known = [&](const std::string& label) {
    return label == kOutOfDomain || def.find_intent(label) || def.find_dialog(label);
  };
  for (const auto& [truth, row] : p.intent_confusion) {
    if (!known(truth)) throw ProfileInvalid("confusion row for unknown intent '" + truth + "'");
    double sum = 0;
    for (const auto& [pred, v] : row) {
      if (!known(pred)) throw ProfileInvalid("confusion row '" + truth + "' predicts unknown '" + pred + "'");
      if (!prob_ok(v)) throw ProfileInvalid("confusion '" + truth + "' -> '" + pred + "' is not a probability");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
      throw ProfileInvalid("confusion row '" + truth + "' sums to " + std::to_string(sum));
  }
  for (const auto& [slot, v] : p.ner_miss_prob)
    if (!prob_ok(v)) throw ProfileInvalid("ner_miss_prob for '" + slot + "' is not a probability");
  if (!prob_ok(p.extra_reprompt_prob)) throw ProfileInvalid("extra_reprompt_prob is not a probability");
}

inline FaultProfile profile_from_json(const Json& j) {
  if (!j.is_object()) throw ProfileInvalid("fault profile: expected an object");
  try {
    FaultProfile p;
    if (j.contains("intent_confusion"))
      for (auto row = j.at("intent_confusion").begin(); row != j.at("intent_confusion").end(); ++row)
        for (auto cell = row->begin(); cell != row->end(); ++cell)
          p.intent_confusion[row.key()][cell.key()] = cell->get<double>();
    if (j.contains("ner_miss_prob"))
      for (auto it = j.at("ner_miss_prob").begin(); it != j.at("ner_miss_prob").end(); ++it)
        p.ner_miss_prob[it.key()] = it->get<double>();
    p.extra_reprompt_prob = j.value("extra_reprompt_prob", 0.0);
    p.seed = j.value("seed", std::uint64_t{0});
    return p;
  } catch (const Json::exception& e) {
    throw ProfileInvalid(std::string("fault profile: ") + e.what());
  }
}

inline Json to_json(const FaultProfile& p) {
  Json conf = Json::object();
  for (const auto& [t, row] : p.intent_confusion)
    for (const auto& [pred, v] : row) conf[t][pred] = v;
  Json ner = Json::object();
  for (const auto& [s, v] : p.ner_miss_prob) ner[s] = v;
  return Json{{"intent_confusion", conf}, {"ner_miss_prob", ner},
              {"extra_reprompt_prob", p.extra_reprompt_prob}, {"seed", p.seed}};
}

// Ground truth the mock may consult for texts it has never seen. Filled
// from goal metadata by the factory; a real bot gets nothing like it.
struct MockHints {
  std::map<std::string, std::string> text_intent;  // utterance -> true intent
  std::map<std::string, std::string> provenance;   // paraphrase -> original utterance
  std::optional<std::vector<std::string>> path;
};

class MockBot final : public Connector {
 public:
  MockBot(std::shared_ptr<const BotDefinition> def, FaultProfile profile, std::uint64_t seed,
          MockHints hints = {})
      : def_(std::move(def)), profile_(std::move(profile)), hints_(std::move(hints)),
        rng_(make_rng(mix_seed(seed, profile_.seed), 0x60u)) {
    validate_profile(profile_, *def_);
    for (const auto& i : def_->intents)
      for (const auto& u : i.utterances) known_.emplace(u, i.name);
  }

  std::string start_session() override {
    ++sessions_;
    session_ = "mock-" + std::to_string(sessions_);
    open_ = true;
    phase_ = Phase::AwaitIntent;
    dialog_ = nullptr;
    path_pos_ = 0;
    return session_;
  }

  std::vector<BotReply> send(const std::string& session, const std::string& text) override {
    if (!open_ || session != session_) throw SessionClosed("mock session '" + session + "' is not open");
    switch (phase_) {
      case Phase::AwaitIntent: return route(text);
      case Phase::Awaiting: return answer(text);
      case Phase::Ended: return {};
    }
    return {};
  }

  void close(const std::string& session) override {
    if (session == session_) open_ = false;
  }

  // Label the confusion row is sampled from for `text`.
  std::string true_intent(const std::string& text) const {
    const auto t = trim(text);
    if (auto it = known_.find(t); it != known_.end()) return it->second;
    if (auto it = hints_.text_intent.find(t); it != hints_.text_intent.end()) return it->second;
    if (auto it = hints_.provenance.find(t); it != hints_.provenance.end())
      if (auto k = known_.find(it->second); k != known_.end()) return k->second;
    return kOutOfDomain;
  }

 private:
  enum class Phase { AwaitIntent, Awaiting, Ended };

  std::string sample_prediction(const std::string& truth) {
    auto row = profile_.intent_confusion.find(truth);
    if (row == profile_.intent_confusion.end()) return truth;
    const double u = uniform01(rng_);
    double acc = 0;
    std::string last;
    for (const auto& [label, p] : row->second) {
      if (p <= 0) continue;
      acc += p;
      last = label;
      if (u < acc) return label;
    }
    return last.empty() ? truth : last;
  }

  std::vector<BotReply> route(const std::string& text) {
    const auto predicted = sample_prediction(true_intent(text));
    const DialogSpec* target = predicted == kOutOfDomain ? nullptr : def_->find_dialog(predicted);
    if (!target) return {BotReply{kMockFallback, std::nullopt}};
    if (hints_.path)
      for (std::size_t i = path_pos_; i < hints_.path->size(); ++i)
        if ((*hints_.path)[i] == target->name) {
          path_pos_ = i;
          break;
        }
    enter(target);
    std::vector<BotReply> out;
    advance(out);
    return out;
  }

  std::vector<BotReply> answer(const std::string& text) {
    const auto& m = dialog_->messages[msg_];
    if (m.action == Action::Collect && m.slot) {
      const auto* entity = def_->find_entity(*m.slot);
      auto value = entity ? extract_value(*entity, text) : std::optional<std::string>(trim(text));
      const auto miss = profile_.ner_miss_prob.find(*m.slot);
      const bool dropped = miss != profile_.ner_miss_prob.end() && uniform01(rng_) < miss->second;
      if (!value || dropped) return {reply(m)};
      slots_[*m.slot] = *value;
    }
    if (!reprompted_ && profile_.extra_reprompt_prob > 0 && uniform01(rng_) < profile_.extra_reprompt_prob) {
      reprompted_ = true;
      return {reply(m)};
    }
    ++msg_;
    std::vector<BotReply> out;
    advance(out);
    return out;
  }

  void enter(const DialogSpec* d) {
    dialog_ = d;
    msg_ = 0;
    reprompted_ = false;
  }

  BotReply reply(const BotMessage& m) const { return BotReply{m.text, dialog_->name}; }

  static bool awaits(const BotMessage& m) {
    return (m.action == Action::Collect && m.slot) || m.action == Action::Confirm;
  }

  // Emits messages until one needs an answer or the flow stops.
  void advance(std::vector<BotReply>& out) {
    phase_ = Phase::Awaiting;
    for (std::size_t guard = 0; guard < 10000; ++guard) {
      if (msg_ < dialog_->messages.size()) {
        const auto& m = dialog_->messages[msg_];
        out.push_back(reply(m));
        if (awaits(m)) {
          reprompted_ = false;
          return;
        }
        ++msg_;
        continue;
      }
      if (dialog_->is_terminal()) {
        phase_ = Phase::Ended;
        return;
      }
      bool via_path = false;
      const DialogSpec* next = next_dialog(via_path);
      // the next intent of a multi-intent goal is stated by the user
      if (via_path && next->is_intent_root) {
        out.push_back(BotReply{kMockAnythingElse, dialog_->name});
        phase_ = Phase::AwaitIntent;
        return;
      }
      enter(next);
    }
    throw ConnectorError("mock bot: dialog loop without any prompt");
  }

  const DialogSpec* next_dialog(bool& via_path) {
    const auto& trs = dialog_->transitions;
    if (hints_.path && path_pos_ + 1 < hints_.path->size()) {
      const auto& want = (*hints_.path)[path_pos_ + 1];
      for (const auto& t : trs)
        if (t.target == want) {
          ++path_pos_;
          via_path = true;
          return def_->find_dialog(want);
        }
    }
    return def_->find_dialog(trs.front().target);
  }

  std::shared_ptr<const BotDefinition> def_;
  FaultProfile profile_;
  MockHints hints_;
  Rng rng_;
  std::map<std::string, std::string> known_;

  std::string session_;
  int sessions_ = 0;
  bool open_ = false;
  Phase phase_ = Phase::AwaitIntent;
  const DialogSpec* dialog_ = nullptr;
  std::size_t msg_ = 0;
  bool reprompted_ = false;
  std::size_t path_pos_ = 0;
  std::map<std::string, std::string> slots_;
};

inline std::unique_ptr<MockBot> new_mock_bot(std::shared_ptr<const BotDefinition> def,
                                             const FaultProfile& profile, std::uint64_t seed,
                                             MockHints hints = {}) {
  return std::make_unique<MockBot>(std::move(def), profile, seed, std::move(hints));
}

// Factory for run_session. Each goal's intent queries are tagged with the
// dialog they belong to; `provenance` maps paraphrases to their originals.
inline ConnectorFactory make_mock_factory(std::shared_ptr<const BotDefinition> def, FaultProfile profile,
                                          std::map<std::string, std::string> provenance = {}) {
  validate_profile(profile, *def);
  return [def = std::move(def), profile = std::move(profile),
          provenance = std::move(provenance)](const Goal& goal, std::uint64_t seed) {
    MockHints hints;
    hints.provenance = provenance;
    hints.path = goal.path;
    std::size_t k = 0;
    for (const auto& [key, value] : goal.inform_slots) {
      if (!is_intent_key(key)) continue;
      if (k < goal.request_slots.size()) hints.text_intent.emplace(trim(value), goal.request_slots[k].first);
      ++k;
    }
    return std::unique_ptr<Connector>(new_mock_bot(def, profile, seed, std::move(hints)));
  };
}

}  // namespace botsim
