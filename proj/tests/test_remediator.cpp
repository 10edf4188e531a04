#include <gtest/gtest.h>

#include <random>

#include "botsim/remediator.hpp"

using namespace botsim;

namespace {

const std::string kCI = "Check_the_status_of_an_existing_issue";
const std::string kCO = "Check_Order_Status";

Episode episode(std::string id, std::string truth, Outcome o, std::optional<std::string> predicted = std::nullopt,
                std::string query = "q") {
  Episode e;
  e.goal_id = std::move(id);
  e.goal_name = std::move(truth);
  e.intent_query = std::move(query);
  e.outcome = o;
  e.intent_predicted = std::move(predicted);
  Turn t;
  t.user_act = kInformIntent;
  t.user_text = e.intent_query;
  e.turns.push_back(t);
  if (o != Outcome::Success) e.error_turn = 0;
  return e;
}

// 100 A and 100 B; 20 of each go to the other label, so F1(A) = 0.8.
void f1_fixture(std::size_t scale, std::vector<std::string>& truth, std::vector<std::string>& pred) {
  truth.clear();
  pred.clear();
  for (std::size_t k = 0; k < scale; ++k)
    for (int i = 0; i < 100; ++i) {
      truth.push_back("A");
      pred.push_back(i < 80 ? "A" : "B");
      truth.push_back("B");
      pred.push_back(i < 80 ? "B" : "A");
    }
}

}  // namespace

TEST(Confusion, MatchesTally) {
  std::mt19937_64 rng(4);
  const std::vector<std::string> labels = {"a", "b", "c", "d"};
  std::vector<std::string> truth, pred;
  for (int i = 0; i < 50; ++i) {
    truth.push_back(labels[rng() % 4]);
    pred.push_back(labels[rng() % 4]);
  }
  const auto m = confusion_matrix(truth, pred, labels);
  std::size_t total = 0;
  for (const auto& t : labels)
    for (const auto& p : labels) {
      std::size_t n = 0;
      for (std::size_t k = 0; k < truth.size(); ++k) n += truth[k] == t && pred[k] == p;
      EXPECT_EQ(m.at(t, p), n) << t << "->" << p;
      total += m.at(t, p);
    }
  EXPECT_EQ(total, 50u);
  EXPECT_THROW(confusion_matrix({"a"}, {}, labels), LengthMismatch);
  EXPECT_THROW(confusion_matrix({"z"}, {"a"}, labels), UnknownLabel);
  EXPECT_EQ(confusion_from_json(to_json(m)), m);
}

TEST(Metrics, ForcedMisrouteByHand) {
  // 20 CI goals, 4 sent to CO; 10 CO goals all fine
  std::vector<Episode> eps;
  for (int i = 0; i < 20; ++i)
    eps.push_back(i < 4 ? episode("ci" + std::to_string(i), kCI, Outcome::IntentError, kCO)
                        : episode("ci" + std::to_string(i), kCI, Outcome::Success));
  for (int i = 0; i < 10; ++i) eps.push_back(episode("co" + std::to_string(i), kCO, Outcome::Success));
  SessionMeta meta;
  meta.session_id = "s";
  meta.intents = {kCI, kCO};
  meta.n_resamples = 200;
  const auto r = aggregate_metrics(eps, meta);
  EXPECT_EQ(r.confusion.at(kCI, kCO), 4u);
  EXPECT_EQ(r.confusion.at(kCI, kCI), 16u);
  EXPECT_EQ(r.confusion.at(kCO, kCO), 10u);
  EXPECT_DOUBLE_EQ(r.goal_success_rate, 26.0 / 30.0);
  const auto* ci = r.metrics_for(kCI);
  const auto* co = r.metrics_for(kCO);
  EXPECT_DOUBLE_EQ(ci->recall, 0.8);
  EXPECT_DOUBLE_EQ(ci->precision, 1.0);
  EXPECT_DOUBLE_EQ(co->precision, 10.0 / 14.0);
  EXPECT_DOUBLE_EQ(co->recall, 1.0);
  EXPECT_NEAR(ci->f1, 2 * 0.8 / 1.8, 1e-12);
  EXPECT_NEAR(r.macro_f1, (ci->f1 + co->f1) / 2, 1e-12);
  EXPECT_EQ(r.outcome_counts.at("IntentError"), 4u);
  EXPECT_EQ(r.intents, 2u);
  EXPECT_EQ(report_from_json(to_json(r)), r);
  EXPECT_THROW(aggregate_metrics({}, meta), EmptySession);
}

TEST(Metrics, RandomSessionsRecount) {
  std::mt19937_64 rng(12);
  const std::vector<std::string> intents = {"A", "B", "C"};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Episode> eps;
    for (int i = 0; i < 60; ++i) {
      const auto truth = intents[rng() % 3];
      if (rng() % 4 == 0) {
        const std::string pred = rng() % 3 == 0 ? kOutOfDomain : intents[rng() % 3];
        eps.push_back(episode(std::to_string(i), truth, Outcome::IntentError,
                              pred == kOutOfDomain ? std::nullopt : std::optional<std::string>(pred)));
      } else {
        eps.push_back(episode(std::to_string(i), truth, rng() % 5 ? Outcome::Success : Outcome::Timeout));
      }
    }
    SessionMeta meta;
    meta.intents = intents;
    meta.n_resamples = 10;
    const auto r = aggregate_metrics(eps, meta);
    for (const auto& label : intents) {
      std::size_t tp = 0, fp = 0, fn = 0;
      for (const auto& e : eps) {
        const std::string pred = e.outcome == Outcome::IntentError ? e.intent_predicted.value_or(kOutOfDomain) : e.goal_name;
        tp += e.goal_name == label && pred == label;
        fp += e.goal_name != label && pred == label;
        fn += e.goal_name == label && pred != label;
      }
      const auto* m = r.metrics_for(label);
      const double p = tp + fp ? double(tp) / double(tp + fp) : 0.0;
      const double rc = tp + fn ? double(tp) / double(tp + fn) : 0.0;
      EXPECT_NEAR(m->precision, p, 1e-12);
      EXPECT_NEAR(m->recall, rc, 1e-12);
      EXPECT_NEAR(m->f1, p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0, 1e-12);
    }
    std::size_t ok = 0;
    for (const auto& e : eps) ok += e.outcome == Outcome::Success;
    EXPECT_DOUBLE_EQ(r.goal_success_rate, double(ok) / 60.0);
  }
}

TEST(Bootstrap, PerfectPredictions) {
  const std::vector<std::string> l = {"a", "b", "a", "c"};
  for (const auto& [label, ci] : bootstrap_f1_ci(l, l, 500)) {
    EXPECT_DOUBLE_EQ(ci.f1, 1.0) << label;
    EXPECT_DOUBLE_EQ(ci.hi, 1.0) << label;
  }
  EXPECT_DOUBLE_EQ(bootstrap_f1_ci({"a", "a"}, {"a", "a"}, 100).at("a").lo, 1.0);
}

TEST(Bootstrap, DeterministicContainsPointAndNarrows) {
  std::vector<std::string> t, p;
  f1_fixture(1, t, p);
  const auto a = bootstrap_f1_ci(t, p, 2000, 0.05, 3);
  EXPECT_EQ(a, bootstrap_f1_ci(t, p, 2000, 0.05, 3));
  const auto& ci = a.at("A");
  EXPECT_NEAR(ci.f1, 0.8, 1e-12);
  EXPECT_LE(ci.lo, 0.8);
  EXPECT_GE(ci.hi, 0.8);
  EXPECT_LT(ci.lo, ci.hi);
  f1_fixture(4, t, p);
  const auto wide = bootstrap_f1_ci(t, p, 2000, 0.05, 3).at("A");
  EXPECT_LT(wide.hi - wide.lo, ci.hi - ci.lo);
  EXPECT_THROW(bootstrap_f1_ci({}, {}, 10), ContractError);
  EXPECT_THROW(bootstrap_f1_ci({"a"}, {"a"}, 0), ContractError);
  EXPECT_THROW(bootstrap_f1_ci({"a"}, {"a"}, 10, 1.5), ContractError);
  EXPECT_THROW(bootstrap_f1_ci({"a"}, {}, 10), LengthMismatch);
}

TEST(Groups, SizesAndOrder) {
  const Provenance prov = {{"p1", "orig one"}, {"p2", "orig one"}, {"p3", "orig two"}, {"p4", "orig one"}};
  const std::vector<Episode> eps = {episode("1", kCI, Outcome::IntentError, kCO, "p1"),
                                    episode("2", kCI, Outcome::IntentError, kCO, "p2"),
                                    episode("3", kCI, Outcome::IntentError, std::nullopt, "p3"),
                                    episode("4", kCI, Outcome::Success, std::nullopt, "p4")};
  const auto g = group_intent_errors(eps, prov);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].original_utterance, "orig one");
  EXPECT_EQ(g[0].size, 2u);
  EXPECT_EQ(g[1].members.at(0).predicted_intent, kOutOfDomain);
  EXPECT_EQ(paraphrase_totals(eps, prov), (std::map<std::string, std::size_t>{{"orig one", 3}, {"orig two", 1}}));
  EXPECT_EQ(error_group_from_json(to_json(g[0])), g[0]);
  EXPECT_THROW(group_intent_errors({episode("9", kCI, Outcome::IntentError, kCO, "unseen")}, prov), MissingProvenance);
}

TEST(Suggestions, MoveAugmentAndReview) {
  const std::string moved = "Can you give me the status of my order";
  std::vector<Episode> eps;
  Provenance prov;
  // 9 of 10 paraphrases of `moved` land in CO
  for (int i = 0; i < 10; ++i) {
    const auto q = "move " + std::to_string(i);
    prov[q] = moved;
    eps.push_back(i < 9 ? episode(q, kCI, Outcome::IntentError, kCO, q) : episode(q, kCI, Outcome::Success, std::nullopt, q));
  }
  // 4 of 10 paraphrases of another utterance are out of domain
  for (int i = 0; i < 10; ++i) {
    const auto q = "ood " + std::to_string(i);
    prov[q] = "any update on my support ticket?";
    eps.push_back(i < 4 ? episode(q, kCI, Outcome::IntentError, std::nullopt, q) : episode(q, kCI, Outcome::Success, std::nullopt, q));
  }
  // 3 of 10 misrouted to CO: below the threshold, no OOD
  for (int i = 0; i < 10; ++i) {
    const auto q = "mixed " + std::to_string(i);
    prov[q] = "what's happening with my case";
    eps.push_back(i < 3 ? episode(q, kCI, Outcome::IntentError, kCO, q) : episode(q, kCI, Outcome::Success, std::nullopt, q));
  }
  const auto s = suggest_remediations(group_intent_errors(eps, prov), paraphrase_totals(eps, prov));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].kind, SuggestionKind::MoveIntent);
  EXPECT_EQ(s[0].target_utterance, moved);
  EXPECT_EQ(s[0].proposed_intent, kCO);
  EXPECT_EQ(s[0].queries.size(), 9u);
  EXPECT_EQ(s[1].kind, SuggestionKind::AugmentTraining);
  EXPECT_EQ(s[1].queries, (std::vector<std::string>{"ood 0", "ood 1", "ood 2", "ood 3"}));
  EXPECT_EQ(s[2].kind, SuggestionKind::Review);
  EXPECT_EQ(s[2].rationale, "3 of 10 paraphrases were misrouted, below the move threshold");
  EXPECT_EQ(suggestions_from_json(suggestions_to_json(s)), s);
  EXPECT_EQ(suggest_remediations(group_intent_errors(eps, prov), paraphrase_totals(eps, prov)), s);
  EXPECT_THROW(suggest_remediations({}, {}, SuggestConfig{0.0, kOutOfDomain}), ContractError);

  // stricter threshold turns the move into a review
  const auto strict = suggest_remediations(group_intent_errors(eps, prov), paraphrase_totals(eps, prov),
                                           SuggestConfig{0.95, kOutOfDomain});
  EXPECT_EQ(strict[0].kind, SuggestionKind::Review);
}

TEST(Export, AugmentAndMove) {
  BotDefinition def;
  def.bot_name = "b";
  def.intents = {{kCI, {}}, {kCO, {"where is my order"}}};
  for (int i = 0; i < 150; ++i) def.intents[0].utterances.push_back("ci utterance " + std::to_string(i));
  def.intents[0].utterances.push_back("Can you give me the status of my order");

  RemediationSuggestion aug;
  aug.id = "sg-aug";
  aug.kind = SuggestionKind::AugmentTraining;
  aug.true_intent = kCI;
  for (int i = 0; i < 105; ++i) aug.queries.push_back("new query " + std::to_string(i));
  aug.queries.push_back("ci utterance 3");  // already present

  RemediationSuggestion move;
  move.id = "sg-move";
  move.kind = SuggestionKind::MoveIntent;
  move.true_intent = kCI;
  move.target_utterance = "Can you give me the status of my order";
  move.proposed_intent = kCO;

  const auto none = export_augmented_training(def, {aug, move}, {});
  EXPECT_EQ(none.counts().at(kCI), 151u);

  const auto out = export_augmented_training(def, {aug, move}, {"sg-aug", "sg-move"});
  EXPECT_EQ(out.counts().at(kCI), 255u);
  EXPECT_EQ(out.find(kCO)->back(), "Can you give me the status of my order");
  EXPECT_EQ(out.counts().at(kCO), 2u);
  EXPECT_THROW(export_augmented_training(def, {aug}, {"sg-nope"}), UnknownSuggestion);
}

TEST(Trend, DeltasAndOrdering) {
  SessionReport a, b, c;
  a.session_id = "a";
  a.generated_at = "2024-01-02T00:00:00Z";
  a.goal_success_rate = 0.8;
  b.session_id = "b";
  b.generated_at = "2024-01-01T00:00:00Z";
  b.goal_success_rate = 0.7;
  c.session_id = "c";
  c.generated_at = "2024-01-03T00:00:00Z";
  c.goal_success_rate = 0.95;
  const auto t = compare_sessions({a, b, c});
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].session_id, "b");
  EXPECT_FALSE(t[0].delta_success_rate);
  EXPECT_NEAR(*t[1].delta_success_rate, 0.10, 1e-12);
  EXPECT_NEAR(*t[2].delta_success_rate, 0.15, 1e-12);
  EXPECT_THROW(compare_sessions({}), ContractError);
}
