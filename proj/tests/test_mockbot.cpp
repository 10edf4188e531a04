#include <gtest/gtest.h>

#include "botsim/goal_gen.hpp"
#include "botsim/mockbot.hpp"
#include "botsim/simulator.hpp"

using namespace botsim;

namespace {

const std::string kCI = "Check_the_status_of_an_existing_issue";
const std::string kCO = "Check_Order_Status";

std::shared_ptr<const BotDefinition> template_bot() {
  static const auto def = std::make_shared<const BotDefinition>(
      load_bot_definition_file(std::string(BOTSIM_DATA_DIR) + "/template_bot.json"));
  return def;
}

std::vector<std::string> texts(const std::vector<BotReply>& r) {
  std::vector<std::string> out;
  for (const auto& x : r) out.push_back(x.text);
  return out;
}

FaultProfile ci_to_co(double p) {
  FaultProfile f;
  f.intent_confusion[kCI] = {{kCI, 1.0 - p}, {kCO, p}};
  return f;
}

}  // namespace

TEST(Profile, Validation) {
  const auto& def = *template_bot();
  EXPECT_NO_THROW(validate_profile(ci_to_co(0.2), def));
  FaultProfile short_row;
  short_row.intent_confusion[kCI] = {{kCI, 0.7}, {kCO, 0.2}};
  EXPECT_THROW(validate_profile(short_row, def), ProfileInvalid);
  FaultProfile unknown;
  unknown.intent_confusion[kCI] = {{"Nope", 1.0}};
  EXPECT_THROW(validate_profile(unknown, def), ProfileInvalid);
  FaultProfile bad_row;
  bad_row.intent_confusion["Nope"] = {{kCI, 1.0}};
  EXPECT_THROW(validate_profile(bad_row, def), ProfileInvalid);
  FaultProfile ner;
  ner.ner_miss_prob["Case_Number"] = 1.5;
  EXPECT_THROW(validate_profile(ner, def), ProfileInvalid);
  FaultProfile ood;
  ood.intent_confusion[kCI] = {{kOutOfDomain, 1.0}};
  EXPECT_NO_THROW(validate_profile(ood, def));
  EXPECT_THROW(MockBot(template_bot(), short_row, 1), ProfileInvalid);
}

TEST(Profile, JsonRoundTrip) {
  const auto p = profile_from_json(read_json_file(std::string(BOTSIM_DATA_DIR) + "/faults_ci_to_co.json"));
  EXPECT_DOUBLE_EQ(p.intent_confusion.at(kCI).at(kCO), 0.2);
  EXPECT_EQ(p.seed, 11u);
  EXPECT_EQ(profile_from_json(to_json(p)), p);
  EXPECT_THROW(profile_from_json(Json::array()), ProfileInvalid);
  EXPECT_THROW(profile_from_json(Json{{"ner_miss_prob", {{"x", "high"}}}}), ProfileInvalid);
}

TEST(Mock, WalksTheScript) {
  MockBot bot(template_bot(), FaultProfile{}, 1);
  const auto s = bot.start_session();
  auto r = bot.send(s, "where is my order");
  EXPECT_EQ(texts(r), (std::vector<std::string>{"Sure, tracking a purchase is quick.", "Please enter your order number."}));
  EXPECT_EQ(r[0].dialog, kCO);
  EXPECT_EQ(texts(bot.send(s, "no idea")), (std::vector<std::string>{"Please enter your order number."}));
  r = bot.send(s, "it is 48213");
  EXPECT_EQ(texts(r), (std::vector<std::string>{"Your order has shipped and should arrive in three to five days.",
                                                "Thanks for chatting with us today.", "Goodbye!"}));
  EXPECT_EQ(r.back().dialog, "End_Chat");
  EXPECT_TRUE(bot.send(s, "hello?").empty());
}

TEST(Mock, UnknownTextFallsBack) {
  MockBot bot(template_bot(), FaultProfile{}, 1);
  const auto s = bot.start_session();
  EXPECT_EQ(bot.true_intent("qwerty"), kOutOfDomain);
  EXPECT_EQ(texts(bot.send(s, "qwerty")), (std::vector<std::string>{kMockFallback}));
  EXPECT_EQ(bot.send(s, "track my package").at(0).dialog, kCO);
}

TEST(Mock, HintsResolveUnseenText) {
  MockHints h;
  h.text_intent["show me where my parcel is"] = kCO;
  h.provenance["whats the state of my ticket"] = "any update on my support ticket?";
  MockBot bot(template_bot(), FaultProfile{}, 1, h);
  EXPECT_EQ(bot.true_intent("show me where my parcel is"), kCO);
  EXPECT_EQ(bot.true_intent("whats the state of my ticket"), kCI);
  EXPECT_EQ(bot.true_intent("  where is my order "), kCO);
}

TEST(Mock, ForcedConfusionMisroutes) {
  MockBot bot(template_bot(), ci_to_co(1.0), 3);
  for (int i = 0; i < 5; ++i) {
    const auto s = bot.start_session();
    EXPECT_EQ(bot.send(s, "Can I check the latest status of my reported issue?").at(0).dialog, kCO);
    bot.close(s);
  }
}

TEST(Mock, ConfusionRateIsRoughlyRight) {
  MockBot bot(template_bot(), ci_to_co(0.3), 5);
  int misrouted = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto s = bot.start_session();
    misrouted += bot.send(s, "what's happening with my case").at(0).dialog == kCO;
  }
  EXPECT_NEAR(misrouted / 2000.0, 0.3, 0.04);
}

TEST(Mock, NerMissCausesNerError) {
  FaultProfile f;
  f.ner_miss_prob["Order_Number"] = 1.0;
  const auto def = template_bot();
  auto maps = parse_bot(*def).global_maps;
  for (auto& [_, m] : maps)
    for (const auto& a : std::vector<std::string>(m.needs_review())) m.clear_review(a);
  const auto goals = generate_goals(maps.at(kCO), generate_ontology(*def, 1), {"where is my order"}, 1, 1);
  MockBot bot(def, f, 1);
  const auto ep = run_episode(bot, goals.at(0), maps, default_templates(), SimConfig{}, 1);
  EXPECT_EQ(ep.outcome, Outcome::NERError);
  EXPECT_EQ(ep.error_slot, "Order_Number");

  MockBot clean(def, FaultProfile{}, 1);
  EXPECT_EQ(run_episode(clean, goals.at(0), maps, default_templates(), SimConfig{}, 1).outcome, Outcome::Success);
}

TEST(Mock, ExtraRepromptRepeatsOnce) {
  FaultProfile f;
  f.extra_reprompt_prob = 1.0;
  MockBot bot(template_bot(), f, 1);
  const auto s = bot.start_session();
  bot.send(s, "where is my order");
  EXPECT_EQ(texts(bot.send(s, "48213")), (std::vector<std::string>{"Please enter your order number."}));
  EXPECT_EQ(bot.send(s, "48213").at(0).text, "Your order has shipped and should arrive in three to five days.");
}

TEST(Mock, PathHintAsksForNextIntent) {
  MockHints h;
  h.path = std::vector<std::string>{kCO, "End_Chat"};
  MockBot bot(template_bot(), FaultProfile{}, 1, h);
  const auto s = bot.start_session();
  bot.send(s, "where is my order");
  EXPECT_EQ(bot.send(s, "48213").back().text, kMockAnythingElse);
  EXPECT_EQ(texts(bot.send(s, "bye")), (std::vector<std::string>{"Thanks for chatting with us today.", "Goodbye!"}));
}

TEST(Mock, DeterministicPerSeed) {
  auto run = [](std::uint64_t seed) {
    MockBot bot(template_bot(), ci_to_co(0.5), seed);
    std::string trace;
    for (int i = 0; i < 40; ++i) {
      const auto s = bot.start_session();
      trace += bot.send(s, "what's happening with my case").at(0).dialog.value_or("?") + ";";
    }
    return trace;
  };
  EXPECT_EQ(run(7), run(7));
  EXPECT_NE(run(7), run(8));
}

TEST(Mock, ClosedSessionsRefuseMessages) {
  MockBot bot(template_bot(), FaultProfile{}, 1);
  const auto s = bot.start_session();
  EXPECT_THROW(bot.send("other", "hi"), SessionClosed);
  bot.close(s);
  EXPECT_THROW(bot.send(s, "hi"), SessionClosed);
}
