#include <gtest/gtest.h>

#include "botsim/dialog_act_map.hpp"
#include "oracles.hpp"

using namespace botsim;

namespace {

BotMessage message(std::string text, Action a, std::optional<std::string> slot = std::nullopt) {
  return BotMessage{std::move(text), a, std::move(slot), std::nullopt, Json::object()};
}

std::vector<std::string> act_names(const DialogActMap& m) {
  std::vector<std::string> out;
  for (const auto& a : m.acts()) out.push_back(a.name);
  return out;
}

oracle::ActList as_list(const DialogActMap& m) {
  oracle::ActList out;
  for (const auto& a : m.acts()) out.push_back({a.name, a.variants});
  return out;
}

BotDefinition template_bot() {
  return load_bot_definition_file(std::string(BOTSIM_DATA_DIR) + "/template_bot.json");
}

BotDefinition chain_xyt() {
  BotDefinition def;
  def.bot_name = "chain";
  def.entities = {{"Email", ValueType::Email, std::nullopt, Json::object()},
                  {"Case_Number", ValueType::AlphaNumericId, std::nullopt, Json::object()}};
  DialogSpec x{"X", {message("May I get your email?", Action::Collect, "Email")}, {{"y", "Y"}}, true, Json::object()};
  DialogSpec y{"Y", {message("What is the case number?", Action::Collect, "Case_Number")}, {{"t", "T"}}, false, Json::object()};
  DialogSpec t{"T", {message("Goodbye!", Action::End)}, {}, false, Json::object()};
  def.dialogs = {x, y, t};
  return def;
}

}  // namespace

TEST(LocalActs, Heuristic) {
  EXPECT_EQ(infer_local_dialog_act(message("May I get your email?", Action::Collect, "Email"), 0), "request_Email");
  EXPECT_EQ(infer_local_dialog_act(message("Is that right?", Action::Confirm, "Email"), 0), "confirm_Email");
  EXPECT_EQ(infer_local_dialog_act(message("Your id is 4", Action::Inform, "Id"), 0), "inform_Id");
  EXPECT_EQ(infer_local_dialog_act(message("One moment", Action::Transfer), 0), "transfer");
  EXPECT_EQ(infer_local_dialog_act(message("Bye", Action::End), 0), "end");
  EXPECT_EQ(infer_local_dialog_act(message("??", Action::Unknown), 2), "unknown_2");
}

TEST(LocalActs, PhrasingsAppendAndRoutersAreEmpty) {
  DialogSpec d{"D",
               {message("May I get your email?", Action::Collect, "Email"),
                message("What's your email address?", Action::Collect, "Email")},
               {},
               false,
               Json::object()};
  const auto m = build_local_map(d);
  ASSERT_EQ(m.acts().size(), 1u);
  EXPECT_EQ(m.acts()[0].name, "request_Email");
  EXPECT_EQ(m.acts()[0].variants, (std::vector<std::string>{"May I get your email?", "What's your email address?"}));

  DialogSpec router{"Router", {}, {{"a", "A"}}, false, Json::object()};
  EXPECT_TRUE(build_local_map(router).empty());
}

TEST(LocalActs, SlotlessInformCountsAsUnknown) {
  DialogSpec d{"D", {message("Hello", Action::Inform), message("??", Action::Unknown)}, {}, false, Json::object()};
  EXPECT_EQ(act_names(build_local_map(d)), (std::vector<std::string>{"unknown_1", "unknown_2"}));
}

TEST(LocalActs, CheckStatusFixture) {
  const auto maps = build_local_maps(template_bot());
  const auto& m = maps.at("Check_the_status_of_an_existing_issue");
  EXPECT_TRUE(m.contains("request_Email_for_Look_Up"));
  EXPECT_TRUE(m.contains("request_Case_Number"));
  EXPECT_EQ(m.find("request_Email_for_Look_Up")->variants, (std::vector<std::string>{"May I get your email?"}));
}

TEST(GlobalActs, ChainUnion) {
  const auto def = chain_xyt();
  auto local = build_local_maps(def);
  local.at("T") = DialogActMap("T");
  local.at("T").append(kDialogSuccess, "Goodbye!");
  const auto global = build_global_maps(local, build_graph(def));
  EXPECT_EQ(act_names(global.at("X")),
            (std::vector<std::string>{"request_Email", "request_Case_Number", kDialogSuccess}));
  EXPECT_EQ(global.at("T"), local.at("T"));
}

TEST(GlobalActs, DiamondIncludesBothBranches) {
  BotDefinition def;
  def.bot_name = "diamond";
  def.entities = {{"B", ValueType::FreeText, std::nullopt, Json::object()},
                  {"C", ValueType::FreeText, std::nullopt, Json::object()}};
  def.dialogs = {{"A", {}, {{"b", "B"}, {"c", "C"}}, false, Json::object()},
                 {"B", {message("b?", Action::Collect, "B")}, {{"d", "D"}}, false, Json::object()},
                 {"C", {message("c?", Action::Collect, "C")}, {{"d", "D"}}, false, Json::object()},
                 {"D", {message("Bye", Action::End)}, {}, false, Json::object()}};
  const auto global = build_global_maps(build_local_maps(def), build_graph(def));
  EXPECT_EQ(act_names(global.at("A")), (std::vector<std::string>{"request_B", "request_C", "end"}));
  EXPECT_EQ(as_list(global.at("A")), oracle::global_acts(def, "A"));
}

TEST(GlobalActs, RandomDefinitionsMatchBruteForce) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const auto def = oracle::random_definition(rng);
    const auto global = build_global_maps(build_local_maps(def), build_graph(def));
    for (const auto& d : def.dialogs)
      ASSERT_EQ(as_list(global.at(d.name)), oracle::global_acts(def, d.name)) << "trial " << trial << " " << d.name;
  }
}

TEST(SuccessMessages, OwnTerminalUsesFirstAndLast) {
  BotDefinition def;
  def.bot_name = "solo";
  def.dialogs = {{"S", {message("first", Action::Inform), message("middle", Action::Inform), message("last", Action::End)}, {}, true, Json::object()}};
  auto maps = build_global_maps(build_local_maps(def), build_graph(def));
  const auto s = infer_success_messages(def, build_graph(def), "S", maps.at("S"));
  EXPECT_EQ(s.intent_success_message, "first");
  EXPECT_EQ(s.dialog_success_message, "last");
  EXPECT_EQ(maps.at("S").needs_review(), (std::vector<std::string>{kIntentSuccess, kDialogSuccess}));
}

TEST(SuccessMessages, RoutedToEndChat) {
  const auto parsed = parse_bot(template_bot());
  const auto& m = parsed.global_maps.at("Check_Order_Status");
  EXPECT_EQ(m.find(kDialogSuccess)->variants, (std::vector<std::string>{"Goodbye!"}));
  EXPECT_EQ(m.find(kIntentSuccess)->variants, (std::vector<std::string>{"Sure, tracking a purchase is quick."}));
}

TEST(SuccessMessages, SingleMessageDialog) {
  BotDefinition def;
  def.bot_name = "one";
  def.dialogs = {{"S", {message("only", Action::Inform)}, {}, true, Json::object()}};
  DialogActMap m("S");
  const auto s = infer_success_messages(def, build_graph(def), "S", m);
  EXPECT_EQ(s.intent_success_message, "only");
  EXPECT_EQ(s.dialog_success_message, "only");
}

TEST(Revisions, AddRemoveAndErrors) {
  auto parsed = parse_bot(template_bot());
  const auto& base = parsed.global_maps.at("End_Chat");
  const auto before = base.find(kDialogSuccess)->variants.size();

  const auto grown = apply_revision(base, Revision{"End_Chat", kDialogSuccess, {"Bye now!"}, {}, "qa", ""});
  EXPECT_EQ(grown.find(kDialogSuccess)->variants.size(), before + 1);
  EXPECT_FALSE(std::count(grown.needs_review().begin(), grown.needs_review().end(), kDialogSuccess));
  EXPECT_EQ(base.find(kDialogSuccess)->variants.size(), before);  // input untouched

  DialogActMap m("D");
  m.append("request_Email", "only one");
  const auto gone = apply_revision(m, Revision{"D", "request_Email", {}, {"only one"}, "", ""});
  EXPECT_FALSE(gone.contains("request_Email"));

  EXPECT_THROW(apply_revision(m, Revision{"D", "request_Phone", {}, {"x"}, "", ""}), UnknownAct);
  EXPECT_THROW(apply_revision(m, Revision{"D", "request_Email", {}, {}, "", ""}), ContractError);

  RevisionLog log;
  const Revision r{"D", "request_Email", {"second"}, {}, "", ""};
  EXPECT_EQ(apply_revision(apply_revision(m, r, &log), inverse(r), &log), m);
  EXPECT_EQ(log.entries().size(), 2u);
}

TEST(Maps, DeterministicSerialisationAndRoundTrip) {
  const auto a = parse_bot(template_bot());
  const auto b = parse_bot(template_bot());
  EXPECT_EQ(to_json(a.global_maps).dump(), to_json(b.global_maps).dump());
  EXPECT_EQ(maps_version(a.global_maps), maps_version(b.global_maps));
  EXPECT_EQ(dialog_act_maps_from_json(to_json(a.global_maps)), a.global_maps);
  EXPECT_EQ(pending_reviews(a.global_maps).size(), 12u);
  EXPECT_THROW(dialog_act_maps_from_json(Json::object()), SchemaError);
  EXPECT_EQ(revision_from_json(to_json(Revision{"D", "a", {"x"}, {"y"}, "me", "t"})),
            (Revision{"D", "a", {"x"}, {"y"}, "me", "t"}));
}
