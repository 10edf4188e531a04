#include <gtest/gtest.h>

#include "botsim/store.hpp"

using namespace botsim;

namespace {

class StoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("botsim_store_" + std::to_string(::getpid()) + "_" +
                                       ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  static BotDefinition bot() {
    return load_bot_definition_file(std::string(BOTSIM_DATA_DIR) + "/template_bot.json");
  }

  fs::path dir;
};

}  // namespace

TEST_F(StoreTest, BotsRoundTripAndList) {
  Store s(dir);
  EXPECT_TRUE(s.list_bots().empty());
  EXPECT_TRUE(s.list_sessions().empty());
  const auto a = s.save_bot(bot());
  const auto b = s.save_bot(bot());
  EXPECT_NE(a, b);
  EXPECT_EQ(s.load_bot(a), bot());
  const auto list = s.list_bots();
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0].id, b);
  EXPECT_EQ(list[0].label, "Template Bot");
  EXPECT_THROW(s.load_bot("bot-missing"), NotFound);

  Store reopened(dir);
  EXPECT_EQ(reopened.list_bots().size(), 2u);
  EXPECT_EQ(reopened.load_bot(b), bot());
}

TEST_F(StoreTest, MapsRevisionsConflict) {
  Store s(dir);
  const auto id = s.save_bot(bot());
  EXPECT_FALSE(s.has_maps(id));
  EXPECT_THROW(s.load_maps(id), NotFound);
  const auto parsed = parse_bot(bot());
  const auto v1 = s.save_maps(id, parsed.global_maps);
  EXPECT_EQ(s.load_maps(id).version, v1);
  EXPECT_EQ(s.load_maps(id).maps, parsed.global_maps);

  auto approve = [](DialogActMaps& m) { m.at("End_Chat").clear_review(kDialogSuccess); };
  const auto v2 = s.revise_maps(id, v1, approve);
  EXPECT_NE(v2.version, v1);
  EXPECT_EQ(s.load_maps(id).version, v2.version);
  EXPECT_THROW(s.revise_maps(id, v1, approve), VersionConflict);

  s.save_graph(id, parsed.graph);
  EXPECT_EQ(to_json(s.load_graph(id)), to_json(parsed.graph));
}

TEST_F(StoreTest, GoalsAndOwner) {
  Store s(dir);
  const auto id = s.save_bot(bot());
  Goal g;
  g.id = "X_0";
  g.goal_name = "X";
  g.inform_slots = {{"Intent", "hi"}};
  g.request_slots = {{"X", "UNK"}};
  const auto gid = s.save_goals(id, {g}, Json{{"seed", 3}});
  EXPECT_EQ(s.load_goals(gid), std::vector<Goal>{g});
  EXPECT_EQ(s.load_goals_meta(gid).at("seed"), 3);
  EXPECT_EQ(s.goals_owner(gid), id);
  EXPECT_THROW(s.save_goals("bot-none", {g}), NotFound);
  EXPECT_THROW(s.load_goals("goals-none"), NotFound);
}

TEST_F(StoreTest, SessionLifecycle) {
  Store s(dir);
  const auto bot_id = s.save_bot(bot());
  SessionRecord rec;
  rec.bot_id = bot_id;
  rec.config = Json{{"seed", 1}};
  const auto sid = s.create_session(rec);
  EXPECT_EQ(s.load_session(sid).status, SessionStatus::Draft);
  EXPECT_THROW(s.transition(sid, SessionStatus::Done), VersionConflict);
  s.transition(sid, SessionStatus::NeedsReview);
  s.transition(sid, SessionStatus::Running);
  s.put_artifact(sid, "transcripts", "transcripts.jsonl", "line\n");
  EXPECT_EQ(s.read_artifact(sid, "transcripts"), "line\n");
  EXPECT_THROW(s.read_artifact(sid, "report"), NotFound);
  const auto done = s.transition(sid, SessionStatus::Done);
  EXPECT_EQ(done.artifacts.at("transcripts"), "sessions/" + sid + "/transcripts.jsonl");
  EXPECT_THROW(s.transition(sid, SessionStatus::Running), VersionConflict);
  EXPECT_EQ(session_record_from_json(to_json(done)), done);

  rec.goals_id = "goals-none";
  EXPECT_THROW(s.create_session(rec), NotFound);
}

TEST_F(StoreTest, TransitionsTable) {
  using S = SessionStatus;
  EXPECT_TRUE(can_transition(S::Draft, S::Running));
  EXPECT_TRUE(can_transition(S::Running, S::Failed));
  EXPECT_FALSE(can_transition(S::NeedsReview, S::Done));
  EXPECT_FALSE(can_transition(S::Failed, S::Running));
  for (auto st : {S::Draft, S::NeedsReview, S::Running, S::Done, S::Failed})
    EXPECT_EQ(parse_session_status(to_string(st)), st);
  EXPECT_THROW(parse_session_status("Paused"), SchemaError);
}

TEST_F(StoreTest, RunningSessionsFailAfterRestart) {
  std::string sid;
  {
    Store s(dir);
    SessionRecord rec;
    rec.bot_id = s.save_bot(bot());
    sid = s.create_session(rec);
    s.transition(sid, SessionStatus::Running);
  }
  Store again(dir);
  const auto rec = again.load_session(sid);
  EXPECT_EQ(rec.status, SessionStatus::Failed);
  EXPECT_EQ(rec.reason, "interrupted");
}
