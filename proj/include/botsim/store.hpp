#pragma once

// Directory-tree store for bots, dialog-act maps, goals, sessions and their
// artifacts, indexed by a manifest rewritten with atomic rename.

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "botsim/bot_def.hpp"
#include "botsim/conv_graph.hpp"
#include "botsim/dialog_act_map.hpp"
#include "botsim/goal_gen.hpp"

namespace botsim {

namespace fs = std::filesystem;

enum class SessionStatus { Draft, NeedsReview, Running, Done, Failed };

inline std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Draft: return "Draft";
    case SessionStatus::NeedsReview: return "NeedsReview";
    case SessionStatus::Running: return "Running";
    case SessionStatus::Done: return "Done";
    case SessionStatus::Failed: return "Failed";
  }
  return "Draft";
}

inline SessionStatus parse_session_status(std::string_view s) {
  if (s == "Draft") return SessionStatus::Draft;
  if (s == "NeedsReview") return SessionStatus::NeedsReview;
  if (s == "Running") return SessionStatus::Running;
  if (s == "Done") return SessionStatus::Done;
  if (s == "Failed") return SessionStatus::Failed;
  throw SchemaError("unknown session status '" + std::string(s) + "'");
}

// Forward-only lifecycle; review may be skipped when nothing is pending.
inline bool can_transition(SessionStatus from, SessionStatus to) {
  using S = SessionStatus;
  switch (from) {
    case S::Draft: return to == S::NeedsReview || to == S::Running;
    case S::NeedsReview: return to == S::Running;
    case S::Running: return to == S::Done || to == S::Failed;
    case S::Done:
    case S::Failed: return false;
  }
  return false;
}

struct SessionRecord {
  std::string id;
  std::string bot_id;
  std::string goals_id;
  std::string created_at;
  SessionStatus status = SessionStatus::Draft;
  std::string reason;
  Json config = Json::object();
  std::map<std::string, std::string> artifacts;  // name -> path relative to the store root

  bool operator==(const SessionRecord&) const = default;
};

inline Json to_json(const SessionRecord& r) {
  Json art = Json::object();
  for (const auto& [k, v] : r.artifacts) art[k] = v;
  return Json{{"id", r.id},           {"bot_id", r.bot_id},
              {"goals_id", r.goals_id}, {"created_at", r.created_at},
              {"status", std::string(to_string(r.status))}, {"reason", r.reason},
              {"config", r.config},   {"artifacts", art}};
}

inline SessionRecord session_record_from_json(const Json& j) {
  try {
    SessionRecord r;
    r.id = j.at("id").get<std::string>();
    r.bot_id = j.at("bot_id").get<std::string>();
    r.goals_id = j.value("goals_id", std::string{});
    r.created_at = j.value("created_at", std::string{});
    r.status = parse_session_status(j.at("status").get<std::string>());
    r.reason = j.value("reason", std::string{});
    r.config = j.value("config", Json::object());
    if (j.contains("artifacts"))
      for (auto it = j.at("artifacts").begin(); it != j.at("artifacts").end(); ++it)
        r.artifacts[it.key()] = it->get<std::string>();
    return r;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("session record: ") + e.what());
  }
}

struct IndexEntry {
  std::string id;
  std::string created_at;
  std::string label;  // bot name, or owning bot id for goals/sessions
  std::size_t seq = 0;
};

struct VersionedMaps {
  DialogActMaps maps;
  std::string version;
};

class Store {
 public:
  // Opens (or initialises) a store. Sessions left Running by a previous
  // process are marked Failed with reason "interrupted".
  explicit Store(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_);
    if (fs::exists(index_path())) load_index();
    else write_index();
    for (const auto& e : sessions_) {
      auto rec = load_session(e.id);
      if (rec.status == SessionStatus::Running) {
        rec.status = SessionStatus::Failed;
        rec.reason = "interrupted";
        write_json_file(session_dir(rec.id) / "session.json", to_json(rec));
      }
    }
  }

  const fs::path& root() const { return root_; }

  // --- bots ---
  std::string save_bot(const BotDefinition& def) {
    std::lock_guard lock(mu_);
    auto id = next_id("bot");
    write_json_file(bot_dir(id) / "definition.json", to_json(def));
    bots_.push_back({id, now_iso(), def.bot_name, seq_});
    write_index();
    return id;
  }

  BotDefinition load_bot(const std::string& id) const {
    std::lock_guard lock(mu_);
    require(bots_, id, "bot");
    return definition_from_json(read_json_file(bot_dir(id) / "definition.json"));
  }

  std::vector<IndexEntry> list_bots() const {
    std::lock_guard lock(mu_);
    return newest_first(bots_);
  }

  // --- maps and graph ---
  std::string save_maps(const std::string& bot_id, const DialogActMaps& maps) {
    std::lock_guard lock(mu_);
    require(bots_, bot_id, "bot");
    return write_maps(bot_id, maps);
  }

  bool has_maps(const std::string& bot_id) const {
    std::lock_guard lock(mu_);
    return fs::exists(bot_dir(bot_id) / "maps" / "current");
  }

  VersionedMaps load_maps(const std::string& bot_id) const {
    std::lock_guard lock(mu_);
    require(bots_, bot_id, "bot");
    const auto current = bot_dir(bot_id) / "maps" / "current";
    if (!fs::exists(current)) throw NotFound("bot '" + bot_id + "' has not been parsed yet");
    const auto version = trim(read_file(current));
    return {dialog_act_maps_from_json(read_json_file(bot_dir(bot_id) / "maps" / (version + ".json"))), version};
  }

  // Applies `change` to the current maps if they are still at `base_version`.
  template <typename Fn>
  VersionedMaps revise_maps(const std::string& bot_id, const std::string& base_version, Fn&& change) {
    std::lock_guard lock(mu_);
    auto cur = load_maps(bot_id);
    if (cur.version != base_version)
      throw VersionConflict("maps of bot '" + bot_id + "' are at version " + cur.version + ", not " +
                            base_version);
    change(cur.maps);
    cur.version = write_maps(bot_id, cur.maps);
    return cur;
  }

  void save_graph(const std::string& bot_id, const ConversationGraph& g) {
    std::lock_guard lock(mu_);
    write_json_file(bot_dir(bot_id) / "graph.json", to_json(g));
  }

  ConversationGraph load_graph(const std::string& bot_id) const {
    std::lock_guard lock(mu_);
    require(bots_, bot_id, "bot");
    const auto p = bot_dir(bot_id) / "graph.json";
    if (!fs::exists(p)) throw NotFound("bot '" + bot_id + "' has no graph yet");
    return graph_from_json(read_json_file(p));
  }

  // --- goals ---
  std::string save_goals(const std::string& bot_id, const std::vector<Goal>& goals, const Json& extra = {}) {
    std::lock_guard lock(mu_);
    require(bots_, bot_id, "bot");
    auto id = next_id("goals");
    write_json_file(root_ / "goals" / (id + ".json"), goals_to_json(goals));
    if (!extra.is_null()) write_json_file(root_ / "goals" / (id + ".meta.json"), extra);
    goals_.push_back({id, now_iso(), bot_id, seq_});
    write_index();
    return id;
  }

  std::vector<Goal> load_goals(const std::string& id) const {
    std::lock_guard lock(mu_);
    require(goals_, id, "goal set");
    return goals_from_json(read_json_file(root_ / "goals" / (id + ".json")));
  }

  Json load_goals_meta(const std::string& id) const {
    std::lock_guard lock(mu_);
    require(goals_, id, "goal set");
    const auto p = root_ / "goals" / (id + ".meta.json");
    return fs::exists(p) ? read_json_file(p) : Json::object();
  }

  std::string goals_owner(const std::string& id) const {
    std::lock_guard lock(mu_);
    return require(goals_, id, "goal set").label;
  }

  // --- sessions ---
  std::string create_session(SessionRecord rec) {
    std::lock_guard lock(mu_);
    require(bots_, rec.bot_id, "bot");
    if (!rec.goals_id.empty()) require(goals_, rec.goals_id, "goal set");
    rec.id = next_id("session");
    rec.created_at = now_iso();
    rec.status = SessionStatus::Draft;
    write_json_file(session_dir(rec.id) / "session.json", to_json(rec));
    sessions_.push_back({rec.id, rec.created_at, rec.bot_id, seq_});
    write_index();
    return rec.id;
  }

  SessionRecord load_session(const std::string& id) const {
    std::lock_guard lock(mu_);
    require(sessions_, id, "session");
    return session_record_from_json(read_json_file(session_dir(id) / "session.json"));
  }

  std::vector<SessionRecord> list_sessions() const {
    std::lock_guard lock(mu_);
    std::vector<SessionRecord> out;
    for (const auto& e : newest_first(sessions_)) out.push_back(load_session(e.id));
    return out;
  }

  // Moves a session to `to`; throws VersionConflict on an illegal move.
  SessionRecord transition(const std::string& id, SessionStatus to, const std::string& reason = {}) {
    std::lock_guard lock(mu_);
    auto rec = load_session(id);
    if (!can_transition(rec.status, to))
      throw VersionConflict("session '" + id + "' cannot go from " + std::string(to_string(rec.status)) +
                            " to " + std::string(to_string(to)));
    rec.status = to;
    rec.reason = reason;
    write_json_file(session_dir(id) / "session.json", to_json(rec));
    return rec;
  }

  // Writes an artifact file and records it on the session.
  void put_artifact(const std::string& session_id, const std::string& name, const std::string& filename,
                    std::string_view content) {
    std::lock_guard lock(mu_);
    auto rec = load_session(session_id);
    const auto rel = fs::path("sessions") / session_id / filename;
    write_file_atomic(root_ / rel, content);
    rec.artifacts[name] = rel.generic_string();
    write_json_file(session_dir(session_id) / "session.json", to_json(rec));
  }

  std::string read_artifact(const std::string& session_id, const std::string& name) const {
    std::lock_guard lock(mu_);
    auto rec = load_session(session_id);
    auto it = rec.artifacts.find(name);
    if (it == rec.artifacts.end()) throw NotFound("session '" + session_id + "' has no " + name);
    return read_file(root_ / it->second);
  }

  fs::path session_dir(const std::string& id) const { return root_ / "sessions" / id; }

 private:
  fs::path index_path() const { return root_ / "index.json"; }
  fs::path bot_dir(const std::string& id) const { return root_ / "bots" / id; }

  std::string write_maps(const std::string& bot_id, const DialogActMaps& maps) {
    const auto version = maps_version(maps);
    const auto dir = bot_dir(bot_id) / "maps";
    write_json_file(dir / (version + ".json"), to_json(maps));
    write_file_atomic(dir / "current", version + "\n");
    return version;
  }

  static const IndexEntry& require(const std::vector<IndexEntry>& list, const std::string& id,
                                   const char* what) {
    for (const auto& e : list)
      if (e.id == id) return e;
    throw NotFound(std::string("no ") + what + " with id '" + id + "'");
  }

  static std::vector<IndexEntry> newest_first(std::vector<IndexEntry> v) {
    std::sort(v.begin(), v.end(), [](const IndexEntry& a, const IndexEntry& b) {
      if (a.created_at != b.created_at) return a.created_at > b.created_at;
      return a.seq > b.seq;
    });
    return v;
  }

  std::string next_id(const char* kind) { return std::string(kind) + "-" + std::to_string(++seq_); }

  static Json entries_to_json(const std::vector<IndexEntry>& v) {
    Json arr = Json::array();
    for (const auto& e : v)
      arr.push_back(Json{{"id", e.id}, {"created_at", e.created_at}, {"label", e.label}, {"seq", e.seq}});
    return arr;
  }

  static std::vector<IndexEntry> entries_from_json(const Json& j) {
    std::vector<IndexEntry> out;
    for (const auto& e : j)
      out.push_back({e.at("id").get<std::string>(), e.at("created_at").get<std::string>(),
                     e.value("label", std::string{}), e.value("seq", std::size_t{0})});
    return out;
  }

  void write_index() const {
    write_json_file(index_path(), Json{{"seq", seq_},
                                       {"bots", entries_to_json(bots_)},
                                       {"goals", entries_to_json(goals_)},
                                       {"sessions", entries_to_json(sessions_)}});
  }

  void load_index() {
    const auto j = read_json_file(index_path());
    try {
      seq_ = j.at("seq").get<std::size_t>();
      bots_ = entries_from_json(j.at("bots"));
      goals_ = entries_from_json(j.at("goals"));
      sessions_ = entries_from_json(j.at("sessions"));
    } catch (const Json::exception& e) {
      throw SchemaError(std::string("store index: ") + e.what());
    }
  }

  fs::path root_;
  mutable std::recursive_mutex mu_;
  std::size_t seq_ = 0;
  std::vector<IndexEntry> bots_, goals_, sessions_;
};

}  // namespace botsim
