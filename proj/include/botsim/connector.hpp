#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "botsim/goal_gen.hpp"

namespace botsim {

// Label for queries the bot did not route to any intent.
inline constexpr const char* kOutOfDomain = "none";

struct BotReply {
  std::string text;
  std::optional<std::string> dialog;

  bool operator==(const BotReply&) const = default;
};

// Transport to a bot. One instance per episode; never shared across threads.
class Connector {
 public:
  virtual ~Connector() = default;
  virtual std::string start_session() = 0;
  virtual std::vector<BotReply> send(const std::string& session, const std::string& user_text) = 0;
  virtual void close(const std::string& session) = 0;
};

// Builds the connector for one episode. The goal is passed through so test
// doubles can learn ground truth; real connectors ignore it.
using ConnectorFactory =
    std::function<std::unique_ptr<Connector>(const Goal& goal, std::uint64_t episode_seed)>;

inline Json to_json(const BotReply& r) {
  Json j{{"text", r.text}};
  if (r.dialog) j["dialog"] = *r.dialog;
  return j;
}

inline BotReply bot_reply_from_json(const Json& j) {
  BotReply r;
  r.text = j.at("text").get<std::string>();
  if (j.contains("dialog") && !j.at("dialog").is_null()) r.dialog = j.at("dialog").get<std::string>();
  return r;
}

}  // namespace botsim
