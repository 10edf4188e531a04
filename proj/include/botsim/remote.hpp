#pragma once

// HTTP clients: paraphrase and similarity services, and a bot connector
// speaking a small session protocol.

#include <chrono>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "botsim/connector.hpp"
#include "botsim/paraphrase.hpp"

namespace botsim {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // always starts with '/'
};

inline Endpoint parse_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ContractError("url '" + url + "' lacks a scheme");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

struct RemoteOptions {
  int timeout_ms = 5000;
  int retries = 2;
  int backoff_ms = 100;
};

namespace detail {

inline std::string join_path(const std::string& base, const std::string& suffix) {
  if (base.empty() || base == "/") return suffix;
  if (base.back() == '/') return base.substr(0, base.size() - 1) + suffix;
  return base + suffix;
}

// POST with retries; returns the parsed body of the first 2xx response or
// throws Err with the last failure.
template <typename Err>
Json post_json(const Endpoint& ep, const std::string& path, const Json& body, const RemoteOptions& opt) {
  std::string last = "no attempt made";
  for (int attempt = 0; attempt <= opt.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(opt.backoff_ms * attempt));
    httplib::Client cli(ep.origin);
    const auto timeout = std::chrono::milliseconds(opt.timeout_ms);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    auto res = cli.Post(path, body.dump(), "application/json");
    if (!res) {
      last = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last = "HTTP " + std::to_string(res->status);
      if (res->status < 500) break;  // a client error will not go away on retry
      continue;
    }
    try {
      return Json::parse(res->body);
    } catch (const Json::parse_error& e) {
      last = std::string("malformed response: ") + e.what();
    }
  }
  throw Err(ep.origin + path + ": " + last);
}

}  // namespace detail

// POST {utterance, n} -> {paraphrases: [...]}
class RemoteParaphraser final : public ParaphraseProvider {
 public:
  explicit RemoteParaphraser(const std::string& url, RemoteOptions opt = {})
      : ep_(parse_endpoint(url)), opt_(opt) {}

  std::vector<std::string> generate(const std::string& utterance, std::size_t n) const override {
    auto j = detail::post_json<ProviderUnavailable>(ep_, ep_.path, Json{{"utterance", utterance}, {"n", n}}, opt_);
    if (!j.contains("paraphrases") || !j.at("paraphrases").is_array())
      throw ProviderUnavailable(ep_.origin + ep_.path + ": response lacks a paraphrases list");
    std::vector<std::string> out;
    for (const auto& p : j.at("paraphrases"))
      if (p.is_string()) out.push_back(p.get<std::string>());
    if (out.size() > n) out.resize(n);
    return out;
  }

 private:
  Endpoint ep_;
  RemoteOptions opt_;
};

// POST {a, b} -> {score}
class RemoteScorer final : public SimilarityScorer {
 public:
  explicit RemoteScorer(const std::string& url, RemoteOptions opt = {})
      : ep_(parse_endpoint(url)), opt_(opt) {}

  double score(const std::string& a, const std::string& b) const override {
    auto j = detail::post_json<ScorerUnavailable>(ep_, ep_.path, Json{{"a", a}, {"b", b}}, opt_);
    if (!j.contains("score") || !j.at("score").is_number())
      throw ScorerUnavailable(ep_.origin + ep_.path + ": response lacks a numeric score");
    const double s = j.at("score").get<double>();
    if (!(s >= 0.0 && s <= 1.0)) throw ScorerUnavailable("scorer returned " + std::to_string(s) + " outside [0, 1]");
    return s;
  }

 private:
  Endpoint ep_;
  RemoteOptions opt_;
};

// Session protocol:
//   POST {base}/sessions                  -> {session}
//   POST {base}/sessions/{id}/messages    {text} -> {messages: [{text, dialog?}]}
//   POST {base}/sessions/{id}/close
class HttpConnector final : public Connector {
 public:
  explicit HttpConnector(const std::string& url, RemoteOptions opt = {})
      : ep_(parse_endpoint(url)), opt_(opt) {}

  std::string start_session() override {
    auto j = post(detail::join_path(ep_.path, "/sessions"), Json::object());
    if (!j.contains("session") || !j.at("session").is_string())
      throw ConnectorError("bot did not return a session id");
    return j.at("session").get<std::string>();
  }

  std::vector<BotReply> send(const std::string& session, const std::string& text) override {
    auto j = post(detail::join_path(ep_.path, "/sessions/" + session + "/messages"), Json{{"text", text}});
    std::vector<BotReply> out;
    if (!j.contains("messages") || !j.at("messages").is_array())
      throw ConnectorError("bot response lacks a messages list");
    for (const auto& m : j.at("messages")) out.push_back(bot_reply_from_json(m));
    return out;
  }

  void close(const std::string& session) override {
    post(detail::join_path(ep_.path, "/sessions/" + session + "/close"), Json::object());
  }

 private:
  Json post(const std::string& path, const Json& body) {
    return detail::post_json<ConnectorError>(ep_, path, body, opt_);
  }

  Endpoint ep_;
  RemoteOptions opt_;
};

inline ConnectorFactory make_http_factory(std::string url, RemoteOptions opt = {}) {
  return [url = std::move(url), opt](const Goal&, std::uint64_t) {
    return std::unique_ptr<Connector>(std::make_unique<HttpConnector>(url, opt));
  };
}

}  // namespace botsim
