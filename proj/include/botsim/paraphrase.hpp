#pragma once

// Intent-query paraphrasing: pluggable providers, candidate scoring and
// threshold filtering.

#include <array>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "botsim/metrics.hpp"

namespace botsim {

class ParaphraseProvider {
 public:
  virtual ~ParaphraseProvider() = default;
  // Up to n rewrites, best first.
  virtual std::vector<std::string> generate(const std::string& utterance, std::size_t n) const = 0;
};

// Deterministic rewriter: synonym substitution plus a handful of clause
// templates. Output depends only on (seed, utterance, n).
class BuiltinParaphraser final : public ParaphraseProvider {
 public:
  explicit BuiltinParaphraser(std::uint64_t seed = 0) : seed_(seed) {}

  std::vector<std::string> generate(const std::string& utterance, std::size_t n) const override {
    auto rng = make_rng(seed_, fnv1a64(utterance));
    const auto words = word_tokens(utterance);
    const bool question = !utterance.empty() && trim(utterance).back() == '?';
    std::vector<std::string> out;
    std::set<std::string> seen{to_lower(join(words))};
    for (std::size_t attempt = 0; out.size() < n && attempt < 60 * n; ++attempt) {
      auto rewritten = substitute(words, rng, attempt == 0 ? 1.0 : 0.5);
      auto text = apply_template(rewritten, question, uniform_index(rng, kTemplates));
      auto key = to_lower(join(word_tokens(text)));
      if (seen.insert(key).second) out.push_back(std::move(text));
    }
    return out;
  }

 private:
  static constexpr std::size_t kTemplates = 7;

  static const std::map<std::string, std::vector<std::string>>& synonyms() {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"agent", {"representative", "real person", "human"}},
        {"book", {"reserve", "arrange"}},
        {"buy", {"purchase", "order"}},
        {"cancel", {"call off", "stop"}},
        {"chat", {"conversation", "session"}},
        {"check", {"look up", "verify", "see"}},
        {"connect", {"put me through", "link me up"}},
        {"end", {"finish", "close"}},
        {"find", {"locate", "track down"}},
        {"flight", {"plane ticket", "flight ticket"}},
        {"get", {"obtain", "receive"}},
        {"give", {"provide", "share"}},
        {"help", {"assist", "support"}},
        {"issue", {"problem", "case", "ticket"}},
        {"latest", {"most recent", "current"}},
        {"need", {"require", "want"}},
        {"order", {"purchase", "package"}},
        {"problem", {"issue", "trouble"}},
        {"report", {"file", "log", "submit"}},
        {"sales", {"the sales team", "a salesperson"}},
        {"speak", {"talk"}},
        {"status", {"progress", "state", "update"}},
        {"talk", {"speak", "chat"}},
        {"want", {"would like", "need"}},
    };
    return table;
  }

  static std::string join(const std::vector<std::string>& words) {
    std::string s;
    for (const auto& w : words) {
      if (!s.empty()) s += ' ';
      s += w;
    }
    return s;
  }

  static std::vector<std::string> substitute(const std::vector<std::string>& words, Rng& rng,
                                             double p) {
    std::vector<std::string> out;
    for (const auto& w : words) {
      auto it = synonyms().find(w);
      if (it != synonyms().end() && uniform01(rng) < p)
        out.push_back(it->second[uniform_index(rng, it->second.size())]);
      else
        out.push_back(w);
    }
    return out;
  }

  // Drop a leading "can/could/may i" or "i want/need to" so templates can
  // supply their own framing.
  static std::string core(const std::vector<std::string>& w) {
    std::size_t skip = 0;
    if (w.size() > 2 && (w[0] == "can" || w[0] == "could" || w[0] == "may") && w[1] == "i")
      skip = 2;
    else if (w.size() > 3 && w[0] == "i" && w[2] == "to") skip = 3;
    else if (w.size() > 2 && w[0] == "please") skip = 1;
    return join(std::vector<std::string>(w.begin() + static_cast<std::ptrdiff_t>(skip), w.end()));
  }

  static std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
  }

  static std::string apply_template(const std::vector<std::string>& w, bool question,
                                    std::size_t which) {
    const auto body = core(w);
    const auto all = join(w);
    switch (which) {
      case 0: return capitalize(all) + (question ? "?" : ".");
      case 1: return "I would like to " + body + ".";
      case 2: return "Could you help me " + body + "?";
      case 3: return "Hi, can I " + body + "?";
      case 4: return "Is it possible to " + body + "?";
      case 5: return "I need to " + body + ", please.";
      default: return capitalize(body) + " please.";
    }
  }

  std::uint64_t seed_;
};

// Asks each member for ceil(n / k) rewrites, concatenates in member order and
// drops case-insensitive duplicates.
class EnsembleParaphraser final : public ParaphraseProvider {
 public:
  explicit EnsembleParaphraser(std::vector<std::shared_ptr<const ParaphraseProvider>> members)
      : members_(std::move(members)) {}

  std::vector<std::string> generate(const std::string& utterance, std::size_t n) const override {
    if (members_.empty()) return {};
    const std::size_t share = (n + members_.size() - 1) / members_.size();
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& m : members_)
      for (auto& p : m->generate(utterance, share))
        if (seen.insert(to_lower(p)).second) out.push_back(std::move(p));
    if (out.size() > n) out.resize(n);
    return out;
  }

 private:
  std::vector<std::shared_ptr<const ParaphraseProvider>> members_;
};

class ParaphraseRegistry {
 public:
  void register_provider(std::string id, std::shared_ptr<const ParaphraseProvider> p) {
    providers_[std::move(id)] = std::move(p);
  }
  const ParaphraseProvider& get(const std::string& id) const {
    auto it = providers_.find(id);
    if (it == providers_.end()) throw ProviderUnavailable("no paraphrase provider '" + id + "'");
    return *it->second;
  }
  std::shared_ptr<const ParaphraseProvider> shared(const std::string& id) const {
    get(id);
    return providers_.at(id);
  }

 private:
  std::map<std::string, std::shared_ptr<const ParaphraseProvider>> providers_;
};

struct ParaphraseCandidate {
  std::string source;
  std::string text;
  std::string provider;
  int rank = 1;
  double sim = 0;
  int fuzz = 0;
  bool scored = false;
  bool kept = false;

  bool operator==(const ParaphraseCandidate&) const = default;
};

inline std::vector<ParaphraseCandidate> paraphrase(const ParaphraseRegistry& registry,
                                                   const std::string& provider_id,
                                                   const std::string& utterance, std::size_t n) {
  if (trim(utterance).empty()) throw EmptyUtterance("cannot paraphrase an empty utterance");
  if (n < 1) throw ContractError("paraphrase: n must be >= 1");
  auto texts = registry.get(provider_id).generate(utterance, n);
  if (texts.size() > n) texts.resize(n);
  std::vector<ParaphraseCandidate> out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    ParaphraseCandidate c;
    c.source = utterance;
    c.text = std::move(texts[i]);
    c.provider = provider_id;
    c.rank = static_cast<int>(i) + 1;
    out.push_back(std::move(c));
  }
  return out;
}

inline double similarity_score(const SimilarityScorer& scorer, const std::string& a,
                               const std::string& b) {
  return scorer.score(a, b);
}

inline void score_candidates(std::vector<ParaphraseCandidate>& cands,
                             const SimilarityScorer& scorer) {
  for (auto& c : cands) {
    c.sim = scorer.score(c.source, c.text);
    c.fuzz = fuzz_ratio(c.source, c.text);
    c.scored = true;
  }
}

struct FilterConfig {
  double sim_low = 0.50;
  double sim_high = 0.99;
  int fuzz_max = 70;

  void validate() const {
    if (!(0.0 <= sim_low && sim_low <= sim_high && sim_high <= 1.0))
      throw ContractError("filter: need 0 <= sim_low <= sim_high <= 1");
    if (fuzz_max < 0 || fuzz_max > 100) throw ContractError("filter: fuzz_max must be in [0, 100]");
  }
};

// Keeps candidates that are semantically close (sim within bounds) yet
// lexically different (fuzz at most fuzz_max). Rank order is preserved.
inline std::vector<ParaphraseCandidate> filter_candidates(std::vector<ParaphraseCandidate> cands,
                                                          const FilterConfig& cfg) {
  cfg.validate();
  std::vector<ParaphraseCandidate> kept;
  for (auto& c : cands) {
    if (!c.scored) throw ContractError("filter: candidate '" + c.text + "' has not been scored");
    c.kept = c.sim >= cfg.sim_low && c.sim <= cfg.sim_high && c.fuzz <= cfg.fuzz_max;
    if (c.kept) kept.push_back(std::move(c));
  }
  return kept;
}

inline Json to_json(const ParaphraseCandidate& c) {
  return Json{{"source", c.source}, {"text", c.text}, {"provider", c.provider}, {"rank", c.rank},
              {"sim", c.sim},       {"fuzz", c.fuzz}, {"kept", c.kept}};
}

inline ParaphraseCandidate candidate_from_json(const Json& j) {
  ParaphraseCandidate c;
  c.source = j.at("source").get<std::string>();
  c.text = j.at("text").get<std::string>();
  c.provider = j.value("provider", std::string{});
  c.rank = j.value("rank", 1);
  c.scored = j.contains("sim") && j.contains("fuzz");
  c.sim = j.value("sim", 0.0);
  c.fuzz = j.value("fuzz", 0);
  c.kept = j.value("kept", false);
  return c;
}

}  // namespace botsim
