#include <gtest/gtest.h>

#include <thread>

#include "botsim/remote.hpp"
#include "oracles.hpp"

using namespace botsim;

namespace {

class FixedProvider final : public ParaphraseProvider {
 public:
  explicit FixedProvider(std::vector<std::string> out) : out_(std::move(out)) {}
  std::vector<std::string> generate(const std::string&, std::size_t n) const override {
    auto v = out_;
    if (v.size() > n) v.resize(n);
    return v;
  }

 private:
  std::vector<std::string> out_;
};

std::string random_text(std::mt19937_64& rng, std::size_t max_len) {
  static const std::string alphabet = "abcde fgh";
  std::string s(rng() % (max_len + 1), ' ');
  for (auto& c : s) c = alphabet[rng() % alphabet.size()];
  return s;
}

ParaphraseCandidate scored(double sim, int fuzz) {
  ParaphraseCandidate c;
  c.source = "s";
  c.text = "t";
  c.sim = sim;
  c.fuzz = fuzz;
  c.scored = true;
  return c;
}

}  // namespace

TEST(Fuzz, Examples) {
  EXPECT_EQ(fuzz_ratio("abc", "abc"), 100);
  EXPECT_EQ(fuzz_ratio("abcd", ""), 0);
  EXPECT_EQ(fuzz_ratio("", ""), 100);
  EXPECT_EQ(fuzz_ratio("kitten", "sitting"), 62);
  EXPECT_EQ(indel_distance("kitten", "sitting"), 5u);
}

TEST(Fuzz, MatchesLcsOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_text(rng, 30), b = random_text(rng, 30);
    ASSERT_EQ(fuzz_ratio(a, b), oracle::fuzz(a, b)) << '"' << a << "\" vs \"" << b << '"';
    ASSERT_EQ(fuzz_ratio(a, b), fuzz_ratio(b, a));
  }
}

TEST(Similarity, IdentityAndDisjoint) {
  TfidfScorer s({"check my order status", "reset my password"});
  EXPECT_DOUBLE_EQ(s.score("check my order status", "check my order status"), 1.0);
  EXPECT_DOUBLE_EQ(s.score("reset password", "order status"), 0.0);
  TfidfScorer empty;
  EXPECT_DOUBLE_EQ(empty.score("same words", "Same words"), 1.0);
}

TEST(Similarity, HandTfidfOnTwoDocuments) {
  const std::string a = "check my order status", b = "what is my order status";
  TfidfScorer s({a, b});
  // df = 1 terms weigh ln(3/2)+1, shared terms weigh ln(3/3)+1 = 1.
  // a: check, "check my" rare; my, order, status, "my order", "order status" shared
  // b: what, is, "what is", "is my" rare; the same five shared
  const double rare = std::log(1.5) + 1.0;
  const double na = std::sqrt(2 * rare * rare + 5), nb = std::sqrt(4 * rare * rare + 5);
  const double expected = 5.0 / (na * nb);
  EXPECT_NEAR(s.score(a, b), expected, 1e-12);
  EXPECT_GT(expected, 0.0);
  EXPECT_LT(expected, 1.0);
  EXPECT_NEAR(similarity_score(s, b, a), expected, 1e-12);
}

TEST(Filter, Bounds) {
  const FilterConfig cfg{0.5, 0.99, 70};
  EXPECT_EQ(filter_candidates({scored(0.9, 40)}, cfg).size(), 1u);
  EXPECT_TRUE(filter_candidates({scored(0.3, 40)}, cfg).empty());
  EXPECT_TRUE(filter_candidates({scored(0.9, 95)}, cfg).empty());
  EXPECT_TRUE(filter_candidates({scored(1.0, 40)}, cfg).empty());
  auto unscored = scored(0.9, 40);
  unscored.scored = false;
  EXPECT_THROW(filter_candidates({unscored}, cfg), ContractError);
  EXPECT_THROW(filter_candidates({}, FilterConfig{0.9, 0.5, 70}), ContractError);
}

TEST(Filter, Idempotent) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  const FilterConfig cfg;
  for (int i = 0; i < 1000; ++i) {
    std::vector<ParaphraseCandidate> cands;
    for (std::size_t k = rng() % 12; k > 0; --k) cands.push_back(scored(u(rng), static_cast<int>(rng() % 101)));
    const auto once = filter_candidates(cands, cfg);
    ASSERT_EQ(filter_candidates(once, cfg), once);
  }
}

TEST(Paraphrase, BuiltinDeterministic) {
  ParaphraseRegistry reg;
  reg.register_provider("builtin", std::make_shared<BuiltinParaphraser>(1));
  const auto a = paraphrase(reg, "builtin", "May I book a flight?", 3);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a, paraphrase(reg, "builtin", "May I book a flight?", 3));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].rank, static_cast<int>(i) + 1);
    EXPECT_NE(to_lower(a[i].text), "may i book a flight?");
  }
  EXPECT_THROW(paraphrase(reg, "builtin", "   ", 3), EmptyUtterance);
  EXPECT_THROW(paraphrase(reg, "missing", "hi", 3), ProviderUnavailable);
}

TEST(Paraphrase, EnsembleSharesAndDedupes) {
  auto a = std::make_shared<FixedProvider>(std::vector<std::string>{"one", "two", "three"});
  auto b = std::make_shared<FixedProvider>(std::vector<std::string>{"TWO", "four", "five"});
  EnsembleParaphraser e({a, b});
  // ceil(5/2) = 3 from each, "TWO" duplicates "two"
  EXPECT_EQ(e.generate("x", 5), (std::vector<std::string>{"one", "two", "three", "four", "five"}));
  EXPECT_EQ(e.generate("x", 2), (std::vector<std::string>{"one", "TWO"}));  // one from each
}

TEST(Paraphrase, RemoteProvider) {
  httplib::Server srv;
  srv.Post("/paraphrase", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = Json::parse(req.body);
    Json out = Json::array();
    for (int i = 1; i <= 5; ++i) out.push_back(body.at("utterance").get<std::string>() + " v" + std::to_string(i));
    res.set_content(Json{{"paraphrases", out}}.dump(), "application/json");
  });
  srv.Post("/score", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"score": 0.75})", "application/json");
  });
  const int port = srv.bind_to_any_port("127.0.0.1");
  std::thread t([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  const std::string base = "http://127.0.0.1:" + std::to_string(port);

  ParaphraseRegistry reg;
  reg.register_provider("remote", std::make_shared<RemoteParaphraser>(base + "/paraphrase"));
  const auto c = paraphrase(reg, "remote", "hello", 10);
  ASSERT_EQ(c.size(), 5u);
  EXPECT_EQ(c[4].rank, 5);
  EXPECT_EQ(c[0].text, "hello v1");
  EXPECT_DOUBLE_EQ(RemoteScorer(base + "/score").score("a", "b"), 0.75);

  srv.stop();
  t.join();

  RemoteOptions quick{200, 1, 10};
  reg.register_provider("dead", std::make_shared<RemoteParaphraser>(base + "/paraphrase", quick));
  EXPECT_THROW(paraphrase(reg, "dead", "hello", 3), ProviderUnavailable);
  EXPECT_THROW(RemoteScorer(base + "/score", quick).score("a", "b"), ScorerUnavailable);
}

TEST(Bleu, Examples) {
  EXPECT_NEAR(bleu({"the cat sat on the mat", "a b c d e"}, {"the cat sat on the mat", "a b c d e"}), 100.0, 1e-9);
  EXPECT_DOUBLE_EQ(bleu({"x y z"}, {"a b c"}), 0.0);
  EXPECT_THROW(bleu({"a"}, {}), LengthMismatch);
}

TEST(Bleu, MatchesSecondImplementation) {
  const std::vector<std::string> cands = {"the cat is on the mat", "there is a dog in the yard today"};
  const std::vector<std::string> refs = {"the cat sat on the mat", "a dog is in the yard"};
  EXPECT_NEAR(bleu(cands, refs), oracle::bleu(cands, refs), 1e-6);
  EXPECT_GT(bleu(cands, refs), 0.0);
  // short candidate exercises the brevity penalty
  EXPECT_NEAR(bleu({"the cat"}, {"the cat sat on the mat"}), oracle::bleu({"the cat"}, {"the cat sat on the mat"}), 1e-6);
}

TEST(Ibleu, Formula) {
  EXPECT_NEAR(ibleu(42.7, 42.7), 25.62, 1e-9);
  EXPECT_NEAR(ibleu(31.4, 55.3), 14.06, 1e-9);
  EXPECT_DOUBLE_EQ(ibleu(0, 0), 0.0);
}

TEST(Ibleu, EvaluateParaphraser) {
  const std::vector<ParaphrasePair> pairs = {
      {"how do i reset my password", "how can i reset my password", "how can i change my password"},
      {"where is my order", "where is my package", "where's my package right now"},
      {"talk to an agent", "speak with an agent please", "let me speak with an agent"},
      {"book a flight to paris", "reserve a flight to paris", "i want to fly to paris"},
      {"cancel my subscription", "end my subscription", "please cancel my plan"}};
  const auto r = evaluate_paraphraser(pairs);
  std::vector<std::string> top, ref, src;
  for (const auto& p : pairs) {
    top.push_back(p.top1);
    ref.push_back(p.reference);
    src.push_back(p.source);
  }
  EXPECT_NEAR(r.target_bleu, oracle::bleu(top, ref), 1e-6);
  EXPECT_NEAR(r.self_bleu, oracle::bleu(top, src), 1e-6);
  EXPECT_NEAR(r.ibleu, 0.8 * r.target_bleu - 0.2 * r.self_bleu, 1e-12);
  EXPECT_EQ(r.n_pairs, 5u);

  std::vector<ParaphrasePair> echo, perfect;
  for (const auto& p : pairs) {
    echo.push_back({p.source, p.source, p.reference});
    perfect.push_back({p.source, p.reference, p.reference});
  }
  EXPECT_NEAR(evaluate_paraphraser(echo).self_bleu, 100.0, 1e-9);
  EXPECT_NEAR(evaluate_paraphraser(perfect).target_bleu, 100.0, 1e-9);
  EXPECT_LT(evaluate_paraphraser(perfect).self_bleu, 100.0);
}
