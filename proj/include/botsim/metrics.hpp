#pragma once

// Lexical and semantic text metrics: fuzz ratio, TF-IDF cosine similarity,
// corpus BLEU and iBLEU.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "botsim/util.hpp"

namespace botsim {

// Edit distance where insertion and deletion cost 1 and substitution 2
// (equivalently, no substitutions at all).
inline std::size_t indel_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 2);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// round(100 * (|a|+|b| - D) / (|a|+|b|)), halves rounded up; 100 for two
// empty strings.
inline int fuzz_ratio(std::string_view a, std::string_view b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) return 100;
  const std::size_t d = indel_distance(a, b);
  return static_cast<int>((200 * (total - d) + total) / (2 * total));
}

// --- semantic similarity -------------------------------------------------------

class SimilarityScorer {
 public:
  virtual ~SimilarityScorer() = default;
  // Symmetric, in [0, 1], score(a, a) == 1.
  virtual double score(const std::string& a, const std::string& b) const = 0;
};

inline std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : s) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Unigram + bigram terms.
inline std::vector<std::string> tfidf_terms(std::string_view s) {
  auto toks = word_tokens(s);
  std::vector<std::string> terms = toks;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) terms.push_back(toks[i] + " " + toks[i + 1]);
  return terms;
}

// Cosine over L2-normalised TF-IDF vectors. Document frequencies come from
// the corpus given at construction; idf(t) = ln((1 + N) / (1 + df(t))) + 1.
class TfidfScorer final : public SimilarityScorer {
 public:
  TfidfScorer() = default;
  explicit TfidfScorer(const std::vector<std::string>& corpus) {
    docs_ = corpus.size();
    for (const auto& doc : corpus) {
      auto terms = tfidf_terms(doc);
      std::sort(terms.begin(), terms.end());
      terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
      for (const auto& t : terms) ++df_[t];
    }
  }

  double idf(const std::string& term) const {
    auto it = df_.find(term);
    const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
    return std::log((1.0 + static_cast<double>(docs_)) / (1.0 + df)) + 1.0;
  }

  std::map<std::string, double> vector(std::string_view s) const {
    std::map<std::string, double> v;
    for (const auto& t : tfidf_terms(s)) v[t] += 1.0;
    double norm = 0;
    for (auto& [t, w] : v) {
      w *= idf(t);
      norm += w * w;
    }
    norm = std::sqrt(norm);
    if (norm > 0)
      for (auto& [_, w] : v) w /= norm;
    return v;
  }

  double score(const std::string& a, const std::string& b) const override {
    if (word_tokens(a) == word_tokens(b)) return 1.0;
    const auto va = vector(a);
    const auto vb = vector(b);
    double dot = 0;
    for (const auto& [t, w] : va)
      if (auto it = vb.find(t); it != vb.end()) dot += w * it->second;
    return std::clamp(dot, 0.0, 1.0);
  }

 private:
  std::size_t docs_ = 0;
  std::map<std::string, std::size_t> df_;
};

// --- BLEU ----------------------------------------------------------------------

namespace detail {
inline std::map<std::vector<std::string>, std::size_t> ngram_counts(
    const std::vector<std::string>& toks, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i)
    ++counts[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                      toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return counts;
}
}  // namespace detail

inline std::vector<std::string> bleu_tokens(std::string_view s) {
  return split_whitespace(to_lower(s));
}

// Corpus BLEU-4 on a 0-100 scale: case-folded whitespace tokens, clipped
// n-gram precision, brevity penalty, add-one smoothing for n = 2..4.
inline double bleu(const std::vector<std::string>& candidates,
                   const std::vector<std::string>& references) {
  if (candidates.size() != references.size())
    throw LengthMismatch("bleu: " + std::to_string(candidates.size()) + " candidates vs " +
                         std::to_string(references.size()) + " references");
  if (candidates.empty()) throw ContractError("bleu: empty corpus");

  std::array<double, 4> matches{}, totals{};
  double cand_len = 0, ref_len = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto c = bleu_tokens(candidates[i]);
    const auto r = bleu_tokens(references[i]);
    cand_len += static_cast<double>(c.size());
    ref_len += static_cast<double>(r.size());
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto cc = detail::ngram_counts(c, n);
      const auto rc = detail::ngram_counts(r, n);
      for (const auto& [gram, count] : cc) {
        totals[n - 1] += static_cast<double>(count);
        if (auto it = rc.find(gram); it != rc.end())
          matches[n - 1] += static_cast<double>(std::min(count, it->second));
      }
    }
  }
  if (cand_len == 0 || matches[0] == 0) return 0.0;

  double log_sum = std::log(matches[0] / totals[0]);
  for (std::size_t n = 1; n < 4; ++n) log_sum += std::log((matches[n] + 1.0) / (totals[n] + 1.0));
  const double bp = cand_len > ref_len ? 1.0 : std::exp(1.0 - ref_len / cand_len);
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

inline double ibleu(double target_bleu, double self_bleu) {
  return 0.8 * target_bleu - 0.2 * self_bleu;
}

struct ParaphraseEvalReport {
  double target_bleu = 0;
  double self_bleu = 0;
  double ibleu = 0;
  std::size_t n_pairs = 0;
};

struct ParaphrasePair {
  std::string source;
  std::string top1;
  std::string reference;
};

inline ParaphraseEvalReport evaluate_paraphraser(const std::vector<ParaphrasePair>& pairs) {
  if (pairs.empty()) throw ContractError("evaluate_paraphraser: no pairs");
  std::vector<std::string> top1, refs, sources;
  for (const auto& p : pairs) {
    top1.push_back(p.top1);
    refs.push_back(p.reference);
    sources.push_back(p.source);
  }
  ParaphraseEvalReport r;
  r.target_bleu = bleu(top1, refs);
  r.self_bleu = bleu(top1, sources);
  r.ibleu = ibleu(r.target_bleu, r.self_bleu);
  r.n_pairs = pairs.size();
  return r;
}

}  // namespace botsim
