#include "hgkt/textrank.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "hgkt/errors.hpp"

namespace hgkt {

namespace {

// Stop list v1: articles, auxiliaries, pronouns, prepositions and the cue
// words that open exercise prompts ("given", "find", "know").
constexpr std::array<std::string_view, 50> kStopWords = {
    "a",    "an",   "the",  "of",    "and",  "or",   "but",  "if",    "then", "is",
    "are",  "was",  "were", "be",    "been", "it",   "its",  "we",    "you",  "that",
    "this", "these", "those", "what", "which", "who", "how",  "many",  "much", "given",
    "find", "know", "let",  "to",    "in",   "on",   "at",   "by",    "for",  "with",
    "from", "as",   "into", "than",  "so",   "such", "each", "all",   "has",  "have"};

bool is_article(std::string_view w) { return w == "a" || w == "an" || w == "the"; }

bool has_digit(std::string_view w) {
  return std::any_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c); });
}

// Lowercased word tokens; punctuation becomes an empty-string boundary token.
std::vector<std::string> tokens_with_boundaries(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80 || c == '\'') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
      if (!std::isspace(c)) out.emplace_back();
    }
  }
  flush();
  return out;
}

}  // namespace

std::span<const std::string_view> stop_words() { return kStopWords; }

bool is_stop_word(std::string_view word) {
  return std::find(kStopWords.begin(), kStopWords.end(), word) != kStopWords.end();
}

TextRankResult textrank(const CooccurrenceGraph& graph, const TextRankOptions& options) {
  const std::size_t n = graph.n;
  if (graph.weights.size() != n * n) throw DimensionError("co-occurrence matrix is not n x n");
  TextRankResult r;
  r.scores.assign(n, 1.0);
  std::vector<double> out_weight(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) out_weight[j] += graph.weights[j * n + i];

  std::vector<double> next(n);
  for (r.iterations = 0; r.iterations < options.max_iterations;) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double w = graph.weights[j * n + i];
        if (w != 0.0) acc += w / out_weight[j] * r.scores[j];
      }
      next[i] = (1.0 - options.damping) + options.damping * acc;
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - r.scores[i]);
    r.scores.swap(next);
    ++r.iterations;
    r.last_change = change;
    if (change < options.tolerance) break;
  }
  return r;
}

std::vector<std::string> candidate_phrases(std::string_view text) {
  auto tokens = tokens_with_boundaries(text);
  std::vector<std::string> out;
  std::vector<std::string> words;  // current phrase, content words and at most one "of"
  std::size_t content = 0;
  bool used_of = false;
  bool skipping = false;  // inside an "of ..." modifier chain

  auto flush = [&] {
    if (content > 0) {
      std::string phrase;
      for (const auto& w : words) {
        if (!phrase.empty()) phrase += ' ';
        phrase += w;
      }
      out.push_back(std::move(phrase));
    }
    words.clear();
    content = 0;
    used_of = false;
  };
  auto is_content = [](const std::string& w) { return !w.empty() && !is_stop_word(w) && !has_digit(w); };

  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const std::string& tok = tokens[k];
    if (tok == "of") {
      if (skipping) continue;
      if (content == 0) continue;
      bool next_content = k + 1 < tokens.size() && is_content(tokens[k + 1]);
      if (!used_of && content < 3 && next_content) {
        words.push_back(tok);
        used_of = true;
      } else {
        flush();
        skipping = true;
      }
      continue;
    }
    if (skipping && (is_content(tok) || is_article(tok))) continue;
    skipping = false;
    if (!is_content(tok)) {
      flush();
      continue;
    }
    if (content == 3) flush();
    words.push_back(tok);
    ++content;
  }
  flush();
  return out;
}

std::vector<Keyphrase> textrank_keyphrases(std::span<const std::string> texts, std::size_t top_k,
                                           const TextRankOptions& options) {
  if (top_k == 0) throw ValidationError("top_k must be at least 1");
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::string> phrases;
  std::vector<std::vector<std::size_t>> sequences;
  for (const auto& text : texts) {
    std::vector<std::size_t> seq;
    for (auto& p : candidate_phrases(text)) {
      auto [it, inserted] = index.emplace(p, phrases.size());
      if (inserted) phrases.push_back(p);
      seq.push_back(it->second);
    }
    sequences.push_back(std::move(seq));
  }
  if (phrases.empty()) return {};

  constexpr std::size_t kWindow = 3;
  CooccurrenceGraph g;
  g.n = phrases.size();
  g.weights.assign(g.n * g.n, 0.0);
  for (const auto& seq : sequences) {
    for (std::size_t p = 0; p < seq.size(); ++p) {
      for (std::size_t q = p + 1; q < seq.size() && q < p + kWindow; ++q) {
        if (seq[p] == seq[q]) continue;
        g.weights[seq[p] * g.n + seq[q]] += 1.0;
        g.weights[seq[q] * g.n + seq[p]] += 1.0;
      }
    }
  }
  auto ranked = textrank(g, options);

  std::vector<std::size_t> order(phrases.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ranked.scores[a] > ranked.scores[b]; });
  std::vector<Keyphrase> out;
  for (std::size_t k = 0; k < order.size() && out.size() < top_k; ++k) {
    out.push_back({phrases[order[k]], ranked.scores[order[k]]});
  }
  return out;
}

}  // namespace hgkt
