#include "surpmark/ngram.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace surpmark {

TokenSequence split_words(std::string_view text) {
  TokenSequence out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

TokenSequence split_chars(std::string_view text) {
  TokenSequence out;
  out.reserve(text.size());
  for (char c : text) out.emplace_back(1, c);
  return out;
}

int NgramLM::id_of(const Token& word) const {
  const auto it = ids_.find(word);
  if (it != ids_.end()) return it->second;
  return unknown_;
}

double NgramLM::probability_ids(std::span<const int> history, int word) const {
  const auto v = static_cast<double>(vocabulary_.size());
  const auto& unigrams = levels_[0].begin()->second;
  const auto unigram_count = [&] {
    const auto it = unigrams.next.find(word);
    return it == unigrams.next.end() ? 0.0 : static_cast<double>(it->second);
  }();
  double p = (unigram_count + delta_) / (static_cast<double>(unigrams.total) + delta_ * v);

  const std::size_t max_len = std::min<std::size_t>(history.size(), static_cast<std::size_t>(order_ - 1));
  for (std::size_t len = 1; len <= max_len; ++len) {
    const Context context(history.end() - static_cast<std::ptrdiff_t>(len), history.end());
    const auto it = levels_[len].find(context);
    if (it == levels_[len].end()) continue;
    const auto hit = it->second.next.find(word);
    const double c = hit == it->second.next.end() ? 0.0 : static_cast<double>(hit->second);
    const double own = (c + delta_) / (static_cast<double>(it->second.total) + delta_ * v);
    p = (1.0 - kBackoff) * own + kBackoff * p;
  }
  return p;
}

double NgramLM::probability(std::span<const Token> history, const Token& word) const {
  const int w = id_of(word);
  if (w < 0) return 0.0;
  std::vector<int> h;
  const std::size_t keep = std::min<std::size_t>(history.size(), static_cast<std::size_t>(order_ - 1));
  for (std::size_t i = history.size() - keep; i < history.size(); ++i) h.push_back(id_of(history[i]));
  // An out-of-vocabulary history token without <unk> truncates the history there.
  const auto bad = std::find(h.rbegin(), h.rend(), -1);
  if (bad != h.rend()) h.erase(h.begin(), bad.base());
  return probability_ids(h, w);
}

NgramLM fit_ngram_lm(const std::vector<TokenSequence>& corpus, int order, double delta,
                     bool add_unknown) {
  if (order < 1) throw Error(Errc::InvalidSpec, "n-gram order must be at least 1");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(Errc::InvalidSpec, "delta must be positive");
  NgramLM lm;
  lm.order_ = order;
  lm.delta_ = delta;

  // Sorted vocabulary keeps ids independent of corpus order.
  std::vector<Token> words;
  for (const auto& doc : corpus) words.insert(words.end(), doc.begin(), doc.end());
  if (words.empty()) throw Error(Errc::EmptyCorpus, "n-gram training corpus has no tokens");
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  lm.vocabulary_ = std::move(words);
  if (add_unknown && !std::binary_search(lm.vocabulary_.begin(), lm.vocabulary_.end(),
                                         std::string(kUnknownToken))) {
    lm.vocabulary_.insert(std::lower_bound(lm.vocabulary_.begin(), lm.vocabulary_.end(),
                                           std::string(kUnknownToken)),
                          std::string(kUnknownToken));
  }
  for (std::size_t i = 0; i < lm.vocabulary_.size(); ++i) lm.ids_[lm.vocabulary_[i]] = static_cast<int>(i);
  if (add_unknown) lm.unknown_ = lm.ids_.at(std::string(kUnknownToken));

  lm.levels_.resize(static_cast<std::size_t>(order));
  lm.levels_[0][{}];
  for (const auto& doc : corpus) {
    std::vector<int> ids;
    ids.reserve(doc.size());
    for (const auto& t : doc) ids.push_back(lm.ids_.at(t));
    for (std::size_t t = 0; t < ids.size(); ++t) {
      ++lm.trained_tokens_;
      const std::size_t max_len = std::min<std::size_t>(t, static_cast<std::size_t>(order - 1));
      for (std::size_t len = 0; len <= max_len; ++len) {
        auto& stats = lm.levels_[len][NgramLM::Context(ids.begin() + static_cast<std::ptrdiff_t>(t - len),
                                                        ids.begin() + static_cast<std::ptrdiff_t>(t))];
        ++stats.total;
        ++stats.next[ids[t]];
      }
    }
  }
  return lm;
}

SurprisalRecord ngram_surprisals(const NgramLM& lm, const TokenSequence& tokens, std::string id,
                                 std::optional<Label> label) {
  if (tokens.size() < 2) throw Error(Errc::SequenceTooShort, "need at least two tokens for a surprisal");
  SurprisalRecord record;
  record.id = std::move(id);
  record.label = label;
  record.surprisals.reserve(tokens.size() - 1);
  const std::span<const Token> all(tokens);
  for (std::size_t t = 1; t < tokens.size(); ++t) {
    const double p = lm.probability(all.first(t), tokens[t]);
    if (!(p > 0.0)) {
      throw Error(Errc::NonFiniteValue, "token '" + tokens[t] + "' at position " + std::to_string(t) +
                                            " is outside the vocabulary");
    }
    record.surprisals.push_back(-std::log(p));
  }
  return record;
}

}  // namespace surpmark
