#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "surpmark/detector.hpp"

namespace surpmark {

using Token = std::string;
using TokenSequence = std::vector<Token>;

/// Whitespace tokenization.
TokenSequence split_words(std::string_view text);
/// One token per byte (character mode for ASCII text).
TokenSequence split_chars(std::string_view text);

inline constexpr std::string_view kUnknownToken = "<unk>";

/// Add-delta smoothed n-gram model with interpolated backoff.
///
/// For a history h of length order-1 with shorter history h':
///   P(w | h) = (1 - b) * (c(h w) + delta) / (c(h) + delta V) + b * P(w | h')  if c(h) > 0
///   P(w | h) = P(w | h')                                                      otherwise
/// with the fixed backoff weight b = 0.4, and the unigram level plain add-delta.
/// Every level is a normalized distribution, so every conditional sums to one
/// and stays positive over the vocabulary.
class NgramLM {
 public:
  static constexpr double kBackoff = 0.4;

  NgramLM() = default;

  int order() const noexcept { return order_; }
  double delta() const noexcept { return delta_; }
  std::size_t vocabulary_size() const noexcept { return vocabulary_.size(); }
  const std::vector<Token>& vocabulary() const noexcept { return vocabulary_; }
  std::uint64_t trained_tokens() const noexcept { return trained_tokens_; }
  bool has_unknown() const noexcept { return unknown_ >= 0; }

  /// P(word | history); only the last order-1 history tokens matter, fewer are
  /// allowed at the start of a sequence. Out-of-vocabulary words map to <unk>
  /// when the model has one; otherwise they get probability zero.
  double probability(std::span<const Token> history, const Token& word) const;

 private:
  friend NgramLM fit_ngram_lm(const std::vector<TokenSequence>&, int, double, bool);

  using Context = std::vector<int>;
  struct ContextStats {
    std::uint64_t total = 0;
    std::unordered_map<int, std::uint64_t> next;
  };

  int id_of(const Token& word) const;
  double probability_ids(std::span<const int> history, int word) const;

  int order_ = 1;
  double delta_ = 1.0;
  std::vector<Token> vocabulary_;
  std::unordered_map<Token, int> ids_;
  int unknown_ = -1;
  std::uint64_t trained_tokens_ = 0;
  std::vector<std::map<Context, ContextStats>> levels_;  // levels_[m]: histories of length m
};

/// Throws EmptyCorpus, InvalidSpec (order < 1, delta <= 0 or non-finite).
/// With add_unknown, an <unk> type with zero counts joins the vocabulary.
NgramLM fit_ngram_lm(const std::vector<TokenSequence>& corpus, int order, double delta,
                     bool add_unknown = true);

/// surprisals[t-1] = -log P(tokens[t] | tokens[..t]) for t = 1..len-1, in nats.
/// Throws SequenceTooShort, NonFiniteValue (token with zero probability).
SurprisalRecord ngram_surprisals(const NgramLM& lm, const TokenSequence& tokens, std::string id,
                                 std::optional<Label> label = std::nullopt);

}  // namespace surpmark
