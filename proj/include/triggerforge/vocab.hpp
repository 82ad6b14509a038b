#ifndef TRIGGERFORGE_VOCAB_HPP_
#define TRIGGERFORGE_VOCAB_HPP_

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "triggerforge/common.hpp"

namespace triggerforge::lm {

using TokenId = int;
using TokenSequence = std::vector<TokenId>;

// Word-level vocabulary. Tokens are lowercased whitespace-split words;
// out-of-vocabulary words map to <unk>. The special tokens carry angle
// brackets on purpose: the trigger token filter rejects punctuation, so
// specials can never be chosen as trigger tokens.
class Vocabulary {
 public:
  static constexpr const char* kUnk = "<unk>";
  static constexpr const char* kBos = "<s>";
  static constexpr const char* kEos = "</s>";

  Vocabulary() = default;

  explicit Vocabulary(std::vector<std::string> tokens) {
    for (auto& t : tokens) add(t);
    require_specials();
  }

  // Builds from raw sentences: specials first, then words ranked by
  // (frequency desc, token asc), truncated to `limit` total entries.
  static Vocabulary build(const std::vector<std::string>& sentences,
                          std::size_t limit = 2000) {
    std::map<std::string, std::int64_t> counts;
    for (const auto& s : sentences)
      for (const auto& w : split_words(to_lower(s))) ++counts[w];
    std::vector<std::pair<std::string, std::int64_t>> ranked(counts.begin(),
                                                             counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
      if (x.second != y.second) return x.second > y.second;
      return x.first < y.first;
    });
    Vocabulary v;
    v.add(kUnk);
    v.add(kBos);
    v.add(kEos);
    for (const auto& [tok, n] : ranked) {
      (void)n;
      if (v.size() >= limit) break;
      v.add(tok);
    }
    return v;
  }

  int add(const std::string& token) {
    auto it = index_.find(token);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(tokens_.size());
    tokens_.push_back(token);
    index_.emplace(token, id);
    return id;
  }

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(TokenId id) const { return tokens_.at(id); }

  bool contains(const std::string& token) const {
    return index_.count(token) != 0;
  }

  // Unknown words resolve to unk_id.
  TokenId id_or_unk(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? unk_id() : it->second;
  }

  TokenId id_strict(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end())
      throw ValidationError("unknown token: \"" + token + "\"");
    return it->second;
  }

  TokenId unk_id() const { return index_.at(kUnk); }
  TokenId bos_id() const { return index_.at(kBos); }
  TokenId eos_id() const { return index_.at(kEos); }

 private:
  void require_specials() {
    if (!contains(kUnk) || !contains(kBos) || !contains(kEos))
      throw ValidationError("vocabulary is missing special tokens");
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

inline TokenSequence tokenize(const std::string& text, const Vocabulary& vocab) {
  TokenSequence ids;
  for (const auto& w : split_words(to_lower(text))) ids.push_back(vocab.id_or_unk(w));
  return ids;
}

// Like tokenize(), but an out-of-vocabulary word is an error. Prompt
// construction uses this so a prompt can never silently degrade to <unk>.
inline TokenSequence tokenize_strict(const std::string& text,
                                     const Vocabulary& vocab) {
  TokenSequence ids;
  for (const auto& w : split_words(to_lower(text))) {
    if (!vocab.contains(w))
      throw ValidationError("token not in vocabulary: \"" + w + "\"");
    ids.push_back(vocab.id_strict(w));
  }
  return ids;
}

inline std::string detokenize(const TokenSequence& ids, const Vocabulary& vocab) {
  std::vector<std::string> words;
  words.reserve(ids.size());
  for (TokenId id : ids) words.push_back(vocab.token(id));
  return join_words(words);
}

}  // namespace triggerforge::lm

#endif  // TRIGGERFORGE_VOCAB_HPP_
