// Copyright 2026 The Evec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EVEC_CORPUS_H_
#define EVEC_CORPUS_H_

#include <cstdint>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace evec {

using WordId = std::uint32_t;
using Rng = std::mt19937_64;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};

template <typename V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;

// Lowercases ASCII letters, replaces invalid UTF-8 with U+FFFD, splits on
// whitespace and strips leading/trailing ASCII punctuation from each token.
std::vector<std::string> Tokenize(std::string_view line);

class Vocabulary {
 public:
  struct Entry {
    std::string token;
    std::uint64_t count = 0;

    bool operator==(const Entry&) const = default;
  };

  Vocabulary() = default;
  // Entries are taken in id order. Throws DataError if an entry is below
  // min_count or a token repeats.
  Vocabulary(std::vector<Entry> entries, std::uint64_t min_count);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::string& token(WordId id) const { return entries_[id].token; }
  std::uint64_t count(WordId id) const { return entries_[id].count; }
  std::span<const Entry> entries() const { return entries_; }
  std::uint64_t total_tokens() const { return total_tokens_; }
  std::uint64_t min_count() const { return min_count_; }

  std::optional<WordId> Find(std::string_view token) const;
  bool Contains(std::string_view token) const { return Find(token).has_value(); }
  // f(w) = count(w) / total_tokens.
  double Frequency(WordId id) const;

  bool operator==(const Vocabulary& other) const {
    return min_count_ == other.min_count_ && entries_ == other.entries_;
  }

 private:
  std::vector<Entry> entries_;
  StringMap<WordId> index_;
  std::uint64_t total_tokens_ = 0;
  std::uint64_t min_count_ = 1;
};

// Retains tokens with count >= min_count, sorted by descending count with
// lexicographic tie-break. Throws EmptyVocabularyError if nothing survives.
Vocabulary BuildVocabularyFromCounts(
    const StringMap<std::uint64_t>& counts,
    std::uint64_t min_count);

// Tokenizes every line of `in` and counts tokens.
Vocabulary BuildVocabulary(std::istream& in, std::uint64_t min_count);
Vocabulary BuildVocabularyFromFile(const std::string& path,
                                   std::uint64_t min_count);

// "token<TAB>count" per line, in id order.
void ExportVocabulary(const Vocabulary& vocab, std::ostream& out);

// Tokens not in the vocabulary are dropped.
std::vector<WordId> ToIds(const Vocabulary& vocab, std::string_view line);

// max(0, 1 - sqrt(threshold / frequency)).
double DiscardProbability(double frequency, double threshold);

class Subsampler {
 public:
  Subsampler(const Vocabulary& vocab, double threshold);

  double discard_probability(WordId id) const { return discard_[id]; }
  // Drops each token independently; survivors keep their order.
  std::vector<WordId> Apply(std::span<const WordId> sentence, Rng& rng) const;
  // Expected number of tokens per pass that survive subsampling.
  double ExpectedRetained() const { return expected_retained_; }

 private:
  std::vector<double> discard_;
  double expected_retained_ = 0.0;
};

// Reads sentences (lines) whose first byte lies in [begin, end) and maps
// them to ids. A nonzero `begin` skips the partial line it falls in.
class SentenceReader {
 public:
  static constexpr std::uint64_t kEnd =
      std::numeric_limits<std::uint64_t>::max();

  SentenceReader(const std::string& path, const Vocabulary& vocab,
                 std::uint64_t begin = 0, std::uint64_t end = kEnd);

  // Returns false once the range is exhausted. Sentences may be empty.
  bool Next(std::vector<WordId>& sentence);

 private:
  std::ifstream in_;
  const Vocabulary& vocab_;
  std::uint64_t position_ = 0;
  std::uint64_t end_ = kEnd;
  std::string line_;
};

// Size in bytes; throws DataError if the file cannot be opened.
std::uint64_t FileSize(const std::string& path);

}  // namespace evec

#endif  // EVEC_CORPUS_H_
