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

#ifndef EVEC_SUBWORDS_H_
#define EVEC_SUBWORDS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evec/corpus.h"

namespace evec {

using SubwordId = std::uint32_t;

// Character n-grams of "<word>" for every length in [n_min, n_max] (lengths
// in code points, shortest first), followed by the whole-word token
// "<word>". Duplicates are removed keeping the first occurrence.
std::vector<std::string> ExtractNgrams(std::string_view word, int n_min,
                                       int n_max);

// "<word>".
std::string WholeWordToken(std::string_view word);

class SubwordVocabulary {
 public:
  SubwordVocabulary() = default;
  // `grams` are taken in id order; per-word gram lists are derived from
  // `vocab`.
  SubwordVocabulary(std::vector<std::string> grams, const Vocabulary& vocab,
                    int n_min, int n_max, int min_word_occurrence);

  std::size_t size() const { return grams_.size(); }
  bool empty() const { return grams_.empty(); }
  const std::string& gram(SubwordId id) const { return grams_[id]; }
  std::span<const std::string> grams() const { return grams_; }
  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }
  int min_word_occurrence() const { return min_word_occurrence_; }

  std::optional<SubwordId> Find(std::string_view gram) const;
  // Grams of an in-vocabulary word, including its whole-word token.
  std::span<const SubwordId> word_grams(WordId id) const {
    if (id + 1 >= word_gram_offsets_.size()) return {};
    return {word_gram_ids_.data() + word_gram_offsets_[id],
            word_gram_ids_.data() + word_gram_offsets_[id + 1]};
  }
  // ExtractNgrams(word) restricted to indexed grams, in extraction order.
  std::vector<SubwordId> GramsOf(std::string_view word) const;

  bool operator==(const SubwordVocabulary& other) const {
    return n_min_ == other.n_min_ && n_max_ == other.n_max_ &&
           min_word_occurrence_ == other.min_word_occurrence_ &&
           grams_ == other.grams_ &&
           word_gram_offsets_ == other.word_gram_offsets_ &&
           word_gram_ids_ == other.word_gram_ids_;
  }

 private:
  std::vector<std::string> grams_;
  StringMap<SubwordId> index_;
  int n_min_ = 3;
  int n_max_ = 5;
  int min_word_occurrence_ = 3;
  std::vector<std::size_t> word_gram_offsets_{0};
  std::vector<SubwordId> word_gram_ids_;
};

// Keeps grams found in at least `min_word_occurrence` distinct vocabulary
// words. Whole-word tokens of vocabulary words are always kept. Ids follow
// first appearance when walking words in id order.
SubwordVocabulary BuildSubwordVocab(const Vocabulary& vocab, int n_min,
                                    int n_max, int min_word_occurrence);

// "gram<TAB>id" per line.
void ExportSubwords(const SubwordVocabulary& subwords, std::ostream& out);

}  // namespace evec

#endif  // EVEC_SUBWORDS_H_
