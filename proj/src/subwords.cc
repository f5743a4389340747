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

#include "evec/subwords.h"

#include <ostream>
#include <unordered_set>

#include "evec/errors.h"

namespace evec {
namespace {

// Byte offsets of each code point start, plus the end offset.
std::vector<std::size_t> CodePointBoundaries(std::string_view s) {
  std::vector<std::size_t> bounds;
  bounds.reserve(s.size() + 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) bounds.push_back(i);
  }
  bounds.push_back(s.size());
  return bounds;
}

}  // namespace

std::string WholeWordToken(std::string_view word) {
  std::string token;
  token.reserve(word.size() + 2);
  token.push_back('<');
  token.append(word);
  token.push_back('>');
  return token;
}

std::vector<std::string> ExtractNgrams(std::string_view word, int n_min,
                                       int n_max) {
  const std::string padded = WholeWordToken(word);
  const auto bounds = CodePointBoundaries(padded);
  const int chars = static_cast<int>(bounds.size()) - 1;

  std::vector<std::string> grams;
  std::unordered_set<std::string_view> seen;
  auto emit = [&](std::string_view g) {
    if (seen.insert(g).second) grams.emplace_back(g);
  };
  // `seen` views into `padded`, which outlives the loop.
  for (int n = std::max(n_min, 1); n <= std::min(n_max, chars); ++n) {
    for (int start = 0; start + n <= chars; ++start) {
      emit(std::string_view(padded).substr(bounds[start],
                                           bounds[start + n] - bounds[start]));
    }
  }
  emit(padded);
  return grams;
}

SubwordVocabulary::SubwordVocabulary(std::vector<std::string> grams,
                                     const Vocabulary& vocab, int n_min,
                                     int n_max, int min_word_occurrence)
    : grams_(std::move(grams)),
      n_min_(n_min),
      n_max_(n_max),
      min_word_occurrence_(min_word_occurrence) {
  index_.reserve(grams_.size());
  for (std::size_t i = 0; i < grams_.size(); ++i) {
    if (!index_.emplace(grams_[i], static_cast<SubwordId>(i)).second) {
      throw DataError("duplicate subword '" + grams_[i] + "'");
    }
  }
  if (grams_.empty()) return;  // no subword model
  word_gram_offsets_.reserve(vocab.size() + 1);
  for (WordId w = 0; w < vocab.size(); ++w) {
    for (SubwordId g : GramsOf(vocab.token(w))) word_gram_ids_.push_back(g);
    word_gram_offsets_.push_back(word_gram_ids_.size());
  }
}

std::optional<SubwordId> SubwordVocabulary::Find(std::string_view gram) const {
  auto it = index_.find(gram);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<SubwordId> SubwordVocabulary::GramsOf(std::string_view word) const {
  std::vector<SubwordId> ids;
  for (const auto& g : ExtractNgrams(word, n_min_, n_max_)) {
    if (auto id = Find(g)) ids.push_back(*id);
  }
  return ids;
}

SubwordVocabulary BuildSubwordVocab(const Vocabulary& vocab, int n_min,
                                    int n_max, int min_word_occurrence) {
  if (vocab.empty()) throw DataError("subword vocabulary needs a vocabulary");
  if (n_min < 1 || n_min > n_max) throw DataError("invalid n-gram range");

  // Extraction dedupes per word, so each increment is one distinct word.
  StringMap<std::uint32_t> word_counts;
  std::vector<std::string> order;
  for (const auto& entry : vocab.entries()) {
    for (auto& g : ExtractNgrams(entry.token, n_min, n_max)) {
      auto [it, inserted] = word_counts.try_emplace(g, 0);
      if (inserted) order.push_back(g);
      ++it->second;
    }
  }

  std::unordered_set<std::string> whole_words;
  for (const auto& entry : vocab.entries()) {
    whole_words.insert(WholeWordToken(entry.token));
  }

  std::vector<std::string> kept;
  for (auto& g : order) {
    if (whole_words.contains(g) ||
        word_counts.find(g)->second >=
            static_cast<std::uint32_t>(min_word_occurrence)) {
      kept.push_back(std::move(g));
    }
  }
  return SubwordVocabulary(std::move(kept), vocab, n_min, n_max,
                           min_word_occurrence);
}

void ExportSubwords(const SubwordVocabulary& subwords, std::ostream& out) {
  for (SubwordId id = 0; id < subwords.size(); ++id) {
    out << subwords.gram(id) << '\t' << id << '\n';
  }
}

}  // namespace evec
