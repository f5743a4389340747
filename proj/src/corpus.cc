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

#include "evec/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>

#include "evec/errors.h"

namespace evec {
namespace {

constexpr std::string_view kReplacement = "\xEF\xBF\xBD";

bool IsContinuation(unsigned char c) { return (c & 0xC0) == 0x80; }

// Length of the valid UTF-8 sequence starting at s[i], or 0 if invalid.
std::size_t ValidSequenceLength(std::string_view s, std::size_t i) {
  const auto c0 = static_cast<unsigned char>(s[i]);
  if (c0 < 0x80) return 1;
  std::size_t len;
  std::uint32_t cp;
  if ((c0 & 0xE0) == 0xC0) {
    len = 2;
    cp = c0 & 0x1F;
  } else if ((c0 & 0xF0) == 0xE0) {
    len = 3;
    cp = c0 & 0x0F;
  } else if ((c0 & 0xF8) == 0xF0) {
    len = 4;
    cp = c0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto c = static_cast<unsigned char>(s[i + k]);
    if (!IsContinuation(c)) return 0;
    cp = (cp << 6) | (c & 0x3F);
  }
  static constexpr std::uint32_t kMinForLength[] = {0, 0, 0x80, 0x800,
                                                    0x10000};
  if (cp < kMinForLength[len]) return 0;  // overlong
  if (cp > 0x10FFFF) return 0;
  if (cp >= 0xD800 && cp <= 0xDFFF) return 0;  // surrogate
  return len;
}

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsPunct(unsigned char c) {
  return c < 0x80 && std::ispunct(c) != 0;
}

void FlushToken(std::string& token, std::vector<std::string>& out) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && IsPunct(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && IsPunct(static_cast<unsigned char>(token[e - 1]))) --e;
  if (e > b) out.emplace_back(token.substr(b, e - b));
  token.clear();
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < line.size()) {
    const auto c = static_cast<unsigned char>(line[i]);
    if (IsSpace(c)) {
      FlushToken(current, tokens);
      ++i;
      continue;
    }
    const std::size_t len = ValidSequenceLength(line, i);
    if (len == 0) {
      current.append(kReplacement);
      ++i;
    } else if (len == 1) {
      current.push_back(static_cast<char>(
          (c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c));
      ++i;
    } else {
      current.append(line.substr(i, len));
      i += len;
    }
  }
  FlushToken(current, tokens);
  return tokens;
}

Vocabulary::Vocabulary(std::vector<Entry> entries, std::uint64_t min_count)
    : entries_(std::move(entries)), min_count_(min_count) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    if (e.count < min_count_ || e.count == 0) {
      throw DataError("vocabulary entry '" + e.token + "' has count " +
                      std::to_string(e.count) + " below min_count");
    }
    if (!index_.emplace(e.token, static_cast<WordId>(i)).second) {
      throw DataError("duplicate vocabulary token '" + e.token + "'");
    }
    total_tokens_ += e.count;
  }
}

std::optional<WordId> Vocabulary::Find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::Frequency(WordId id) const {
  return static_cast<double>(entries_[id].count) /
         static_cast<double>(total_tokens_);
}

Vocabulary BuildVocabularyFromCounts(
    const StringMap<std::uint64_t>& counts,
    std::uint64_t min_count) {
  if (min_count < 1) throw DataError("min_count must be >= 1");
  std::vector<Vocabulary::Entry> entries;
  for (const auto& [token, count] : counts) {
    if (count >= min_count) entries.push_back({token, count});
  }
  if (entries.empty()) {
    throw EmptyVocabularyError("no token occurs at least " +
                               std::to_string(min_count) + " times");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Vocabulary::Entry& a, const Vocabulary::Entry& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.token < b.token;
            });
  return Vocabulary(std::move(entries), min_count);
}

Vocabulary BuildVocabulary(std::istream& in, std::uint64_t min_count) {
  StringMap<std::uint64_t> counts;
  std::string line;
  while (std::getline(in, line)) {
    for (auto& token : Tokenize(line)) ++counts[std::move(token)];
  }
  return BuildVocabularyFromCounts(counts, min_count);
}

Vocabulary BuildVocabularyFromFile(const std::string& path,
                                   std::uint64_t min_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus '" + path + "'");
  return BuildVocabulary(in, min_count);
}

void ExportVocabulary(const Vocabulary& vocab, std::ostream& out) {
  for (const auto& e : vocab.entries()) out << e.token << '\t' << e.count << '\n';
}

std::vector<WordId> ToIds(const Vocabulary& vocab, std::string_view line) {
  std::vector<WordId> ids;
  for (const auto& token : Tokenize(line)) {
    if (auto id = vocab.Find(token)) ids.push_back(*id);
  }
  return ids;
}

double DiscardProbability(double frequency, double threshold) {
  if (frequency <= threshold) return 0.0;
  return std::max(0.0, 1.0 - std::sqrt(threshold / frequency));
}

Subsampler::Subsampler(const Vocabulary& vocab, double threshold) {
  if (!(threshold > 0.0)) throw DataError("subsample threshold must be > 0");
  discard_.resize(vocab.size());
  for (WordId id = 0; id < vocab.size(); ++id) {
    discard_[id] = DiscardProbability(vocab.Frequency(id), threshold);
    expected_retained_ +=
        static_cast<double>(vocab.count(id)) * (1.0 - discard_[id]);
  }
}

std::vector<WordId> Subsampler::Apply(std::span<const WordId> sentence,
                                      Rng& rng) const {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<WordId> kept;
  kept.reserve(sentence.size());
  for (WordId id : sentence) {
    const double p = discard_[id];
    // Draw only when a discard is possible so rare words cost nothing.
    if (p > 0.0 && uniform(rng) < p) continue;
    kept.push_back(id);
  }
  return kept;
}

SentenceReader::SentenceReader(const std::string& path,
                               const Vocabulary& vocab, std::uint64_t begin,
                               std::uint64_t end)
    : in_(path, std::ios::binary), vocab_(vocab), end_(end) {
  if (!in_) throw DataError("cannot open corpus '" + path + "'");
  if (begin > 0) {
    // Start after the first newline at or beyond begin - 1.
    in_.seekg(static_cast<std::streamoff>(begin - 1));
    std::getline(in_, line_);
    position_ = in_ ? static_cast<std::uint64_t>(in_.tellg()) : kEnd;
  }
}

bool SentenceReader::Next(std::vector<WordId>& sentence) {
  if (position_ >= end_ || !in_) return false;
  if (!std::getline(in_, line_)) return false;
  const auto pos = in_.tellg();
  position_ = pos < 0 ? kEnd : static_cast<std::uint64_t>(pos);
  sentence = ToIds(vocab_, line_);
  return true;
}

std::uint64_t FileSize(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw DataError("cannot open '" + path + "'");
  return static_cast<std::uint64_t>(in.tellg());
}

}  // namespace evec
