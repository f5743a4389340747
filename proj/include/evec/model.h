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

#ifndef EVEC_MODEL_H_
#define EVEC_MODEL_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "evec/config.h"
#include "evec/corpus.h"
#include "evec/matrix.h"
#include "evec/subwords.h"

namespace evec {

// The three embedding sets and the vocabularies that index them.
//   words    (v): one row per word; the final word embeddings.
//   clues    (h): one row per word in EV mode; skipgram input vectors in SG
//                 mode; empty in FT mode.
//   subwords (z): one row per indexed n-gram; empty in SG mode.
struct ModelStore {
  TrainingConfig config;
  Vocabulary vocab;
  SubwordVocabulary subwords;
  Matrix words;
  Matrix clues;
  Matrix subword_vecs;

  Mode mode() const { return config.mode; }
  std::uint32_t dim() const { return config.dim; }

  // True iff every stored value is finite.
  bool AllFinite() const;

  bool operator==(const ModelStore&) const = default;
};

// v = 0; h and z i.i.d. uniform on [-0.5/dim, 0.5/dim] (h drawn first).
// The mode decides which of h and z are allocated.
ModelStore InitModel(Vocabulary vocab, SubwordVocabulary subwords,
                     const TrainingConfig& config, Rng& rng);

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Little-endian binary container with a trailing CRC-32.
void SaveModel(const ModelStore& model, const std::string& path);
std::string SerializeModel(const ModelStore& model);
// Throws FormatError (bad magic or inconsistent header), VersionError,
// TruncatedError or ChecksumError.
ModelStore LoadModel(const std::string& path);
ModelStore DeserializeModel(std::string_view bytes);

// word2vec text format over v: "<vocab_size> <dim>" then one line per word.
// Values are printed in shortest round-trip form.
void ExportText(const ModelStore& model, std::ostream& out);
void ExportText(const ModelStore& model, const std::string& path);

// x.y / (|x||y|); 0 when either vector is zero.
double Cosine(std::span<const float> x, std::span<const float> y);
double Cosine(std::span<const double> x, std::span<const double> y);

struct Neighbor {
  WordId id;
  double cosine;

  bool operator==(const Neighbor&) const = default;
};

// Cosine queries against a fixed set of word vectors. Rows are normalized
// once so repeated queries cost one pass over the matrix.
class NeighborIndex {
 public:
  explicit NeighborIndex(const Matrix& words);

  std::size_t size() const { return norms_.size(); }
  // Cosine of `query` against every row.
  std::vector<double> Similarities(std::span<const double> query) const;
  std::vector<double> Similarities(std::span<const float> query) const;

  // Top-k by cosine, descending, ties by ascending id.
  std::vector<Neighbor> Nearest(std::span<const double> query, std::size_t k,
                                const std::unordered_set<WordId>& exclude =
                                    {}) const;
  // 1-based rank of `target` among all rows under the same ordering.
  std::size_t RankOf(std::span<const double> query, WordId target) const;

 private:
  const Matrix& words_;
  std::vector<double> norms_;
};

std::vector<Neighbor> NearestNeighbors(const ModelStore& model,
                                       std::span<const double> query,
                                       std::size_t k,
                                       const std::unordered_set<WordId>&
                                           exclude = {});

// Orders neighbors by descending cosine, then ascending id.
bool NeighborBefore(const Neighbor& a, const Neighbor& b);

}  // namespace evec

#endif  // EVEC_MODEL_H_
