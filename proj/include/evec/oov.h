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

#ifndef EVEC_OOV_H_
#define EVEC_OOV_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evec/matrix.h"
#include "evec/model.h"

namespace evec {

inline constexpr std::size_t kDefaultRemovedComponents = 3;

// Column mean of the word matrix and the top-k principal directions of the
// mean-centered matrix, one unit-norm row each. The first coordinate of
// each direction with magnitude above 1e-12 is positive.
struct PrincipalComponents {
  std::vector<double> mean;
  BasicMatrix<double> components;
  // Number of directions with nonzero variance; < k means the trailing
  // directions are an arbitrary orthonormal completion.
  std::size_t rank = 0;

  std::size_t k() const { return components.rows(); }
  bool degenerate() const { return rank < k(); }
};

// Requires words.rows() > k and k <= dim.
PrincipalComponents ComputePrincipalComponents(
    const Matrix& words, std::size_t k = kDefaultRemovedComponents);

// x - sum_i (x . p_i) p_i. The mean is not subtracted.
std::vector<double> RemoveComponents(std::span<const double> x,
                                     const PrincipalComponents& pc);

using TokenSequence = std::vector<std::string>;

// Tokenizes context sentences with the corpus tokenizer.
std::vector<TokenSequence> TokenizeContexts(std::span<const std::string> lines);

// Mean of clue rows pooled from the clue window around every occurrence of
// `word` in every context. Unknown tokens are dropped before windowing;
// occurrences of `word` keep their slot but are never used as clues.
// Empty when the pool is empty.
std::optional<std::vector<double>> ContextClueEstimate(
    const ModelStore& model, std::string_view word,
    std::span<const TokenSequence> contexts, std::size_t* clues_used = nullptr);

// Mean of subword rows over ExtractNgrams(word) restricted to indexed
// grams. Empty when no gram is known. `skip_whole_word` leaves out the
// word's own whole-word token, which only vocabulary words have.
std::optional<std::vector<double>> SubwordEstimate(
    const ModelStore& model, std::string_view word,
    std::size_t* grams_used = nullptr, bool skip_whole_word = false);

struct EstimateOptions {
  // Remove principal components from the clue part before combining.
  bool postprocess = true;
  // Subtract the word-matrix mean from the clue part before projecting.
  bool subtract_mean = false;
  // Estimate a vocabulary word as if it were unseen: its whole-word
  // subword row is not used.
  bool skip_whole_word = false;
};

struct OovEstimate {
  std::string word;
  std::optional<std::vector<double>> cc_part;  // post-processed if enabled
  std::optional<std::vector<double>> sub_part;
  std::vector<double> combined;
  std::size_t clues_used = 0;
  std::size_t grams_used = 0;
};

// combined = cc' + sub, or whichever part exists. Throws NoSignalError if
// neither does and DataError if the model is not an EV model. `pc` may be
// null only when options.postprocess is false.
OovEstimate EstimateOov(const ModelStore& model, std::string_view word,
                        std::span<const TokenSequence> contexts,
                        const PrincipalComponents* pc,
                        const EstimateOptions& options = {});

}  // namespace evec

#endif  // EVEC_OOV_H_
