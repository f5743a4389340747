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

#ifndef EVEC_EVAL_H_
#define EVEC_EVAL_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evec/model.h"
#include "evec/oov.h"

namespace evec {

// Pearson correlation of average ranks. Throws DataError when the lengths
// differ, fewer than two values are given, or either list is constant.
double Spearman(std::span<const double> xs, std::span<const double> ys);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> AverageRanks(std::span<const double> values);

// --- analogy -------------------------------------------------------------

struct AnalogyQuestion {
  std::array<std::string, 4> words;  // a : b :: c : d
};

struct AnalogySection {
  std::string name;
  std::vector<AnalogyQuestion> questions;

  bool syntactic() const { return name.starts_with("gram"); }
};

struct AnalogyDataset {
  std::vector<AnalogySection> sections;
};

// questions-words format: ": section" headers, then "a b c d" lines.
// Tokens are lowercased.
AnalogyDataset ParseAnalogy(std::istream& in);
AnalogyDataset LoadAnalogy(const std::string& path);

struct AnalogyResult {
  std::size_t semantic_correct = 0;
  std::size_t semantic_total = 0;
  std::size_t syntactic_correct = 0;
  std::size_t syntactic_total = 0;
  std::size_t skipped = 0;

  // Percentages over answered questions; 0 when a partition is empty.
  double semantic_accuracy() const;
  double syntactic_accuracy() const;
};

// 3CosAdd over unit-normalized word vectors, excluding a, b and c.
// Questions with any out-of-vocabulary word are skipped.
AnalogyResult EvalAnalogy(const ModelStore& model, const AnalogyDataset& data);

// --- word similarity -----------------------------------------------------

struct WordSimPair {
  std::string first;
  std::string second;
  double score = 0.0;
};

struct WordSimDataset {
  std::vector<WordSimPair> pairs;
};

// "word1<TAB>word2<TAB>score"; an unparseable first line is a header.
WordSimDataset ParseWordSim(std::istream& in);
WordSimDataset LoadWordSim(const std::string& path);

struct WordSimResult {
  double rho = 0.0;
  std::size_t pairs_used = 0;
};

// Throws DataError when no pair is fully in the vocabulary.
WordSimResult EvalWordSim(const ModelStore& model, const WordSimDataset& data);

// --- definitional nonce --------------------------------------------------

struct NonceItem {
  std::string nonce;
  std::string sentence;
};

struct NonceDataset {
  std::vector<NonceItem> items;
};

// "nonce<TAB>sentence"; the nonce must occur in its tokenized sentence.
NonceDataset ParseNonce(std::istream& in);
NonceDataset LoadNonce(const std::string& path);

double MeanReciprocalRank(std::span<const std::size_t> ranks);
// Mean of the two middle values for even counts.
double MedianRank(std::span<const std::size_t> ranks);

struct NonceResult {
  double mrr = 0.0;
  double median_rank = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::vector<std::size_t> ranks;
};

// Estimates every in-vocabulary nonce from its sentence as if it were OOV
// (its own whole-word subword row is left out) and ranks its true word
// vector against all word vectors.
NonceResult EvalNonce(const ModelStore& model, const PrincipalComponents& pc,
                      const NonceDataset& data,
                      const EstimateOptions& options = {});

// --- contextual rare words -----------------------------------------------

struct CrwPair {
  std::string rare;
  std::string anchor;
  double score = 0.0;
};

struct CrwDataset {
  std::vector<CrwPair> pairs;
  // Context sentences per rare word, in file order.
  std::map<std::string, std::vector<std::string>> contexts;
};

// Pairs TSV "rare<TAB>anchor<TAB>score" plus "<contexts_dir>/<rare>.txt".
// An empty `contexts_dir` means "contexts" next to the pairs file.
CrwDataset LoadCrw(const std::string& pairs_path,
                   const std::string& contexts_dir = "");

// 1, 2, 4, ..., 64.
std::vector<std::size_t> DefaultCrwBudgets();

struct CrwPoint {
  std::size_t budget = 0;
  double rho = 0.0;  // NaN when undefined for this budget
  std::size_t pairs = 0;
};

// Per budget, estimates each rare word from its first min(budget, available)
// contexts and correlates cosine(estimate, anchor) with the human scores.
// Pairs whose anchor is unknown or whose estimate has no signal are left out.
std::vector<CrwPoint> EvalCrw(const ModelStore& model,
                              const PrincipalComponents& pc,
                              const CrwDataset& data,
                              std::span<const std::size_t> budgets,
                              const EstimateOptions& options = {});

}  // namespace evec

#endif  // EVEC_EVAL_H_
