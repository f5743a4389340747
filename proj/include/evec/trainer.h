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

#ifndef EVEC_TRAINER_H_
#define EVEC_TRAINER_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "evec/config.h"
#include "evec/corpus.h"
#include "evec/matrix.h"
#include "evec/model.h"
#include "evec/negative_table.h"
#include "evec/subwords.h"

namespace evec {

// Positions within a sentence.
struct TrainingPair {
  std::uint32_t target;
  std::uint32_t context;

  bool operator==(const TrainingPair&) const = default;
};

// Dynamic window radius, uniform on [1, max_window].
std::uint32_t DrawRadius(std::uint32_t max_window, Rng& rng);

// Appends (target, c) for every c in [target - radius, target + radius],
// c != target, clipped to [0, length).
void AppendWindowPairs(std::size_t length, std::size_t target,
                       std::uint32_t radius, std::vector<TrainingPair>& out);

// One radius draw per target position, in order.
std::vector<TrainingPair> GeneratePairs(std::span<const WordId> sentence,
                                        std::uint32_t max_window, Rng& rng);

// Ids at positions [target - clue_window, target + clue_window] except the
// target itself, clipped to the sentence. Duplicates are kept.
std::vector<WordId> CollectContextClues(std::span<const WordId> sentence,
                                        std::size_t target,
                                        std::uint32_t clue_window);

// Per-thread buffers for the update kernels.
template <typename T>
struct StepScratch {
  std::vector<T> cc, sub, grad_cc, grad_sub;
  std::vector<double> coeff_cc, coeff_sub;
  std::vector<WordId> negatives;
};

// Update kernels. Each returns the loss at the pre-update parameters and
// applies one SGD step of size `lr`. All gradients are taken at the
// pre-update point, so the change in every row is exactly -lr * dE/drow.

// EV: cc = mean of clue rows over `clue_ids`, sub = mean of subword rows over
// `gram_ids`; both scored against words[context] (label 1) and
// words[negatives] (label 0). A term whose set is empty is dropped; if both
// are empty nothing happens and 0 is returned.
template <typename T>
double EvUpdate(BasicMatrix<T>& words, BasicMatrix<T>& clues,
                BasicMatrix<T>& subwords, WordId context,
                std::span<const WordId> clue_ids,
                std::span<const SubwordId> gram_ids,
                std::span<const WordId> negatives, double lr,
                StepScratch<T>& scratch);

// Skipgram: inputs[target] scored against words.
template <typename T>
double SgUpdate(BasicMatrix<T>& words, BasicMatrix<T>& inputs, WordId target,
                WordId context, std::span<const WordId> negatives, double lr,
                StepScratch<T>& scratch);

// Subword sum: sum of subword rows over `gram_ids` scored against words.
// The gradient reaches every gram row undivided.
template <typename T>
double FtUpdate(BasicMatrix<T>& words, BasicMatrix<T>& subwords,
                std::span<const SubwordId> gram_ids, WordId context,
                std::span<const WordId> negatives, double lr,
                StepScratch<T>& scratch);

// Model-level steps: draw negatives, then run the kernel for the mode.
double EvStep(ModelStore& model, WordId target, WordId context,
              std::span<const WordId> clue_ids, double lr,
              const NegativeSamplingTable& table, Rng& rng,
              StepScratch<float>& scratch);
double SgStep(ModelStore& model, WordId target, WordId context, double lr,
              const NegativeSamplingTable& table, Rng& rng,
              StepScratch<float>& scratch);
double FtStep(ModelStore& model, WordId target, WordId context, double lr,
              const NegativeSamplingTable& table, Rng& rng,
              StepScratch<float>& scratch);

// epochs * expected_tokens * (max_window + 1); window clipping ignored.
double EstimateTotalPairs(const TrainingConfig& config,
                          double expected_tokens_per_epoch);

// max(lr_min, lr0 * (1 - pairs_done / pairs_total)).
double LearningRate(const TrainingConfig& config, double pairs_done,
                    double pairs_total);

struct EpochReport {
  std::uint32_t epoch = 0;  // 1-based
  std::uint64_t pairs = 0;
  double mean_loss = 0.0;
  double seconds = 0.0;
  double pairs_per_second = 0.0;
  double final_lr = 0.0;
};

struct TrainOptions {
  // Progress lines go here when set.
  std::ostream* progress = nullptr;
};

struct TrainResult {
  ModelStore model;
  std::vector<EpochReport> epochs;
};

// Builds the vocabularies, initializes a model, and runs all epochs.
TrainResult Train(const std::string& corpus_path, const TrainingConfig& config,
                  const TrainOptions& options = {});

// Runs config.epochs passes over the corpus on an initialized model. Workers
// read disjoint byte ranges and update the shared matrices without locks;
// only workers == 1 is reproducible. Throws NumericError on a non-finite
// loss.
std::vector<EpochReport> RunEpochs(ModelStore& model,
                                   const std::string& corpus_path,
                                   const TrainOptions& options = {});

}  // namespace evec

#endif  // EVEC_TRAINER_H_
