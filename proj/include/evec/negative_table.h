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

#ifndef EVEC_NEGATIVE_TABLE_H_
#define EVEC_NEGATIVE_TABLE_H_

#include <cstdint>
#include <vector>

#include "evec/corpus.h"

namespace evec {

// Draws word ids with probability count(w)^power / sum(count^power) in O(1)
// per draw using Vose's alias method.
class NegativeSamplingTable {
 public:
  static constexpr double kDefaultPower = 0.75;

  explicit NegativeSamplingTable(const Vocabulary& vocab,
                                 double power = kDefaultPower);

  std::size_t size() const { return probabilities_.size(); }
  // Exact target probability of `id`.
  double probability(WordId id) const { return probabilities_[id]; }
  WordId Draw(Rng& rng) const;

 private:
  std::vector<double> probabilities_;
  std::vector<double> accept_;
  std::vector<WordId> alias_;
};

inline constexpr int kMaxNegativeRedraws = 8;

// Fills `out` with up to `count` negatives, none equal to `positive`. A draw
// that still collides after kMaxNegativeRedraws redraws is dropped.
void DrawNegatives(const NegativeSamplingTable& table, WordId positive,
                   std::uint32_t count, Rng& rng, std::vector<WordId>& out);

}  // namespace evec

#endif  // EVEC_NEGATIVE_TABLE_H_
