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

#ifndef EVEC_CONFIG_H_
#define EVEC_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace evec {

// EV: joint word / context-clue / subword model.
// SG: skipgram baseline (input vectors live in the clue matrix).
// FT: subword-sum baseline (no clue matrix).
enum class Mode : std::uint32_t { kEv = 0, kSg = 1, kFt = 2 };

std::string_view ModeName(Mode mode);
// Accepts "ev", "sg", "ft" (case-insensitive). Throws DataError otherwise.
Mode ParseMode(std::string_view name);

struct TrainingConfig {
  std::uint32_t dim = 300;
  std::uint64_t min_count = 100;
  double subsample_threshold = 1e-4;
  std::uint32_t max_window = 5;
  std::uint32_t clue_window = 3;
  std::uint32_t negatives = 5;
  std::uint32_t epochs = 5;
  double lr0 = 0.025;
  double lr_min = 0.0001;
  std::uint32_t n_min = 3;
  std::uint32_t n_max = 5;
  std::uint32_t min_gram_words = 3;
  Mode mode = Mode::kEv;
  std::uint32_t workers = 1;
  std::uint64_t seed = 1;

  // Throws DataError when a field is out of range.
  void Validate() const;

  bool operator==(const TrainingConfig&) const = default;
};

}  // namespace evec

#endif  // EVEC_CONFIG_H_
