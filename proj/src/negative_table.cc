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

#include "evec/negative_table.h"

#include <cmath>

#include "evec/errors.h"

namespace evec {

NegativeSamplingTable::NegativeSamplingTable(const Vocabulary& vocab,
                                             double power) {
  const std::size_t n = vocab.size();
  if (n == 0) throw DataError("negative table needs a non-empty vocabulary");
  probabilities_.resize(n);
  double total = 0.0;
  for (WordId w = 0; w < n; ++w) {
    probabilities_[w] = std::pow(static_cast<double>(vocab.count(w)), power);
    total += probabilities_[w];
  }
  for (double& p : probabilities_) p /= total;

  accept_.assign(n, 1.0);
  alias_.resize(n);
  std::vector<double> scaled(n);
  std::vector<WordId> small, large;
  for (WordId w = 0; w < n; ++w) {
    alias_[w] = w;
    scaled[w] = probabilities_[w] * static_cast<double>(n);
    (scaled[w] < 1.0 ? small : large).push_back(w);
  }
  while (!small.empty() && !large.empty()) {
    const WordId s = small.back();
    small.pop_back();
    const WordId l = large.back();
    accept_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (WordId w : small) accept_[w] = 1.0;
  for (WordId w : large) accept_[w] = 1.0;
}

WordId NegativeSamplingTable::Draw(Rng& rng) const {
  const auto column = static_cast<WordId>(
      (static_cast<unsigned __int128>(rng()) * accept_.size()) >> 64);
  const double coin = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return coin < accept_[column] ? column : alias_[column];
}

void DrawNegatives(const NegativeSamplingTable& table, WordId positive,
                   std::uint32_t count, Rng& rng, std::vector<WordId>& out) {
  out.clear();
  for (std::uint32_t i = 0; i < count; ++i) {
    WordId n = table.Draw(rng);
    for (int attempt = 0; n == positive && attempt < kMaxNegativeRedraws;
         ++attempt) {
      n = table.Draw(rng);
    }
    if (n != positive) out.push_back(n);
  }
}

}  // namespace evec
