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

#include "evec/config.h"

#include <algorithm>
#include <cctype>
#include <string>

#include "evec/errors.h"

namespace evec {

std::string_view ModeName(Mode mode) {
  switch (mode) {
    case Mode::kEv:
      return "ev";
    case Mode::kSg:
      return "sg";
    case Mode::kFt:
      return "ft";
  }
  return "unknown";
}

Mode ParseMode(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "ev") return Mode::kEv;
  if (lower == "sg") return Mode::kSg;
  if (lower == "ft") return Mode::kFt;
  throw DataError("unknown mode '" + std::string(name) + "'");
}

void TrainingConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DataError(std::string("invalid config: ") + what);
  };
  require(dim >= 1, "dim must be >= 1");
  require(min_count >= 1, "min_count must be >= 1");
  require(subsample_threshold > 0.0, "subsample_threshold must be > 0");
  require(max_window >= 1, "max_window must be >= 1");
  require(clue_window >= 1, "clue_window must be >= 1");
  require(negatives >= 1, "negatives must be >= 1");
  require(epochs >= 1, "epochs must be >= 1");
  require(lr0 > 0.0, "lr0 must be > 0");
  require(lr_min > 0.0 && lr_min <= lr0, "lr_min must be in (0, lr0]");
  require(n_min >= 1 && n_min <= n_max, "need 1 <= n_min <= n_max");
  require(min_gram_words >= 1, "min_gram_words must be >= 1");
  require(workers >= 1, "workers must be >= 1");
  require(mode == Mode::kEv || mode == Mode::kSg || mode == Mode::kFt,
          "unknown mode");
}

}  // namespace evec
