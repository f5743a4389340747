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

#ifndef EVEC_CLI_H_
#define EVEC_CLI_H_

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "evec/config.h"

namespace evec {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumeric = 3,
};

// Runs one command line. Machine-readable output goes to `out`,
// diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// `key = value` lines; `#` starts a comment. Throws DataError on a line
// without '='.
std::vector<std::pair<std::string, std::string>> ParseConfigText(
    const std::string& text);

// Every training flag as `key = value`, in flag order.
std::string FormatConfig(const TrainingConfig& config);

}  // namespace evec

#endif  // EVEC_CLI_H_
