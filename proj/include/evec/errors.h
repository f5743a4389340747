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

#ifndef EVEC_ERRORS_H_
#define EVEC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace evec {

// Input that cannot be used: missing files, malformed datasets, empty
// vocabularies. Maps to exit code 2 on the command line.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyVocabularyError : public DataError {
 public:
  using DataError::DataError;
};

// Model container failures. Each one is reported distinctly.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class TruncatedError : public FormatError {
 public:
  using FormatError::FormatError;
};

class ChecksumError : public FormatError {
 public:
  using FormatError::FormatError;
};

// OOV estimation found neither a known context clue nor a known n-gram.
class NoSignalError : public DataError {
 public:
  explicit NoSignalError(const std::string& word)
      : DataError("no-signal: no known context clues or n-grams for '" +
                  word + "'") {}
};

// Non-finite loss or values during training. Exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace evec

#endif  // EVEC_ERRORS_H_
