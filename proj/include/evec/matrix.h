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

#ifndef EVEC_MATRIX_H_
#define EVEC_MATRIX_H_

#include <cstddef>
#include <span>
#include <vector>

namespace evec {

// Dense row-major matrix. Rows are the unit of access everywhere.
template <typename T>
class BasicMatrix {
 public:
  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  T* row_data(std::size_t r) { return data_.data() + r * cols_; }
  const T* row_data(std::size_t r) const { return data_.data() + r * cols_; }
  std::span<T> row(std::size_t r) { return {row_data(r), cols_}; }
  std::span<const T> row(std::size_t r) const { return {row_data(r), cols_}; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool operator==(const BasicMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Matrix = BasicMatrix<float>;

}  // namespace evec

#endif  // EVEC_MATRIX_H_
