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

#include "evec/oov.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "evec/errors.h"

namespace evec {

PrincipalComponents ComputePrincipalComponents(const Matrix& words,
                                               std::size_t k) {
  const std::size_t n = words.rows();
  const std::size_t dim = words.cols();
  if (n <= k) throw DataError("need more words than removed components");
  if (k > dim) throw DataError("cannot remove more components than dimensions");

  Eigen::MatrixXd centered(n, dim);
  for (std::size_t r = 0; r < n; ++r) {
    const float* row = words.row_data(r);
    for (std::size_t c = 0; c < dim; ++c) centered(r, c) = row[c];
  }
  const Eigen::RowVectorXd mean = centered.colwise().mean();
  centered.rowwise() -= mean;

  // Right singular vectors of the centered matrix are the eigenvectors of
  // its Gram matrix.
  const Eigen::MatrixXd gram = centered.transpose() * centered;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  PrincipalComponents pc;
  pc.mean.assign(mean.data(), mean.data() + dim);
  pc.components = BasicMatrix<double>(k, dim);
  const double largest = std::max(0.0, values(static_cast<Eigen::Index>(dim) - 1));
  const double tol = largest * static_cast<double>(dim) *
                     std::numeric_limits<double>::epsilon() * 16;
  for (std::size_t i = 0; i < k; ++i) {
    const auto col = static_cast<Eigen::Index>(dim - 1 - i);
    if (values(col) > tol && largest > 0.0) ++pc.rank;
    double* out = pc.components.row_data(i);
    for (std::size_t c = 0; c < dim; ++c) {
      out[c] = vectors(static_cast<Eigen::Index>(c), col);
    }
    for (std::size_t c = 0; c < dim; ++c) {
      if (std::abs(out[c]) > 1e-12) {
        if (out[c] < 0) {
          for (std::size_t j = 0; j < dim; ++j) out[j] = -out[j];
        }
        break;
      }
    }
  }
  return pc;
}

std::vector<double> RemoveComponents(std::span<const double> x,
                                     const PrincipalComponents& pc) {
  if (x.size() != pc.components.cols()) {
    throw DataError("vector and component dimensions differ");
  }
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t i = 0; i < pc.k(); ++i) {
    const auto p = pc.components.row(i);
    double dot = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) dot += x[c] * p[c];
    for (std::size_t c = 0; c < x.size(); ++c) out[c] -= dot * p[c];
  }
  return out;
}

std::vector<TokenSequence> TokenizeContexts(std::span<const std::string> lines) {
  std::vector<TokenSequence> contexts;
  contexts.reserve(lines.size());
  for (const auto& line : lines) contexts.push_back(Tokenize(line));
  return contexts;
}

namespace {

void RequireEvModel(const ModelStore& model) {
  if (model.mode() != Mode::kEv) {
    throw DataError("OOV estimation needs an EV model, got mode " +
                    std::string(ModeName(model.mode())));
  }
}

template <typename Id>
std::vector<double> MeanRows(const Matrix& m, std::span<const Id> ids) {
  std::vector<double> mean(m.cols(), 0.0);
  for (Id id : ids) {
    const float* row = m.row_data(id);
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += row[c];
  }
  for (double& x : mean) x /= static_cast<double>(ids.size());
  return mean;
}

}  // namespace

std::optional<std::vector<double>> ContextClueEstimate(
    const ModelStore& model, std::string_view word,
    std::span<const TokenSequence> contexts, std::size_t* clues_used) {
  RequireEvModel(model);
  constexpr WordId kMarker = std::numeric_limits<WordId>::max();
  const std::size_t window = model.config.clue_window;
  std::vector<WordId> pool;
  std::vector<WordId> compact;
  for (const auto& tokens : contexts) {
    compact.clear();
    for (const auto& token : tokens) {
      if (token == word) {
        compact.push_back(kMarker);
      } else if (auto id = model.vocab.Find(token)) {
        compact.push_back(*id);
      }
    }
    for (std::size_t t = 0; t < compact.size(); ++t) {
      if (compact[t] != kMarker) continue;
      const std::size_t lo = t >= window ? t - window : 0;
      const std::size_t hi = std::min(compact.size(), t + window + 1);
      for (std::size_t i = lo; i < hi; ++i) {
        if (compact[i] != kMarker) pool.push_back(compact[i]);
      }
    }
  }
  if (clues_used != nullptr) *clues_used = pool.size();
  if (pool.empty()) return std::nullopt;
  return MeanRows<WordId>(model.clues, pool);
}

std::optional<std::vector<double>> SubwordEstimate(const ModelStore& model,
                                                   std::string_view word,
                                                   std::size_t* grams_used,
                                                   bool skip_whole_word) {
  RequireEvModel(model);
  std::vector<SubwordId> grams = model.subwords.GramsOf(word);
  if (skip_whole_word) {
    if (const auto own = model.subwords.Find(WholeWordToken(word))) {
      std::erase(grams, *own);
    }
  }
  if (grams_used != nullptr) *grams_used = grams.size();
  if (grams.empty()) return std::nullopt;
  return MeanRows<SubwordId>(model.subword_vecs, grams);
}

OovEstimate EstimateOov(const ModelStore& model, std::string_view word,
                        std::span<const TokenSequence> contexts,
                        const PrincipalComponents* pc,
                        const EstimateOptions& options) {
  RequireEvModel(model);
  OovEstimate est;
  est.word = std::string(word);
  est.cc_part = ContextClueEstimate(model, word, contexts, &est.clues_used);
  est.sub_part =
      SubwordEstimate(model, word, &est.grams_used, options.skip_whole_word);
  if (!est.cc_part && !est.sub_part) throw NoSignalError(est.word);

  if (est.cc_part && options.postprocess) {
    if (pc == nullptr) throw DataError("post-processing needs principal components");
    if (options.subtract_mean) {
      for (std::size_t c = 0; c < est.cc_part->size(); ++c) {
        (*est.cc_part)[c] -= pc->mean[c];
      }
    }
    est.cc_part = RemoveComponents(*est.cc_part, *pc);
  }
  est.combined.assign(model.dim(), 0.0);
  for (const auto* part : {&est.cc_part, &est.sub_part}) {
    if (!*part) continue;
    for (std::size_t c = 0; c < est.combined.size(); ++c) {
      est.combined[c] += (**part)[c];
    }
  }
  return est;
}

}  // namespace evec
