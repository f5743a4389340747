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

#ifndef EVEC_TESTS_GRADIENT_ORACLE_H_
#define EVEC_TESTS_GRADIENT_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "evec/config.h"
#include "evec/matrix.h"
#include "evec/trainer.h"

namespace evec::testing {

// One training example in double precision. `inputs` is the clue matrix in
// EV mode and the skipgram input matrix in SG mode.
struct StepProblem {
  Mode mode = Mode::kEv;
  BasicMatrix<double> words, inputs, subwords;
  WordId target = 0;
  WordId context = 0;
  std::vector<WordId> clue_ids;
  std::vector<SubwordId> gram_ids;
  std::vector<WordId> negatives;
};

// log(1 / (1 + e^-x)), written out directly.
inline double OracleLogSigmoid(double x) { return -std::log1p(std::exp(-x)); }

inline double OracleDot(const std::vector<double>& a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// The per-pair loss of each mode, evaluated from scratch.
inline double OracleLoss(const StepProblem& p) {
  const std::size_t dim = p.words.cols();
  auto pair_loss = [&](const std::vector<double>& x) {
    double e = -OracleLogSigmoid(OracleDot(x, p.words.row(p.context)));
    for (WordId n : p.negatives) e -= OracleLogSigmoid(-OracleDot(x, p.words.row(n)));
    return e;
  };
  auto combine = [&](const BasicMatrix<double>& m, const auto& ids, bool mean) {
    std::vector<double> x(dim, 0.0);
    for (auto id : ids) {
      for (std::size_t c = 0; c < dim; ++c) x[c] += m.row(id)[c];
    }
    if (mean) {
      for (double& v : x) v /= static_cast<double>(ids.size());
    }
    return x;
  };
  switch (p.mode) {
    case Mode::kEv: {
      double e = 0.0;
      if (!p.clue_ids.empty()) e += pair_loss(combine(p.inputs, p.clue_ids, true));
      if (!p.gram_ids.empty()) e += pair_loss(combine(p.subwords, p.gram_ids, true));
      return e;
    }
    case Mode::kSg: {
      const auto u = p.inputs.row(p.target);
      return pair_loss(std::vector<double>(u.begin(), u.end()));
    }
    case Mode::kFt:
      return pair_loss(combine(p.subwords, p.gram_ids, false));
  }
  return 0.0;
}

// Runs the library kernel for the problem's mode.
inline double RunKernel(StepProblem& p, double lr) {
  StepScratch<double> scratch;
  switch (p.mode) {
    case Mode::kEv:
      return EvUpdate(p.words, p.inputs, p.subwords, p.context, p.clue_ids,
                      p.gram_ids, p.negatives, lr, scratch);
    case Mode::kSg:
      return SgUpdate(p.words, p.inputs, p.target, p.context, p.negatives, lr, scratch);
    case Mode::kFt:
      return FtUpdate(p.words, p.subwords, p.gram_ids, p.context, p.negatives, lr,
                      scratch);
  }
  return 0.0;
}

inline StepProblem RandomProblem(Mode mode, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim_pick(1, 10), words_pick(4, 8), grams_pick(3, 8);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  StepProblem p;
  p.mode = mode;
  const auto dim = static_cast<std::size_t>(dim_pick(rng));
  const auto nw = static_cast<std::size_t>(words_pick(rng));
  const auto ng = static_cast<std::size_t>(grams_pick(rng));
  p.words = BasicMatrix<double>(nw, dim);
  p.inputs = BasicMatrix<double>(mode == Mode::kFt ? 0 : nw, dim);
  p.subwords = BasicMatrix<double>(mode == Mode::kSg ? 0 : ng, dim);
  for (auto* m : {&p.words, &p.inputs, &p.subwords}) {
    for (double& v : m->values()) v = value(rng);
  }
  std::uniform_int_distribution<WordId> word(0, static_cast<WordId>(nw - 1));
  p.target = word(rng);
  p.context = word(rng);
  const int negs = std::uniform_int_distribution<int>(1, 5)(rng);
  while (static_cast<int>(p.negatives.size()) < negs) {
    const WordId n = word(rng);
    if (n != p.context) p.negatives.push_back(n);  // duplicates allowed
  }
  if (mode != Mode::kSg) {
    std::vector<SubwordId> all(ng);
    for (SubwordId g = 0; g < ng; ++g) all[g] = g;
    std::shuffle(all.begin(), all.end(), rng);
    const int min_grams = mode == Mode::kFt ? 1 : 0;
    const auto count = static_cast<std::size_t>(
        std::uniform_int_distribution<int>(min_grams, std::min<int>(4, ng))(rng));
    p.gram_ids.assign(all.begin(), all.begin() + count);
  }
  if (mode == Mode::kEv) {
    const int clues = std::uniform_int_distribution<int>(p.gram_ids.empty() ? 1 : 0, 6)(rng);
    for (int i = 0; i < clues; ++i) p.clue_ids.push_back(word(rng));
  }
  return p;
}

struct GradientCheck {
  double max_relative_error = 0.0;  // max |a - n| / max(max |a|, max |n|)
  bool untouched_rows_unchanged = true;
};

// Analytic gradient from one kernel step at lr = 1 (the kernel changes
// every parameter by exactly -dE/dparam); numeric gradient from central
// differences of OracleLoss with step h.
inline GradientCheck CheckGradient(const StepProblem& problem, double h = 1e-5) {
  StepProblem stepped = problem;
  RunKernel(stepped, 1.0);

  std::vector<double> analytic, numeric;
  GradientCheck result;
  StepProblem probe = problem;
  auto visit = [&](BasicMatrix<double> StepProblem::*member, auto touched) {
    BasicMatrix<double>& m = probe.*member;
    const BasicMatrix<double>& before = problem.*member;
    const BasicMatrix<double>& after = stepped.*member;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        const double a = before.row(r)[c] - after.row(r)[c];
        const double orig = m.row(r)[c];
        m.row(r)[c] = orig + h;
        const double up = OracleLoss(probe);
        m.row(r)[c] = orig - h;
        const double down = OracleLoss(probe);
        m.row(r)[c] = orig;
        analytic.push_back(a);
        numeric.push_back((up - down) / (2 * h));
        if (!touched(r) && a != 0.0) result.untouched_rows_unchanged = false;
      }
    }
  };
  auto contains = [](const auto& ids, std::size_t r) {
    return std::find(ids.begin(), ids.end(), r) != ids.end();
  };
  visit(&StepProblem::words, [&](std::size_t r) {
    return r == problem.context || contains(problem.negatives, r);
  });
  visit(&StepProblem::inputs, [&](std::size_t r) {
    return problem.mode == Mode::kSg ? r == problem.target
                                     : contains(problem.clue_ids, r);
  });
  visit(&StepProblem::subwords,
        [&](std::size_t r) { return contains(problem.gram_ids, r); });

  double scale = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]));
  }
  result.max_relative_error = scale == 0.0 ? 0.0 : worst / scale;
  return result;
}

}  // namespace evec::testing

#endif  // EVEC_TESTS_GRADIENT_ORACLE_H_
