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

#include <cmath>
#include <random>

#include "doctest.h"
#include "evec/errors.h"
#include "evec/trainer.h"

namespace evec {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Matrix RandomMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> value(0.0f, 1.0f);
  Matrix m(rows, cols);
  for (float& x : m.values()) x = value(rng);
  return m;
}

// A small EV model with random parameters.
ModelStore ToyModel(Mode mode = Mode::kEv, std::uint32_t dim = 6) {
  Vocabulary vocab({{"the", 50},
                    {"car", 20},
                    {"yellow", 10},
                    {"sped", 9},
                    {"up", 8},
                    {"quickly", 7},
                    {"red", 6},
                    {"truck", 5},
                    {"drove", 4},
                    {"slowly", 3}},
                   1);
  TrainingConfig config;
  config.mode = mode;
  config.dim = dim;
  config.min_count = 1;
  config.min_gram_words = 1;
  auto subwords = mode == Mode::kSg ? SubwordVocabulary{}
                                    : BuildSubwordVocab(vocab, 3, 5, 1);
  Rng rng(4);
  ModelStore model = InitModel(std::move(vocab), std::move(subwords), config, rng);
  model.words = RandomMatrix(model.words.rows(), dim, 10);
  if (!model.clues.empty()) model.clues = RandomMatrix(model.clues.rows(), dim, 11);
  if (!model.subword_vecs.empty()) {
    model.subword_vecs = RandomMatrix(model.subword_vecs.rows(), dim, 12);
  }
  return model;
}

std::vector<double> MeanOfClues(const ModelStore& m, const std::vector<std::string>& words) {
  std::vector<double> out(m.dim(), 0.0);
  for (const auto& w : words) {
    const auto row = m.clues.row(*m.vocab.Find(w));
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += row[c];
  }
  for (double& x : out) x /= static_cast<double>(words.size());
  return out;
}

void CheckClose(std::span<const double> a, std::span<const double> b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < tol);
}

TEST_CASE("principal components are orthonormal and sign-fixed") {
  const Matrix words = RandomMatrix(40, 8, 1);
  const auto pc = ComputePrincipalComponents(words);
  REQUIRE(pc.k() == 3);
  CHECK(pc.rank == 3);
  CHECK_FALSE(pc.degenerate());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double d = Dot(pc.components.row(i), pc.components.row(j));
      CHECK(std::abs(d - (i == j ? 1.0 : 0.0)) < 1e-6);
    }
    for (double x : pc.components.row(i)) {
      if (std::abs(x) > 1e-12) {
        CHECK(x > 0);
        break;
      }
    }
  }
  // The mean is the column mean.
  double col0 = 0;
  for (std::size_t r = 0; r < 40; ++r) col0 += words.row(r)[0];
  CHECK(pc.mean[0] == doctest::Approx(col0 / 40));

  CHECK_THROWS_AS(ComputePrincipalComponents(RandomMatrix(3, 8, 1)), DataError);
  CHECK_THROWS_AS(ComputePrincipalComponents(RandomMatrix(40, 2, 1)), DataError);
}

TEST_CASE("a dominant axis becomes the first component") {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> big(0.0f, 10.0f), small(0.0f, 0.1f);
  Matrix words(200, 5);
  for (std::size_t r = 0; r < 200; ++r) {
    auto row = words.row(r);
    row[0] = big(rng);
    for (std::size_t c = 1; c < 5; ++c) row[c] = small(rng);
  }
  const auto pc = ComputePrincipalComponents(words);
  CHECK(std::abs(pc.components.row(0)[0]) > 0.99);
  CHECK(pc.components.row(0)[0] > 0);
}

TEST_CASE("identical rows are flagged degenerate") {
  Matrix words(10, 4);
  for (std::size_t r = 0; r < 10; ++r) {
    for (std::size_t c = 0; c < 4; ++c) words.row(r)[c] = static_cast<float>(c + 1);
  }
  const auto pc = ComputePrincipalComponents(words);
  CHECK(pc.rank == 0);
  CHECK(pc.degenerate());
  CHECK(pc.k() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double d = Dot(pc.components.row(i), pc.components.row(j));
      CHECK(std::abs(d - (i == j ? 1.0 : 0.0)) < 1e-6);
    }
  }
}

TEST_CASE("removing components") {
  PrincipalComponents e1;
  e1.mean = {0, 0};
  e1.components = BasicMatrix<double>(1, 2);
  e1.components.row(0)[0] = 1.0;
  e1.rank = 1;
  const std::vector<double> x = {3, 4};
  CHECK(RemoveComponents(x, e1) == std::vector<double>{0, 4});
  const std::vector<double> orth = {0, 7};
  CHECK(RemoveComponents(orth, e1) == orth);
  CHECK_THROWS_AS(RemoveComponents(std::vector<double>{1, 2, 3}, e1), DataError);

  const auto pc = ComputePrincipalComponents(RandomMatrix(50, 10, 8));
  std::mt19937_64 rng(9);
  std::normal_distribution<double> value(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(10);
    for (double& a : v) a = value(rng);
    const auto once = RemoveComponents(v, pc);
    for (std::size_t i = 0; i < pc.k(); ++i) {
      CHECK(std::abs(Dot(once, pc.components.row(i))) < 1e-6);
    }
    CheckClose(RemoveComponents(once, pc), once, 1e-6);
  }
}

TEST_CASE("context clue estimate") {
  const ModelStore m = ToyModel();
  const std::vector<TokenSequence> one = {{"the", "yellow", "blorp", "sped", "up"}};
  std::size_t used = 0;
  const auto cc = ContextClueEstimate(m, "blorp", one, &used);
  REQUIRE(cc.has_value());
  CHECK(used == 4);
  CheckClose(*cc, MeanOfClues(m, {"the", "yellow", "sped", "up"}), 1e-9);

  // Pooled over two contexts with three and two clues. Unknown tokens are
  // dropped before windowing.
  const std::vector<TokenSequence> three = {{"red", "truck", "drove", "blorp"},
                                            {"zzz", "the", "blorp", "slowly", "qqq"}};
  const std::vector<TokenSequence> two = {{"red", "truck", "blorp"},
                                          {"zzz", "blorp", "slowly", "qqq"}};
  const auto pooled = ContextClueEstimate(m, "blorp", three, &used);
  REQUIRE(pooled.has_value());
  CHECK(used == 5);
  CheckClose(*pooled, MeanOfClues(m, {"red", "truck", "drove", "the", "slowly"}), 1e-9);
  const auto pooled2 = ContextClueEstimate(m, "blorp", two, &used);
  REQUIRE(pooled2.has_value());
  CHECK(used == 3);

  // Extra occurrences hold their slot but are not clues.
  const std::vector<TokenSequence> repeat = {
      {"blorp", "blorp", "car", "the", "up", "sped", "quickly"}};
  const auto rep = ContextClueEstimate(m, "blorp", repeat, &used);
  REQUIRE(rep.has_value());
  // Window of 3 from position 0 reaches car, the; from 1 reaches car, the, up.
  CHECK(used == 5);
  CheckClose(*rep, MeanOfClues(m, {"car", "the", "car", "the", "up"}), 1e-9);

  const std::vector<TokenSequence> none = {{"zzz", "blorp", "qqq"}};
  CHECK_FALSE(ContextClueEstimate(m, "blorp", none).has_value());
  CHECK_FALSE(ContextClueEstimate(m, "blorp", {}).has_value());
  // A context that never mentions the word contributes nothing.
  const std::vector<TokenSequence> absent = {{"the", "car"}};
  CHECK_FALSE(ContextClueEstimate(m, "blorp", absent).has_value());
}

TEST_CASE("pooling order does not matter") {
  const ModelStore m = ToyModel();
  std::vector<TokenSequence> ctx = {{"the", "blorp", "car"},
                                    {"yellow", "sped", "blorp", "up", "quickly"},
                                    {"blorp", "red", "red", "truck"}};
  const auto a = ContextClueEstimate(m, "blorp", ctx);
  std::swap(ctx[0], ctx[2]);
  std::swap(ctx[1], ctx[2]);
  const auto b = ContextClueEstimate(m, "blorp", ctx);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CheckClose(*a, *b, 1e-6);
}

TEST_CASE("subword estimate") {
  const ModelStore m = ToyModel();
  std::size_t used = 0;
  const auto sub = SubwordEstimate(m, "yellow", &used);
  REQUIRE(sub.has_value());
  const auto grams = m.subwords.word_grams(*m.vocab.Find("yellow"));
  CHECK(used == grams.size());
  std::vector<double> expected(m.dim(), 0.0);
  for (SubwordId g : grams) {
    for (std::size_t c = 0; c < expected.size(); ++c) {
      expected[c] += m.subword_vecs.row(g)[c];
    }
  }
  for (double& x : expected) x /= static_cast<double>(grams.size());
  CheckClose(*sub, expected, 1e-9);

  CHECK_FALSE(SubwordEstimate(m, "zzzzq").has_value());
  std::size_t without_own = 0;
  REQUIRE(SubwordEstimate(m, "yellow", &without_own, true).has_value());
  CHECK(without_own + 1 == grams.size());
  SubwordEstimate(m, "yellowed", &without_own, true);
  std::size_t with_own = 0;
  SubwordEstimate(m, "yellowed", &with_own);
  CHECK(without_own == with_own);
  // An unseen word built from known pieces.
  const auto partial = SubwordEstimate(m, "yellowed", &used);
  REQUIRE(partial.has_value());
  CHECK(used > 0);
  CHECK(used < ExtractNgrams("yellowed", 3, 5).size());
}

TEST_CASE("subword estimate matches the training-time average") {
  ModelStore m = ToyModel();
  // With identical word rows the sub term's loss depends only on sub . v,
  // whichever negatives are drawn.
  for (std::size_t r = 0; r < m.words.rows(); ++r) {
    for (std::size_t c = 0; c < m.dim(); ++c) {
      m.words.row(r)[c] = 0.1f * static_cast<float>(c + 1);
    }
  }
  const WordId target = *m.vocab.Find("quickly");
  const auto sub = SubwordEstimate(m, "quickly");
  REQUIRE(sub.has_value());
  double s = 0;
  for (std::size_t c = 0; c < m.dim(); ++c) s += (*sub)[c] * m.words.row(0)[c];
  const double lsig = -std::log1p(std::exp(-s));
  const double lsig_neg = -std::log1p(std::exp(s));
  const double expected = -lsig - m.config.negatives * lsig_neg;

  const NegativeSamplingTable table(m.vocab);
  Rng rng(2);
  StepScratch<float> scratch;
  const double loss = EvStep(m, target, *m.vocab.Find("the"), {}, 0.0, table, rng, scratch);
  CHECK(loss == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("combined estimate") {
  const ModelStore m = ToyModel();
  const auto pc = ComputePrincipalComponents(m.words);
  const std::vector<TokenSequence> ctx = {{"the", "yellow", "blorp", "sped", "up"}};

  // Contexts that never mention the word leave only the subword part.
  const auto est = EstimateOov(m, "yellower", ctx, &pc);
  CHECK(est.word == "yellower");
  CHECK_FALSE(est.cc_part.has_value());
  REQUIRE(est.sub_part.has_value());

  const auto cc = *ContextClueEstimate(m, "blorp", ctx);
  const std::vector<TokenSequence> marked = {{"the", "yellow", "yellower", "sped", "up"}};
  const auto est2 = EstimateOov(m, "yellower", marked, &pc);
  REQUIRE(est2.cc_part.has_value());
  REQUIRE(est2.sub_part.has_value());
  CheckClose(*est2.cc_part, RemoveComponents(cc, pc), 1e-9);
  for (std::size_t c = 0; c < m.dim(); ++c) {
    CHECK(est2.combined[c] == doctest::Approx((*est2.cc_part)[c] + (*est2.sub_part)[c]));
  }
  CHECK(est2.clues_used == 4);
  CHECK(est2.grams_used > 0);

  EstimateOptions raw;
  raw.postprocess = false;
  const auto plain = EstimateOov(m, "yellower", marked, nullptr, raw);
  CheckClose(*plain.cc_part, cc, 1e-9);

  EstimateOptions centered;
  centered.subtract_mean = true;
  const auto shifted = EstimateOov(m, "yellower", marked, &pc, centered);
  std::vector<double> minus_mean = cc;
  for (std::size_t c = 0; c < m.dim(); ++c) minus_mean[c] -= pc.mean[c];
  CheckClose(*shifted.cc_part, RemoveComponents(minus_mean, pc), 1e-9);

  // Deterministic.
  CHECK(EstimateOov(m, "yellower", marked, &pc).combined == est2.combined);

  const auto only_sub = EstimateOov(m, "yellower", {}, &pc);
  CHECK_FALSE(only_sub.cc_part.has_value());
  CHECK(only_sub.combined == *only_sub.sub_part);

  const auto only_cc = EstimateOov(m, "zzzzq", std::vector<TokenSequence>{{"the", "zzzzq"}}, &pc);
  CHECK_FALSE(only_cc.sub_part.has_value());
  CHECK(only_cc.combined == *only_cc.cc_part);

  CHECK_THROWS_AS(EstimateOov(m, "zzzzq", {}, &pc), NoSignalError);
  CHECK_THROWS_AS(EstimateOov(ToyModel(Mode::kSg), "car", {}, &pc), DataError);
  const std::vector<TokenSequence> with_car = {{"the", "car", "sped"}};
  CHECK_THROWS_AS(EstimateOov(m, "car", with_car, nullptr), DataError);
}

TEST_CASE("contexts are tokenized like the corpus") {
  const std::vector<std::string> lines = {"The Yellow car, sped!", ""};
  const auto ctx = TokenizeContexts(lines);
  REQUIRE(ctx.size() == 2);
  CHECK(ctx[0] == TokenSequence{"the", "yellow", "car", "sped"});
  CHECK(ctx[1].empty());
}

}  // namespace
}  // namespace evec
