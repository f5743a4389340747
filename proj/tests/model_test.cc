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

#include "evec/model.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "evec/errors.h"
#include "test_util.h"

namespace evec {
namespace {

Vocabulary Words(std::size_t n) {
  std::vector<Vocabulary::Entry> entries;
  for (std::size_t i = 0; i < n; ++i) {
    entries.push_back({"w" + std::to_string(i), 1000 - i});
  }
  return Vocabulary(std::move(entries), 1);
}

ModelStore RandomModel(std::size_t words, std::uint32_t dim, Mode mode,
                       std::uint64_t seed) {
  TrainingConfig config;
  config.dim = dim;
  config.mode = mode;
  Vocabulary vocab = Words(words);
  SubwordVocabulary sub;
  if (mode != Mode::kSg) sub = BuildSubwordVocab(vocab, 2, 3, 2);
  Rng rng(seed);
  ModelStore m = InitModel(std::move(vocab), std::move(sub), config, rng);
  std::normal_distribution<float> normal;
  for (float& v : m.words.values()) v = normal(rng);
  return m;
}

TEST_CASE("init_model") {
  TrainingConfig config;
  config.dim = 100;
  Rng rng(1);
  Vocabulary vocab = Words(20);
  auto sub = BuildSubwordVocab(vocab, 3, 5, 3);
  const std::size_t grams = sub.size();
  const ModelStore m = InitModel(vocab, sub, config, rng);
  CHECK(m.words.rows() == 20);
  CHECK(m.clues.rows() == 20);
  CHECK(m.subword_vecs.rows() == grams);
  for (float v : m.words.values()) CHECK(v == 0.0f);
  bool nonzero = false;
  for (const Matrix* mat : {&m.clues, &m.subword_vecs}) {
    for (float v : mat->values()) {
      CHECK(v >= -0.005f);
      CHECK(v <= 0.005f);
      nonzero |= v != 0.0f;
    }
  }
  CHECK(nonzero);

  Rng again(1);
  CHECK(InitModel(vocab, sub, config, again) == m);

  config.dim = 300;
  Rng r3(9);
  const ModelStore big = InitModel(vocab, sub, config, r3);
  CHECK(std::all_of(big.words.values().begin(), big.words.values().end(),
                    [](float v) { return v == 0.0f; }));
}

TEST_CASE("baseline modes leave the unused matrix empty") {
  const ModelStore sg = RandomModel(10, 4, Mode::kSg, 1);
  CHECK(sg.clues.rows() == 10);
  CHECK(sg.subword_vecs.empty());
  const ModelStore ft = RandomModel(10, 4, Mode::kFt, 1);
  CHECK(ft.clues.empty());
  CHECK(ft.subword_vecs.rows() == ft.subwords.size());
}

TEST_CASE("save and load round-trip bit-exactly") {
  testing::TempDir dir;
  for (Mode mode : {Mode::kEv, Mode::kSg, Mode::kFt}) {
    ModelStore m = RandomModel(25, 7, mode, 4);
    m.config.seed = 99;
    m.config.lr0 = 0.0123456789;
    m.words.row(3)[2] = -0.0f;
    const std::string path = dir.File("m.bin");
    SaveModel(m, path);
    const ModelStore loaded = LoadModel(path);
    CHECK(loaded == m);
    CHECK(SerializeModel(loaded) == testing::ReadFile(path));
  }
}

TEST_CASE("corrupt model files are reported distinctly") {
  const std::string good = SerializeModel(RandomModel(12, 5, Mode::kEv, 2));
  REQUIRE_NOTHROW(DeserializeModel(good));

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(DeserializeModel(bad_magic), FormatError);
  CHECK_THROWS_AS(DeserializeModel("junk"), FormatError);

  std::string bad_version = good;
  bad_version[8] = 7;
  CHECK_THROWS_AS(DeserializeModel(bad_version), VersionError);

  // Header intact, payload cut short.
  CHECK_THROWS_AS(DeserializeModel(good.substr(0, good.size() / 2)), TruncatedError);
  CHECK_THROWS_AS(DeserializeModel(good.substr(0, good.size() - 2)), TruncatedError);
  CHECK_THROWS_AS(DeserializeModel(good.substr(0, 5)), TruncatedError);

  std::string flipped = good;
  flipped[good.size() - 20] ^= 0x10;  // inside the last matrix payload
  CHECK_THROWS_AS(DeserializeModel(flipped), ChecksumError);

  CHECK_THROWS_AS(DeserializeModel(good + "x"), FormatError);
  CHECK_THROWS_AS(LoadModel("/nonexistent/model.bin"), DataError);
}

TEST_CASE("payload is little-endian IEEE-754") {
  TrainingConfig config;
  config.dim = 1;
  config.mode = Mode::kSg;
  Rng rng(1);
  ModelStore m = InitModel(Vocabulary({{"a", 1}}, 1), {}, config, rng);
  m.words.row(0)[0] = 1.0f;  // 0x3F800000
  const std::string bytes = SerializeModel(m);
  // words matrix: rows (u64), cols (u32), then the float, then the clue
  // matrix (u64 + u32 + one float) and the empty subword matrix (u64 + u32),
  // then the checksum.
  const std::size_t float_at = bytes.size() - 4 - 12 - 16 - 4;
  CHECK(static_cast<unsigned char>(bytes[float_at + 0]) == 0x00);
  CHECK(static_cast<unsigned char>(bytes[float_at + 1]) == 0x00);
  CHECK(static_cast<unsigned char>(bytes[float_at + 2]) == 0x80);
  CHECK(static_cast<unsigned char>(bytes[float_at + 3]) == 0x3F);
}

// Independent reader for the word2vec text format.
std::vector<std::pair<std::string, std::vector<float>>> ParseText(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0, dim = 0;
  in >> n >> dim;
  std::vector<std::pair<std::string, std::vector<float>>> rows(n);
  for (auto& [token, values] : rows) {
    in >> token;
    values.resize(dim);
    for (float& v : values) in >> v;
  }
  return rows;
}

TEST_CASE("export_text") {
  TrainingConfig config;
  config.dim = 2;
  config.mode = Mode::kSg;
  Rng rng(1);
  const ModelStore tiny = InitModel(Vocabulary({{"a", 1}}, 1), {}, config, rng);
  std::ostringstream out;
  ExportText(tiny, out);
  CHECK(out.str() == "1 2\na 0 0\n");

  const ModelStore m = RandomModel(3, 300, Mode::kEv, 8);
  std::ostringstream big;
  ExportText(m, big);
  const std::string text = big.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);

  const auto rows = ParseText(text);
  REQUIRE(rows.size() == 3);
  for (WordId w = 0; w < 3; ++w) {
    CHECK(rows[w].first == m.vocab.token(w));
    CHECK(Cosine(std::span<const float>(rows[w].second), m.words.row(w)) ==
          doctest::Approx(1.0).epsilon(1e-4));
    // Shortest round-trip printing reproduces the floats exactly.
    CHECK(std::equal(rows[w].second.begin(), rows[w].second.end(),
                     m.words.row(w).begin()));
  }
}

TEST_CASE("cosine") {
  const std::vector<float> x{1, 0}, y{0, 1}, d{1, 1}, z{0, 0};
  CHECK(Cosine(std::span<const float>(x), x) == doctest::Approx(1.0));
  CHECK(Cosine(std::span<const float>(x), y) == doctest::Approx(0.0));
  CHECK(Cosine(std::span<const float>(d), x) == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(Cosine(std::span<const float>(z), x) == 0.0);
  CHECK(Cosine(std::span<const float>(z), z) == 0.0);

  Rng rng(3);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(6), b(6);
    for (double& v : a) v = normal(rng);
    for (double& v : b) v = normal(rng);
    const double c = Cosine(std::span<const double>(a), b);
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
    CHECK(Cosine(std::span<const double>(b), a) == doctest::Approx(c).epsilon(1e-12));
    const double s = scale(rng);
    std::vector<double> sa(a);
    for (double& v : sa) v *= s;
    CHECK(std::abs(Cosine(std::span<const double>(sa), b) - c) < 1e-6);
  }
}

TEST_CASE("nearest_neighbors") {
  const ModelStore m = RandomModel(20, 5, Mode::kEv, 6);
  const auto row = m.words.row(4);
  const std::vector<double> q(row.begin(), row.end());
  const auto nn = NearestNeighbors(m, q, 3);
  REQUIRE(nn.size() == 3);
  CHECK(nn[0].id == 4);
  CHECK(nn[0].cosine == doctest::Approx(1.0));

  std::unordered_set<WordId> everything;
  for (WordId w = 0; w < 20; ++w) everything.insert(w);
  CHECK(NearestNeighbors(m, q, 5, everything).empty());
  CHECK(NearestNeighbors(m, q, 100).size() == 20);
  CHECK(NearestNeighbors(m, q, 100, {4}).size() == 19);
}

TEST_CASE("nearest_neighbors matches a brute-force sort") {
  Rng rng(17);
  std::uniform_int_distribution<int> dim_pick(1, 8), size_pick(1, 50);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 60; ++trial) {
    const auto dim = static_cast<std::uint32_t>(dim_pick(rng));
    const auto n = static_cast<std::size_t>(size_pick(rng));
    ModelStore m = RandomModel(n, dim, Mode::kSg, rng());
    // Duplicate a row now and then to exercise tie-breaking.
    if (n > 2 && trial % 3 == 0) {
      std::copy(m.words.row(0).begin(), m.words.row(0).end(), m.words.row(n - 1).begin());
    }
    std::vector<double> q(dim);
    for (double& v : q) v = normal(rng);

    std::vector<Neighbor> brute;
    for (WordId w = 0; w < n; ++w) {
      double dot = 0, nq = 0, nr = 0;
      for (std::size_t c = 0; c < dim; ++c) {
        dot += q[c] * m.words.row(w)[c];
        nq += q[c] * q[c];
        nr += static_cast<double>(m.words.row(w)[c]) * m.words.row(w)[c];
      }
      brute.push_back({w, (nq == 0 || nr == 0) ? 0.0 : dot / (std::sqrt(nq) * std::sqrt(nr))});
    }
    std::sort(brute.begin(), brute.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.cosine > b.cosine || (a.cosine == b.cosine && a.id < b.id);
    });
    const auto got = NearestNeighbors(m, q, n);
    REQUIRE(got.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(got[i].id == brute[i].id);
      CHECK(got[i].cosine == doctest::Approx(brute[i].cosine).epsilon(1e-12));
    }
    const NeighborIndex index(m.words);
    for (std::size_t i = 0; i < n; ++i) CHECK(index.RankOf(q, got[i].id) == i + 1);
  }
}

}  // namespace
}  // namespace evec
