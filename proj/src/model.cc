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

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <ostream>

#include "evec/errors.h"

namespace evec {
namespace {

constexpr char kMagic[8] = {'E', 'V', 'E', 'C', 'M', 'O', 'D', 'L'};

class ByteWriter {
 public:
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void String(std::string_view s) {
    U32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void Raw(const char* data, std::size_t n) { out_.append(data, n); }
  void Matrix(const evec::Matrix& m) {
    U64(m.rows());
    U32(static_cast<std::uint32_t>(m.cols()));
    out_.reserve(out_.size() + m.values().size() * 4);
    for (float v : m.values()) F32(v);
  }

  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  void Need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw TruncatedError(std::string("model file truncated while reading ") +
                           what);
    }
  }
  std::uint32_t U32(const char* what) {
    Need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::uint64_t U64(const char* what) {
    Need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  float F32(const char* what) { return std::bit_cast<float>(U32(what)); }
  double F64(const char* what) { return std::bit_cast<double>(U64(what)); }
  std::string String(const char* what) {
    const std::uint32_t n = U32(what);
    Need(n, what);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  evec::Matrix Matrix(const char* what, std::uint32_t expected_cols) {
    const std::uint64_t rows = U64(what);
    const std::uint32_t cols = U32(what);
    if (rows > 0 && cols != expected_cols) {
      throw FormatError(std::string("matrix ") + what + " has " +
                        std::to_string(cols) + " columns, header says " +
                        std::to_string(expected_cols));
    }
    if (cols > 0 && rows > remaining() / 4 / cols) {
      throw TruncatedError(std::string("model file truncated in matrix ") + what);
    }
    evec::Matrix m(rows, rows > 0 ? cols : 0);
    for (float& v : m.values()) v = F32(what);
    return m;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void WriteConfig(ByteWriter& w, const TrainingConfig& c) {
  w.U32(c.dim);
  w.U64(c.min_count);
  w.F64(c.subsample_threshold);
  w.U32(c.max_window);
  w.U32(c.clue_window);
  w.U32(c.negatives);
  w.U32(c.epochs);
  w.F64(c.lr0);
  w.F64(c.lr_min);
  w.U32(c.n_min);
  w.U32(c.n_max);
  w.U32(c.min_gram_words);
  w.U32(static_cast<std::uint32_t>(c.mode));
  w.U32(c.workers);
  w.U64(c.seed);
}

TrainingConfig ReadConfig(ByteReader& r) {
  TrainingConfig c;
  c.dim = r.U32("config");
  c.min_count = r.U64("config");
  c.subsample_threshold = r.F64("config");
  c.max_window = r.U32("config");
  c.clue_window = r.U32("config");
  c.negatives = r.U32("config");
  c.epochs = r.U32("config");
  c.lr0 = r.F64("config");
  c.lr_min = r.F64("config");
  c.n_min = r.U32("config");
  c.n_max = r.U32("config");
  c.min_gram_words = r.U32("config");
  c.mode = static_cast<Mode>(r.U32("config"));
  c.workers = r.U32("config");
  c.seed = r.U64("config");
  return c;
}

template <typename T>
double CosineImpl(std::span<const T> x, std::span<const T> y) {
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += static_cast<double>(x[i]) * y[i];
    nx += static_cast<double>(x[i]) * x[i];
    ny += static_cast<double>(y[i]) * y[i];
  }
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return dot / (std::sqrt(nx) * std::sqrt(ny));
}

}  // namespace

bool ModelStore::AllFinite() const {
  for (const Matrix* m : {&words, &clues, &subword_vecs}) {
    for (float v : m->values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

ModelStore InitModel(Vocabulary vocab, SubwordVocabulary subwords,
                     const TrainingConfig& config, Rng& rng) {
  config.Validate();
  ModelStore model;
  model.config = config;
  const std::size_t dim = config.dim;
  model.words = Matrix(vocab.size(), dim);
  const double bound = 0.5 / static_cast<double>(dim);
  std::uniform_real_distribution<double> uniform(-bound, bound);
  auto fill = [&](Matrix& m) {
    for (float& v : m.values()) {
      // Rounding to float can step past the bound; clamp back inside.
      v = std::clamp(static_cast<float>(uniform(rng)),
                     static_cast<float>(-bound), static_cast<float>(bound));
    }
  };
  if (config.mode != Mode::kFt) {
    model.clues = Matrix(vocab.size(), dim);
    fill(model.clues);
  }
  if (config.mode != Mode::kSg) {
    model.subword_vecs = Matrix(subwords.size(), dim);
    fill(model.subword_vecs);
  }
  model.vocab = std::move(vocab);
  model.subwords = std::move(subwords);
  return model;
}

std::string SerializeModel(const ModelStore& model) {
  ByteWriter w;
  w.Raw(kMagic, sizeof(kMagic));
  w.U32(kModelFormatVersion);
  w.U32(static_cast<std::uint32_t>(model.mode()));
  w.U32(model.dim());
  w.U64(model.vocab.size());
  w.U64(model.subwords.size());
  w.U32(static_cast<std::uint32_t>(model.subwords.n_min()));
  w.U32(static_cast<std::uint32_t>(model.subwords.n_max()));
  w.U32(static_cast<std::uint32_t>(model.subwords.min_word_occurrence()));
  WriteConfig(w, model.config);

  w.U64(model.vocab.min_count());
  for (const auto& e : model.vocab.entries()) {
    w.String(e.token);
    w.U64(e.count);
  }
  for (const auto& g : model.subwords.grams()) w.String(g);

  w.Matrix(model.words);
  w.Matrix(model.clues);
  w.Matrix(model.subword_vecs);

  std::string& bytes = w.bytes();
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()),
            static_cast<uInt>(bytes.size())));
  w.U32(crc);
  return std::move(bytes);
}

void SaveModel(const ModelStore& model, const std::string& path) {
  const std::string bytes = SerializeModel(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing model '" + path + "'");
}

ModelStore DeserializeModel(std::string_view bytes) {
  const std::size_t magic_len = std::min(bytes.size(), sizeof(kMagic));
  if (std::memcmp(bytes.data(), kMagic, magic_len) != 0) {
    throw FormatError("not an evec model (bad magic)");
  }
  if (bytes.size() < sizeof(kMagic)) {
    throw TruncatedError("model file truncated in magic");
  }
  ByteReader r(bytes.substr(sizeof(kMagic)));
  const std::uint32_t version = r.U32("version");
  if (version != kModelFormatVersion) {
    throw VersionError("unsupported model format version " +
                       std::to_string(version) + " (expected " +
                       std::to_string(kModelFormatVersion) + ")");
  }
  const std::uint32_t mode = r.U32("header");
  const std::uint32_t dim = r.U32("header");
  const std::uint64_t vocab_size = r.U64("header");
  const std::uint64_t subword_size = r.U64("header");
  const std::uint32_t n_min = r.U32("header");
  const std::uint32_t n_max = r.U32("header");
  const std::uint32_t min_occ = r.U32("header");
  ModelStore model;
  model.config = ReadConfig(r);
  if (mode > 2 || static_cast<std::uint32_t>(model.config.mode) != mode ||
      model.config.dim != dim) {
    throw FormatError("model header is inconsistent");
  }

  const std::uint64_t min_count = r.U64("vocabulary");
  // Each entry takes at least 12 bytes; reject counts the file cannot hold.
  if (vocab_size > r.remaining() / 12) {
    throw TruncatedError("model file truncated in vocabulary");
  }
  std::vector<Vocabulary::Entry> entries;
  entries.reserve(vocab_size);
  for (std::uint64_t i = 0; i < vocab_size; ++i) {
    std::string token = r.String("vocabulary");
    const std::uint64_t count = r.U64("vocabulary");
    entries.push_back({std::move(token), count});
  }
  model.vocab = Vocabulary(std::move(entries), min_count);

  if (subword_size > r.remaining() / 4) {
    throw TruncatedError("model file truncated in subwords");
  }
  std::vector<std::string> grams;
  grams.reserve(subword_size);
  for (std::uint64_t i = 0; i < subword_size; ++i) {
    grams.push_back(r.String("subwords"));
  }
  model.subwords = SubwordVocabulary(std::move(grams), model.vocab,
                                     static_cast<int>(n_min),
                                     static_cast<int>(n_max),
                                     static_cast<int>(min_occ));

  model.words = r.Matrix("words", dim);
  model.clues = r.Matrix("clues", dim);
  model.subword_vecs = r.Matrix("subwords", dim);
  if (model.words.rows() != vocab_size ||
      (!model.clues.empty() && model.clues.rows() != vocab_size) ||
      (!model.subword_vecs.empty() && model.subword_vecs.rows() != subword_size)) {
    throw FormatError("matrix row counts do not match vocabularies");
  }

  const std::size_t payload_end = sizeof(kMagic) + r.position();
  const std::uint32_t stored = r.U32("checksum");
  if (r.remaining() != 0) throw FormatError("trailing bytes after checksum");
  const auto actual = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()),
            static_cast<uInt>(payload_end)));
  if (stored != actual) throw ChecksumError("model checksum mismatch");
  return model;
}

ModelStore LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return DeserializeModel(bytes);
}

void ExportText(const ModelStore& model, std::ostream& out) {
  out << model.vocab.size() << ' ' << model.dim() << '\n';
  char buf[64];
  for (WordId w = 0; w < model.vocab.size(); ++w) {
    out << model.vocab.token(w);
    for (float v : model.words.row(w)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out << ' ';
      out.write(buf, end - buf);
    }
    out << '\n';
  }
}

void ExportText(const ModelStore& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  ExportText(model, out);
}

double Cosine(std::span<const float> x, std::span<const float> y) {
  return CosineImpl(x, y);
}

double Cosine(std::span<const double> x, std::span<const double> y) {
  return CosineImpl(x, y);
}

bool NeighborBefore(const Neighbor& a, const Neighbor& b) {
  if (a.cosine != b.cosine) return a.cosine > b.cosine;
  return a.id < b.id;
}

NeighborIndex::NeighborIndex(const Matrix& words) : words_(words) {
  norms_.resize(words.rows());
  for (std::size_t r = 0; r < words.rows(); ++r) {
    double s = 0.0;
    for (float v : words.row(r)) s += static_cast<double>(v) * v;
    norms_[r] = std::sqrt(s);
  }
}

std::vector<double> NeighborIndex::Similarities(
    std::span<const double> query) const {
  double qn = 0.0;
  for (double q : query) qn += q * q;
  qn = std::sqrt(qn);
  std::vector<double> sims(norms_.size(), 0.0);
  if (qn == 0.0) return sims;
  for (std::size_t r = 0; r < norms_.size(); ++r) {
    if (norms_[r] == 0.0) continue;
    const float* row = words_.row_data(r);
    double dot = 0.0;
    for (std::size_t i = 0; i < query.size(); ++i) dot += query[i] * row[i];
    sims[r] = dot / (qn * norms_[r]);
  }
  return sims;
}

std::vector<double> NeighborIndex::Similarities(
    std::span<const float> query) const {
  std::vector<double> q(query.begin(), query.end());
  return Similarities(std::span<const double>(q));
}

std::vector<Neighbor> NeighborIndex::Nearest(
    std::span<const double> query, std::size_t k,
    const std::unordered_set<WordId>& exclude) const {
  const auto sims = Similarities(query);
  std::vector<Neighbor> candidates;
  candidates.reserve(sims.size());
  for (std::size_t r = 0; r < sims.size(); ++r) {
    const auto id = static_cast<WordId>(r);
    if (!exclude.contains(id)) candidates.push_back({id, sims[r]});
  }
  const std::size_t n = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + n,
                    candidates.end(), NeighborBefore);
  candidates.resize(n);
  return candidates;
}

std::size_t NeighborIndex::RankOf(std::span<const double> query,
                                  WordId target) const {
  const auto sims = Similarities(query);
  const Neighbor t{target, sims[target]};
  std::size_t rank = 1;
  for (std::size_t r = 0; r < sims.size(); ++r) {
    if (NeighborBefore({static_cast<WordId>(r), sims[r]}, t)) ++rank;
  }
  return rank;
}

std::vector<Neighbor> NearestNeighbors(const ModelStore& model,
                                       std::span<const double> query,
                                       std::size_t k,
                                       const std::unordered_set<WordId>& exclude) {
  return NeighborIndex(model.words).Nearest(query, k, exclude);
}

}  // namespace evec
