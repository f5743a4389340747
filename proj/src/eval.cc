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

#include "evec/eval.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>

#include "evec/errors.h"

namespace evec {
namespace {

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

// Same normalization as the corpus for a single dataset token.
std::string NormalizeToken(std::string_view raw) {
  auto tokens = Tokenize(raw);
  if (tokens.size() == 1) return std::move(tokens.front());
  std::string joined;
  for (const auto& t : tokens) joined += t;
  return joined;
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos
                                            ? std::string_view::npos
                                            : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

std::optional<double> ParseDouble(std::string_view s) {
  s = Trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

bool SkipLine(std::string_view line) {
  line = Trim(line);
  return line.empty() || line.front() == '#';
}

}  // namespace

std::vector<double> AverageRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DataError("spearman: lengths differ");
  if (xs.size() < 2) throw DataError("spearman: need at least two values");
  const auto rx = AverageRanks(xs);
  const auto ry = AverageRanks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DataError("spearman: undefined for constant input");
  }
  return sxy / std::sqrt(sxx * syy);
}

// --- analogy -------------------------------------------------------------

AnalogyDataset ParseAnalogy(std::istream& in) {
  AnalogyDataset data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (view.empty()) continue;
    if (view.front() == ':') {
      view.remove_prefix(1);
      data.sections.push_back({std::string(Trim(view)), {}});
      continue;
    }
    auto tokens = Tokenize(view);
    if (tokens.size() != 4) {
      throw DataError("analogy line " + std::to_string(line_no) +
                      ": expected 4 tokens");
    }
    if (data.sections.empty()) data.sections.push_back({"", {}});
    AnalogyQuestion q;
    std::move(tokens.begin(), tokens.end(), q.words.begin());
    data.sections.back().questions.push_back(std::move(q));
  }
  return data;
}

AnalogyDataset LoadAnalogy(const std::string& path) {
  auto in = OpenInput(path);
  return ParseAnalogy(in);
}

double AnalogyResult::semantic_accuracy() const {
  return semantic_total == 0
             ? 0.0
             : 100.0 * static_cast<double>(semantic_correct) / semantic_total;
}

double AnalogyResult::syntactic_accuracy() const {
  return syntactic_total == 0
             ? 0.0
             : 100.0 * static_cast<double>(syntactic_correct) / syntactic_total;
}

AnalogyResult EvalAnalogy(const ModelStore& model, const AnalogyDataset& data) {
  const std::size_t n = model.vocab.size();
  const std::size_t dim = model.dim();
  BasicMatrix<double> unit(n, dim);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = model.words.row(r);
    double norm = 0.0;
    for (float v : row) norm += static_cast<double>(v) * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    double* out = unit.row_data(r);
    for (std::size_t c = 0; c < dim; ++c) out[c] = row[c] / norm;
  }

  AnalogyResult result;
  std::vector<double> query(dim);
  for (const auto& section : data.sections) {
    for (const auto& question : section.questions) {
      std::array<WordId, 4> ids{};
      bool known = true;
      for (int i = 0; i < 4; ++i) {
        auto id = model.vocab.Find(question.words[i]);
        if (!id) {
          known = false;
          break;
        }
        ids[i] = *id;
      }
      if (!known) {
        ++result.skipped;
        continue;
      }
      const double* a = unit.row_data(ids[0]);
      const double* b = unit.row_data(ids[1]);
      const double* c = unit.row_data(ids[2]);
      for (std::size_t k = 0; k < dim; ++k) query[k] = b[k] - a[k] + c[k];
      // The query norm is shared by all candidates, so the dot product
      // orders them exactly as cosine does.
      WordId best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      bool found = false;
      for (WordId w = 0; w < n; ++w) {
        if (w == ids[0] || w == ids[1] || w == ids[2]) continue;
        const double* row = unit.row_data(w);
        double score = 0.0;
        for (std::size_t k = 0; k < dim; ++k) score += query[k] * row[k];
        if (!found || score > best_score) {
          best = w;
          best_score = score;
          found = true;
        }
      }
      const bool correct = found && best == ids[3];
      if (section.syntactic()) {
        ++result.syntactic_total;
        result.syntactic_correct += correct;
      } else {
        ++result.semantic_total;
        result.semantic_correct += correct;
      }
    }
  }
  return result;
}

// --- word similarity -----------------------------------------------------

WordSimDataset ParseWordSim(std::istream& in) {
  WordSimDataset data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (SkipLine(line)) continue;
    const auto fields = SplitTabs(line);
    std::optional<double> score;
    if (fields.size() == 3) score = ParseDouble(fields[2]);
    if (!score) {
      if (line_no == 1) continue;  // header
      throw DataError("word-sim line " + std::to_string(line_no) +
                      ": expected word1<TAB>word2<TAB>score");
    }
    data.pairs.push_back(
        {NormalizeToken(fields[0]), NormalizeToken(fields[1]), *score});
  }
  return data;
}

WordSimDataset LoadWordSim(const std::string& path) {
  auto in = OpenInput(path);
  return ParseWordSim(in);
}

WordSimResult EvalWordSim(const ModelStore& model, const WordSimDataset& data) {
  std::vector<double> predicted, human;
  for (const auto& pair : data.pairs) {
    const auto a = model.vocab.Find(pair.first);
    const auto b = model.vocab.Find(pair.second);
    if (!a || !b) continue;
    predicted.push_back(Cosine(model.words.row(*a), model.words.row(*b)));
    human.push_back(pair.score);
  }
  if (predicted.empty()) throw DataError("word-sim: no usable pairs");
  return {Spearman(predicted, human), predicted.size()};
}

// --- definitional nonce --------------------------------------------------

NonceDataset ParseNonce(std::istream& in) {
  NonceDataset data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (SkipLine(line)) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 2) {
      throw DataError("nonce line " + std::to_string(line_no) +
                      ": expected nonce<TAB>sentence");
    }
    NonceItem item{NormalizeToken(fields[0]), std::string(Trim(fields[1]))};
    const auto tokens = Tokenize(item.sentence);
    if (std::find(tokens.begin(), tokens.end(), item.nonce) == tokens.end()) {
      throw DataError("nonce line " + std::to_string(line_no) + ": '" +
                      item.nonce + "' does not occur in its sentence");
    }
    data.items.push_back(std::move(item));
  }
  return data;
}

NonceDataset LoadNonce(const std::string& path) {
  auto in = OpenInput(path);
  return ParseNonce(in);
}

double MeanReciprocalRank(std::span<const std::size_t> ranks) {
  if (ranks.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t r : ranks) sum += 1.0 / static_cast<double>(r);
  return sum / static_cast<double>(ranks.size());
}

double MedianRank(std::span<const std::size_t> ranks) {
  if (ranks.empty()) return 0.0;
  std::vector<std::size_t> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size() / 2;
  if (sorted.size() % 2 == 1) return static_cast<double>(sorted[m]);
  return (static_cast<double>(sorted[m - 1]) + static_cast<double>(sorted[m])) / 2.0;
}

NonceResult EvalNonce(const ModelStore& model, const PrincipalComponents& pc,
                      const NonceDataset& data, const EstimateOptions& options) {
  const NeighborIndex index(model.words);
  EstimateOptions as_unseen = options;
  as_unseen.skip_whole_word = true;
  NonceResult result;
  for (const auto& item : data.items) {
    const auto id = model.vocab.Find(item.nonce);
    if (!id) {
      ++result.skipped;
      continue;
    }
    const std::vector<TokenSequence> contexts{Tokenize(item.sentence)};
    try {
      const OovEstimate est = EstimateOov(model, item.nonce, contexts, &pc, as_unseen);
      result.ranks.push_back(index.RankOf(est.combined, *id));
    } catch (const NoSignalError&) {
      ++result.skipped;
    }
  }
  result.evaluated = result.ranks.size();
  result.mrr = MeanReciprocalRank(result.ranks);
  result.median_rank = MedianRank(result.ranks);
  return result;
}

// --- contextual rare words -----------------------------------------------

CrwDataset LoadCrw(const std::string& pairs_path, const std::string& contexts_dir) {
  namespace fs = std::filesystem;
  CrwDataset data;
  {
    auto in = OpenInput(pairs_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (SkipLine(line)) continue;
      const auto fields = SplitTabs(line);
      std::optional<double> score;
      if (fields.size() == 3) score = ParseDouble(fields[2]);
      if (!score) {
        if (line_no == 1) continue;
        throw DataError("crw line " + std::to_string(line_no) +
                        ": expected rare<TAB>anchor<TAB>score");
      }
      data.pairs.push_back(
          {NormalizeToken(fields[0]), NormalizeToken(fields[1]), *score});
    }
  }
  const fs::path dir = contexts_dir.empty()
                           ? fs::path(pairs_path).parent_path() / "contexts"
                           : fs::path(contexts_dir);
  for (const auto& pair : data.pairs) {
    if (data.contexts.contains(pair.rare)) continue;
    auto in = OpenInput((dir / (pair.rare + ".txt")).string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
      if (!Trim(line).empty()) lines.push_back(line);
    }
    if (lines.empty()) {
      throw DataError("crw: no contexts for rare word '" + pair.rare + "'");
    }
    data.contexts.emplace(pair.rare, std::move(lines));
  }
  return data;
}

std::vector<std::size_t> DefaultCrwBudgets() { return {1, 2, 4, 8, 16, 32, 64}; }

std::vector<CrwPoint> EvalCrw(const ModelStore& model,
                              const PrincipalComponents& pc,
                              const CrwDataset& data,
                              std::span<const std::size_t> budgets,
                              const EstimateOptions& options) {
  if (!std::is_sorted(budgets.begin(), budgets.end())) {
    throw DataError("crw budgets must be ascending");
  }
  std::map<std::string, std::vector<TokenSequence>> tokenized;
  for (const auto& [rare, lines] : data.contexts) {
    tokenized.emplace(rare, TokenizeContexts(lines));
  }

  std::vector<CrwPoint> points;
  for (std::size_t budget : budgets) {
    std::map<std::string, std::optional<std::vector<double>>> estimates;
    std::vector<double> predicted, human;
    for (const auto& pair : data.pairs) {
      const auto anchor = model.vocab.Find(pair.anchor);
      if (!anchor) continue;
      auto [it, inserted] = estimates.try_emplace(pair.rare);
      if (inserted) {
        const auto& all = tokenized.at(pair.rare);
        const std::size_t used = std::min(budget, all.size());
        try {
          it->second = EstimateOov(model, pair.rare,
                                   std::span(all).first(used), &pc, options)
                           .combined;
        } catch (const NoSignalError&) {
        }
      }
      if (!it->second) continue;
      std::vector<double> anchor_vec(model.words.row(*anchor).begin(),
                                     model.words.row(*anchor).end());
      predicted.push_back(Cosine(std::span<const double>(*it->second),
                                 std::span<const double>(anchor_vec)));
      human.push_back(pair.score);
    }
    CrwPoint point{budget, std::numeric_limits<double>::quiet_NaN(),
                   predicted.size()};
    try {
      point.rho = Spearman(predicted, human);
    } catch (const DataError&) {
    }
    points.push_back(point);
  }
  return points;
}

}  // namespace evec
