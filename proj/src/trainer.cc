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

#include "evec/trainer.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

#include "evec/errors.h"

namespace evec {
namespace {

template <typename T>
inline T Dot(const T* a, const T* b, std::size_t n) {
  T s = 0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// y += a * x
template <typename T>
inline void Axpy(T* y, T a, const T* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

inline double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(sigmoid(x)) without overflow for large |x|.
inline double LogSigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

template <typename T, typename Id>
void MeanOfRows(const BasicMatrix<T>& m, std::span<const Id> ids,
                std::vector<T>& out) {
  const std::size_t dim = m.cols();
  out.assign(dim, T(0));
  for (Id id : ids) Axpy(out.data(), T(1), m.row_data(id), dim);
  const T inv = T(1) / static_cast<T>(ids.size());
  for (T& x : out) x *= inv;
}

// Scores `input` against the context (label 1) and each negative (label 0).
// Accumulates dE/dinput into `grad` using the current word rows and stores
// each sample's dE/d(dot) in `coeff`. Returns the loss.
template <typename T>
double ScoreSamples(const BasicMatrix<T>& words, const std::vector<T>& input,
                    WordId context, std::span<const WordId> negatives,
                    std::vector<T>& grad, std::vector<double>& coeff) {
  const std::size_t dim = words.cols();
  grad.assign(dim, T(0));
  coeff.resize(negatives.size() + 1);
  double loss = 0.0;
  for (std::size_t i = 0; i <= negatives.size(); ++i) {
    const WordId id = i == 0 ? context : negatives[i - 1];
    const T* v = words.row_data(id);
    const double d = static_cast<double>(Dot(input.data(), v, dim));
    double g;
    if (i == 0) {
      loss -= LogSigmoid(d);
      g = Sigmoid(d) - 1.0;
    } else {
      loss -= LogSigmoid(-d);
      g = Sigmoid(d);
    }
    coeff[i] = g;
    Axpy(grad.data(), static_cast<T>(g), v, dim);
  }
  return loss;
}

// words[sample] -= lr * coeff * input, for every sample.
template <typename T>
void ApplyWordUpdates(BasicMatrix<T>& words, const std::vector<T>& input,
                      WordId context, std::span<const WordId> negatives,
                      const std::vector<double>& coeff, double lr) {
  const std::size_t dim = words.cols();
  for (std::size_t i = 0; i <= negatives.size(); ++i) {
    const WordId id = i == 0 ? context : negatives[i - 1];
    Axpy(words.row_data(id), static_cast<T>(-lr * coeff[i]), input.data(), dim);
  }
}

}  // namespace

std::uint32_t DrawRadius(std::uint32_t max_window, Rng& rng) {
  return std::uniform_int_distribution<std::uint32_t>(1, max_window)(rng);
}

void AppendWindowPairs(std::size_t length, std::size_t target,
                       std::uint32_t radius, std::vector<TrainingPair>& out) {
  const std::size_t lo = target >= radius ? target - radius : 0;
  const std::size_t hi = std::min(length - 1, target + radius);
  for (std::size_t c = lo; c <= hi; ++c) {
    if (c == target) continue;
    out.push_back({static_cast<std::uint32_t>(target),
                   static_cast<std::uint32_t>(c)});
  }
}

std::vector<TrainingPair> GeneratePairs(std::span<const WordId> sentence,
                                        std::uint32_t max_window, Rng& rng) {
  std::vector<TrainingPair> pairs;
  for (std::size_t t = 0; t < sentence.size(); ++t) {
    AppendWindowPairs(sentence.size(), t, DrawRadius(max_window, rng), pairs);
  }
  return pairs;
}

std::vector<WordId> CollectContextClues(std::span<const WordId> sentence,
                                        std::size_t target,
                                        std::uint32_t clue_window) {
  std::vector<WordId> clues;
  const std::size_t lo = target >= clue_window ? target - clue_window : 0;
  const std::size_t hi = std::min(sentence.size(), target + clue_window + 1);
  for (std::size_t i = lo; i < hi; ++i) {
    if (i != target) clues.push_back(sentence[i]);
  }
  return clues;
}

template <typename T>
double EvUpdate(BasicMatrix<T>& words, BasicMatrix<T>& clues,
                BasicMatrix<T>& subwords, WordId context,
                std::span<const WordId> clue_ids,
                std::span<const SubwordId> gram_ids,
                std::span<const WordId> negatives, double lr,
                StepScratch<T>& s) {
  const bool has_clues = !clue_ids.empty();
  const bool has_grams = !gram_ids.empty();
  if (!has_clues && !has_grams) return 0.0;
  const std::size_t dim = words.cols();

  double loss = 0.0;
  if (has_clues) {
    MeanOfRows(clues, clue_ids, s.cc);
    loss += ScoreSamples(words, s.cc, context, negatives, s.grad_cc, s.coeff_cc);
  }
  if (has_grams) {
    MeanOfRows(subwords, gram_ids, s.sub);
    loss += ScoreSamples(words, s.sub, context, negatives, s.grad_sub,
                         s.coeff_sub);
  }

  if (has_clues) ApplyWordUpdates(words, s.cc, context, negatives, s.coeff_cc, lr);
  if (has_grams) {
    ApplyWordUpdates(words, s.sub, context, negatives, s.coeff_sub, lr);
  }
  if (has_clues) {
    const T step = static_cast<T>(-lr / static_cast<double>(clue_ids.size()));
    for (WordId q : clue_ids) Axpy(clues.row_data(q), step, s.grad_cc.data(), dim);
  }
  if (has_grams) {
    const T step = static_cast<T>(-lr / static_cast<double>(gram_ids.size()));
    for (SubwordId g : gram_ids) {
      Axpy(subwords.row_data(g), step, s.grad_sub.data(), dim);
    }
  }
  return loss;
}

template <typename T>
double SgUpdate(BasicMatrix<T>& words, BasicMatrix<T>& inputs, WordId target,
                WordId context, std::span<const WordId> negatives, double lr,
                StepScratch<T>& s) {
  const std::size_t dim = words.cols();
  const auto u = inputs.row(target);
  s.cc.assign(u.begin(), u.end());
  const double loss =
      ScoreSamples(words, s.cc, context, negatives, s.grad_cc, s.coeff_cc);
  ApplyWordUpdates(words, s.cc, context, negatives, s.coeff_cc, lr);
  Axpy(inputs.row_data(target), static_cast<T>(-lr), s.grad_cc.data(), dim);
  return loss;
}

template <typename T>
double FtUpdate(BasicMatrix<T>& words, BasicMatrix<T>& subwords,
                std::span<const SubwordId> gram_ids, WordId context,
                std::span<const WordId> negatives, double lr,
                StepScratch<T>& s) {
  if (gram_ids.empty()) return 0.0;
  const std::size_t dim = words.cols();
  s.sub.assign(dim, T(0));
  for (SubwordId g : gram_ids) Axpy(s.sub.data(), T(1), subwords.row_data(g), dim);
  const double loss =
      ScoreSamples(words, s.sub, context, negatives, s.grad_sub, s.coeff_sub);
  ApplyWordUpdates(words, s.sub, context, negatives, s.coeff_sub, lr);
  for (SubwordId g : gram_ids) {
    Axpy(subwords.row_data(g), static_cast<T>(-lr), s.grad_sub.data(), dim);
  }
  return loss;
}

#define EVEC_INSTANTIATE_KERNELS(T)                                          \
  template double EvUpdate<T>(BasicMatrix<T>&, BasicMatrix<T>&,              \
                              BasicMatrix<T>&, WordId,                       \
                              std::span<const WordId>,                       \
                              std::span<const SubwordId>,                    \
                              std::span<const WordId>, double,               \
                              StepScratch<T>&);                              \
  template double SgUpdate<T>(BasicMatrix<T>&, BasicMatrix<T>&, WordId,      \
                              WordId, std::span<const WordId>, double,       \
                              StepScratch<T>&);                              \
  template double FtUpdate<T>(BasicMatrix<T>&, BasicMatrix<T>&,              \
                              std::span<const SubwordId>, WordId,            \
                              std::span<const WordId>, double,               \
                              StepScratch<T>&);

EVEC_INSTANTIATE_KERNELS(float)
EVEC_INSTANTIATE_KERNELS(double)
#undef EVEC_INSTANTIATE_KERNELS

double EvStep(ModelStore& model, WordId target, WordId context,
              std::span<const WordId> clue_ids, double lr,
              const NegativeSamplingTable& table, Rng& rng,
              StepScratch<float>& scratch) {
  DrawNegatives(table, context, model.config.negatives, rng, scratch.negatives);
  return EvUpdate(model.words, model.clues, model.subword_vecs, context,
                  clue_ids, model.subwords.word_grams(target),
                  scratch.negatives, lr, scratch);
}

double SgStep(ModelStore& model, WordId target, WordId context, double lr,
              const NegativeSamplingTable& table, Rng& rng,
              StepScratch<float>& scratch) {
  DrawNegatives(table, context, model.config.negatives, rng, scratch.negatives);
  return SgUpdate(model.words, model.clues, target, context, scratch.negatives,
                  lr, scratch);
}

double FtStep(ModelStore& model, WordId target, WordId context, double lr,
              const NegativeSamplingTable& table, Rng& rng,
              StepScratch<float>& scratch) {
  DrawNegatives(table, context, model.config.negatives, rng, scratch.negatives);
  return FtUpdate(model.words, model.subword_vecs,
                  model.subwords.word_grams(target), context,
                  scratch.negatives, lr, scratch);
}

double EstimateTotalPairs(const TrainingConfig& config,
                          double expected_tokens_per_epoch) {
  return static_cast<double>(config.epochs) * expected_tokens_per_epoch *
         (static_cast<double>(config.max_window) + 1.0);
}

double LearningRate(const TrainingConfig& config, double pairs_done,
                    double pairs_total) {
  if (!(pairs_total > 0.0)) return config.lr0;
  return std::max(config.lr_min, config.lr0 * (1.0 - pairs_done / pairs_total));
}

namespace {

struct WorkerTotals {
  std::uint64_t pairs = 0;
  double loss = 0.0;
  double last_lr = 0.0;
};

struct EpochShared {
  std::atomic<std::uint64_t> pairs_done{0};
  std::atomic<bool> abort{false};
};

constexpr std::uint64_t kSyncInterval = 10000;

class EpochWorker {
 public:
  EpochWorker(ModelStore& model, const NegativeSamplingTable& table,
              const Subsampler& subsampler, double pairs_total,
              EpochShared& shared)
      : model_(model),
        config_(model.config),
        table_(table),
        subsampler_(subsampler),
        pairs_total_(pairs_total),
        shared_(shared) {}

  WorkerTotals Run(const std::string& path, std::uint64_t begin,
                   std::uint64_t end, std::uint32_t epoch, std::uint32_t worker,
                   std::ostream* progress) {
    std::seed_seq seq{static_cast<std::uint32_t>(config_.seed),
                      static_cast<std::uint32_t>(config_.seed >> 32), epoch,
                      worker};
    Rng rng(seq);
    SentenceReader reader(path, model_.vocab, begin, end);
    std::vector<WordId> raw;
    std::vector<WordId> clue_ids;
    StepScratch<float> scratch;
    WorkerTotals totals;
    const std::uint64_t epoch_base =
        shared_.pairs_done.load(std::memory_order_relaxed);
    std::uint64_t base = epoch_base;
    std::uint64_t unsynced = 0;
    const auto start = std::chrono::steady_clock::now();
    auto last_print = start;

    while (reader.Next(raw)) {
      if (shared_.abort.load(std::memory_order_relaxed)) break;
      const std::vector<WordId> sentence = subsampler_.Apply(raw, rng);
      const std::size_t n = sentence.size();
      for (std::size_t t = 0; t < n; ++t) {
        const std::uint32_t radius = DrawRadius(config_.max_window, rng);
        if (config_.mode == Mode::kEv) {
          clue_ids = CollectContextClues(sentence, t, config_.clue_window);
        }
        const std::size_t lo = t >= radius ? t - radius : 0;
        const std::size_t hi = std::min(n - 1, t + radius);
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == t) continue;
          const double lr = LearningRate(
              config_, static_cast<double>(base + unsynced), pairs_total_);
          double loss = 0.0;
          switch (config_.mode) {
            case Mode::kEv:
              loss = EvStep(model_, sentence[t], sentence[c], clue_ids, lr,
                            table_, rng, scratch);
              break;
            case Mode::kSg:
              loss = SgStep(model_, sentence[t], sentence[c], lr, table_, rng,
                            scratch);
              break;
            case Mode::kFt:
              loss = FtStep(model_, sentence[t], sentence[c], lr, table_, rng,
                            scratch);
              break;
          }
          if (!std::isfinite(loss)) {
            throw NumericError("non-finite loss in epoch " +
                               std::to_string(epoch + 1));
          }
          totals.loss += loss;
          totals.last_lr = lr;
          ++totals.pairs;
          if (++unsynced >= kSyncInterval) {
            base = shared_.pairs_done.fetch_add(unsynced) + unsynced;
            unsynced = 0;
            if (progress != nullptr && worker == 0) {
              const auto now = std::chrono::steady_clock::now();
              if (now - last_print >= std::chrono::seconds(1)) {
                last_print = now;
                Report(*progress, epoch, base, base - epoch_base, lr, totals,
                       now - start);
              }
            }
          }
        }
      }
    }
    shared_.pairs_done.fetch_add(unsynced);
    return totals;
  }

 private:
  void Report(std::ostream& out, std::uint32_t epoch, std::uint64_t done,
              std::uint64_t done_this_epoch, double lr,
              const WorkerTotals& totals,
              std::chrono::steady_clock::duration elapsed) const {
    const double secs = std::chrono::duration<double>(elapsed).count();
    out << "epoch " << (epoch + 1) << '/' << config_.epochs << std::fixed
        << std::setprecision(1) << "  "
        << std::min(100.0, 100.0 * static_cast<double>(done) / pairs_total_)
        << "%  lr " << std::setprecision(6) << lr << "  loss "
        << std::setprecision(4)
        << totals.loss / static_cast<double>(std::max<std::uint64_t>(1, totals.pairs))
        << "  pairs/s " << std::setprecision(0)
        << (secs > 0 ? static_cast<double>(done_this_epoch) / secs : 0.0)
        << std::defaultfloat << '\n';
  }

  ModelStore& model_;
  const TrainingConfig& config_;
  const NegativeSamplingTable& table_;
  const Subsampler& subsampler_;
  double pairs_total_;
  EpochShared& shared_;
};

}  // namespace

std::vector<EpochReport> RunEpochs(ModelStore& model,
                                   const std::string& corpus_path,
                                   const TrainOptions& options) {
  const TrainingConfig& config = model.config;
  config.Validate();
  const NegativeSamplingTable table(model.vocab);
  const Subsampler subsampler(model.vocab, config.subsample_threshold);
  const double pairs_total =
      EstimateTotalPairs(config, subsampler.ExpectedRetained());
  const std::uint64_t file_size = FileSize(corpus_path);
  const std::uint32_t workers = config.workers;

  EpochShared shared;
  std::vector<EpochReport> reports;
  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<WorkerTotals> totals(workers);
    std::vector<std::exception_ptr> errors(workers);
    auto run = [&](std::uint32_t w) {
      try {
        const std::uint64_t begin = file_size * w / workers;
        const std::uint64_t end = file_size * (w + 1) / workers;
        EpochWorker worker(model, table, subsampler, pairs_total, shared);
        totals[w] =
            worker.Run(corpus_path, begin, end, epoch, w, options.progress);
      } catch (...) {
        errors[w] = std::current_exception();
        shared.abort.store(true);
      }
    };
    if (workers == 1) {
      run(0);
    } else {
      std::vector<std::jthread> threads;
      threads.reserve(workers);
      for (std::uint32_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    EpochReport report;
    report.epoch = epoch + 1;
    for (const auto& t : totals) {
      report.pairs += t.pairs;
      report.mean_loss += t.loss;
      report.final_lr = std::max(report.final_lr, t.last_lr);
    }
    report.mean_loss /= static_cast<double>(std::max<std::uint64_t>(1, report.pairs));
    report.seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    report.pairs_per_second =
        report.seconds > 0 ? static_cast<double>(report.pairs) / report.seconds
                           : 0.0;
    if (!model.AllFinite()) {
      throw NumericError("non-finite parameters after epoch " +
                         std::to_string(report.epoch));
    }
    if (options.progress != nullptr) {
      *options.progress << "epoch " << report.epoch << '/' << config.epochs
                        << " done  pairs " << report.pairs << "  loss "
                        << report.mean_loss << "  lr " << report.final_lr
                        << "  pairs/s " << static_cast<std::uint64_t>(report.pairs_per_second)
                        << '\n';
    }
    reports.push_back(report);
  }
  return reports;
}

TrainResult Train(const std::string& corpus_path, const TrainingConfig& config,
                  const TrainOptions& options) {
  config.Validate();
  Vocabulary vocab = BuildVocabularyFromFile(corpus_path, config.min_count);
  SubwordVocabulary subwords;
  if (config.mode != Mode::kSg) {
    subwords = BuildSubwordVocab(vocab, static_cast<int>(config.n_min),
                                 static_cast<int>(config.n_max),
                                 static_cast<int>(config.min_gram_words));
  }
  if (options.progress != nullptr) {
    *options.progress << "vocabulary " << vocab.size() << " words, "
                      << vocab.total_tokens() << " tokens, " << subwords.size()
                      << " subwords\n";
  }
  Rng init_rng(config.seed);
  TrainResult result;
  result.model = InitModel(std::move(vocab), std::move(subwords), config, init_rng);
  result.epochs = RunEpochs(result.model, corpus_path, options);
  return result;
}

}  // namespace evec
