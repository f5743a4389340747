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

#include "evec/cli.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "evec/errors.h"
#include "evec/eval.h"
#include "evec/model.h"
#include "evec/oov.h"
#include "evec/trainer.h"

namespace evec {
namespace {

std::string Trimmed(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string ShortestDouble(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::istringstream in(ReadFile(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!Trimmed(line).empty()) lines.push_back(line);
  }
  return lines;
}

// Replaces `--config FILE` after the subcommand with the file's entries as
// flags, placed before the explicit ones so the command line wins.
std::vector<std::string> ExpandConfig(const std::vector<std::string>& args) {
  std::vector<std::string> expanded;
  std::vector<std::string> from_file;
  std::size_t insert_at = std::min<std::size_t>(1, args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
    } else {
      expanded.push_back(args[i]);
      continue;
    }
    for (auto& [key, value] : ParseConfigText(ReadFile(path))) {
      from_file.push_back("--" + key);
      from_file.push_back(value);
    }
  }
  insert_at = std::min(insert_at, expanded.size());
  expanded.insert(expanded.begin() + static_cast<std::ptrdiff_t>(insert_at),
                  from_file.begin(), from_file.end());
  return expanded;
}

void PrintNeighbors(std::ostream& out, const ModelStore& model,
                    const std::vector<Neighbor>& neighbors) {
  for (const auto& n : neighbors) {
    out << model.vocab.token(n.id) << '\t' << std::fixed << std::setprecision(6)
        << n.cosine << std::defaultfloat << '\n';
  }
}

struct TrainArgs {
  TrainingConfig config;
  std::string mode = "ev";
  std::string corpus;
  std::string out;
  std::string vocab_out;
  bool print_config = false;
  bool quiet = false;
};

void AddTrainingFlags(CLI::App& cmd, TrainArgs& a) {
  TrainingConfig& c = a.config;
  auto add = [&](const std::string& name, auto& field, const std::string& help) {
    cmd.add_option("--" + name, field, help)
        ->capture_default_str()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
        ->group("Training");
  };
  add("dim", c.dim, "embedding size");
  add("min-count", c.min_count, "minimum word frequency");
  add("subsample", c.subsample_threshold, "subsampling threshold");
  add("max-window", c.max_window, "largest dynamic window radius");
  add("clue-window", c.clue_window, "context clue radius");
  add("negatives", c.negatives, "negative samples per pair");
  add("epochs", c.epochs, "training passes");
  add("lr0", c.lr0, "initial learning rate");
  add("lr-min", c.lr_min, "learning rate floor");
  add("n-min", c.n_min, "shortest character n-gram");
  add("n-max", c.n_max, "longest character n-gram");
  add("min-gram-words", c.min_gram_words,
      "distinct words an n-gram must occur in");
  cmd.add_option("--mode", a.mode, "ev, sg or ft")
      ->capture_default_str()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
      ->check(CLI::IsMember({"ev", "sg", "ft"}, CLI::ignore_case))
      ->group("Training");
  add("workers", c.workers, "training threads");
  add("seed", c.seed, "random seed");
}

struct EstimateFlags {
  bool no_postprocess = false;
  bool subtract_mean = false;
  std::size_t components = kDefaultRemovedComponents;

  void Add(CLI::App& cmd) {
    cmd.add_flag("--no-postprocess", no_postprocess,
                 "combine the raw clue estimate (no component removal)");
    cmd.add_flag("--subtract-mean", subtract_mean,
                 "center the clue estimate before removing components");
    cmd.add_option("--components", components, "principal components removed")
        ->capture_default_str();
  }
  EstimateOptions Options() const {
    return {.postprocess = !no_postprocess, .subtract_mean = subtract_mean};
  }
  PrincipalComponents Compute(const ModelStore& model) const {
    if (no_postprocess) return {};
    return ComputePrincipalComponents(model.words, components);
  }
};

}  // namespace

std::vector<std::pair<std::string, std::string>> ParseConfigText(
    const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (Trimmed(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError("config line " + std::to_string(line_no) +
                      ": expected key = value");
    }
    std::string key = Trimmed(std::string_view(line).substr(0, eq));
    std::string value = Trimmed(std::string_view(line).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) {
      throw DataError("config line " + std::to_string(line_no) + ": empty key");
    }
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

std::string FormatConfig(const TrainingConfig& c) {
  std::ostringstream out;
  out << "dim = " << c.dim << '\n'
      << "min-count = " << c.min_count << '\n'
      << "subsample = " << ShortestDouble(c.subsample_threshold) << '\n'
      << "max-window = " << c.max_window << '\n'
      << "clue-window = " << c.clue_window << '\n'
      << "negatives = " << c.negatives << '\n'
      << "epochs = " << c.epochs << '\n'
      << "lr0 = " << ShortestDouble(c.lr0) << '\n'
      << "lr-min = " << ShortestDouble(c.lr_min) << '\n'
      << "n-min = " << c.n_min << '\n'
      << "n-max = " << c.n_max << '\n'
      << "min-gram-words = " << c.min_gram_words << '\n'
      << "mode = " << ModeName(c.mode) << '\n'
      << "workers = " << c.workers << '\n'
      << "seed = " << c.seed << '\n';
  return out.str();
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  std::vector<std::string> argv;
  try {
    argv = ExpandConfig(args);
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Estimator vector word embeddings: training, OOV estimation "
               "and evaluation.",
               "evec"};
  app.require_subcommand(1);
  std::function<int()> action;

  // train
  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train a model on a text corpus");
  train->add_option("--corpus", train_args.corpus, "one sentence per line");
  train->add_option("--out", train_args.out, "binary model output path");
  train->add_option("--vocab-out", train_args.vocab_out,
                    "also write the vocabulary as token<TAB>count");
  train->add_option("--config", "key = value file; flags override it");
  train->add_flag("--print-config", train_args.print_config,
                  "print the effective training config and exit");
  train->add_flag("--quiet", train_args.quiet, "no progress on stderr");
  AddTrainingFlags(*train, train_args);
  train->callback([&] {
    action = [&]() -> int {
      TrainingConfig config = train_args.config;
      config.mode = ParseMode(train_args.mode);
      if (train_args.print_config) {
        out << FormatConfig(config);
        return kExitOk;
      }
      if (train_args.corpus.empty() || train_args.out.empty()) {
        err << "error: train needs --corpus and --out\n";
        return kExitUsage;
      }
      TrainOptions options;
      if (!train_args.quiet) options.progress = &err;
      const TrainResult result = Train(train_args.corpus, config, options);
      SaveModel(result.model, train_args.out);
      if (!train_args.vocab_out.empty()) {
        std::ofstream vocab_out(train_args.vocab_out, std::ios::binary);
        if (!vocab_out) throw DataError("cannot write '" + train_args.vocab_out + "'");
        ExportVocabulary(result.model.vocab, vocab_out);
      }
      out << "epoch,pairs,mean_loss,lr,seconds,pairs_per_sec\n";
      for (const auto& e : result.epochs) {
        out << e.epoch << ',' << e.pairs << ',' << std::setprecision(8)
            << e.mean_loss << ',' << e.final_lr << ',' << e.seconds << ','
            << e.pairs_per_second << std::setprecision(6) << '\n';
      }
      return kExitOk;
    };
  });

  // estimate
  std::string model_path, word, contexts_path;
  std::size_t top_k = 10;
  bool print_vector = false;
  EstimateFlags estimate_flags;
  auto* estimate = app.add_subcommand(
      "estimate", "estimate an out-of-vocabulary word and list its neighbors");
  estimate->add_option("--model", model_path, "binary model")->required();
  estimate->add_option("--word", word, "word to estimate")->required();
  estimate->add_option("--contexts", contexts_path,
                       "sentences containing the word, one per line");
  estimate->add_option("--top-k", top_k, "neighbors to print")
      ->capture_default_str();
  estimate->add_flag("--print-vector", print_vector,
                     "print the estimate before the neighbors");
  estimate_flags.Add(*estimate);
  estimate->callback([&] {
    action = [&]() -> int {
      const ModelStore model = LoadModel(model_path);
      std::vector<std::string> lines;
      if (!contexts_path.empty()) lines = ReadLines(contexts_path);
      const auto contexts = TokenizeContexts(lines);
      const PrincipalComponents pc = estimate_flags.Compute(model);
      const std::string normalized = Trimmed(word);
      auto tokens = Tokenize(normalized);
      const std::string query = tokens.size() == 1 ? tokens[0] : normalized;
      OovEstimate est;
      try {
        est = EstimateOov(model, query, contexts, &pc, estimate_flags.Options());
      } catch (const NoSignalError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
      }
      err << "clues used " << est.clues_used << ", n-grams used "
          << est.grams_used << '\n';
      if (print_vector) {
        out << est.word;
        for (double v : est.combined) out << ' ' << ShortestDouble(v);
        out << '\n';
      }
      PrintNeighbors(out, model,
                     NeighborIndex(model.words).Nearest(est.combined, top_k));
      return kExitOk;
    };
  });

  // nn
  std::string nn_model, nn_word;
  std::size_t nn_k = 10;
  auto* nn = app.add_subcommand("nn", "nearest neighbors of a vocabulary word");
  nn->add_option("--model", nn_model, "binary model")->required();
  nn->add_option("--word", nn_word, "query word")->required();
  nn->add_option("--top-k", nn_k, "neighbors to print")->capture_default_str();
  nn->callback([&] {
    action = [&]() -> int {
      const ModelStore model = LoadModel(nn_model);
      const auto tokens = Tokenize(nn_word);
      const auto id = tokens.size() == 1 ? model.vocab.Find(tokens[0])
                                         : model.vocab.Find(nn_word);
      if (!id) {
        err << "'" << nn_word << "' is not in the vocabulary; use "
            << "`evec estimate --word " << nn_word
            << " --contexts FILE` to estimate it\n";
        return kExitData;
      }
      const auto row = model.words.row(*id);
      const std::vector<double> query(row.begin(), row.end());
      PrintNeighbors(out, model,
                     NeighborIndex(model.words).Nearest(query, nn_k, {*id}));
      return kExitOk;
    };
  });

  // export
  std::string export_model, text_path, vocab_path, subwords_path;
  auto* exp = app.add_subcommand("export", "write text-format exports");
  exp->add_option("--model", export_model, "binary model")->required();
  exp->add_option("--text", text_path, "word2vec text format of word vectors");
  exp->add_option("--vocab", vocab_path, "token<TAB>count");
  exp->add_option("--subwords", subwords_path, "gram<TAB>id");
  exp->callback([&] {
    action = [&]() -> int {
      if (text_path.empty() && vocab_path.empty() && subwords_path.empty()) {
        err << "error: export needs --text, --vocab or --subwords\n";
        return kExitUsage;
      }
      const ModelStore model = LoadModel(export_model);
      auto open = [](const std::string& path) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot write '" + path + "'");
        return f;
      };
      if (!text_path.empty()) ExportText(model, text_path);
      if (!vocab_path.empty()) {
        auto f = open(vocab_path);
        ExportVocabulary(model.vocab, f);
      }
      if (!subwords_path.empty()) {
        auto f = open(subwords_path);
        ExportSubwords(model.subwords, f);
      }
      return kExitOk;
    };
  });

  // eval
  auto* eval = app.add_subcommand("eval", "run an evaluation task");
  eval->require_subcommand(1);
  std::string eval_model, eval_data, contexts_dir, curve_out;
  std::vector<std::size_t> budgets = DefaultCrwBudgets();
  EstimateFlags eval_flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", eval_model, "binary model")->required();
    sub->add_option("--data", eval_data, "dataset file")->required();
  };

  auto* analogy = eval->add_subcommand("analogy", "questions-words analogies");
  add_common(analogy);
  analogy->callback([&] {
    action = [&]() -> int {
      const ModelStore model = LoadModel(eval_model);
      const auto r = EvalAnalogy(model, LoadAnalogy(eval_data));
      out << "semantic,syntactic,skipped\n"
          << r.semantic_accuracy() << ',' << r.syntactic_accuracy() << ','
          << r.skipped << '\n';
      return kExitOk;
    };
  });

  auto* wordsim = eval->add_subcommand("wordsim", "word-pair similarity");
  add_common(wordsim);
  wordsim->callback([&] {
    action = [&]() -> int {
      const ModelStore model = LoadModel(eval_model);
      const auto r = EvalWordSim(model, LoadWordSim(eval_data));
      out << "rho,pairs\n" << r.rho << ',' << r.pairs_used << '\n';
      return kExitOk;
    };
  });

  auto* nonce = eval->add_subcommand("nonce", "definitional nonce ranking");
  add_common(nonce);
  eval_flags.Add(*nonce);
  nonce->callback([&] {
    action = [&]() -> int {
      const ModelStore model = LoadModel(eval_model);
      const auto pc = eval_flags.Compute(model);
      const auto r = EvalNonce(model, pc, LoadNonce(eval_data), eval_flags.Options());
      out << "mrr,median_rank,count\n"
          << r.mrr << ',' << r.median_rank << ',' << r.evaluated << '\n';
      if (r.skipped > 0) err << r.skipped << " nonces skipped\n";
      return kExitOk;
    };
  });

  auto* crw = eval->add_subcommand("crw", "contextual rare words curve");
  add_common(crw);
  eval_flags.Add(*crw);
  crw->add_option("--contexts-dir", contexts_dir,
                  "directory of <rare>.txt files (default: contexts/ next to "
                  "the data file)");
  crw->add_option("--budgets", budgets, "context budgets, ascending")
      ->capture_default_str()
      ->delimiter(',');
  crw->add_option("--curve-out", curve_out, "also write the curve CSV here");
  crw->callback([&] {
    action = [&]() -> int {
      std::sort(budgets.begin(), budgets.end());
      const ModelStore model = LoadModel(eval_model);
      const auto pc = eval_flags.Compute(model);
      const auto points = EvalCrw(model, pc, LoadCrw(eval_data, contexts_dir),
                                  budgets, eval_flags.Options());
      std::ostringstream csv;
      csv << "budget,rho,pairs\n";
      for (const auto& p : points) {
        csv << p.budget << ',' << p.rho << ',' << p.pairs << '\n';
      }
      out << csv.str();
      if (!curve_out.empty()) {
        std::ofstream f(curve_out, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot write '" + curve_out + "'");
        f << csv.str();
      }
      return kExitOk;
    };
  });

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace evec
