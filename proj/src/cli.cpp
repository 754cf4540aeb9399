#include "promptsent/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include "promptsent/checkpoint.hpp"
#include "promptsent/dataset.hpp"
#include "promptsent/pipeline.hpp"
#include "promptsent/trainer.hpp"

namespace promptsent::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Vocabulary problems on the checkpoint side share the checkpoint exit code.
struct VocabFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string train;
  std::string dev;
  std::string test;
  std::string checkpoint;
  std::string vocab;
  std::string input;
  std::string out;
  std::string format = "jsonl";
  std::string domain;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> few_shot;
  bool resume = false;
};

DatasetFormat format_of(const Options& o) {
  auto f = parse_dataset_format(o.format);
  if (!f) throw UsageError("unknown --format '" + o.format + "'");
  return *f;
}

std::vector<Record> load_records(const std::string& path, const Options& o) {
  auto records = parse_dataset(std::filesystem::path(path), format_of(o));
  if (!o.domain.empty()) {
    std::erase_if(records, [&](const Record& r) { return r.domain != o.domain; });
  }
  return records;
}

std::filesystem::path vocab_path(const Options& o) {
  if (!o.vocab.empty()) return o.vocab;
  return o.checkpoint + ".vocab";
}

Vocabulary load_vocab(const Options& o) {
  try {
    return Vocabulary::load(vocab_path(o));
  } catch (const std::exception& e) {
    throw VocabFileError(e.what());
  }
}

// Writes to --out when given, else to the command's standard output.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw UsageError("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::size_t infer_num_classes(std::span<const Record> a, std::span<const Record> b) {
  auto neutral = [](const Record& r) {
    if (r.sentence_label == Polarity::kNeutral) return true;
    return std::ranges::any_of(r.aspects,
                               [](const Aspect& x) { return x.polarity == Polarity::kNeutral; });
  };
  return std::ranges::any_of(a, neutral) || std::ranges::any_of(b, neutral) ? 3 : 2;
}

void check_labels(std::span<const Record> records, std::size_t num_classes,
                  const std::string& source) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto bad = [&](Polarity p) { return static_cast<std::size_t>(p) >= num_classes; };
    if ((r.sentence_label && bad(*r.sentence_label)) ||
        std::ranges::any_of(r.aspects, [&](const Aspect& a) { return bad(a.polarity); })) {
      throw DataError(source, 0,
                      "record " + std::to_string(i + 1) + " has a polarity outside the " +
                          std::to_string(num_classes) + " model classes");
    }
  }
}

template <typename T>
void train_with(const Options& o, const RunConfig& run, const Vocabulary& vocab,
                std::span<const Record> train_records, std::span<const Record> dev_records,
                std::ostream& out) {
  const auto opts = example_options(run.model);
  auto train = build_examples(train_records, vocab, opts);
  auto dev = build_examples(dev_records, vocab, opts);
  if (train.empty()) throw DataError(o.train, 0, "no training examples");

  auto params = ModelParams<T>::init(run.model, run.train.seed);
  TrainState<T> state;
  Sink log_file(o.out, out);
  // The log goes to stdout and, with --out, to the file as well.
  struct Tee : std::streambuf {
    std::ostream* a;
    std::ostream* b;
    int overflow(int c) override {
      if (c != EOF) {
        a->put(static_cast<char>(c));
        if (b) b->put(static_cast<char>(c));
      }
      return c;
    }
  } tee;
  tee.a = &out;
  tee.b = o.out.empty() ? nullptr : &*log_file;
  std::ostream log(&tee);

  FitOptions fit_options;
  fit_options.checkpoint = o.checkpoint;
  fit_options.resume = o.resume;
  fit_options.vocab_fingerprint = vocab.fingerprint();
  fit_options.log = &log;
  fit<T>(params, state, train, dev, run.train, fit_options);
  log.flush();
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.train.empty()) throw UsageError("train requires --train");
  if (o.checkpoint.empty()) throw UsageError("train requires --checkpoint");

  RunConfig run = default_run_config();
  if (!o.config.empty()) {
    try {
      run = load_run_config(o.config);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (o.seed) run.train.seed = *o.seed;

  auto train_records = load_records(o.train, o);
  std::vector<Record> dev_records;
  if (!o.dev.empty()) dev_records = load_records(o.dev, o);
  if (o.few_shot) {
    auto sample = subsample(train_records, *o.few_shot, run.train.seed);
    for (const auto& w : sample.warnings) err << "warning: " << w << '\n';
    train_records = std::move(sample.records);
  }
  if (train_records.empty()) throw DataError(o.train, 0, "no training records");

  Vocabulary vocab;
  if (o.resume) {
    vocab = load_vocab(o);
  } else {
    vocab = build_vocabulary(train_records);
    vocab.save(vocab_path(o));
  }

  run.model.vocab_size = vocab.size();
  if (run.model.num_classes == 0) {
    run.model.num_classes = infer_num_classes(train_records, dev_records);
  }
  try {
    run.model.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  check_labels(train_records, run.model.num_classes, o.train);
  check_labels(dev_records, run.model.num_classes, o.dev);
  err << "training on " << train_records.size() << " records, vocabulary "
      << vocab.size() << ", " << run.model.num_classes << " classes\n";

  if (run.train.precision == Precision::kFloat64) {
    train_with<double>(o, run, vocab, train_records, dev_records, out);
  } else {
    train_with<float>(o, run, vocab, train_records, dev_records, out);
  }
  return kExitOk;
}

template <typename T>
int eval_with(const Options& o, const Vocabulary& vocab, std::ostream& out) {
  auto loaded = load_checkpoint<T>(o.checkpoint, vocab.fingerprint());
  auto records = load_records(o.test, o);
  check_labels(records, loaded.params.config.num_classes, o.test);
  auto report = evaluate(loaded.params, vocab, std::span<const Record>(records));
  out << report.table();
  if (!o.out.empty()) {
    Sink sink(o.out, out);
    *sink << report.to_json().dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  if (o.test.empty()) throw UsageError("eval requires --test");
  if (o.checkpoint.empty()) throw UsageError("eval requires --checkpoint");
  auto manifest = read_checkpoint_manifest(o.checkpoint);
  auto vocab = load_vocab(o);
  if (manifest.train.precision == Precision::kFloat64) return eval_with<double>(o, vocab, out);
  return eval_with<float>(o, vocab, out);
}

template <typename T>
int predict_with(const Options& o, const Vocabulary& vocab, bool explain, std::istream& in,
                 std::ostream& out) {
  auto loaded = load_checkpoint<T>(o.checkpoint, vocab.fingerprint());
  std::ifstream file;
  std::istream* source = &in;
  if (!o.input.empty()) {
    file.open(o.input);
    if (!file) throw DataError(o.input, 0, "cannot open file");
    source = &file;
  }
  Sink sink(o.out, out);
  std::string line;
  while (std::getline(*source, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (tokenize(line).empty()) continue;
    for (const auto& p : predict(loaded.params, vocab, line, explain)) {
      *sink << p.to_json(line).dump() << '\n';
    }
  }
  return kExitOk;
}

int cmd_predict(const Options& o, bool explain, std::istream& in, std::ostream& out) {
  if (o.checkpoint.empty()) {
    throw UsageError(std::string(explain ? "explain" : "predict") + " requires --checkpoint");
  }
  auto manifest = read_checkpoint_manifest(o.checkpoint);
  auto vocab = load_vocab(o);
  if (manifest.train.precision == Precision::kFloat64) {
    return predict_with<double>(o, vocab, explain, in, out);
  }
  return predict_with<float>(o, vocab, explain, in, out);
}

int cmd_convert(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.input.empty()) throw UsageError("convert requires --input");
  auto records = load_records(o.input, o);
  if (o.few_shot) {
    auto sample = subsample(records, *o.few_shot, o.seed.value_or(TrainConfig{}.seed));
    for (const auto& w : sample.warnings) err << "warning: " << w << '\n';
    records = std::move(sample.records);
  }
  Sink sink(o.out, out);
  write_jsonl(*sink, records);
  return kExitOk;
}

void add_data_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format,
                  "Dataset format: jsonl, sst2_tsv or semeval_xml_flattened")
      ->capture_default_str();
  cmd->add_option("--domain", o.domain, "Keep only records of this domain");
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"Prompt-based multi-task aspect sentiment analysis", "promptsent"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Train a model and write checkpoints");
  train->add_option("--train", o.train, "Training dataset");
  train->add_option("--dev", o.dev, "Dev dataset for best-checkpoint selection");
  train->add_option("--config", o.config, "Flat JSON config");
  train->add_option("--checkpoint", o.checkpoint, "Best checkpoint path");
  train->add_option("--seed", o.seed, "Overrides the config seed");
  train->add_option("--few-shot", o.few_shot, "Sample K training records per class")
      ->check(CLI::PositiveNumber);
  train->add_option("--out", o.out, "Also write the epoch log here");
  train->add_flag("--resume", o.resume, "Continue from <checkpoint>.last");
  add_data_flags(train, o);

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--test", o.test, "Test dataset");
  eval->add_option("--checkpoint", o.checkpoint, "Checkpoint to evaluate");
  eval->add_option("--vocab", o.vocab, "Vocabulary file (default <checkpoint>.vocab)");
  eval->add_option("--out", o.out, "Write the JSON report here");
  add_data_flags(eval, o);

  for (const char* name : {"predict", "explain"}) {
    auto* cmd = app.add_subcommand(
        name, std::string(name) == "predict"
                  ? "Tag aspects and classify their polarity"
                  : "Tag aspects, classify them and generate explanations");
    cmd->add_option("--checkpoint", o.checkpoint, "Checkpoint to use");
    cmd->add_option("--vocab", o.vocab, "Vocabulary file (default <checkpoint>.vocab)");
    cmd->add_option("--input", o.input, "One sentence per line (default stdin)");
    cmd->add_option("--out", o.out, "Write JSON lines here (default stdout)");
  }

  auto* convert = app.add_subcommand("convert", "Convert a dataset to canonical JSONL");
  convert->add_option("--input", o.input, "Source dataset");
  convert->add_option("--out", o.out, "Output JSONL (default stdout)");
  convert->add_option("--few-shot", o.few_shot, "Sample K records per class")
      ->check(CLI::PositiveNumber);
  convert->add_option("--seed", o.seed, "Sampling seed");
  add_data_flags(convert, o);

  // CLI11 wants argv-style input.
  std::vector<std::string> storage{"promptsent"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  const auto* cmd = app.get_subcommands().front();
  try {
    const std::string name = cmd->get_name();
    if (name == "train") return cmd_train(o, out, err);
    if (name == "eval") return cmd_eval(o, out);
    if (name == "predict") return cmd_predict(o, false, in, out);
    if (name == "explain") return cmd_predict(o, true, in, out);
    return cmd_convert(o, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << cmd->help();
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const CheckpointError& e) {
    err << e.what() << '\n';
    return kExitCheckpoint;
  } catch (const VocabFileError& e) {
    err << "checkpoint error (vocabulary): " << e.what() << '\n';
    return kExitCheckpoint;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace promptsent::cli
