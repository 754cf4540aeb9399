// Acceptance checks, one PASS/FAIL/SKIP line each.
//
//   acceptance [key...]   keys: gradient oracles overfit sst2 metrics prompts
//                               determinism resume (default: all)
//
// Exit status: 1 if anything failed, 77 if everything selected was skipped,
// 0 otherwise. The SST-2 check reads train.tsv and dev.tsv from
// $PROMPTSENT_SST2_DIR and skips when that is unset.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "promptsent/checkpoint.hpp"
#include "promptsent/ops.hpp"
#include "promptsent/optim.hpp"
#include "promptsent/pipeline.hpp"
#include "promptsent/prompt.hpp"
#include "promptsent/trainer.hpp"

using namespace promptsent;
namespace fs = std::filesystem;
using TD = Tensor<double>;

namespace {

// Pinned thresholds.
constexpr double kGradRelError = 1e-6;
constexpr double kGradSeconds = 60.0;
constexpr double kOracleTolerance = 1e-6;
constexpr int kOracleInstances = 100;
constexpr std::size_t kOverfitEpochs = 200;
constexpr double kOverfitAscAccuracy = 0.95;
constexpr double kOverfitAteAccuracy = 0.95;
constexpr double kOverfitPerplexity = 1.2;
constexpr std::size_t kSst2Train = 2000;
constexpr std::size_t kSst2Dev = 400;
constexpr double kSst2DevAccuracy = 0.70;
constexpr double kSst2Seconds = 15 * 60.0;
constexpr double kMetricsTolerance = 1e-9;

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

Outcome pass(std::string d) { return {Verdict::kPass, std::move(d)}; }
Outcome fail(std::string d) { return {Verdict::kFail, std::move(d)}; }
Outcome skip(std::string d) { return {Verdict::kSkip, std::move(d)}; }
Outcome check(bool ok, std::string d) { return {ok ? Verdict::kPass : Verdict::kFail, std::move(d)}; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

oracle::Vec values(const TD& t) { return {t.data().begin(), t.data().end()}; }

TD random_tensor(std::mt19937_64& rng, Shape shape, double lo = -1, double hi = 1) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return TD::from(std::move(shape), oracle::random_vec(rng, n, lo, hi), true);
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Gradient suite ------------------------------------------------------------

Outcome gradient_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  ModelConfig c;
  c.vocab_size = 50;
  c.embed_dim = 8;
  c.num_classes = 3;
  c.hidden_dim = 8;
  c.max_len = 12;
  c.max_explanation_len = 6;
  auto p = ModelParams<double>::init(c, 31);
  // Nonzero biases so every bias gradient is exercised away from zero.
  std::mt19937_64 rng(31);
  for (auto& [name, t] : p.named()) {
    if (name.ends_with("bias") || name.starts_with("ceg.gru.b_")) {
      auto r = oracle::random_vec(rng, t.size(), -0.5, 0.5);
      std::copy(r.begin(), r.end(), t.mutable_data().begin());
    }
  }
  std::vector<int> ids{9, 14, 27, 33, 41, 18, 6, 0, 0, 0, 0, 0};
  std::vector<int> tags{0, 1, 2, 0, 0, 1, 0, 0, 0, 0, 0, 0};
  std::vector<int> gold{12, 44, 30, Vocabulary::kEos};
  auto loss = [&] {
    auto enc = encode(p, ids, 7);
    return ops::add(ops::add(ate_loss(p, enc, tags), asc_loss(p, enc.h, 1)),
                    ceg_teacher_forced_nll(p, enc.h, gold));
  };
  auto results = gradcheck::check(loss, p.named());
  double worst = 0;
  std::string worst_name;
  for (const auto& r : results) {
    if (r.relative_error >= worst) worst = r.relative_error, worst_name = r.name;
  }
  const double secs = seconds_since(t0);
  return check(results.size() == p.named().size() && worst < kGradRelError && secs < kGradSeconds,
               fmt("%zu parameters, max relative error %.3g (%s) < %.0e, %.2f s < %.0f s",
                   results.size(), worst, worst_name.c_str(), kGradRelError, secs,
                   kGradSeconds));
}

// Oracle equivalence --------------------------------------------------------

Outcome oracle_equivalence() {
  std::mt19937_64 rng(2024);
  double conv = 0, pool = 0, xent = 0, gru = 0, adam = 0;
  for (int i = 0; i < kOracleInstances; ++i) {
    const std::size_t k = uniform(rng, 1, 5), d = uniform(rng, 1, 6), f = uniform(rng, 1, 6);
    const std::size_t n = k + uniform(rng, 0, 10);
    auto x = random_tensor(rng, {n, d});
    auto w = random_tensor(rng, {k, d, f});
    auto b = random_tensor(rng, {f});
    auto expected = oracle::conv1d_relu(values(x), values(w), values(b), n, d, k, f);
    conv = std::max(conv, oracle::max_abs_diff(values(ops::conv1d_relu(x, w, b)), expected));
  }
  for (int i = 0; i < kOracleInstances; ++i) {
    const std::size_t rows = uniform(rng, 1, 12), cols = uniform(rng, 1, 8);
    auto c = random_tensor(rng, {rows, cols}, -3, 3);
    auto expected = oracle::max_over_time(values(c), rows, cols);
    pool = std::max(pool, oracle::max_abs_diff(values(ops::max_over_time(c)), expected.value));
  }
  for (int i = 0; i < kOracleInstances; ++i) {
    const std::size_t classes = uniform(rng, 2, 10);
    auto logits = random_tensor(rng, {classes}, -5, 5);
    const int cls = static_cast<int>(uniform(rng, 0, classes - 1));
    const double expected = oracle::softmax_cross_entropy(values(logits), cls);
    xent = std::max(xent, std::abs(ops::softmax_cross_entropy(logits, cls).item() - expected));
  }
  for (int i = 0; i < kOracleInstances; ++i) {
    const std::size_t in = uniform(rng, 1, 8), hidden = uniform(rng, 1, 8);
    GruParams<double> g;
    oracle::GruWeights o;
    o.in = in;
    o.hidden = hidden;
    auto make = [&](TD& t, oracle::Vec& v, Shape shape) {
      t = random_tensor(rng, std::move(shape));
      v = values(t);
    };
    make(g.w_z, o.wz, {in, hidden});
    make(g.w_r, o.wr, {in, hidden});
    make(g.w_h, o.wh, {in, hidden});
    make(g.u_z, o.uz, {hidden, hidden});
    make(g.u_r, o.ur, {hidden, hidden});
    make(g.u_h, o.uh, {hidden, hidden});
    make(g.b_z, o.bz, {hidden});
    make(g.b_r, o.br, {hidden});
    make(g.b_h, o.bh, {hidden});
    auto h = random_tensor(rng, {hidden});
    auto x = random_tensor(rng, {in});
    gru = std::max(gru, oracle::max_abs_diff(values(gru_step(g, h, x)),
                                             oracle::gru_step(o, values(h), values(x))));
  }
  for (int i = 0; i < kOracleInstances; ++i) {
    const std::size_t n = uniform(rng, 1, 16), steps = uniform(rng, 1, 20);
    const double lr = std::uniform_real_distribution<double>(1e-4, 1e-1)(rng);
    auto w = random_tensor(rng, {n});
    std::vector<TD> params{w};
    AdamState<double> state;
    std::vector<oracle::ScalarAdam> ref(n);
    auto expected = values(w);
    for (std::size_t s = 0; s < steps; ++s) {
      auto grad = oracle::random_vec(rng, n, -2, 2);
      w.zero_grad();
      std::copy(grad.begin(), grad.end(), w.mutable_grad().begin());
      adam_step<double>(params, state, lr);
      for (std::size_t j = 0; j < n; ++j) expected[j] = ref[j].step(expected[j], grad[j], lr);
    }
    adam = std::max(adam, oracle::max_abs_diff(values(w), expected));
  }
  const double worst = std::max({conv, pool, xent, gru, adam});
  return check(worst < kOracleTolerance,
               fmt("%d instances each; max abs diff conv1d_relu %.2g, max_over_time %.2g, "
                   "softmax_cross_entropy %.2g, gru_step %.2g, adam_step %.2g < %.0e",
                   kOracleInstances, conv, pool, xent, gru, adam, kOracleTolerance));
}

// Overfit -------------------------------------------------------------------

Outcome overfit() {
  auto records = fixtures::synthetic_records();
  auto vocab = build_vocabulary(records);
  ModelConfig mc;
  mc.vocab_size = vocab.size();
  auto examples = build_examples(records, vocab, example_options(mc));
  TrainConfig tc;
  tc.epochs = kOverfitEpochs;
  auto params = ModelParams<float>::init(mc, tc.seed);
  TrainState<float> state;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t e = 0; e < tc.epochs; ++e) train_epoch<float>(examples, params, state, tc);
  auto report = evaluate_examples(params, std::span<const PromptedExample>(examples));
  if (!report.asc || !report.ate || !report.ceg_perplexity) {
    return fail("report is missing a task");
  }
  const double asc = report.asc->accuracy, ate = report.ate->accuracy;
  const double ppl = *report.ceg_perplexity;
  return check(records.size() == 32 && asc >= kOverfitAscAccuracy &&
                   ate >= kOverfitAteAccuracy && ppl <= kOverfitPerplexity,
               fmt("%zu records, %zu epochs at defaults: ASC accuracy %.4f >= %.2f, ATE token "
                   "accuracy %.4f >= %.2f, CEG perplexity %.4f <= %.1f (%.1f s)",
                   records.size(), tc.epochs, asc, kOverfitAscAccuracy, ate,
                   kOverfitAteAccuracy, ppl, kOverfitPerplexity, seconds_since(t0)));
}

// SST-2 ---------------------------------------------------------------------

std::vector<Record> seeded_subset(std::vector<Record> records, std::size_t n,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::shuffle(records.begin(), records.end(), rng);
  if (records.size() > n) records.resize(n);
  return records;
}

Outcome sst2() {
  const char* dir = std::getenv("PROMPTSENT_SST2_DIR");
  if (!dir || !*dir) return skip("PROMPTSENT_SST2_DIR is not set; SST-2 is not bundled");
  const fs::path root(dir);
  if (!fs::exists(root / "train.tsv") || !fs::exists(root / "dev.tsv")) {
    return skip("train.tsv/dev.tsv not found under " + root.string());
  }
  const auto t0 = std::chrono::steady_clock::now();
  auto train = seeded_subset(parse_dataset(root / "train.tsv", DatasetFormat::kSst2Tsv),
                             kSst2Train, 42);
  auto dev = seeded_subset(parse_dataset(root / "dev.tsv", DatasetFormat::kSst2Tsv),
                           kSst2Dev, 43);
  auto run = default_run_config();
  auto vocab = build_vocabulary(train);
  run.model.vocab_size = vocab.size();
  run.model.num_classes = 2;
  auto examples = build_examples(train, vocab, example_options(run.model));
  auto params = ModelParams<float>::init(run.model, run.train.seed);
  TrainState<float> state;
  for (std::size_t e = 0; e < run.train.epochs; ++e) {
    train_epoch<float>(examples, params, state, run.train);
  }
  auto report = evaluate(params, vocab, std::span<const Record>(dev));
  const double secs = seconds_since(t0);
  if (!report.asc) return fail("no dev labels");
  return check(report.asc->accuracy >= kSst2DevAccuracy && secs < kSst2Seconds,
               fmt("%zu train / %zu dev, %zu epochs: dev accuracy %.4f >= %.2f, %.0f s < %.0f s",
                   train.size(), dev.size(), run.train.epochs, report.asc->accuracy,
                   kSst2DevAccuracy, secs, kSst2Seconds));
}

// Metrics -------------------------------------------------------------------

Outcome metrics_exactness() {
  // gold (A, A, B), pred (A, B, B)
  const std::vector<std::pair<int, int>> pairs{{0, 0}, {0, 1}, {1, 1}};
  auto m = compute_metrics(pairs, 2);
  const double two_thirds = 2.0 / 3.0;
  double err = std::abs(m.accuracy - two_thirds);
  err = std::max(err, std::abs(m.per_class[0].precision - 1.0));
  err = std::max(err, std::abs(m.per_class[0].recall - 0.5));
  err = std::max(err, std::abs(m.per_class[0].f1 - two_thirds));
  err = std::max(err, std::abs(m.per_class[1].precision - 0.5));
  err = std::max(err, std::abs(m.per_class[1].recall - 1.0));
  err = std::max(err, std::abs(m.per_class[1].f1 - two_thirds));
  err = std::max(err, std::abs(m.macro_f1 - two_thirds));

  // Macro-F1 against per-class F1 rebuilt from the stored counts.
  std::mt19937_64 rng(99);
  double macro_err = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = uniform(rng, 2, 6), n = uniform(rng, 1, 60);
    std::vector<std::pair<int, int>> random_pairs;
    for (std::size_t i = 0; i < n; ++i) {
      random_pairs.emplace_back(int(uniform(rng, 0, k - 1)), int(uniform(rng, 0, k - 1)));
    }
    auto r = compute_metrics(random_pairs, k);
    double sum = 0;
    for (const auto& c : r.counts) {
      const double p = c.tp + c.fp ? double(c.tp) / double(c.tp + c.fp) : 0.0;
      const double rc = c.tp + c.fn ? double(c.tp) / double(c.tp + c.fn) : 0.0;
      sum += p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0;
    }
    macro_err = std::max(macro_err, std::abs(r.macro_f1 - sum / double(k)));
  }
  return check(err <= kMetricsTolerance && macro_err <= kMetricsTolerance,
               fmt("hand example max error %.2g, macro-F1 vs stored counts max error %.2g "
                   "over 200 random cases (<= %.0e)",
                   err, macro_err, kMetricsTolerance));
}

// Prompts -------------------------------------------------------------------

Outcome prompt_fidelity() {
  const std::string s = "The battery life is great; but the screen is dim";
  const std::vector<std::pair<std::string, std::string>> cases{
      {build_prompt(Task::kAte, s),
       "Find aspects in: The battery life is great; but the screen is dim"},
      {build_prompt(Task::kAsc, s, "battery life"),
       "The sentiment of battery life in The battery life is great; but the screen is dim "
       "is [MASK]"},
      {build_prompt(Task::kAsc, s, "screen"),
       "The sentiment of screen in The battery life is great; but the screen is dim is "
       "[MASK]"},
      {build_prompt(Task::kCeg, s, "battery life"),
       "The reason why battery life in The battery life is great; but the screen is dim is "
       "[MASK] is because [REASON]"},
      {build_prompt(Task::kCeg, s, "screen"),
       "The reason why screen in The battery life is great; but the screen is dim is [MASK] "
       "is because [REASON]"},
  };
  for (const auto& [got, want] : cases) {
    if (got != want) return fail("got \"" + got + "\", want \"" + want + "\"");
  }
  return pass(fmt("ATE, ASC and CEG prompts byte-exact for both aspects (%zu strings)",
                  cases.size()));
}

// Determinism and resume ------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct Workspace {
  std::vector<Record> records = fixtures::synthetic_records();
  Vocabulary vocab = build_vocabulary(records);
  ModelConfig config;
  std::vector<PromptedExample> examples;
  fs::path dir;

  explicit Workspace(const std::string& name) {
    config.vocab_size = vocab.size();
    examples = build_examples(records, vocab, example_options(config));
    dir = fs::temp_directory_path() / ("promptsent_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  std::span<const PromptedExample> dev() const { return {examples.data(), 40}; }
};

Outcome determinism() {
  Workspace ws("determinism");
  TrainConfig tc;
  std::string logs[2];
  for (int run = 0; run < 2; ++run) {
    std::ostringstream log;
    auto params = ModelParams<float>::init(ws.config, tc.seed);
    TrainState<float> state;
    FitOptions options;
    options.checkpoint = ws.dir / ("run" + std::to_string(run) + ".ckpt");
    options.vocab_fingerprint = ws.vocab.fingerprint();
    options.log = &log;
    fit<float>(params, state, ws.examples, ws.dev(), tc, options);
    logs[run] = log.str();
  }
  const bool same_log = logs[0] == logs[1];
  const bool same_best = slurp(ws.dir / "run0.ckpt") == slurp(ws.dir / "run1.ckpt");
  const bool same_last = slurp(ws.dir / "run0.ckpt.last") == slurp(ws.dir / "run1.ckpt.last");
  return check(same_log && same_best && same_last && !logs[0].empty(),
               fmt("two %zu-epoch runs at defaults: logs %s, best checkpoint %s, last "
                   "checkpoint %s",
                   tc.epochs, same_log ? "identical" : "DIFFER",
                   same_best ? "identical" : "DIFFER", same_last ? "identical" : "DIFFER"));
}

Outcome checkpoint_resume() {
  Workspace ws("resume");
  TrainConfig tc;
  const std::size_t stop = 4;

  std::ostringstream full_log;
  auto full = ModelParams<float>::init(ws.config, tc.seed);
  TrainState<float> full_state;
  FitOptions full_options;
  full_options.checkpoint = ws.dir / "full.ckpt";
  full_options.vocab_fingerprint = ws.vocab.fingerprint();
  full_options.log = &full_log;
  fit<float>(full, full_state, ws.examples, ws.dev(), tc, full_options);

  std::ostringstream split_log;
  {
    auto params = ModelParams<float>::init(ws.config, tc.seed);
    TrainState<float> state;
    FitOptions options = full_options;
    options.checkpoint = ws.dir / "split.ckpt";
    options.log = &split_log;
    options.stop_after = stop;
    fit<float>(params, state, ws.examples, ws.dev(), tc, options);
  }
  // A fresh process would start from nothing but the files on disk.
  auto resumed = ModelParams<float>::init(ws.config, tc.seed + 1);
  TrainState<float> resumed_state;
  FitOptions options = full_options;
  options.checkpoint = ws.dir / "split.ckpt";
  options.log = &split_log;
  options.resume = true;
  fit<float>(resumed, resumed_state, ws.examples, ws.dev(), tc, options);

  bool same_params = true;
  auto a = full.named(), b = resumed.named();
  for (std::size_t i = 0; i < a.size(); ++i) {
    same_params &= std::ranges::equal(a[i].second.data(), b[i].second.data());
  }
  const bool same_log = split_log.str() == full_log.str();
  const bool same_files = slurp(ws.dir / "full.ckpt.last") == slurp(ws.dir / "split.ckpt.last");
  return check(same_log && same_params && same_files,
               fmt("stopped after epoch %zu of %zu and resumed from disk: loss log %s, "
                   "final parameters %s, final checkpoint %s",
                   stop, tc.epochs, same_log ? "identical" : "DIFFERS",
                   same_params ? "bit-identical" : "DIFFER",
                   same_files ? "identical" : "DIFFERS"));
}

struct Criterion {
  const char* key;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"gradient", "gradient suite", gradient_suite},
      {"oracles", "oracle equivalence", oracle_equivalence},
      {"overfit", "overfit synthetic fixture", overfit},
      {"sst2", "desk-scale SST-2", sst2},
      {"metrics", "metrics exactness", metrics_exactness},
      {"prompts", "prompt fidelity", prompt_fidelity},
      {"determinism", "determinism", determinism},
      {"resume", "checkpoint round-trip", checkpoint_resume},
  };
  std::vector<std::string> selected(argv + 1, argv + argc);
  for (const auto& key : selected) {
    if (std::ranges::none_of(criteria, [&](const Criterion& c) { return key == c.key; })) {
      std::fprintf(stderr, "unknown criterion '%s'\n", key.c_str());
      return 2;
    }
  }
  int passed = 0, failed = 0, skipped = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::ranges::find(selected, c.key) == selected.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.verdict == Verdict::kPass   ? "PASS"
                      : o.verdict == Verdict::kFail ? "FAIL"
                                                    : "SKIP";
    std::printf("%s %s: %s\n", tag, c.title, o.detail.c_str());
    std::fflush(stdout);
    passed += o.verdict == Verdict::kPass;
    failed += o.verdict == Verdict::kFail;
    skipped += o.verdict == Verdict::kSkip;
  }
  std::printf("%d passed, %d failed, %d skipped\n", passed, failed, skipped);
  if (failed) return 1;
  if (passed == 0 && skipped > 0) return 77;
  return 0;
}
