#include "promptsent/pipeline.hpp"

#include <cmath>

#include "promptsent/ops.hpp"

namespace promptsent {

namespace {

std::string join(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::vector<std::string> class_names(std::size_t num_classes) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < num_classes; ++c) {
    names.emplace_back(polarity_name(static_cast<Polarity>(c)));
  }
  return names;
}

}  // namespace

ExampleOptions example_options(const ModelConfig& config) {
  return {.max_len = config.max_len, .max_explanation_len = config.max_explanation_len};
}

template <typename T>
EvalPairs collect_eval_pairs(const ModelParams<T>& params,
                             std::span<const PromptedExample> examples) {
  NoGradGuard no_grad;
  EvalPairs out;
  for (const auto& ex : examples) {
    auto enc = encode(params, ex.token_ids, ex.length);
    if (ex.task_mask.ate) {
      auto probs = ate_forward(params, enc);
      for (std::size_t i = 0; i < ex.sentence_len; ++i) {
        const std::size_t row = ex.prompt_prefix_len + i;
        const auto pred = ops::argmax(std::span<const T>(probs).subspan(row * kNumBioTags,
                                                                        kNumBioTags));
        out.ate.emplace_back(static_cast<int>(ex.bio_tags[row]), static_cast<int>(pred));
      }
    }
    if (ex.task_mask.asc) {
      auto probs = asc_forward(params, enc.h);
      out.asc.emplace_back(*ex.polarity, static_cast<int>(ops::argmax<T>(probs)));
    }
    if (ex.task_mask.ceg) {
      const double mean = ceg_teacher_forced_nll(params, enc.h, ex.explanation_ids).item();
      out.ceg_nll_sum += mean * double(ex.explanation_ids.size());
      out.ceg_tokens += ex.explanation_ids.size();
      ++out.ceg_examples;
    }
  }
  return out;
}

template <typename T>
EvalReport evaluate_examples(const ModelParams<T>& params,
                             std::span<const PromptedExample> examples) {
  auto pairs = collect_eval_pairs(params, examples);
  EvalReport report;
  if (!pairs.asc.empty()) {
    report.asc = compute_metrics(pairs.asc, params.config.num_classes);
    report.asc->class_names = class_names(params.config.num_classes);
  } else {
    report.notices.push_back("ASC skipped: no polarity labels");
  }
  if (!pairs.ate.empty()) {
    report.ate = compute_metrics(pairs.ate, kNumBioTags);
    for (std::size_t t = 0; t < kNumBioTags; ++t) {
      report.ate->class_names.emplace_back(bio_tag_name(static_cast<BioTag>(t)));
    }
  } else {
    report.notices.push_back("ATE skipped: no aspect-level records");
  }
  if (pairs.ceg_tokens > 0) {
    report.ceg_perplexity = std::exp(pairs.ceg_nll_sum / double(pairs.ceg_tokens));
    report.ceg_examples = pairs.ceg_examples;
  } else {
    report.notices.push_back("CEG skipped: no explanation labels");
  }
  return report;
}

template <typename T>
EvalReport evaluate(const ModelParams<T>& params, const Vocabulary& vocab,
                    std::span<const Record> records) {
  auto examples = build_examples(records, vocab, example_options(params.config));
  return evaluate_examples(params, std::span<const PromptedExample>(examples));
}

std::optional<double> selection_score(const EvalReport& report) {
  if (report.asc) return report.asc->macro_f1;
  if (report.ate) return report.ate->macro_f1;
  return std::nullopt;
}

nlohmann::json AspectPrediction::to_json(const std::string& sentence) const {
  nlohmann::json j{{"sentence", sentence},
                   {"aspect", aspect},
                   {"span", {token_start, token_end}},
                   {"polarity", polarity_name(polarity)},
                   {"probabilities", probabilities},
                   {"no_aspect", no_aspect}};
  if (explanation) j["explanation"] = *explanation;
  return j;
}

template <typename T>
std::vector<AspectPrediction> predict(const ModelParams<T>& params, const Vocabulary& vocab,
                                      const std::string& sentence, bool explain) {
  NoGradGuard no_grad;
  const auto& config = params.config;
  const auto words = tokenize(sentence);

  auto ate_in = make_ate_input(sentence, vocab, config.max_len);
  auto ate_enc = encode(params, ate_in.token_ids, ate_in.length);
  auto tag_probs = ate_forward(params, ate_enc);
  std::vector<BioTag> tags;
  for (std::size_t i = 0; i < ate_in.sentence_len; ++i) {
    const std::size_t row = ate_in.prompt_prefix_len + i;
    tags.push_back(static_cast<BioTag>(ops::argmax(
        std::span<const T>(tag_probs).subspan(row * kNumBioTags, kNumBioTags))));
  }

  std::vector<AspectPrediction> out;
  for (const auto& span : decode_bio(tags)) {
    AspectPrediction p;
    p.token_start = span.start;
    p.token_end = span.end;
    p.aspect = join(std::span(words).subspan(span.start, span.end - span.start));
    out.push_back(std::move(p));
  }
  if (out.empty()) {
    AspectPrediction p;
    p.aspect = sentence;
    p.token_end = words.size();
    p.no_aspect = true;
    out.push_back(std::move(p));
  }

  for (auto& p : out) {
    auto asc_in = make_asc_input(sentence, p.aspect, vocab, config.max_len);
    auto enc = encode(params, asc_in.token_ids, asc_in.length);
    auto probs = asc_forward(params, enc.h);
    p.probabilities.assign(probs.begin(), probs.end());
    p.polarity = static_cast<Polarity>(ops::argmax<T>(probs));
    if (explain) {
      auto ceg_in = make_ceg_input(sentence, p.aspect, p.polarity, vocab, config.max_len);
      auto ceg_enc = encode(params, ceg_in.token_ids, ceg_in.length);
      auto ids = ceg_greedy_decode(params, ceg_enc.h, config.max_explanation_len);
      p.explanation = join(vocab.tokens(ids));
    }
  }
  return out;
}

#define PROMPTSENT_INSTANTIATE_PIPELINE(T)                                            \
  template EvalPairs collect_eval_pairs(const ModelParams<T>&,                        \
                                        std::span<const PromptedExample>);            \
  template EvalReport evaluate_examples(const ModelParams<T>&,                        \
                                        std::span<const PromptedExample>);            \
  template EvalReport evaluate(const ModelParams<T>&, const Vocabulary&,              \
                               std::span<const Record>);                              \
  template std::vector<AspectPrediction> predict(const ModelParams<T>&,               \
                                                 const Vocabulary&, const std::string&, \
                                                 bool);

PROMPTSENT_INSTANTIATE_PIPELINE(float)
PROMPTSENT_INSTANTIATE_PIPELINE(double)

#undef PROMPTSENT_INSTANTIATE_PIPELINE

}  // namespace promptsent
