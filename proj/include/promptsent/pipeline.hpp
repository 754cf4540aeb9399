#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "promptsent/dataset.hpp"
#include "promptsent/examples.hpp"
#include "promptsent/metrics.hpp"
#include "promptsent/model.hpp"
#include "promptsent/vocab.hpp"

namespace promptsent {

/// Gold/predicted pairs collected by evaluation, exposed for checking
/// reports against compute_metrics directly.
struct EvalPairs {
  std::vector<std::pair<int, int>> asc;
  std::vector<std::pair<int, int>> ate;  // sentence tokens only
  double ceg_nll_sum = 0.0;
  std::size_t ceg_tokens = 0;
  std::size_t ceg_examples = 0;
};

ExampleOptions example_options(const ModelConfig& config);

template <typename T>
EvalPairs collect_eval_pairs(const ModelParams<T>& params,
                             std::span<const PromptedExample> examples);

/// ASC accuracy and macro P/R/F1 per (record, aspect) pair, ATE tag metrics
/// over sentence tokens, and CEG per-token perplexity when explanations are
/// present. Tasks without labels are skipped with a notice. Read-only.
template <typename T>
EvalReport evaluate_examples(const ModelParams<T>& params,
                             std::span<const PromptedExample> examples);

template <typename T>
EvalReport evaluate(const ModelParams<T>& params, const Vocabulary& vocab,
                    std::span<const Record> records);

/// The score used to pick the best checkpoint: ASC macro-F1, else ATE
/// macro-F1, else nullopt.
std::optional<double> selection_score(const EvalReport& report);

struct AspectPrediction {
  std::string aspect;  // sentence tokens joined by spaces
  std::size_t token_start = 0;
  std::size_t token_end = 0;
  Polarity polarity = Polarity::kNeutral;
  std::vector<double> probabilities;  // over the ASC classes
  bool no_aspect = false;  // whole-sentence fallback, no span found
  std::optional<std::string> explanation;

  nlohmann::json to_json(const std::string& sentence) const;
};

/// ATE tags spans, each span fills the ASC prompt, and with `explain` the
/// predicted polarity fills the CEG prompt for greedy decoding. With no span
/// found, ASC runs on the whole sentence and the entry is flagged no_aspect.
template <typename T>
std::vector<AspectPrediction> predict(const ModelParams<T>& params, const Vocabulary& vocab,
                                      const std::string& sentence, bool explain);

}  // namespace promptsent
