#include "promptsent/trainer.hpp"

#include <algorithm>

#include "promptsent/checkpoint.hpp"
#include "promptsent/pipeline.hpp"

namespace promptsent {

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::filesystem::path last_checkpoint_path(const std::filesystem::path& checkpoint) {
  auto p = checkpoint;
  p += ".last";
  return p;
}

nlohmann::json epoch_log_entry(const EpochSummary& s, std::optional<double> dev_macro_f1) {
  nlohmann::json j;
  j["epoch"] = s.epoch;
  j["lr"] = s.lr;
  j["loss_ate"] = optional_json(s.loss_ate);
  j["loss_asc"] = optional_json(s.loss_asc);
  j["loss_ceg"] = optional_json(s.loss_ceg);
  j["dev_macro_f1"] = optional_json(dev_macro_f1);
  return j;
}

template <typename T>
FitResult fit(ModelParams<T>& params, TrainState<T>& state,
              std::span<const PromptedExample> train,
              std::span<const PromptedExample> dev, const TrainConfig& config,
              const FitOptions& options) {
  FitResult result;
  if (options.resume) {
    auto loaded =
        load_checkpoint<T>(last_checkpoint_path(options.checkpoint), options.vocab_fingerprint);
    if (loaded.manifest.model != params.config) {
      throw CheckpointError(CheckpointErrorKind::kCorrupt,
                            "model config of the resumed checkpoint differs");
    }
    params = std::move(loaded.params);
    state = std::move(loaded.state);
    const nlohmann::json& m = loaded.manifest.metrics;
    if (m.contains("best_dev_score") && !m["best_dev_score"].is_null()) {
      result.best_score = m["best_dev_score"].get<double>();
    }
    result.best_epoch = m.value("best_epoch", std::size_t{0});
  }

  const std::size_t until = std::min(config.epochs, options.stop_after.value_or(config.epochs));
  while (state.epochs_done < until) {
    auto summary = train_epoch<T>(train, params, state, config);
    std::optional<double> score;
    nlohmann::json dev_json = nullptr;
    if (!dev.empty()) {
      auto report = evaluate_examples(params, dev);
      score = selection_score(report);
      dev_json = report.to_json();
    }
    const bool improved =
        dev.empty() || (score && (!result.best_score || *score >= *result.best_score));
    if (improved) {
      result.best_score = score;
      result.best_epoch = summary.epoch;
    }
    if (options.log) *options.log << epoch_log_entry(summary, score).dump() << '\n';

    if (!options.checkpoint.empty()) {
      CheckpointManifest manifest;
      manifest.model = params.config;
      manifest.train = config;
      manifest.vocab_fingerprint = options.vocab_fingerprint;
      manifest.epoch = state.epochs_done;
      manifest.adam_step = state.adam.step_count;
      manifest.metrics = {{"epoch", summary.epoch},
                          {"loss_total", summary.loss_total},
                          {"dev", dev_json},
                          {"dev_score", optional_json(score)},
                          {"best_dev_score", optional_json(result.best_score)},
                          {"best_epoch", result.best_epoch}};
      if (improved) save_checkpoint(options.checkpoint, params, manifest);
      save_checkpoint(last_checkpoint_path(options.checkpoint), params, manifest, &state);
    }
    result.epochs.push_back(summary);
  }
  return result;
}

template FitResult fit(ModelParams<float>&, TrainState<float>&,
                       std::span<const PromptedExample>, std::span<const PromptedExample>,
                       const TrainConfig&, const FitOptions&);
template FitResult fit(ModelParams<double>&, TrainState<double>&,
                       std::span<const PromptedExample>, std::span<const PromptedExample>,
                       const TrainConfig&, const FitOptions&);

}  // namespace promptsent
