#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <json.hpp>

#include "promptsent/examples.hpp"
#include "promptsent/model.hpp"
#include "promptsent/training.hpp"

namespace promptsent {

struct FitOptions {
  /// Best-dev checkpoint path; the latest epoch (with Adam moments) goes to
  /// "<checkpoint>.last". Empty disables checkpoint files.
  std::filesystem::path checkpoint;
  /// Continue from "<checkpoint>.last" instead of starting fresh.
  bool resume = false;
  std::uint64_t vocab_fingerprint = 0;
  std::ostream* log = nullptr;  // one JSON line per epoch
  /// Return once this many epochs are done, leaving the rest for a resumed
  /// call. The schedule still spans config.epochs.
  std::optional<std::size_t> stop_after;
};

struct FitResult {
  std::vector<EpochSummary> epochs;  // epochs run by this call
  std::optional<double> best_score;
  std::size_t best_epoch = 0;
};

std::filesystem::path last_checkpoint_path(const std::filesystem::path& checkpoint);

/// {"epoch", "lr", "loss_ate", "loss_asc", "loss_ceg", "dev_macro_f1"}, with
/// null for absent values.
nlohmann::json epoch_log_entry(const EpochSummary& summary,
                               std::optional<double> dev_macro_f1);

/// Trains until config.epochs epochs are done. After each epoch the dev set
/// (if any) is scored; a score at least as good as the best so far (so ties
/// go to the later epoch), or every epoch without a dev set, rewrites the
/// best checkpoint. On resume, `params` and `state` are
/// replaced by the contents of the last checkpoint.
template <typename T>
FitResult fit(ModelParams<T>& params, TrainState<T>& state,
              std::span<const PromptedExample> train,
              std::span<const PromptedExample> dev, const TrainConfig& config,
              const FitOptions& options);

}  // namespace promptsent
