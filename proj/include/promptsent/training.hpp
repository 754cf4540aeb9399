#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "promptsent/examples.hpp"
#include "promptsent/model.hpp"
#include "promptsent/optim.hpp"

namespace promptsent {

enum class Precision { kFloat32, kFloat64 };

std::string_view precision_name(Precision p);
std::optional<Precision> parse_precision(std::string_view name);

struct TrainConfig {
  double lambda_ate = 1.0;
  double lambda_asc = 1.0;
  double lambda_ceg = 1.0;
  double lr_max = 1e-3;
  double lr_min = 0.0;
  std::size_t epochs = 10;
  std::size_t batch_size = 16;
  std::uint64_t seed = 42;
  Precision precision = Precision::kFloat32;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Model and training settings read from one flat JSON object whose keys are
/// the field names of ModelConfig and TrainConfig (vocab_size excluded; it
/// comes from the data). num_classes 0 means "infer from training data".
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
};

/// Defaults: ModelConfig{} with num_classes = 0, TrainConfig{}.
RunConfig default_run_config();
/// Throws std::invalid_argument for unknown keys or ill-typed values.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

/// λ-weighted sum of the present task losses. Terms with λ = 0 are dropped.
/// Throws std::invalid_argument when no term is present.
template <typename T>
Tensor<T> joint_loss(const std::optional<Tensor<T>>& ate,
                     const std::optional<Tensor<T>>& asc,
                     const std::optional<Tensor<T>>& ceg, const TrainConfig& config);

template <typename T>
struct TrainState {
  AdamState<T> adam;
  std::size_t epochs_done = 0;
};

/// Mean task losses over the batches that carried each task.
struct EpochSummary {
  std::size_t epoch = 0;  // 1-based
  double lr = 0.0;        // learning rate of the last step
  std::optional<double> loss_ate;
  std::optional<double> loss_asc;
  std::optional<double> loss_ceg;
  double loss_total = 0.0;
  std::size_t steps = 0;
};

std::size_t batches_per_epoch(std::size_t examples, std::size_t batch_size);

/// Example order for a given epoch: a permutation drawn from a generator
/// seeded by (seed, epoch), so any epoch can be replayed on its own.
std::vector<std::size_t> epoch_order(std::size_t examples, std::uint64_t seed,
                                     std::size_t epoch);

/// One forward/backward/Adam step over a batch. Returns the per-task batch
/// means and the joint loss.
template <typename T>
EpochSummary train_step(std::span<const PromptedExample* const> batch,
                        ModelParams<T>& params, TrainState<T>& state,
                        const TrainConfig& config, double lr);

/// Shuffles, batches and steps once over `examples`, following a cosine
/// schedule over epochs * batches_per_epoch steps. Throws
/// std::invalid_argument for an empty set.
template <typename T>
EpochSummary train_epoch(std::span<const PromptedExample> examples,
                         ModelParams<T>& params, TrainState<T>& state,
                         const TrainConfig& config);

}  // namespace promptsent
