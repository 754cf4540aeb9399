#include "promptsent/training.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "promptsent/ops.hpp"

namespace promptsent {

std::string_view precision_name(Precision p) {
  return p == Precision::kFloat64 ? "float64" : "float32";
}

std::optional<Precision> parse_precision(std::string_view name) {
  if (name == "float32") return Precision::kFloat32;
  if (name == "float64") return Precision::kFloat64;
  return std::nullopt;
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("train config: " + what);
  };
  if (lambda_ate < 0 || lambda_asc < 0 || lambda_ceg < 0) fail("lambdas must be >= 0");
  if (lambda_ate == 0 && lambda_asc == 0 && lambda_ceg == 0) {
    fail("at least one lambda must be > 0");
  }
  if (!(lr_max > 0)) fail("lr_max must be > 0");
  if (lr_min < 0 || lr_min > lr_max) fail("lr_min must be in [0, lr_max]");
  if (epochs == 0) fail("epochs must be >= 1");
  if (batch_size == 0) fail("batch_size must be >= 1");
}

RunConfig default_run_config() {
  RunConfig c;
  c.model.num_classes = 0;
  return c;
}

RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  RunConfig c = default_run_config();
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "embed_dim") c.model.embed_dim = value.get<std::size_t>();
      else if (key == "kernel_widths") c.model.kernel_widths = value.get<std::vector<std::size_t>>();
      else if (key == "num_classes") c.model.num_classes = value.get<std::size_t>();
      else if (key == "hidden_dim") c.model.hidden_dim = value.get<std::size_t>();
      else if (key == "max_len") c.model.max_len = value.get<std::size_t>();
      else if (key == "max_explanation_len") c.model.max_explanation_len = value.get<std::size_t>();
      else if (key == "ate_use_conv_features") c.model.ate_use_conv_features = value.get<bool>();
      else if (key == "lambda_ate") c.train.lambda_ate = value.get<double>();
      else if (key == "lambda_asc") c.train.lambda_asc = value.get<double>();
      else if (key == "lambda_ceg") c.train.lambda_ceg = value.get<double>();
      else if (key == "lr_max") c.train.lr_max = value.get<double>();
      else if (key == "lr_min") c.train.lr_min = value.get<double>();
      else if (key == "epochs") c.train.epochs = value.get<std::size_t>();
      else if (key == "batch_size") c.train.batch_size = value.get<std::size_t>();
      else if (key == "seed") c.train.seed = value.get<std::uint64_t>();
      else if (key == "precision") {
        auto p = parse_precision(value.get<std::string>());
        if (!p) throw std::invalid_argument("precision must be float32 or float64");
        c.train.precision = *p;
      } else {
        throw std::invalid_argument("unknown key");
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
  c.train.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

nlohmann::json to_json(const RunConfig& c) {
  auto j = c.model.to_json();
  j.erase("vocab_size");
  j["lambda_ate"] = c.train.lambda_ate;
  j["lambda_asc"] = c.train.lambda_asc;
  j["lambda_ceg"] = c.train.lambda_ceg;
  j["lr_max"] = c.train.lr_max;
  j["lr_min"] = c.train.lr_min;
  j["epochs"] = c.train.epochs;
  j["batch_size"] = c.train.batch_size;
  j["seed"] = c.train.seed;
  j["precision"] = precision_name(c.train.precision);
  return j;
}

template <typename T>
Tensor<T> joint_loss(const std::optional<Tensor<T>>& ate,
                     const std::optional<Tensor<T>>& asc,
                     const std::optional<Tensor<T>>& ceg, const TrainConfig& config) {
  std::optional<Tensor<T>> total;
  auto add_term = [&](const std::optional<Tensor<T>>& loss, double lambda) {
    if (!loss || lambda == 0.0) return;
    auto term = lambda == 1.0 ? *loss : ops::scale(*loss, static_cast<T>(lambda));
    total = total ? ops::add(*total, term) : term;
  };
  add_term(ate, config.lambda_ate);
  add_term(asc, config.lambda_asc);
  add_term(ceg, config.lambda_ceg);
  if (!total) throw std::invalid_argument("joint_loss: no task loss present");
  return *total;
}

std::size_t batches_per_epoch(std::size_t examples, std::size_t batch_size) {
  return (examples + batch_size - 1) / batch_size;
}

std::vector<std::size_t> epoch_order(std::size_t examples, std::uint64_t seed,
                                     std::size_t epoch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch)};
  std::mt19937_64 rng(seq);
  std::vector<std::size_t> order(examples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

namespace {

bool trains_on(const PromptedExample& ex, const TrainConfig& config) {
  return (ex.task_mask.ate && config.lambda_ate > 0) ||
         (ex.task_mask.asc && config.lambda_asc > 0) ||
         (ex.task_mask.ceg && config.lambda_ceg > 0);
}

template <typename T>
std::optional<Tensor<T>> mean_of(const std::vector<Tensor<T>>& losses) {
  if (losses.empty()) return std::nullopt;
  Tensor<T> sum = losses.front();
  for (std::size_t i = 1; i < losses.size(); ++i) sum = ops::add(sum, losses[i]);
  if (losses.size() == 1) return sum;
  return ops::scale(sum, static_cast<T>(1.0 / double(losses.size())));
}

}  // namespace

template <typename T>
EpochSummary train_step(std::span<const PromptedExample* const> batch,
                        ModelParams<T>& params, TrainState<T>& state,
                        const TrainConfig& config, double lr) {
  std::vector<Tensor<T>> ate, asc, ceg;
  std::vector<int> tags;
  for (const PromptedExample* ex : batch) {
    if (!trains_on(*ex, config)) continue;
    auto enc = encode(params, ex->token_ids, ex->length);
    if (ex->task_mask.ate && config.lambda_ate > 0) {
      tags.assign(ex->bio_tags.size(), 0);
      std::transform(ex->bio_tags.begin(), ex->bio_tags.end(), tags.begin(),
                     [](BioTag t) { return static_cast<int>(t); });
      ate.push_back(ate_loss(params, enc, tags));
    }
    if (ex->task_mask.asc && config.lambda_asc > 0) {
      asc.push_back(asc_loss(params, enc.h, *ex->polarity));
    }
    if (ex->task_mask.ceg && config.lambda_ceg > 0) {
      ceg.push_back(ceg_teacher_forced_nll(params, enc.h, ex->explanation_ids));
    }
  }
  auto l_ate = mean_of(ate);
  auto l_asc = mean_of(asc);
  auto l_ceg = mean_of(ceg);
  auto total = joint_loss(l_ate, l_asc, l_ceg, config);

  auto all = params.all();
  for (auto& p : all) p.clear_grad();
  backward(total);
  adam_step<T>(all, state.adam, lr);

  EpochSummary s;
  s.lr = lr;
  s.steps = 1;
  s.loss_total = total.item();
  if (l_ate) s.loss_ate = l_ate->item();
  if (l_asc) s.loss_asc = l_asc->item();
  if (l_ceg) s.loss_ceg = l_ceg->item();
  return s;
}

template <typename T>
EpochSummary train_epoch(std::span<const PromptedExample> examples,
                         ModelParams<T>& params, TrainState<T>& state,
                         const TrainConfig& config) {
  std::vector<const PromptedExample*> usable;
  for (const auto& ex : examples) {
    if (trains_on(ex, config)) usable.push_back(&ex);
  }
  if (usable.empty()) throw std::invalid_argument("train_epoch: no trainable examples");
  if (state.epochs_done >= config.epochs) {
    throw std::invalid_argument("train_epoch: all " + std::to_string(config.epochs) +
                                " epochs already done");
  }
  const std::size_t per_epoch = batches_per_epoch(usable.size(), config.batch_size);
  const std::size_t total_steps = config.epochs * per_epoch;
  const auto order = epoch_order(usable.size(), config.seed, state.epochs_done);

  EpochSummary summary;
  summary.epoch = state.epochs_done + 1;
  double sum_ate = 0, sum_asc = 0, sum_ceg = 0;
  std::size_t n_ate = 0, n_asc = 0, n_ceg = 0;
  std::vector<const PromptedExample*> batch;
  for (std::size_t b = 0; b < per_epoch; ++b) {
    batch.clear();
    const std::size_t end = std::min(usable.size(), (b + 1) * config.batch_size);
    for (std::size_t i = b * config.batch_size; i < end; ++i) batch.push_back(usable[order[i]]);
    const double lr = cosine_lr(state.adam.step_count, total_steps, config.lr_max,
                                config.lr_min);
    auto step = train_step<T>(batch, params, state, config, lr);
    summary.lr = lr;
    summary.loss_total += step.loss_total;
    ++summary.steps;
    if (step.loss_ate) sum_ate += *step.loss_ate, ++n_ate;
    if (step.loss_asc) sum_asc += *step.loss_asc, ++n_asc;
    if (step.loss_ceg) sum_ceg += *step.loss_ceg, ++n_ceg;
  }
  summary.loss_total /= double(summary.steps);
  if (n_ate) summary.loss_ate = sum_ate / double(n_ate);
  if (n_asc) summary.loss_asc = sum_asc / double(n_asc);
  if (n_ceg) summary.loss_ceg = sum_ceg / double(n_ceg);
  ++state.epochs_done;
  return summary;
}

#define PROMPTSENT_INSTANTIATE_TRAINING(T)                                          \
  template Tensor<T> joint_loss(const std::optional<Tensor<T>>&,                    \
                                const std::optional<Tensor<T>>&,                    \
                                const std::optional<Tensor<T>>&, const TrainConfig&); \
  template EpochSummary train_step(std::span<const PromptedExample* const>,         \
                                   ModelParams<T>&, TrainState<T>&,                 \
                                   const TrainConfig&, double);                     \
  template EpochSummary train_epoch(std::span<const PromptedExample>,               \
                                    ModelParams<T>&, TrainState<T>&,                \
                                    const TrainConfig&);

PROMPTSENT_INSTANTIATE_TRAINING(float)
PROMPTSENT_INSTANTIATE_TRAINING(double)

#undef PROMPTSENT_INSTANTIATE_TRAINING

}  // namespace promptsent
