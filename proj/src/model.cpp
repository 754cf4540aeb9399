#include "promptsent/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "promptsent/examples.hpp"
#include "promptsent/ops.hpp"
#include "promptsent/vocab.hpp"

namespace promptsent {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("model config: " + what);
}

}  // namespace

void ModelConfig::validate() const {
  require(vocab_size > static_cast<std::size_t>(Vocabulary::kMask),
          "vocab_size must cover the reserved tokens");
  require(embed_dim >= 1, "embed_dim must be >= 1");
  require(!kernel_widths.empty(), "kernel_widths must not be empty");
  for (std::size_t k : kernel_widths) require(k >= 1, "kernel widths must be >= 1");
  require(num_classes == 2 || num_classes == 3, "num_classes must be 2 or 3");
  require(hidden_dim >= 1, "hidden_dim must be >= 1");
  require(max_len >= *std::max_element(kernel_widths.begin(), kernel_widths.end()),
          "max_len must be at least the widest kernel");
  require(max_explanation_len >= 1, "max_explanation_len must be >= 1");
}

nlohmann::json ModelConfig::to_json() const {
  return {{"vocab_size", vocab_size},
          {"embed_dim", embed_dim},
          {"kernel_widths", kernel_widths},
          {"num_classes", num_classes},
          {"hidden_dim", hidden_dim},
          {"max_len", max_len},
          {"max_explanation_len", max_explanation_len},
          {"ate_use_conv_features", ate_use_conv_features}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.kernel_widths = j.at("kernel_widths").get<std::vector<std::size_t>>();
  c.num_classes = j.at("num_classes").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.max_len = j.at("max_len").get<std::size_t>();
  c.max_explanation_len = j.at("max_explanation_len").get<std::size_t>();
  c.ate_use_conv_features = j.at("ate_use_conv_features").get<bool>();
  return c;
}

template <typename T>
ModelParams<T> ModelParams<T>::init(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  auto uniform = [&](Shape shape, double limit) {
    std::uniform_real_distribution<double> dist(-limit, limit);
    std::vector<T> v(numel(shape));
    for (auto& x : v) x = static_cast<T>(dist(rng));
    return Tensor<T>::from(std::move(shape), std::move(v), true);
  };
  auto xavier = [&](std::size_t fan_in, std::size_t fan_out) {
    return uniform({fan_in, fan_out}, std::sqrt(6.0 / double(fan_in + fan_out)));
  };
  auto zeros = [](std::size_t n) { return Tensor<T>::zeros({n}, true); };

  const std::size_t d = config.embed_dim;
  const std::size_t f = config.feature_dim();
  const std::size_t hid = config.hidden_dim;
  const std::size_t v = config.vocab_size;

  ModelParams p;
  p.config = config;
  p.embedding = uniform({v, d}, 0.1);
  for (std::size_t k : config.kernel_widths) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / double(k * d)));
    std::vector<T> w(k * d * d);
    for (auto& x : w) x = static_cast<T>(dist(rng));
    p.conv_kernel.push_back(Tensor<T>::from({k, d, d}, std::move(w), true));
    p.conv_bias.push_back(zeros(d));
  }
  p.ate_weight = xavier(d, kNumBioTags);
  p.ate_bias = zeros(kNumBioTags);
  p.asc_weight = xavier(f, config.num_classes);
  p.asc_bias = zeros(config.num_classes);
  p.ceg_init = xavier(f, hid);
  p.gru.w_z = xavier(d, hid);
  p.gru.w_r = xavier(d, hid);
  p.gru.w_h = xavier(d, hid);
  p.gru.u_z = xavier(hid, hid);
  p.gru.u_r = xavier(hid, hid);
  p.gru.u_h = xavier(hid, hid);
  p.gru.b_z = zeros(hid);
  p.gru.b_r = zeros(hid);
  p.gru.b_h = zeros(hid);
  p.out_weight = xavier(hid, v);
  p.out_bias = zeros(v);
  return p;
}

template <typename T>
std::vector<std::pair<std::string, Tensor<T>>> ModelParams<T>::named() const {
  std::vector<std::pair<std::string, Tensor<T>>> out;
  out.emplace_back("embedding", embedding);
  for (std::size_t i = 0; i < conv_kernel.size(); ++i) {
    const std::string base = "encoder.conv" + std::to_string(config.kernel_widths[i]);
    out.emplace_back(base + ".kernel", conv_kernel[i]);
    out.emplace_back(base + ".bias", conv_bias[i]);
  }
  out.emplace_back("ate.weight", ate_weight);
  out.emplace_back("ate.bias", ate_bias);
  out.emplace_back("asc.weight", asc_weight);
  out.emplace_back("asc.bias", asc_bias);
  out.emplace_back("ceg.init", ceg_init);
  out.emplace_back("ceg.gru.w_z", gru.w_z);
  out.emplace_back("ceg.gru.w_r", gru.w_r);
  out.emplace_back("ceg.gru.w_h", gru.w_h);
  out.emplace_back("ceg.gru.u_z", gru.u_z);
  out.emplace_back("ceg.gru.u_r", gru.u_r);
  out.emplace_back("ceg.gru.u_h", gru.u_h);
  out.emplace_back("ceg.gru.b_z", gru.b_z);
  out.emplace_back("ceg.gru.b_r", gru.b_r);
  out.emplace_back("ceg.gru.b_h", gru.b_h);
  out.emplace_back("ceg.out.weight", out_weight);
  out.emplace_back("ceg.out.bias", out_bias);
  return out;
}

template <typename T>
std::vector<Tensor<T>> ModelParams<T>::all() const {
  std::vector<Tensor<T>> out;
  for (auto& [name, t] : named()) out.push_back(t);
  return out;
}

template <typename T>
std::vector<Tensor<T>> ModelParams<T>::decoder() const {
  return {ceg_init, gru.w_z, gru.w_r, gru.w_h, gru.u_z,    gru.u_r,
          gru.u_h,  gru.b_z, gru.b_r, gru.b_h, out_weight, out_bias};
}

template <typename T>
Tensor<T> embed(const ModelParams<T>& params, std::span<const int> ids) {
  return ops::embedding(params.embedding, ids);
}

template <typename T>
EncodedSequence<T> encode(const ModelParams<T>& params, std::span<const int> ids,
                          std::size_t true_length) {
  if (true_length == 0 || true_length > ids.size()) {
    throw std::invalid_argument("encode: true_length " + std::to_string(true_length) +
                                " outside [1, " + std::to_string(ids.size()) + "]");
  }
  EncodedSequence<T> enc;
  enc.true_length = true_length;
  enc.x = embed(params, ids);
  // The convolution sees the true tokens followed by exactly k - 1 PAD rows,
  // so every window holding a real token exists and no window is padding only.
  const std::size_t widest =
      *std::max_element(params.config.kernel_widths.begin(), params.config.kernel_widths.end());
  std::vector<int> conv_ids(ids.begin(), ids.begin() + true_length);
  conv_ids.resize(true_length + widest - 1, Vocabulary::kPad);
  auto conv_x = embed<T>(params, conv_ids);
  std::vector<Tensor<T>> pooled;
  for (std::size_t i = 0; i < params.conv_kernel.size(); ++i) {
    const std::size_t k = params.config.kernel_widths[i];
    const std::size_t rows = true_length + k - 1;
    auto input = rows == conv_ids.size() ? conv_x : ops::slice_rows(conv_x, 0, rows);
    pooled.push_back(
        ops::max_over_time(ops::conv1d_relu(input, params.conv_kernel[i],
                                            params.conv_bias[i])));
  }
  enc.h = ops::concat(pooled);
  return enc;
}

template <typename T>
Tensor<T> ate_logits(const ModelParams<T>& params, const EncodedSequence<T>& enc) {
  Tensor<T> features = enc.x;
  if (params.config.ate_use_conv_features) {
    const std::size_t k = params.config.kernel_widths.front();
    const std::size_t before = (k - 1) / 2;
    features = ops::conv1d_relu(ops::pad_rows(enc.x, before, k - 1 - before),
                                params.conv_kernel.front(), params.conv_bias.front());
  }
  return ops::add_bias(ops::matmul(features, params.ate_weight), params.ate_bias);
}

template <typename T>
std::vector<T> ate_forward(const ModelParams<T>& params, const EncodedSequence<T>& enc) {
  return ops::softmax_rows(ate_logits(params, enc));
}

template <typename T>
Tensor<T> ate_loss(const ModelParams<T>& params, const EncodedSequence<T>& enc,
                   std::span<const int> tags) {
  auto logits = ate_logits(params, enc);
  const std::size_t n = logits.dim(0);
  if (tags.size() != n) {
    throw ShapeError("ate_loss: " + std::to_string(tags.size()) + " tags for " +
                     std::to_string(n) + " tokens");
  }
  std::vector<int> targets(tags.begin(), tags.end());
  std::fill(targets.begin() + enc.true_length, targets.end(), -1);
  return ops::softmax_cross_entropy_rows<T>(logits, targets, -1);
}

template <typename T>
Tensor<T> asc_logits(const ModelParams<T>& params, const Tensor<T>& h) {
  return ops::add_bias(ops::matmul(h, params.asc_weight), params.asc_bias);
}

template <typename T>
std::vector<T> asc_forward(const ModelParams<T>& params, const Tensor<T>& h) {
  return ops::softmax_rows(asc_logits(params, h));
}

template <typename T>
Tensor<T> asc_loss(const ModelParams<T>& params, const Tensor<T>& h, int polarity) {
  return ops::softmax_cross_entropy(asc_logits(params, h), polarity);
}

template <typename T>
Tensor<T> gru_step(const GruParams<T>& g, const Tensor<T>& prev, const Tensor<T>& x) {
  using namespace ops;
  auto z = sigmoid(add_bias(add(matmul(x, g.w_z), matmul(prev, g.u_z)), g.b_z));
  auto r = sigmoid(add_bias(add(matmul(x, g.w_r), matmul(prev, g.u_r)), g.b_r));
  auto c = tanh(add_bias(add(matmul(x, g.w_h), matmul(mul(r, prev), g.u_h)), g.b_h));
  return add(mul(one_minus(z), c), mul(z, prev));
}

template <typename T>
Tensor<T> ceg_init_hidden(const ModelParams<T>& params, const Tensor<T>& h) {
  return ops::tanh(ops::matmul(h, params.ceg_init));
}

template <typename T>
Tensor<T> ceg_teacher_forced_nll(const ModelParams<T>& params, const Tensor<T>& h,
                                 std::span<const int> gold) {
  if (gold.empty()) throw std::invalid_argument("ceg: empty gold sequence");
  std::vector<int> inputs{Vocabulary::kBos};
  inputs.insert(inputs.end(), gold.begin(), gold.end() - 1);
  auto emb = embed(params, inputs);
  auto hidden = ceg_init_hidden(params, h);
  std::vector<Tensor<T>> states;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    hidden = gru_step(params.gru, hidden, ops::row(emb, t));
    states.push_back(hidden);
  }
  auto logits = ops::add_bias(ops::matmul(ops::stack_rows(states), params.out_weight),
                              params.out_bias);
  // Mean over steps is the sum divided by the sequence length.
  return ops::softmax_cross_entropy_rows<T>(logits, gold, -1);
}

template <typename T>
std::vector<int> ceg_greedy_decode(const ModelParams<T>& params, const Tensor<T>& h,
                                   std::size_t t_max) {
  NoGradGuard no_grad;
  std::vector<int> out;
  auto hidden = ceg_init_hidden(params, h);
  int prev = Vocabulary::kBos;
  for (std::size_t t = 0; t < t_max; ++t) {
    const int ids[] = {prev};
    hidden = gru_step(params.gru, hidden, ops::row(embed(params, ids), 0));
    auto logits =
        ops::add_bias(ops::matmul(hidden, params.out_weight), params.out_bias);
    const int next = static_cast<int>(ops::argmax(logits.data()));
    if (next == Vocabulary::kEos) break;
    out.push_back(next);
    prev = next;
  }
  return out;
}

#define PROMPTSENT_INSTANTIATE_MODEL(T)                                              \
  template struct ModelParams<T>;                                                    \
  template Tensor<T> embed(const ModelParams<T>&, std::span<const int>);            \
  template EncodedSequence<T> encode(const ModelParams<T>&, std::span<const int>,   \
                                     std::size_t);                                   \
  template Tensor<T> ate_logits(const ModelParams<T>&, const EncodedSequence<T>&);  \
  template std::vector<T> ate_forward(const ModelParams<T>&,                         \
                                      const EncodedSequence<T>&);                    \
  template Tensor<T> ate_loss(const ModelParams<T>&, const EncodedSequence<T>&,     \
                              std::span<const int>);                                 \
  template Tensor<T> asc_logits(const ModelParams<T>&, const Tensor<T>&);           \
  template std::vector<T> asc_forward(const ModelParams<T>&, const Tensor<T>&);     \
  template Tensor<T> asc_loss(const ModelParams<T>&, const Tensor<T>&, int);        \
  template Tensor<T> gru_step(const GruParams<T>&, const Tensor<T>&,                \
                              const Tensor<T>&);                                     \
  template Tensor<T> ceg_init_hidden(const ModelParams<T>&, const Tensor<T>&);      \
  template Tensor<T> ceg_teacher_forced_nll(const ModelParams<T>&, const Tensor<T>&, \
                                            std::span<const int>);                   \
  template std::vector<int> ceg_greedy_decode(const ModelParams<T>&,                 \
                                              const Tensor<T>&, std::size_t);

PROMPTSENT_INSTANTIATE_MODEL(float)
PROMPTSENT_INSTANTIATE_MODEL(double)

#undef PROMPTSENT_INSTANTIATE_MODEL

}  // namespace promptsent
