#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "promptsent/tensor.hpp"

namespace promptsent {

/// Architecture sizes. Each kernel width gets a bank of `embed_dim` filters,
/// so the pooled representation has embed_dim * kernel_widths.size() entries.
struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 128;
  std::vector<std::size_t> kernel_widths{3, 4, 5};
  std::size_t num_classes = 3;
  std::size_t hidden_dim = 128;
  std::size_t max_len = 64;
  std::size_t max_explanation_len = 32;  // decoder T_max, EOS included
  bool ate_use_conv_features = false;

  std::size_t feature_dim() const { return embed_dim * kernel_widths.size(); }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
  bool operator==(const ModelConfig&) const = default;
};

template <typename T>
struct GruParams {
  Tensor<T> w_z, w_r, w_h;  // [input x hidden]
  Tensor<T> u_z, u_r, u_h;  // [hidden x hidden]
  Tensor<T> b_z, b_r, b_h;  // [hidden]
};

template <typename T>
struct ModelParams {
  ModelConfig config;
  Tensor<T> embedding;                // [V x d], shared by the decoder
  std::vector<Tensor<T>> conv_kernel;  // per width: [k x d x d]
  std::vector<Tensor<T>> conv_bias;    // per width: [d]
  Tensor<T> ate_weight, ate_bias;      // [d x 3], [3]
  Tensor<T> asc_weight, asc_bias;      // [3d x C], [C]
  Tensor<T> ceg_init;                  // [3d x H]
  GruParams<T> gru;
  Tensor<T> out_weight, out_bias;      // [H x V], [V]

  /// Seeded initialization: embeddings U(-0.1, 0.1), conv kernels He-normal,
  /// dense weights Xavier-uniform, biases zero.
  static ModelParams init(const ModelConfig& config, std::uint64_t seed);

  /// Handles in a fixed order with checkpoint names such as
  /// "encoder.conv3.kernel" or "ceg.gru.u_r". Handles alias the parameters.
  std::vector<std::pair<std::string, Tensor<T>>> named() const;
  std::vector<Tensor<T>> all() const;
  /// Parameters used only by the explanation decoder.
  std::vector<Tensor<T>> decoder() const;
};

template <typename T>
struct EncodedSequence {
  Tensor<T> x;  // [max_len x d] token embeddings
  Tensor<T> h;  // [3d] pooled representation
  std::size_t true_length = 0;
};

template <typename T>
Tensor<T> embed(const ModelParams<T>& params, std::span<const int> ids);

/// Pools over every convolution window that holds at least one of the first
/// true_length tokens. Windows made only of padding are left out, so h does
/// not depend on ids past true_length.
template <typename T>
EncodedSequence<T> encode(const ModelParams<T>& params, std::span<const int> ids,
                          std::size_t true_length);

/// Tag logits [n x 3] over the token embeddings (or the first conv bank's
/// same-length features when ate_use_conv_features is set).
template <typename T>
Tensor<T> ate_logits(const ModelParams<T>& params, const EncodedSequence<T>& enc);

/// Row-major [n x 3] tag distributions.
template <typename T>
std::vector<T> ate_forward(const ModelParams<T>& params, const EncodedSequence<T>& enc);

/// Mean token cross entropy over rows < true_length whose tag is not -1.
template <typename T>
Tensor<T> ate_loss(const ModelParams<T>& params, const EncodedSequence<T>& enc,
                   std::span<const int> tags);

template <typename T>
Tensor<T> asc_logits(const ModelParams<T>& params, const Tensor<T>& h);
template <typename T>
std::vector<T> asc_forward(const ModelParams<T>& params, const Tensor<T>& h);
template <typename T>
Tensor<T> asc_loss(const ModelParams<T>& params, const Tensor<T>& h, int polarity);

/// z = sig(x Wz + h Uz + bz), r = sig(x Wr + h Ur + br),
/// c = tanh(x Wh + (r * h) Uh + bh), next = (1 - z) * c + z * h.
template <typename T>
Tensor<T> gru_step(const GruParams<T>& gru, const Tensor<T>& prev_hidden,
                   const Tensor<T>& input);

/// tanh(h * ceg_init)
template <typename T>
Tensor<T> ceg_init_hidden(const ModelParams<T>& params, const Tensor<T>& h);

/// Teacher-forced negative log-likelihood of `gold` (ending with EOS), fed
/// BOS then the gold prefix, divided by the sequence length.
/// Throws std::invalid_argument for an empty sequence.
template <typename T>
Tensor<T> ceg_teacher_forced_nll(const ModelParams<T>& params, const Tensor<T>& h,
                                 std::span<const int> gold);

/// Greedy decoding from BOS; stops at EOS or after t_max tokens. The result
/// excludes BOS and EOS.
template <typename T>
std::vector<int> ceg_greedy_decode(const ModelParams<T>& params, const Tensor<T>& h,
                                   std::size_t t_max);

}  // namespace promptsent
