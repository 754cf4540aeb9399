#pragma once

#include <span>
#include <vector>

#include "promptsent/tensor.hpp"

namespace promptsent::ops {

// Linear algebra -----------------------------------------------------------

/// a[m x k] * b[k x n] -> [m x n]. A rank-1 `a` of length k is treated as a
/// row vector and the result is rank-1 of length n.
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

/// x[m x n] + bias[n] broadcast over rows; also accepts x[n].
template <typename T>
Tensor<T> add_bias(const Tensor<T>& x, const Tensor<T>& bias);

// Elementwise --------------------------------------------------------------

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor);
/// 1 - a
template <typename T>
Tensor<T> one_minus(const Tensor<T>& a);
template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a);
template <typename T>
Tensor<T> tanh(const Tensor<T>& a);

/// Sum of all elements -> scalar.
template <typename T>
Tensor<T> sum(const Tensor<T>& a);

// Indexing -----------------------------------------------------------------

/// Row lookup: table[V x d], ids -> [ids.size() x d]. Out-of-range ids throw
/// std::out_of_range.
template <typename T>
Tensor<T> embedding(const Tensor<T>& table, std::span<const int> ids);

/// Rows [begin, end) of a rank-2 tensor.
template <typename T>
Tensor<T> slice_rows(const Tensor<T>& x, std::size_t begin, std::size_t end);

/// Row i of a rank-2 tensor as a rank-1 tensor.
template <typename T>
Tensor<T> row(const Tensor<T>& x, std::size_t i);

/// Stacks equal-length rank-1 tensors into [rows.size() x n].
template <typename T>
Tensor<T> stack_rows(const std::vector<Tensor<T>>& rows);

/// Adds `before` zero rows on top and `after` zero rows below.
template <typename T>
Tensor<T> pad_rows(const Tensor<T>& x, std::size_t before, std::size_t after);

// Convolutional encoder pieces ---------------------------------------------

/// Valid 1-D convolution followed by ReLU.
///   x[n x d], kernel[k x d x f], bias[f] -> [(n-k+1) x f]
/// out[i][j] = relu(bias[j] + sum_{w<k, c<d} x[i+w][c] * kernel[w][c][j]).
/// Throws std::invalid_argument when n < k.
template <typename T>
Tensor<T> conv1d_relu(const Tensor<T>& x, const Tensor<T>& kernel,
                      const Tensor<T>& bias);

/// Per-column maximum over rows: c[p x f] -> [f]. Backward routes the
/// gradient to the first row holding the maximum.
template <typename T>
Tensor<T> max_over_time(const Tensor<T>& c);

/// Order-preserving concatenation of rank-1 tensors.
template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts);

// Losses -------------------------------------------------------------------

/// -log softmax(logits)[true_class] for rank-1 logits.
template <typename T>
Tensor<T> softmax_cross_entropy(const Tensor<T>& logits, int true_class);

/// Row-wise cross entropy over logits[n x C], averaged over rows whose target
/// is not `ignore_index`. Returns a constant zero when every row is ignored.
template <typename T>
Tensor<T> softmax_cross_entropy_rows(const Tensor<T>& logits,
                                     std::span<const int> targets,
                                     int ignore_index = -1);

// Forward-only helpers -----------------------------------------------------

template <typename T>
std::vector<T> softmax(std::span<const T> logits);

/// Row-wise softmax of a rank-2 tensor (or of a rank-1 tensor as one row).
template <typename T>
std::vector<T> softmax_rows(const Tensor<T>& logits);

template <typename T>
std::size_t argmax(std::span<const T> values);

}  // namespace promptsent::ops
