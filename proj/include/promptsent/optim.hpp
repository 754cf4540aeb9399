#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "promptsent/tensor.hpp"

namespace promptsent {

/// Adam moment estimates, one pair of buffers per parameter in the order the
/// parameters are passed to adam_step.
template <typename T>
struct AdamState {
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;
  std::uint64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One bias-corrected Adam update using each parameter's accumulated grad.
/// Moment buffers are allocated on the first call. Throws ShapeError if the
/// parameter list does not match the state from earlier steps.
template <typename T>
void adam_step(std::span<Tensor<T>> params, AdamState<T>& state, double lr);

/// lr_min + (lr_max - lr_min) * (1 + cos(pi * step / total_steps)) / 2.
/// Steps past total_steps clamp to lr_min.
double cosine_lr(std::size_t step, std::size_t total_steps, double lr_max,
                 double lr_min);

extern template struct AdamState<float>;
extern template struct AdamState<double>;

}  // namespace promptsent
