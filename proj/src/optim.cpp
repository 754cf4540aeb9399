#include "promptsent/optim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace promptsent {

template <typename T>
void adam_step(std::span<Tensor<T>> params, AdamState<T>& state, double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("adam_step: lr must be > 0");
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), T(0));
      state.v.emplace_back(p.size(), T(0));
    }
  }
  if (state.m.size() != params.size()) {
    throw ShapeError("adam_step: state tracks " + std::to_string(state.m.size()) +
                     " parameters, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.m[i].size() != params[i].size() ||
        state.v[i].size() != params[i].size()) {
      throw ShapeError("adam_step: moment buffers for parameter " +
                       std::to_string(i) + " do not match shape " +
                       shape_str(params[i].shape()));
    }
  }

  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const T b1 = static_cast<T>(state.beta1);
  const T b2 = static_cast<T>(state.beta2);
  const T eps = static_cast<T>(state.epsilon);
  const T correction1 = static_cast<T>(1.0 - std::pow(state.beta1, t));
  const T correction2 = static_cast<T>(1.0 - std::pow(state.beta2, t));
  const T rate = static_cast<T>(lr);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& p = params[i];
    if (!p.has_grad()) continue;
    auto w = p.mutable_data();
    auto g = p.grad();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = b1 * m[j] + (T(1) - b1) * g[j];
      v[j] = b2 * v[j] + (T(1) - b2) * g[j] * g[j];
      const T m_hat = m[j] / correction1;
      const T v_hat = v[j] / correction2;
      w[j] -= rate * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

double cosine_lr(std::size_t step, std::size_t total_steps, double lr_max,
                 double lr_min) {
  if (total_steps == 0) {
    throw std::invalid_argument("cosine_lr: total_steps must be >= 1");
  }
  if (step >= total_steps) return lr_min;
  const double progress =
      static_cast<double>(step) / static_cast<double>(total_steps);
  return lr_min +
         0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * progress));
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(std::span<Tensor<float>>, AdamState<float>&,
                               double);
template void adam_step<double>(std::span<Tensor<double>>, AdamState<double>&,
                                double);

}  // namespace promptsent
