#include "promptsent/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace promptsent::ops {

namespace {

// Gradient buffer of an input, or nullptr when the input is not tracked.
template <typename T>
T* grad_of(Node<T>& self, std::size_t input) {
  Node<T>& in = *self.inputs[input];
  if (!in.requires_grad) return nullptr;
  in.ensure_grad();
  return in.grad.data();
}

template <typename T>
void require_same_shape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

template <typename T>
void require_rank(const char* op, const Tensor<T>& a, std::size_t rank) {
  if (a.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " +
                     std::to_string(rank) + ", got " + shape_str(a.shape()));
  }
}

// y = f(x) elementwise, dx = g * f'(x, y).
template <typename T, typename Fwd, typename Deriv>
Tensor<T> unary(const Tensor<T>& a, Fwd fwd, Deriv deriv) {
  std::vector<T> out(a.size());
  auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(x[i]);
  return Tensor<T>::make_result(a.shape(), std::move(out), {a},
                                [deriv](Node<T>& self) {
                                  T* ga = grad_of(self, 0);
                                  if (!ga) return;
                                  const auto& x = self.inputs[0]->data;
                                  for (std::size_t i = 0; i < self.data.size(); ++i) {
                                    ga[i] += self.grad[i] * deriv(x[i], self.data[i]);
                                  }
                                });
}

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank("matmul", b, 2);
  if (a.rank() != 1 && a.rank() != 2) {
    throw ShapeError("matmul: lhs must be rank 1 or 2, got " +
                     shape_str(a.shape()));
  }
  const bool vector_lhs = a.rank() == 1;
  const std::size_t m = vector_lhs ? 1 : a.dim(0);
  const std::size_t k = vector_lhs ? a.dim(0) : a.dim(1);
  const std::size_t n = b.dim(1);
  if (b.dim(0) != k) {
    throw ShapeError("matmul: inner dimensions differ, " +
                     shape_str(a.shape()) + " x " + shape_str(b.shape()));
  }
  std::vector<T> out(m * n, T(0));
  auto A = a.data();
  auto B = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    T* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = A[i * k + p];
      if (av == T(0)) continue;
      const T* brow = B.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
  }
  Shape shape = vector_lhs ? Shape{n} : Shape{m, n};
  return Tensor<T>::make_result(
      std::move(shape), std::move(out), {a, b}, [m, k, n](Node<T>& self) {
        const auto& A = self.inputs[0]->data;
        const auto& B = self.inputs[1]->data;
        const T* G = self.grad.data();
        if (T* ga = grad_of(self, 0)) {
          // dA = G * B^T
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
              const T* brow = B.data() + p * n;
              const T* grow = G + i * n;
              T acc = T(0);
              for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
              ga[i * k + p] += acc;
            }
          }
        }
        if (T* gb = grad_of(self, 1)) {
          // dB = A^T * G
          for (std::size_t i = 0; i < m; ++i) {
            const T* grow = G + i * n;
            for (std::size_t p = 0; p < k; ++p) {
              const T av = A[i * k + p];
              if (av == T(0)) continue;
              T* gbrow = gb + p * n;
              for (std::size_t j = 0; j < n; ++j) gbrow[j] += av * grow[j];
            }
          }
        }
      });
}

template <typename T>
Tensor<T> add_bias(const Tensor<T>& x, const Tensor<T>& bias) {
  require_rank("add_bias", bias, 1);
  const std::size_t n = bias.dim(0);
  if (x.rank() == 0 || x.rank() > 2 || x.shape().back() != n) {
    throw ShapeError("add_bias: cannot broadcast " + shape_str(bias.shape()) +
                     " onto " + shape_str(x.shape()));
  }
  const std::size_t rows = x.size() / n;
  std::vector<T> out(x.data().begin(), x.data().end());
  auto bv = bias.data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] += bv[j];
  }
  return Tensor<T>::make_result(x.shape(), std::move(out), {x, bias},
                                [rows, n](Node<T>& self) {
                                  if (T* gx = grad_of(self, 0)) {
                                    for (std::size_t i = 0; i < self.grad.size(); ++i) {
                                      gx[i] += self.grad[i];
                                    }
                                  }
                                  if (T* gb = grad_of(self, 1)) {
                                    for (std::size_t r = 0; r < rows; ++r) {
                                      for (std::size_t j = 0; j < n; ++j) {
                                        gb[j] += self.grad[r * n + j];
                                      }
                                    }
                                  }
                                });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("add", a, b);
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return Tensor<T>::make_result(a.shape(), std::move(out), {a, b},
                                [](Node<T>& self) {
                                  for (std::size_t in = 0; in < 2; ++in) {
                                    if (T* g = grad_of(self, in)) {
                                      for (std::size_t i = 0; i < self.grad.size(); ++i) {
                                        g[i] += self.grad[i];
                                      }
                                    }
                                  }
                                });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("mul", a, b);
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return Tensor<T>::make_result(a.shape(), std::move(out), {a, b},
                                [](Node<T>& self) {
                                  const auto& x = self.inputs[0]->data;
                                  const auto& y = self.inputs[1]->data;
                                  if (T* ga = grad_of(self, 0)) {
                                    for (std::size_t i = 0; i < x.size(); ++i) {
                                      ga[i] += self.grad[i] * y[i];
                                    }
                                  }
                                  if (T* gb = grad_of(self, 1)) {
                                    for (std::size_t i = 0; i < x.size(); ++i) {
                                      gb[i] += self.grad[i] * x[i];
                                    }
                                  }
                                });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  return unary(
      a, [factor](T x) { return x * factor; },
      [factor](T, T) { return factor; });
}

template <typename T>
Tensor<T> one_minus(const Tensor<T>& a) {
  return unary(
      a, [](T x) { return T(1) - x; }, [](T, T) { return T(-1); });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
  return unary(
      a,
      [](T x) {
        if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
        const T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> tanh(const Tensor<T>& a) {
  return unary(
      a, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T total = T(0);
  for (T v : a.data()) total += v;
  return Tensor<T>::make_result({}, {total}, {a}, [](Node<T>& self) {
    if (T* ga = grad_of(self, 0)) {
      const T g = self.grad[0];
      for (std::size_t i = 0; i < self.inputs[0]->data.size(); ++i) ga[i] += g;
    }
  });
}

template <typename T>
Tensor<T> embedding(const Tensor<T>& table, std::span<const int> ids) {
  require_rank("embedding", table, 2);
  const std::size_t vocab = table.dim(0);
  const std::size_t d = table.dim(1);
  std::vector<int> rows(ids.begin(), ids.end());
  std::vector<T> out(rows.size() * d);
  auto src = table.data();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || static_cast<std::size_t>(rows[i]) >= vocab) {
      throw std::out_of_range("embedding: id " + std::to_string(rows[i]) +
                              " outside table of " + std::to_string(vocab) +
                              " rows");
    }
    std::copy_n(src.begin() + rows[i] * d, d, out.begin() + i * d);
  }
  const std::size_t n = rows.size();
  return Tensor<T>::make_result(
      {n, d}, std::move(out), {table},
      [rows = std::move(rows), d](Node<T>& self) {
        T* gt = grad_of(self, 0);
        if (!gt) return;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          T* dst = gt + static_cast<std::size_t>(rows[i]) * d;
          const T* g = self.grad.data() + i * d;
          for (std::size_t c = 0; c < d; ++c) dst[c] += g[c];
        }
      });
}

template <typename T>
Tensor<T> slice_rows(const Tensor<T>& x, std::size_t begin, std::size_t end) {
  require_rank("slice_rows", x, 2);
  if (begin > end || end > x.dim(0)) {
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") outside " + shape_str(x.shape()));
  }
  const std::size_t cols = x.dim(1);
  std::vector<T> out(x.data().begin() + begin * cols,
                     x.data().begin() + end * cols);
  return Tensor<T>::make_result({end - begin, cols}, std::move(out), {x},
                                [begin, cols](Node<T>& self) {
                                  if (T* gx = grad_of(self, 0)) {
                                    T* dst = gx + begin * cols;
                                    for (std::size_t i = 0; i < self.grad.size(); ++i) {
                                      dst[i] += self.grad[i];
                                    }
                                  }
                                });
}

template <typename T>
Tensor<T> row(const Tensor<T>& x, std::size_t i) {
  require_rank("row", x, 2);
  if (i >= x.dim(0)) {
    throw ShapeError("row: index " + std::to_string(i) + " outside " +
                     shape_str(x.shape()));
  }
  const std::size_t cols = x.dim(1);
  std::vector<T> out(x.data().begin() + i * cols, x.data().begin() + (i + 1) * cols);
  return Tensor<T>::make_result({cols}, std::move(out), {x},
                                [i, cols](Node<T>& self) {
                                  if (T* gx = grad_of(self, 0)) {
                                    T* dst = gx + i * cols;
                                    for (std::size_t j = 0; j < cols; ++j) {
                                      dst[j] += self.grad[j];
                                    }
                                  }
                                });
}

template <typename T>
Tensor<T> stack_rows(const std::vector<Tensor<T>>& rows) {
  if (rows.empty()) throw std::invalid_argument("stack_rows: no rows");
  const std::size_t n = rows.front().size();
  std::vector<T> out;
  out.reserve(rows.size() * n);
  for (const auto& r : rows) {
    require_rank("stack_rows", r, 1);
    if (r.size() != n) {
      throw ShapeError("stack_rows: row " + shape_str(r.shape()) + " differs from [" +
                       std::to_string(n) + "]");
    }
    out.insert(out.end(), r.data().begin(), r.data().end());
  }
  return Tensor<T>::make_result({rows.size(), n}, std::move(out), rows,
                                [n](Node<T>& self) {
                                  for (std::size_t i = 0; i < self.inputs.size(); ++i) {
                                    if (T* g = grad_of(self, i)) {
                                      const T* src = self.grad.data() + i * n;
                                      for (std::size_t j = 0; j < n; ++j) g[j] += src[j];
                                    }
                                  }
                                });
}

template <typename T>
Tensor<T> pad_rows(const Tensor<T>& x, std::size_t before, std::size_t after) {
  require_rank("pad_rows", x, 2);
  const std::size_t n = x.dim(0);
  const std::size_t cols = x.dim(1);
  std::vector<T> out((before + n + after) * cols, T(0));
  std::copy(x.data().begin(), x.data().end(), out.begin() + before * cols);
  return Tensor<T>::make_result({before + n + after, cols}, std::move(out), {x},
                                [before, n, cols](Node<T>& self) {
                                  if (T* gx = grad_of(self, 0)) {
                                    const T* src = self.grad.data() + before * cols;
                                    for (std::size_t i = 0; i < n * cols; ++i) {
                                      gx[i] += src[i];
                                    }
                                  }
                                });
}

template <typename T>
Tensor<T> conv1d_relu(const Tensor<T>& x, const Tensor<T>& kernel,
                      const Tensor<T>& bias) {
  require_rank("conv1d_relu", x, 2);
  require_rank("conv1d_relu", kernel, 3);
  require_rank("conv1d_relu", bias, 1);
  const std::size_t n = x.dim(0);
  const std::size_t d = x.dim(1);
  const std::size_t k = kernel.dim(0);
  const std::size_t f = kernel.dim(2);
  if (kernel.dim(1) != d || bias.dim(0) != f || f == 0 || k == 0) {
    throw ShapeError("conv1d_relu: incompatible shapes x" + shape_str(x.shape()) +
                     " kernel" + shape_str(kernel.shape()) + " bias" +
                     shape_str(bias.shape()));
  }
  if (n < k) {
    throw std::invalid_argument("conv1d_relu: input of " + std::to_string(n) +
                                " rows is shorter than kernel width " +
                                std::to_string(k));
  }
  const std::size_t positions = n - k + 1;
  const std::size_t window = k * d;
  // A window starting at row i is the contiguous slice x[i*d, i*d + k*d),
  // and the kernel is a (k*d) x f matrix in the same order.
  std::vector<T> out(positions * f);
  auto X = x.data();
  auto K = kernel.data();
  auto B = bias.data();
  for (std::size_t i = 0; i < positions; ++i) {
    T* row = out.data() + i * f;
    std::copy(B.begin(), B.end(), row);
    const T* win = X.data() + i * d;
    for (std::size_t q = 0; q < window; ++q) {
      const T xv = win[q];
      if (xv == T(0)) continue;
      const T* krow = K.data() + q * f;
      for (std::size_t j = 0; j < f; ++j) row[j] += xv * krow[j];
    }
    for (std::size_t j = 0; j < f; ++j) row[j] = std::max(row[j], T(0));
  }
  return Tensor<T>::make_result(
      {positions, f}, std::move(out), {x, kernel, bias},
      [positions, window, d, f](Node<T>& self) {
        const auto& X = self.inputs[0]->data;
        const auto& K = self.inputs[1]->data;
        // Gradient through ReLU: zero where the output was clamped.
        std::vector<T> g(self.grad.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
          g[i] = self.data[i] > T(0) ? self.grad[i] : T(0);
        }
        T* gx = grad_of(self, 0);
        T* gk = grad_of(self, 1);
        T* gb = grad_of(self, 2);
        for (std::size_t i = 0; i < positions; ++i) {
          const T* grow = g.data() + i * f;
          if (gb) {
            for (std::size_t j = 0; j < f; ++j) gb[j] += grow[j];
          }
          const T* win = X.data() + i * d;
          for (std::size_t q = 0; q < window; ++q) {
            const T* krow = K.data() + q * f;
            if (gk) {
              const T xv = win[q];
              T* gkrow = gk + q * f;
              for (std::size_t j = 0; j < f; ++j) gkrow[j] += xv * grow[j];
            }
            if (gx) {
              T acc = T(0);
              for (std::size_t j = 0; j < f; ++j) acc += krow[j] * grow[j];
              gx[i * d + q] += acc;
            }
          }
        }
      });
}

template <typename T>
Tensor<T> max_over_time(const Tensor<T>& c) {
  require_rank("max_over_time", c, 2);
  const std::size_t p = c.dim(0);
  const std::size_t f = c.dim(1);
  if (p == 0) throw std::invalid_argument("max_over_time: empty position axis");
  auto C = c.data();
  std::vector<T> out(C.begin(), C.begin() + f);
  std::vector<std::size_t> arg(f, 0);
  for (std::size_t i = 1; i < p; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      // Strict comparison keeps the first occurrence on ties.
      if (C[i * f + j] > out[j]) {
        out[j] = C[i * f + j];
        arg[j] = i;
      }
    }
  }
  return Tensor<T>::make_result({f}, std::move(out), {c},
                                [arg = std::move(arg), f](Node<T>& self) {
                                  if (T* gc = grad_of(self, 0)) {
                                    for (std::size_t j = 0; j < f; ++j) {
                                      gc[arg[j] * f + j] += self.grad[j];
                                    }
                                  }
                                });
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: empty part list");
  std::vector<std::size_t> offsets;
  std::vector<T> out;
  for (const auto& part : parts) {
    require_rank("concat", part, 1);
    offsets.push_back(out.size());
    out.insert(out.end(), part.data().begin(), part.data().end());
  }
  const std::size_t total = out.size();
  return Tensor<T>::make_result({total}, std::move(out), parts,
                                [offsets = std::move(offsets)](Node<T>& self) {
                                  for (std::size_t in = 0; in < offsets.size(); ++in) {
                                    T* g = grad_of(self, in);
                                    if (!g) continue;
                                    const std::size_t len = self.inputs[in]->data.size();
                                    for (std::size_t i = 0; i < len; ++i) {
                                      g[i] += self.grad[offsets[in] + i];
                                    }
                                  }
                                });
}

template <typename T>
std::vector<T> softmax(std::span<const T> logits) {
  std::vector<T> out(logits.size());
  if (logits.empty()) return out;
  const T peak = *std::max_element(logits.begin(), logits.end());
  T total = T(0);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (T& v : out) v /= total;
  return out;
}

template <typename T>
std::vector<T> softmax_rows(const Tensor<T>& logits) {
  const std::size_t cols = logits.shape().empty() ? 1 : logits.shape().back();
  std::vector<T> out;
  out.reserve(logits.size());
  auto data = logits.data();
  for (std::size_t r = 0; r * cols < data.size(); ++r) {
    auto row = softmax<T>(data.subspan(r * cols, cols));
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

template <typename T>
std::size_t argmax(std::span<const T> values) {
  return static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
}

template <typename T>
Tensor<T> softmax_cross_entropy(const Tensor<T>& logits, int true_class) {
  require_rank("softmax_cross_entropy", logits, 1);
  const std::size_t classes = logits.dim(0);
  if (true_class < 0 || static_cast<std::size_t>(true_class) >= classes) {
    throw std::out_of_range("softmax_cross_entropy: class " +
                            std::to_string(true_class) + " outside [0, " +
                            std::to_string(classes) + ")");
  }
  auto z = logits.data();
  const T peak = *std::max_element(z.begin(), z.end());
  T total = T(0);
  for (T v : z) total += std::exp(v - peak);
  const T log_norm = peak + std::log(total);
  const T loss = log_norm - z[static_cast<std::size_t>(true_class)];
  return Tensor<T>::make_result({}, {loss}, {logits},
                                [true_class, log_norm](Node<T>& self) {
                                  T* g = grad_of(self, 0);
                                  if (!g) return;
                                  const auto& z = self.inputs[0]->data;
                                  const T up = self.grad[0];
                                  for (std::size_t i = 0; i < z.size(); ++i) {
                                    T p = std::exp(z[i] - log_norm);
                                    if (static_cast<int>(i) == true_class) p -= T(1);
                                    g[i] += up * p;
                                  }
                                });
}

template <typename T>
Tensor<T> softmax_cross_entropy_rows(const Tensor<T>& logits,
                                     std::span<const int> targets,
                                     int ignore_index) {
  require_rank("softmax_cross_entropy_rows", logits, 2);
  const std::size_t rows = logits.dim(0);
  const std::size_t classes = logits.dim(1);
  if (targets.size() != rows) {
    throw ShapeError("softmax_cross_entropy_rows: " +
                     std::to_string(targets.size()) + " targets for logits " +
                     shape_str(logits.shape()));
  }
  std::vector<int> target(targets.begin(), targets.end());
  std::vector<T> log_norm(rows, T(0));
  std::size_t counted = 0;
  T total = T(0);
  auto z = logits.data();
  for (std::size_t r = 0; r < rows; ++r) {
    if (target[r] == ignore_index) continue;
    if (target[r] < 0 || static_cast<std::size_t>(target[r]) >= classes) {
      throw std::out_of_range("softmax_cross_entropy_rows: class " +
                              std::to_string(target[r]) + " outside [0, " +
                              std::to_string(classes) + ")");
    }
    auto row = z.subspan(r * classes, classes);
    const T peak = *std::max_element(row.begin(), row.end());
    T s = T(0);
    for (T v : row) s += std::exp(v - peak);
    log_norm[r] = peak + std::log(s);
    total += log_norm[r] - row[static_cast<std::size_t>(target[r])];
    ++counted;
  }
  if (counted == 0) return Tensor<T>::scalar(T(0));
  const T inv = T(1) / static_cast<T>(counted);
  return Tensor<T>::make_result(
      {}, {total * inv}, {logits},
      [target = std::move(target), log_norm = std::move(log_norm), classes,
       ignore_index, inv](Node<T>& self) {
        T* g = grad_of(self, 0);
        if (!g) return;
        const auto& z = self.inputs[0]->data;
        const T up = self.grad[0] * inv;
        for (std::size_t r = 0; r < target.size(); ++r) {
          if (target[r] == ignore_index) continue;
          for (std::size_t c = 0; c < classes; ++c) {
            T p = std::exp(z[r * classes + c] - log_norm[r]);
            if (static_cast<int>(c) == target[r]) p -= T(1);
            g[r * classes + c] += up * p;
          }
        }
      });
}

#define PROMPTSENT_INSTANTIATE_OPS(T)                                          \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);              \
  template Tensor<T> add_bias(const Tensor<T>&, const Tensor<T>&);            \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> scale(const Tensor<T>&, T);                              \
  template Tensor<T> one_minus(const Tensor<T>&);                             \
  template Tensor<T> sigmoid(const Tensor<T>&);                               \
  template Tensor<T> tanh(const Tensor<T>&);                                  \
  template Tensor<T> sum(const Tensor<T>&);                                   \
  template Tensor<T> embedding(const Tensor<T>&, std::span<const int>);       \
  template Tensor<T> slice_rows(const Tensor<T>&, std::size_t, std::size_t);  \
  template Tensor<T> row(const Tensor<T>&, std::size_t);                      \
  template Tensor<T> stack_rows(const std::vector<Tensor<T>>&);               \
  template Tensor<T> pad_rows(const Tensor<T>&, std::size_t, std::size_t);    \
  template Tensor<T> conv1d_relu(const Tensor<T>&, const Tensor<T>&,          \
                                 const Tensor<T>&);                           \
  template Tensor<T> max_over_time(const Tensor<T>&);                         \
  template Tensor<T> concat(const std::vector<Tensor<T>>&);                   \
  template Tensor<T> softmax_cross_entropy(const Tensor<T>&, int);            \
  template Tensor<T> softmax_cross_entropy_rows(                              \
      const Tensor<T>&, std::span<const int>, int);                           \
  template std::vector<T> softmax(std::span<const T>);                        \
  template std::vector<T> softmax_rows(const Tensor<T>&);                     \
  template std::size_t argmax(std::span<const T>);

PROMPTSENT_INSTANTIATE_OPS(float)
PROMPTSENT_INSTANTIATE_OPS(double)

#undef PROMPTSENT_INSTANTIATE_OPS

}  // namespace promptsent::ops
