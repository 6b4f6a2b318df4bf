#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "sparseload/nn/tensor.hpp"
#include "sparseload/rng.hpp"

namespace sparseload::nn {

/// One node of the dynamic computation graph. Holding the output node keeps
/// the whole graph alive; backward() walks it in reverse topological order.
struct Node {
  Tensor value;
  Tensor grad;  // allocated on demand, same shape as value
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void()> backward_fn;  // accumulates into parent grads

  void ensure_grad() {
    if (grad.size() != value.size()) {
      grad = Tensor(value.shape());
    }
  }
};

using Var = std::shared_ptr<Node>;

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<EMat>;
using ECMap = Eigen::Map<const EMat>;

inline ECMap as_eigen(const Tensor& t) { return ECMap(t.data(), t.rows(), t.cols()); }
inline EMap as_eigen(Tensor& t) { return EMap(t.data(), t.rows(), t.cols()); }

namespace graph_detail {

inline void check_finite(const Tensor& t, const char* op) {
  if (!t.all_finite()) {
    throw NumericalError(std::string("non-finite values produced by ") + op);
  }
}

inline Var make_node(Tensor value, std::vector<Var> parents, const char* op) {
  check_finite(value, op);
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->parents = std::move(parents);
  for (const auto& p : node->parents) {
    if (p->requires_grad) {
      node->requires_grad = true;
      break;
    }
  }
  return node;
}

}  // namespace graph_detail

inline Var constant(Tensor value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return node;
}

inline Var parameter(Tensor value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return node;
}

/// Reverse-mode sweep from a scalar node.
inline void backward(const Var& loss) {
  if (loss->value.size() != 1) {
    throw ShapeError("backward: loss must be scalar, got " + loss->value.shape_string());
  }
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{loss.get(), 0}};
  seen.insert(loss.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (seen.insert(parent).second) stack.push_back({parent, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (Node* n : order) {
    if (n->requires_grad) n->ensure_grad();
  }
  loss->ensure_grad();
  loss->grad.fill(0.0);
  loss->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->requires_grad && n->backward_fn) n->backward_fn();
  }
}

inline void zero_grad(const std::vector<Var>& params) {
  for (const auto& p : params) {
    p->ensure_grad();
    p->grad.fill(0.0);
  }
}

// ---- primitive operations ------------------------------------------------

/// y = a * b, optionally transposing either operand.
inline Var matmul(const Var& a, const Var& b, bool trans_a = false, bool trans_b = false) {
  const auto A = as_eigen(a->value);
  const auto B = as_eigen(b->value);
  const Eigen::Index m = trans_a ? A.cols() : A.rows();
  const Eigen::Index k = trans_a ? A.rows() : A.cols();
  const Eigen::Index k2 = trans_b ? B.cols() : B.rows();
  const Eigen::Index n = trans_b ? B.rows() : B.cols();
  if (k != k2) {
    throw ShapeError("matmul: inner dimensions differ: " + a->value.shape_string() + " x " +
                     b->value.shape_string());
  }
  Tensor out(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
  {
    auto O = as_eigen(out);
    if (!trans_a && !trans_b) O.noalias() = A * B;
    else if (!trans_a && trans_b) O.noalias() = A * B.transpose();
    else if (trans_a && !trans_b) O.noalias() = A.transpose() * B;
    else O.noalias() = A.transpose() * B.transpose();
  }
  Var node = graph_detail::make_node(std::move(out), {a, b}, "matmul");
  Node* raw = node.get();
  Node* pa = a.get();
  Node* pb = b.get();
  node->backward_fn = [raw, pa, pb, trans_a, trans_b]() {
    const auto G = as_eigen(raw->grad);
    const auto A = as_eigen(pa->value);
    const auto B = as_eigen(pb->value);
    if (pa->requires_grad) {
      auto dA = as_eigen(pa->grad);
      if (!trans_a && !trans_b) dA.noalias() += G * B.transpose();
      else if (!trans_a && trans_b) dA.noalias() += G * B;
      else if (trans_a && !trans_b) dA.noalias() += B * G.transpose();
      else dA.noalias() += B.transpose() * G.transpose();
    }
    if (pb->requires_grad) {
      auto dB = as_eigen(pb->grad);
      if (!trans_a && !trans_b) dB.noalias() += A.transpose() * G;
      else if (!trans_a && trans_b) dB.noalias() += G.transpose() * A;
      else if (trans_a && !trans_b) dB.noalias() += A * G;
      else dB.noalias() += G.transpose() * A.transpose();
    }
  };
  return node;
}

/// Elementwise a + b, or row-broadcast when b is a 1 x n row vector.
inline Var add(const Var& a, const Var& b) {
  const bool broadcast = b->value.rows() == 1 && a->value.rows() != 1 &&
                         a->value.cols() == b->value.cols();
  if (!broadcast && !a->value.same_shape(b->value)) {
    throw ShapeError("add: shape mismatch " + a->value.shape_string() + " vs " +
                     b->value.shape_string());
  }
  Tensor out = a->value;
  if (broadcast) {
    auto O = as_eigen(out);
    O.rowwise() += as_eigen(b->value).row(0);
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b->value[i];
  }
  Var node = graph_detail::make_node(std::move(out), {a, b}, "add");
  Node* raw = node.get();
  Node* pa = a.get();
  Node* pb = b.get();
  node->backward_fn = [raw, pa, pb, broadcast]() {
    if (pa->requires_grad) {
      for (std::size_t i = 0; i < raw->grad.size(); ++i) pa->grad[i] += raw->grad[i];
    }
    if (pb->requires_grad) {
      if (broadcast) {
        as_eigen(pb->grad).row(0) += as_eigen(raw->grad).colwise().sum();
      } else {
        for (std::size_t i = 0; i < raw->grad.size(); ++i) pb->grad[i] += raw->grad[i];
      }
    }
  };
  return node;
}

inline Var sub(const Var& a, const Var& b) {
  if (!a->value.same_shape(b->value)) {
    throw ShapeError("sub: shape mismatch");
  }
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b->value[i];
  Var node = graph_detail::make_node(std::move(out), {a, b}, "sub");
  Node* raw = node.get();
  Node* pa = a.get();
  Node* pb = b.get();
  node->backward_fn = [raw, pa, pb]() {
    if (pa->requires_grad) {
      for (std::size_t i = 0; i < raw->grad.size(); ++i) pa->grad[i] += raw->grad[i];
    }
    if (pb->requires_grad) {
      for (std::size_t i = 0; i < raw->grad.size(); ++i) pb->grad[i] -= raw->grad[i];
    }
  };
  return node;
}

inline Var mul(const Var& a, const Var& b) {
  if (!a->value.same_shape(b->value)) {
    throw ShapeError("mul: shape mismatch");
  }
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b->value[i];
  Var node = graph_detail::make_node(std::move(out), {a, b}, "mul");
  Node* raw = node.get();
  Node* pa = a.get();
  Node* pb = b.get();
  node->backward_fn = [raw, pa, pb]() {
    if (pa->requires_grad) {
      for (std::size_t i = 0; i < raw->grad.size(); ++i) {
        pa->grad[i] += raw->grad[i] * pb->value[i];
      }
    }
    if (pb->requires_grad) {
      for (std::size_t i = 0; i < raw->grad.size(); ++i) {
        pb->grad[i] += raw->grad[i] * pa->value[i];
      }
    }
  };
  return node;
}

inline Var scale(const Var& a, double c) {
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  Var node = graph_detail::make_node(std::move(out), {a}, "scale");
  Node* raw = node.get();
  Node* pa = a.get();
  node->backward_fn = [raw, pa, c]() {
    if (!pa->requires_grad) return;
    for (std::size_t i = 0; i < raw->grad.size(); ++i) pa->grad[i] += c * raw->grad[i];
  };
  return node;
}

inline Var tanh_op(const Var& a) {
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  Var node = graph_detail::make_node(std::move(out), {a}, "tanh");
  Node* raw = node.get();
  Node* pa = a.get();
  node->backward_fn = [raw, pa]() {
    if (!pa->requires_grad) return;
    for (std::size_t i = 0; i < raw->grad.size(); ++i) {
      const double y = raw->value[i];
      pa->grad[i] += raw->grad[i] * (1.0 - y * y);
    }
  };
  return node;
}

inline Var sigmoid_op(const Var& a) {
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
  Var node = graph_detail::make_node(std::move(out), {a}, "sigmoid");
  Node* raw = node.get();
  Node* pa = a.get();
  node->backward_fn = [raw, pa]() {
    if (!pa->requires_grad) return;
    for (std::size_t i = 0; i < raw->grad.size(); ++i) {
      const double y = raw->value[i];
      pa->grad[i] += raw->grad[i] * y * (1.0 - y);
    }
  };
  return node;
}

inline Var relu_op(const Var& a) {
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
  Var node = graph_detail::make_node(std::move(out), {a}, "relu");
  Node* raw = node.get();
  Node* pa = a.get();
  node->backward_fn = [raw, pa]() {
    if (!pa->requires_grad) return;
    for (std::size_t i = 0; i < raw->grad.size(); ++i) {
      if (pa->value[i] > 0.0) pa->grad[i] += raw->grad[i];
    }
  };
  return node;
}

/// Row-wise softmax with max subtraction to prevent overflow.
inline Var softmax_rows(const Var& a) {
  Tensor out = a->value;
  const std::size_t r = out.rows(), c = out.cols();
  for (std::size_t i = 0; i < r; ++i) {
    double mx = out.at(i, 0);
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, out.at(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      out.at(i, j) = std::exp(out.at(i, j) - mx);
      sum += out.at(i, j);
    }
    for (std::size_t j = 0; j < c; ++j) out.at(i, j) /= sum;
  }
  Var node = graph_detail::make_node(std::move(out), {a}, "softmax");
  Node* raw = node.get();
  Node* pa = a.get();
  node->backward_fn = [raw, pa]() {
    if (!pa->requires_grad) return;
    const std::size_t r = raw->value.rows(), c = raw->value.cols();
    for (std::size_t i = 0; i < r; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += raw->grad.at(i, j) * raw->value.at(i, j);
      for (std::size_t j = 0; j < c; ++j) {
        pa->grad.at(i, j) += raw->value.at(i, j) * (raw->grad.at(i, j) - dot);
      }
    }
  };
  return node;
}

/// Row-wise layer normalization with learnable gain and bias (1 x c each).
inline Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-5) {
  const std::size_t r = x->value.rows(), c = x->value.cols();
  if (gamma->value.cols() != c || beta->value.cols() != c) {
    throw ShapeError("layer_norm: gain/bias width mismatch");
  }
  Tensor out(r, c);
  Tensor xhat(r, c);
  std::vector<double> inv_std(r);
  for (std::size_t i = 0; i < r; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < c; ++j) mean += x->value.at(i, j);
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      const double d = x->value.at(i, j) - mean;
      var += d * d;
    }
    var /= static_cast<double>(c);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < c; ++j) {
      xhat.at(i, j) = (x->value.at(i, j) - mean) * inv_std[i];
      out.at(i, j) = gamma->value[j] * xhat.at(i, j) + beta->value[j];
    }
  }
  Var node = graph_detail::make_node(std::move(out), {x, gamma, beta}, "layer_norm");
  Node* raw = node.get();
  Node* px = x.get();
  Node* pg = gamma.get();
  Node* pb = beta.get();
  auto xhat_shared = std::make_shared<Tensor>(std::move(xhat));
  auto inv_shared = std::make_shared<std::vector<double>>(std::move(inv_std));
  node->backward_fn = [raw, px, pg, pb, xhat_shared, inv_shared]() {
    const std::size_t r = raw->value.rows(), c = raw->value.cols();
    const Tensor& xh = *xhat_shared;
    for (std::size_t i = 0; i < r; ++i) {
      double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        const double g = raw->grad.at(i, j);
        if (pg->requires_grad) pg->grad[j] += g * xh.at(i, j);
        if (pb->requires_grad) pb->grad[j] += g;
        const double dxhat = g * pg->value[j];
        mean_dxhat += dxhat;
        mean_dxhat_xhat += dxhat * xh.at(i, j);
      }
      if (!px->requires_grad) continue;
      mean_dxhat /= static_cast<double>(c);
      mean_dxhat_xhat /= static_cast<double>(c);
      for (std::size_t j = 0; j < c; ++j) {
        const double dxhat = raw->grad.at(i, j) * pg->value[j];
        px->grad.at(i, j) +=
            (*inv_shared)[i] * (dxhat - mean_dxhat - xh.at(i, j) * mean_dxhat_xhat);
      }
    }
  };
  return node;
}

inline Var concat_cols(const Var& a, const Var& b) {
  const std::size_t r = a->value.rows();
  if (b->value.rows() != r) throw ShapeError("concat_cols: row mismatch");
  const std::size_t ca = a->value.cols(), cb = b->value.cols();
  Tensor out(r, ca + cb);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < ca; ++j) out.at(i, j) = a->value.at(i, j);
    for (std::size_t j = 0; j < cb; ++j) out.at(i, ca + j) = b->value.at(i, j);
  }
  Var node = graph_detail::make_node(std::move(out), {a, b}, "concat_cols");
  Node* raw = node.get();
  Node* pa = a.get();
  Node* pb = b.get();
  node->backward_fn = [raw, pa, pb, r, ca, cb]() {
    for (std::size_t i = 0; i < r; ++i) {
      if (pa->requires_grad) {
        for (std::size_t j = 0; j < ca; ++j) pa->grad.at(i, j) += raw->grad.at(i, j);
      }
      if (pb->requires_grad) {
        for (std::size_t j = 0; j < cb; ++j) pb->grad.at(i, j) += raw->grad.at(i, ca + j);
      }
    }
  };
  return node;
}

inline Var slice_rows(const Var& a, std::size_t r0, std::size_t r1) {
  const std::size_t r = a->value.rows(), c = a->value.cols();
  if (r0 >= r1 || r1 > r) throw ShapeError("slice_rows: bad range");
  Tensor out(r1 - r0, c);
  for (std::size_t i = r0; i < r1; ++i) {
    for (std::size_t j = 0; j < c; ++j) out.at(i - r0, j) = a->value.at(i, j);
  }
  Var node = graph_detail::make_node(std::move(out), {a}, "slice_rows");
  Node* raw = node.get();
  Node* pa = a.get();
  node->backward_fn = [raw, pa, r0, c]() {
    if (!pa->requires_grad) return;
    for (std::size_t i = 0; i < raw->value.rows(); ++i) {
      for (std::size_t j = 0; j < c; ++j) pa->grad.at(r0 + i, j) += raw->grad.at(i, j);
    }
  };
  return node;
}

/// Extracts time step t from a (batch, time, channels) tensor as a
/// (batch, channels) matrix.
inline Var slice_time(const Var& x, std::size_t t) {
  if (x->value.ndim() != 3) throw ShapeError("slice_time: need a rank-3 tensor");
  const std::size_t B = x->value.shape()[0];
  const std::size_t T = x->value.shape()[1];
  const std::size_t C = x->value.shape()[2];
  if (t >= T) throw ShapeError("slice_time: step out of range");
  Tensor out(B, C);
  for (std::size_t b = 0; b < B; ++b) {
    const double* src = x->value.data() + (b * T + t) * C;
    for (std::size_t j = 0; j < C; ++j) out.at(b, j) = src[j];
  }
  Var node = graph_detail::make_node(std::move(out), {x}, "slice_time");
  Node* raw = node.get();
  Node* px = x.get();
  node->backward_fn = [raw, px, t, B, T, C]() {
    if (!px->requires_grad) return;
    for (std::size_t b = 0; b < B; ++b) {
      double* dst = px->grad.data() + (b * T + t) * C;
      for (std::size_t j = 0; j < C; ++j) dst[j] += raw->grad.at(b, j);
    }
  };
  return node;
}

/// Valid cross-correlation along time (stride 1, no padding) over a
/// (batch, time, channels) tensor: kernels are (c_out, width * c_in), the
/// output is (batch, time - width + 1, c_out). Activation is applied by the
/// caller.
inline Var conv1d(const Var& x, const Var& kernels, const Var& bias, std::size_t width) {
  if (x->value.ndim() != 3) throw ShapeError("conv1d: need a rank-3 input");
  const std::size_t B = x->value.shape()[0];
  const std::size_t T = x->value.shape()[1];
  const std::size_t Cin = x->value.shape()[2];
  const std::size_t Cout = kernels->value.rows();
  if (kernels->value.cols() != width * Cin) {
    throw ShapeError("conv1d: kernel shape " + kernels->value.shape_string() +
                     " does not match width " + std::to_string(width) + " x c_in " +
                     std::to_string(Cin));
  }
  if (bias->value.cols() != Cout || bias->value.rows() != 1) {
    throw ShapeError("conv1d: bias must be 1 x c_out");
  }
  if (T < width) throw ShapeError("conv1d: input shorter than kernel");
  const std::size_t Tout = T - width + 1;

  // im2col: one row per (batch, output step) holding the flattened window.
  auto cols = std::make_shared<Tensor>(B * Tout, width * Cin);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < Tout; ++t) {
      double* dst = cols->data() + (b * Tout + t) * width * Cin;
      const double* src = x->value.data() + (b * T + t) * Cin;
      for (std::size_t j = 0; j < width * Cin; ++j) dst[j] = src[j];
    }
  }
  Tensor out2d(B * Tout, Cout);
  {
    auto O = as_eigen(out2d);
    O.noalias() = as_eigen(*cols) * as_eigen(kernels->value).transpose();
    O.rowwise() += as_eigen(bias->value).row(0);
  }
  Tensor out = Tensor::from({B, Tout, Cout},
                            std::vector<double>(out2d.data(), out2d.data() + out2d.size()));
  Var node = graph_detail::make_node(std::move(out), {x, kernels, bias}, "conv1d");
  Node* raw = node.get();
  Node* px = x.get();
  Node* pk = kernels.get();
  Node* pb = bias.get();
  node->backward_fn = [raw, px, pk, pb, cols, B, T, Tout, Cin, Cout, width]() {
    ECMap G(raw->grad.data(), static_cast<Eigen::Index>(B * Tout),
            static_cast<Eigen::Index>(Cout));
    if (pk->requires_grad) {
      as_eigen(pk->grad).noalias() += G.transpose() * as_eigen(*cols);
    }
    if (pb->requires_grad) {
      as_eigen(pb->grad).row(0) += G.colwise().sum();
    }
    if (px->requires_grad) {
      EMat dcols = G * as_eigen(pk->value);  // (B*Tout, width*Cin)
      for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t t = 0; t < Tout; ++t) {
          const double* src = dcols.data() + (b * Tout + t) * width * Cin;
          double* dst = px->grad.data() + (b * T + t) * Cin;
          for (std::size_t j = 0; j < width * Cin; ++j) dst[j] += src[j];
        }
      }
    }
  };
  return node;
}

/// Inverted dropout: training mode keeps each element with probability
/// 1 - rate and scales by 1/(1 - rate) so the expectation is preserved;
/// evaluation mode is the exact identity (the input node is returned).
inline Var dropout(const Var& x, double rate, Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) throw RangeError("dropout: rate must lie in [0, 1)");
  if (!training || rate == 0.0) return x;
  const double keep = 1.0 - rate;
  auto mask = std::make_shared<Tensor>(x->value.shape());
  Tensor out = x->value;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double m = rng.uniform() < keep ? 1.0 / keep : 0.0;
    (*mask)[i] = m;
    out[i] *= m;
  }
  Var node = graph_detail::make_node(std::move(out), {x}, "dropout");
  Node* raw = node.get();
  Node* px = x.get();
  node->backward_fn = [raw, px, mask]() {
    if (!px->requires_grad) return;
    for (std::size_t i = 0; i < raw->grad.size(); ++i) {
      px->grad[i] += raw->grad[i] * (*mask)[i];
    }
  };
  return node;
}

/// Mean squared error against a constant target.
inline Var mse_loss(const Var& pred, const Tensor& target) {
  if (!pred->value.same_shape(target)) {
    throw ShapeError("mse: shape mismatch " + pred->value.shape_string() + " vs " +
                     target.shape_string());
  }
  const std::size_t n = target.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pred->value[i] - target[i];
    acc += d * d;
  }
  Var node = graph_detail::make_node(Tensor::scalar(acc / static_cast<double>(n)), {pred}, "mse");
  Node* raw = node.get();
  Node* pp = pred.get();
  auto tgt = std::make_shared<Tensor>(target);
  node->backward_fn = [raw, pp, tgt, n]() {
    if (!pp->requires_grad) return;
    const double g = raw->grad[0] * 2.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      pp->grad[i] += g * (pp->value[i] - (*tgt)[i]);
    }
  };
  return node;
}

/// Mean over all elements (scalar output).
inline Var mean_all(const Var& a) {
  const std::size_t n = a->value.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a->value[i];
  Var node =
      graph_detail::make_node(Tensor::scalar(acc / static_cast<double>(n)), {a}, "mean_all");
  Node* raw = node.get();
  Node* pa = a.get();
  node->backward_fn = [raw, pa, n]() {
    if (!pa->requires_grad) return;
    const double g = raw->grad[0] / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) pa->grad[i] += g;
  };
  return node;
}

}  // namespace sparseload::nn
