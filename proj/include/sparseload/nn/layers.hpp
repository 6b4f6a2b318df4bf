#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sparseload/nn/graph.hpp"

namespace sparseload::nn {

/// Scale-aware uniform initialization on (-1/sqrt(fan_in), +1/sqrt(fan_in)).
inline Tensor init_uniform(Rng& rng, std::size_t rows, std::size_t cols, std::size_t fan_in) {
  Tensor t(rows, cols);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
  return t;
}

/// Named parameter list every layer contributes to; the container
/// serializer and the optimizer both consume it.
struct ParamList {
  std::vector<std::pair<std::string, Var>> items;

  Var add(const std::string& name, Tensor init) {
    Var p = parameter(std::move(init));
    items.emplace_back(name, p);
    return p;
  }

  std::vector<Var> vars() const {
    std::vector<Var> out;
    out.reserve(items.size());
    for (const auto& [name, v] : items) out.push_back(v);
    return out;
  }
};

/// y = x W^T + b with W stored (out x in).
struct Dense {
  Var W, b;

  Dense() = default;
  Dense(ParamList& params, const std::string& name, std::size_t in, std::size_t out, Rng& rng) {
    W = params.add(name + ".W", init_uniform(rng, out, in, in));
    b = params.add(name + ".b", init_uniform(rng, 1, out, in));
  }

  Var forward(const Var& x) const { return add(matmul(x, W, false, true), b); }
};

/// Single LSTM cell; gate weights are stored (hidden x input) and
/// (hidden x hidden) per gate as in the standard recurrence
///   z = tanh(W_z x + R_z h + b_z)     cell input
///   i = sigma(W_i x + R_i h + b_i)    input gate
///   f = sigma(W_f x + R_f h + b_f)    forget gate
///   o = sigma(W_o x + R_o h + b_o)    output gate
///   c' = i . z + f . c                cell state update
///   h' = o . tanh(c')                 hidden state update
struct LstmCell {
  Var Wz, Wi, Wf, Wo;
  Var Rz, Ri, Rf, Ro;
  Var bz, bi, bf, bo;
  std::size_t input = 0, hidden = 0;

  LstmCell() = default;
  LstmCell(ParamList& params, const std::string& name, std::size_t in, std::size_t h, Rng& rng)
      : input(in), hidden(h) {
    auto w = [&](const char* g) { return params.add(name + ".W" + g, init_uniform(rng, h, in, in)); };
    auto r = [&](const char* g) { return params.add(name + ".R" + g, init_uniform(rng, h, h, h)); };
    auto bias = [&](const char* g) { return params.add(name + ".b" + g, init_uniform(rng, 1, h, h)); };
    Wz = w("z"); Wi = w("i"); Wf = w("f"); Wo = w("o");
    Rz = r("z"); Ri = r("i"); Rf = r("f"); Ro = r("o");
    bz = bias("z"); bi = bias("i"); bf = bias("f"); bo = bias("o");
  }

  std::pair<Var, Var> step(const Var& x, const Var& h_prev, const Var& c_prev) const {
    auto gate = [&](const Var& W, const Var& R, const Var& b) {
      return add(add(matmul(x, W, false, true), matmul(h_prev, R, false, true)), b);
    };
    const Var z = tanh_op(gate(Wz, Rz, bz));
    const Var i = sigmoid_op(gate(Wi, Ri, bi));
    const Var f = sigmoid_op(gate(Wf, Rf, bf));
    const Var o = sigmoid_op(gate(Wo, Ro, bo));
    const Var c = add(mul(i, z), mul(f, c_prev));
    const Var h = mul(o, tanh_op(c));
    return {h, c};
  }

  /// Runs the recurrence over a (batch, time, channels) tensor from zero
  /// initial states; returns the final hidden state (batch x hidden).
  /// reversed=true consumes the sequence back-to-front (BiLSTM backward
  /// pass), ending on the state that has seen the whole sequence.
  Var run(const Var& sequence, bool reversed = false) const {
    const std::size_t B = sequence->value.shape()[0];
    const std::size_t T = sequence->value.shape()[1];
    Var h = constant(Tensor(B, hidden));
    Var c = constant(Tensor(B, hidden));
    for (std::size_t s = 0; s < T; ++s) {
      const std::size_t t = reversed ? T - 1 - s : s;
      auto [h2, c2] = step(slice_time(sequence, t), h, c);
      h = h2;
      c = c2;
    }
    return h;
  }
};

/// Multi-head self-attention over one sequence (T x d):
/// per head softmax(Q K^T / sqrt(d_k)) V, heads concatenated, then the
/// output projection W_O ((heads * d_v) x d).
struct MultiHeadAttention {
  std::vector<Var> Wq, Wk, Wv;  // each d x d_k / d x d_v
  Var Wo;
  std::size_t heads = 0, d_model = 0, d_k = 0, d_v = 0;

  MultiHeadAttention() = default;
  MultiHeadAttention(ParamList& params, const std::string& name, std::size_t d, std::size_t h,
                     Rng& rng)
      : heads(h), d_model(d), d_k(d / h), d_v(d / h) {
    if (d % h != 0) throw ShapeError("attention: model width must divide by head count");
    for (std::size_t i = 0; i < h; ++i) {
      const std::string hn = name + ".h" + std::to_string(i);
      Wq.push_back(params.add(hn + ".Wq", init_uniform(rng, d, d_k, d)));
      Wk.push_back(params.add(hn + ".Wk", init_uniform(rng, d, d_k, d)));
      Wv.push_back(params.add(hn + ".Wv", init_uniform(rng, d, d_v, d)));
    }
    Wo = params.add(name + ".Wo", init_uniform(rng, h * d_v, d, h * d_v));
  }

  Var forward(const Var& z) const {
    Var heads_out;
    for (std::size_t i = 0; i < heads; ++i) {
      const Var q = matmul(z, Wq[i]);
      const Var k = matmul(z, Wk[i]);
      const Var v = matmul(z, Wv[i]);
      const Var scores = scale(matmul(q, k, false, true), 1.0 / std::sqrt(double(d_k)));
      const Var attn = softmax_rows(scores);
      const Var head = matmul(attn, v);
      heads_out = i == 0 ? head : concat_cols(heads_out, head);
    }
    return matmul(heads_out, Wo);
  }
};

struct LayerNorm {
  Var gamma, beta;

  LayerNorm() = default;
  LayerNorm(ParamList& params, const std::string& name, std::size_t width) {
    Tensor g(1, width);
    g.fill(1.0);
    gamma = params.add(name + ".gamma", std::move(g));
    beta = params.add(name + ".beta", Tensor(1, width));
  }

  Var forward(const Var& x) const { return layer_norm(x, gamma, beta); }
};

/// Sine/cosine positional encodings:
///   P[t, 2i]   = sin(t / 10000^(2i/d))
///   P[t, 2i+1] = cos(t / 10000^(2i/d))
inline Tensor positional_encoding(std::size_t T, std::size_t d) {
  if (d % 2 != 0) throw ShapeError("positional_encoding: width must be even");
  Tensor P(T, d);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < d / 2; ++i) {
      const double rate = std::pow(10000.0, 2.0 * static_cast<double>(i) / static_cast<double>(d));
      P.at(t, 2 * i) = std::sin(static_cast<double>(t) / rate);
      P.at(t, 2 * i + 1) = std::cos(static_cast<double>(t) / rate);
    }
  }
  return P;
}

/// Post-norm transformer encoder layer: attention and a ReLU feed-forward
/// block, each wrapped in residual + layer norm, with dropout on both
/// sub-layer outputs.
struct EncoderLayer {
  MultiHeadAttention attn;
  Dense ff1, ff2;
  LayerNorm norm1, norm2;
  double dropout_rate = 0.0;

  EncoderLayer() = default;
  EncoderLayer(ParamList& params, const std::string& name, std::size_t d, std::size_t heads,
               std::size_t d_ff, double dropout, Rng& rng)
      : attn(params, name + ".attn", d, heads, rng),
        ff1(params, name + ".ff1", d, d_ff, rng),
        ff2(params, name + ".ff2", d_ff, d, rng),
        norm1(params, name + ".norm1", d),
        norm2(params, name + ".norm2", d),
        dropout_rate(dropout) {}

  Var forward(const Var& x, Rng& rng, bool training) const {
    const Var a = dropout(attn.forward(x), dropout_rate, rng, training);
    const Var x1 = norm1.forward(add(x, a));
    const Var f = dropout(ff2.forward(relu_op(ff1.forward(x1))), dropout_rate, rng, training);
    return norm2.forward(add(x1, f));
  }
};

}  // namespace sparseload::nn
