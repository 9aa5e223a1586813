#include "treentail/graph.hpp"

#include <algorithm>
#include <cmath>

#include "treentail/error.hpp"

namespace treentail {

namespace {

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void softmax_inplace(std::span<double> v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (auto& x : v) {
    x = std::exp(x - mx);
    total += x;
  }
  for (auto& x : v) x /= total;
}

}  // namespace

Graph::Graph(const ParameterSet& params) : params_(params) { nodes_.reserve(256); }

std::string_view Graph::op_name(Op op) {
  switch (op) {
    case Op::Input: return "input";
    case Op::Parameter: return "parameter";
    case Op::Embedding: return "embedding";
    case Op::Affine: return "affine";
    case Op::MatMul: return "matmul";
    case Op::Transpose: return "transpose";
    case Op::Add: return "add";
    case Op::Hadamard: return "hadamard";
    case Op::Sigmoid: return "sigmoid";
    case Op::Tanh: return "tanh";
    case Op::Concat: return "concat";
    case Op::Slice: return "slice";
    case Op::StackColumns: return "stack_columns";
    case Op::Softmax: return "softmax";
    case Op::RowSoftmax: return "row_softmax";
    case Op::RowNormalize: return "row_normalize";
    case Op::PairwiseSum: return "pairwise_sum";
    case Op::NegLogPick: return "neg_log_pick";
  }
  return "unknown";
}

Graph::Id Graph::push(Op op, std::vector<Id> in, Tensor value, std::size_t a, std::size_t b, double scalar) {
  if (!value.all_finite())
    throw Error(Errc::NonFiniteValue, "op '" + std::string(op_name(op)) + "' produced a non-finite value");
  Node n{op, std::move(in), std::move(value), Tensor(), false, a, b, scalar};
  for (Id i : n.in) n.needs_grad = n.needs_grad || nodes_[i].needs_grad;
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

Graph::Id Graph::input(Tensor value) { return push(Op::Input, {}, std::move(value)); }

Graph::Id Graph::parameter(Slot slot) {
  auto& cached = param_ids_[index_of(slot)];
  if (!cached) {
    const Tensor& t = params_[slot];
    require_shape(!t.empty(), "parameter slot '" + std::string(kSlotNames[index_of(slot)]) + "' is not allocated");
    cached = push(Op::Parameter, {}, t, index_of(slot));
    nodes_.back().needs_grad = true;
  }
  return *cached;
}

Graph::Id Graph::embedding(const Vocabulary& vocab, std::size_t vocab_index) {
  auto it = embedding_ids_.find(vocab_index);
  if (it != embedding_ids_.end()) return it->second;
  Tensor row = params_.embeddings.row(vocab, vocab_index);
  const bool trainable = vocab_index >= vocab.frozen_count();
  const Id id = push(trainable ? Op::Embedding : Op::Input, {}, std::move(row),
                     trainable ? vocab_index - vocab.frozen_count() : 0);
  nodes_.back().needs_grad = trainable;
  embedding_ids_.emplace(vocab_index, id);
  return id;
}

Graph::Id Graph::affine(Id weight, Id bias, Id x) {
  const Tensor& w = value(weight);
  const Tensor& bv = value(bias);
  const Tensor& xv = value(x);
  require_shape(xv.is_column() && xv.rows() == w.cols() && bv.is_column() && bv.rows() == w.rows(),
                "affine " + w.shape_string() + " on " + xv.shape_string() + " + " + bv.shape_string());
  Tensor y = bv;
  const std::size_t in = w.cols();
  const double* xp = xv.data().data();
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double* wr = w.data().data() + i * in;
    double acc = 0.0;
    for (std::size_t j = 0; j < in; ++j) acc += wr[j] * xp[j];
    y[i] += acc;
  }
  return push(Op::Affine, {weight, bias, x}, std::move(y));
}

Graph::Id Graph::matmul(Id a, Id b) { return push(Op::MatMul, {a, b}, treentail::matmul(value(a), value(b))); }

Graph::Id Graph::transpose(Id a) { return push(Op::Transpose, {a}, treentail::transpose(value(a))); }

Graph::Id Graph::add(Id a, Id b) {
  Tensor y = value(a);
  y += value(b);
  return push(Op::Add, {a, b}, std::move(y));
}

Graph::Id Graph::hadamard(Id a, Id b) {
  const Tensor& bv = value(b);
  Tensor y = value(a);
  require_shape(y.same_shape(bv), "hadamard " + y.shape_string() + " * " + bv.shape_string());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
  return push(Op::Hadamard, {a, b}, std::move(y));
}

Graph::Id Graph::sigmoid(Id a) {
  Tensor y = value(a);
  for (auto& x : y.data()) x = sigmoid_scalar(x);
  return push(Op::Sigmoid, {a}, std::move(y));
}

Graph::Id Graph::tanh(Id a) {
  Tensor y = value(a);
  for (auto& x : y.data()) x = std::tanh(x);
  return push(Op::Tanh, {a}, std::move(y));
}

Graph::Id Graph::concat(std::span<const Id> parts) {
  std::size_t total = 0;
  for (Id p : parts) {
    require_shape(value(p).is_column(), "concat of non-vector " + value(p).shape_string());
    total += value(p).rows();
  }
  Tensor y(total, 1);
  std::size_t at = 0;
  for (Id p : parts) {
    const auto src = value(p).data();
    std::copy(src.begin(), src.end(), y.data().begin() + static_cast<std::ptrdiff_t>(at));
    at += src.size();
  }
  return push(Op::Concat, std::vector<Id>(parts.begin(), parts.end()), std::move(y));
}

Graph::Id Graph::slice(Id a, std::size_t row, std::size_t rows, std::size_t col, std::size_t cols) {
  const Tensor& av = value(a);
  require_shape(row + rows <= av.rows() && col + cols <= av.cols(),
                "slice out of range of " + av.shape_string());
  Tensor y(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) y(i, j) = av(row + i, col + j);
  return push(Op::Slice, {a}, std::move(y), row, col);
}

Graph::Id Graph::column(Id m, std::size_t j) { return slice(m, 0, value(m).rows(), j, 1); }

Graph::Id Graph::stack_columns(std::span<const Id> columns) {
  require_shape(!columns.empty(), "stack_columns of nothing");
  const std::size_t n = value(columns.front()).rows();
  Tensor y(n, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const Tensor& c = value(columns[j]);
    require_shape(c.is_column() && c.rows() == n, "stack_columns of mismatched column " + c.shape_string());
    for (std::size_t i = 0; i < n; ++i) y(i, j) = c[i];
  }
  return push(Op::StackColumns, std::vector<Id>(columns.begin(), columns.end()), std::move(y));
}

Graph::Id Graph::softmax(Id v) {
  const Tensor& x = value(v);
  if (x.empty()) throw Error(Errc::EmptyVector, "softmax of an empty vector");
  require_shape(x.is_column(), "softmax of non-vector " + x.shape_string());
  Tensor y = x;
  softmax_inplace(y.data());
  return push(Op::Softmax, {v}, std::move(y));
}

Graph::Id Graph::row_softmax(Id m) {
  Tensor y = value(m);
  if (y.cols() == 0) throw Error(Errc::EmptyVector, "row_softmax over zero columns");
  for (std::size_t i = 0; i < y.rows(); ++i) softmax_inplace(y.data().subspan(i * y.cols(), y.cols()));
  return push(Op::RowSoftmax, {m}, std::move(y));
}

Graph::Id Graph::row_normalize(Id m, double floor) {
  Tensor y = value(m);
  for (std::size_t i = 0; i < y.rows(); ++i) {
    auto row = y.data().subspan(i * y.cols(), y.cols());
    double total = 0.0;
    for (auto& x : row) {
      x += floor;
      total += x;
    }
    for (auto& x : row) x /= total;
  }
  return push(Op::RowNormalize, {m}, std::move(y), 0, 0, floor);
}

Graph::Id Graph::pairwise_sum(Id u, Id v, Id bias) {
  const Tensor& uv = value(u);
  const Tensor& vv = value(v);
  const Tensor& bv = value(bias);
  require_shape(uv.is_column() && vv.is_column() && bv.size() == 1,
                "pairwise_sum of " + uv.shape_string() + ", " + vv.shape_string() + ", " + bv.shape_string());
  Tensor y(uv.rows(), vv.rows());
  for (std::size_t i = 0; i < uv.rows(); ++i)
    for (std::size_t j = 0; j < vv.rows(); ++j) y(i, j) = uv[i] + vv[j] + bv[0];
  return push(Op::PairwiseSum, {u, v, bias}, std::move(y));
}

Graph::Id Graph::neg_log_pick(Id p, std::size_t index) {
  const Tensor& pv = value(p);
  require_shape(pv.is_column() && index < pv.rows(), "neg_log_pick index out of range");
  return push(Op::NegLogPick, {p}, Tensor(1, 1, -std::log(pv[index])), index);
}

Tensor& Graph::grad_of(Id id) {
  auto& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor::zeros_like(n.value);
  return n.grad;
}

GradientSet Graph::backward(Id loss) {
  if (value(loss).size() != 1) throw Error(Errc::NonScalarLoss, "loss has shape " + value(loss).shape_string());
  for (auto& n : nodes_) n.grad = Tensor();
  grad_of(loss)[0] = 1.0;

  for (std::size_t id = loss + 1; id-- > 0;) {
    const Node& n = nodes_[id];
    if (!n.needs_grad || n.grad.empty()) continue;
    backward_node(n);
  }

  GradientSet out;
  for (auto& n : nodes_) {
    if (n.grad.empty()) continue;
    if (!n.grad.all_finite())
      throw Error(Errc::NonFiniteValue, "non-finite gradient at op '" + std::string(op_name(n.op)) + "'");
    if (n.op == Op::Parameter) {
      out.dense[n.a] = std::move(n.grad);
    } else if (n.op == Op::Embedding) {
      auto [it, inserted] = out.embedding_rows.try_emplace(n.a, std::move(n.grad));
      if (!inserted) it->second += n.grad;
    }
  }
  return out;
}

void Graph::backward_node(const Node& n) {
  const Tensor& g = n.grad;
  auto wants = [&](std::size_t k) { return nodes_[n.in[k]].needs_grad; };

  switch (n.op) {
    case Op::Input:
    case Op::Parameter:
    case Op::Embedding:
      break;

    case Op::Affine: {
      const Tensor& w = nodes_[n.in[0]].value;
      const Tensor& x = nodes_[n.in[2]].value;
      const std::size_t in = w.cols();
      if (wants(0)) {
        Tensor& gw = grad_of(n.in[0]);
        for (std::size_t i = 0; i < w.rows(); ++i) {
          const double gi = g[i];
          if (gi == 0.0) continue;
          double* row = gw.data().data() + i * in;
          for (std::size_t j = 0; j < in; ++j) row[j] += gi * x[j];
        }
      }
      if (wants(1)) grad_of(n.in[1]) += g;
      if (wants(2)) {
        Tensor& gx = grad_of(n.in[2]);
        for (std::size_t i = 0; i < w.rows(); ++i) {
          const double gi = g[i];
          if (gi == 0.0) continue;
          const double* row = w.data().data() + i * in;
          for (std::size_t j = 0; j < in; ++j) gx[j] += gi * row[j];
        }
      }
      break;
    }

    case Op::MatMul: {
      const Tensor& a = nodes_[n.in[0]].value;
      const Tensor& b = nodes_[n.in[1]].value;
      if (wants(0)) grad_of(n.in[0]) += treentail::matmul(g, treentail::transpose(b));
      if (wants(1)) grad_of(n.in[1]) += treentail::matmul(treentail::transpose(a), g);
      break;
    }

    case Op::Transpose:
      grad_of(n.in[0]) += treentail::transpose(g);
      break;

    case Op::Add:
      if (wants(0)) grad_of(n.in[0]) += g;
      if (wants(1)) grad_of(n.in[1]) += g;
      break;

    case Op::Hadamard: {
      const Tensor& a = nodes_[n.in[0]].value;
      const Tensor& b = nodes_[n.in[1]].value;
      if (wants(0)) {
        Tensor& ga = grad_of(n.in[0]);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b[i];
      }
      if (wants(1)) {
        Tensor& gb = grad_of(n.in[1]);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a[i];
      }
      break;
    }

    case Op::Sigmoid: {
      Tensor& ga = grad_of(n.in[0]);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = n.value[i];
        ga[i] += g[i] * y * (1.0 - y);
      }
      break;
    }

    case Op::Tanh: {
      Tensor& ga = grad_of(n.in[0]);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = n.value[i];
        ga[i] += g[i] * (1.0 - y * y);
      }
      break;
    }

    case Op::Concat: {
      std::size_t at = 0;
      for (std::size_t k = 0; k < n.in.size(); ++k) {
        const std::size_t len = nodes_[n.in[k]].value.size();
        if (wants(k)) {
          Tensor& gk = grad_of(n.in[k]);
          for (std::size_t i = 0; i < len; ++i) gk[i] += g[at + i];
        }
        at += len;
      }
      break;
    }

    case Op::Slice: {
      Tensor& ga = grad_of(n.in[0]);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) ga(n.a + i, n.b + j) += g(i, j);
      break;
    }

    case Op::StackColumns:
      for (std::size_t k = 0; k < n.in.size(); ++k) {
        if (!wants(k)) continue;
        Tensor& gk = grad_of(n.in[k]);
        for (std::size_t i = 0; i < g.rows(); ++i) gk[i] += g(i, k);
      }
      break;

    case Op::Softmax:
    case Op::RowSoftmax: {
      Tensor& ga = grad_of(n.in[0]);
      const Tensor& y = n.value;
      const std::size_t rows = n.op == Op::Softmax ? 1 : y.rows();
      const std::size_t cols = y.size() / std::max<std::size_t>(rows, 1);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t base = r * cols;
        double dot = 0.0;
        for (std::size_t j = 0; j < cols; ++j) dot += g[base + j] * y[base + j];
        for (std::size_t j = 0; j < cols; ++j) ga[base + j] += y[base + j] * (g[base + j] - dot);
      }
      break;
    }

    case Op::RowNormalize: {
      const Tensor& x = nodes_[n.in[0]].value;
      const Tensor& y = n.value;
      Tensor& ga = grad_of(n.in[0]);
      for (std::size_t r = 0; r < y.rows(); ++r) {
        double total = 0.0;
        double dot = 0.0;
        for (std::size_t j = 0; j < y.cols(); ++j) {
          total += x(r, j) + n.scalar;
          dot += g(r, j) * y(r, j);
        }
        for (std::size_t j = 0; j < y.cols(); ++j) ga(r, j) += (g(r, j) - dot) / total;
      }
      break;
    }

    case Op::PairwiseSum: {
      double all = 0.0;
      if (wants(0)) {
        Tensor& gu = grad_of(n.in[0]);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < g.cols(); ++j) gu[i] += g(i, j);
      }
      if (wants(1)) {
        Tensor& gv = grad_of(n.in[1]);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < g.cols(); ++j) gv[j] += g(i, j);
      }
      if (wants(2)) {
        for (std::size_t i = 0; i < g.size(); ++i) all += g[i];
        grad_of(n.in[2])[0] += all;
      }
      break;
    }

    case Op::NegLogPick: {
      const Tensor& p = nodes_[n.in[0]].value;
      grad_of(n.in[0])[n.a] -= g[0] / p[n.a];
      break;
    }
  }
}

}  // namespace treentail
