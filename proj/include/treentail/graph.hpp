#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "treentail/parameters.hpp"

namespace treentail {

// Append-only reverse-mode tape for a single example. Insertion order is a
// topological order. Forward values are computed eagerly and kept for the
// backward pass. Not thread-safe; build one graph per example.
class Graph {
 public:
  using Id = std::uint32_t;

  explicit Graph(const ParameterSet& params);

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Leaves.
  Id input(Tensor value);
  Id parameter(Slot slot);
  Id embedding(const Vocabulary& vocab, std::size_t vocab_index);

  // weight * x + bias
  Id affine(Id weight, Id bias, Id x);
  Id matmul(Id a, Id b);
  Id transpose(Id a);
  Id add(Id a, Id b);
  Id hadamard(Id a, Id b);
  Id sigmoid(Id a);
  Id tanh(Id a);
  // Vertical stacking of column vectors.
  Id concat(std::span<const Id> parts);
  Id slice(Id a, std::size_t row, std::size_t rows, std::size_t col, std::size_t cols);
  Id slice_rows(Id v, std::size_t start, std::size_t count) { return slice(v, start, count, 0, 1); }
  Id column(Id m, std::size_t j);
  // Column vectors side by side as a matrix.
  Id stack_columns(std::span<const Id> columns);
  Id softmax(Id v);
  Id row_softmax(Id m);
  // (x_ij + floor) / sum_l (x_il + floor)
  Id row_normalize(Id m, double floor);
  // out_ij = u_i + v_j + bias
  Id pairwise_sum(Id u, Id v, Id bias);
  // -log p[index]
  Id neg_log_pick(Id p, std::size_t index);

  const Tensor& value(Id id) const { return nodes_.at(id).value; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const ParameterSet& params() const noexcept { return params_; }

  // Exact gradients of a scalar node with respect to every parameter leaf and
  // trainable embedding row reached from it.
  GradientSet backward(Id loss);

 private:
  enum class Op : std::uint8_t {
    Input, Parameter, Embedding, Affine, MatMul, Transpose, Add, Hadamard, Sigmoid, Tanh,
    Concat, Slice, StackColumns, Softmax, RowSoftmax, RowNormalize, PairwiseSum, NegLogPick,
  };

  struct Node {
    Op op;
    std::vector<Id> in;
    Tensor value;
    Tensor grad;
    bool needs_grad = false;
    std::size_t a = 0;  // op argument: slot, trainable row, slice origin, pick index
    std::size_t b = 0;
    double scalar = 0.0;
  };

  static std::string_view op_name(Op op);
  Id push(Op op, std::vector<Id> in, Tensor value, std::size_t a = 0, std::size_t b = 0, double scalar = 0.0);
  Tensor& grad_of(Id id);
  void backward_node(const Node& n);

  const ParameterSet& params_;
  std::vector<Node> nodes_;
  std::array<std::optional<Id>, kSlotCount> param_ids_;
  std::unordered_map<std::size_t, Id> embedding_ids_;
};

}  // namespace treentail
