#include "treentail/composer.hpp"

#include <array>

#include "treentail/trainer.hpp"

namespace treentail {

LstmBlock LstmBlock::meaning(Graph& g) {
  return {g.parameter(Slot::MeaningWeight), g.parameter(Slot::MeaningBias), g.params().dims.k};
}

LstmBlock LstmBlock::relation(Graph& g) {
  return {g.parameter(Slot::RelationWeight), g.parameter(Slot::RelationBias), g.params().dims.r};
}

NodeState lstm_cell(Graph& g, const LstmBlock& block, Graph::Id x, NodeState left, NodeState right) {
  const std::size_t k = block.width;
  const std::array<Graph::Id, 3> parts{x, left.h, right.h};
  const auto z = g.affine(block.weight, block.bias, g.concat(parts));
  const auto input_gate = g.sigmoid(g.slice_rows(z, 0, k));
  const auto forget_left = g.sigmoid(g.slice_rows(z, k, k));
  const auto forget_right = g.sigmoid(g.slice_rows(z, 2 * k, k));
  const auto output_gate = g.sigmoid(g.slice_rows(z, 3 * k, k));
  const auto update = g.tanh(g.slice_rows(z, 4 * k, k));

  const auto c = g.add(g.add(g.hadamard(input_gate, update), g.hadamard(forget_left, left.c)),
                       g.hadamard(forget_right, right.c));
  const auto h = g.hadamard(output_gate, g.tanh(c));
  return {h, c};
}

NodeState zero_state(Graph& g, std::size_t width) {
  const auto z = g.input(Tensor(width, 1));
  return {z, z};
}

std::vector<NodeState> encode_tree(Graph& g, const BinaryTree& tree, const Vocabulary& vocab,
                                   const EncodeOptions& options) {
  const auto block = LstmBlock::meaning(g);
  const std::size_t d = g.params().dims.d;
  const NodeState zeros = zero_state(g, block.width);
  const auto no_word = g.input(Tensor(d, 1));

  std::vector<NodeState> states(tree.size());
  for (NodeId id : post_order(tree)) {
    const auto& node = tree.node(id);
    if (node.is_leaf()) {
      auto x = g.embedding(vocab, vocab.resolve(node.token));
      if (options.dropout_rate > 0.0)
        x = g.hadamard(x, g.input(dropout_mask(d, options.dropout_rate, *options.rng)));
      states[id] = lstm_cell(g, block, x, zeros, zeros);
    } else {
      states[id] = lstm_cell(g, block, no_word, states[node.left], states[node.right]);
    }
  }
  return states;
}

}  // namespace treentail
