#pragma once

#include <random>
#include <vector>

#include "treentail/graph.hpp"
#include "treentail/treebank.hpp"

namespace treentail {

// Output h and memory c of one Tree-LSTM unit, as graph nodes.
struct NodeState {
  Graph::Id h;
  Graph::Id c;
};

// One stacked affine block producing the (i, f1, f2, o, u) pre-activations.
struct LstmBlock {
  Graph::Id weight;
  Graph::Id bias;
  std::size_t width;  // k_out; the block has 5 * width rows

  static LstmBlock meaning(Graph& g);
  static LstmBlock relation(Graph& g);
};

// c = i*u + f1*c_left + f2*c_right, h = o * tanh(c), with every gate
// conditioned on concat(x, h_left, h_right).
NodeState lstm_cell(Graph& g, const LstmBlock& block, Graph::Id x, NodeState left, NodeState right);

// Zero (h, c) pair of the block's width, for the missing children of a leaf.
NodeState zero_state(Graph& g, std::size_t width);

struct EncodeOptions {
  double dropout_rate = 0.0;
  std::mt19937_64* rng = nullptr;  // required when dropout_rate > 0
};

// Bottom-up meaning representations for every node of the tree. Leaves read
// their word vector with zero child states; internal nodes get a zero word.
std::vector<NodeState> encode_tree(Graph& g, const BinaryTree& tree, const Vocabulary& vocab,
                                   const EncodeOptions& options = {});

}  // namespace treentail
