#pragma once

#include <span>
#include <vector>

#include "treentail/composer.hpp"

namespace treentail {

// Added to every raw dual-attention entry before row renormalization.
inline constexpr double kDualFloor = 1e-12;

// Node outputs h as the columns of a (k x n) matrix.
Graph::Id stack_outputs(Graph& g, std::span<const NodeState> states);

// s[i][j] = w . phi(h_i^Q, h_j^P) + b over every node pair of both trees,
// with phi = [h_i; h_j] by default. hyp and prem are (k x |Q|) and (k x |P|)
// output matrices.
Graph::Id score_matrix(Graph& g, Graph::Id hyp, Graph::Id prem, Graph::Id scorer_weight, Graph::Id scorer_bias,
                       ScorerFeatures features = ScorerFeatures::Concat);

// Row-wise softmax over premise nodes: |Q| x |P|.
Graph::Id forward_attention(Graph& g, Graph::Id scores);

// Softmax over hypothesis nodes for each premise node: |P| x |Q|.
Graph::Id reverse_attention(Graph& g, Graph::Id scores);

// Row-renormalized elementwise product fwd[i][j] * rev[j][i].
Graph::Id dual_attention(Graph& g, Graph::Id fwd, Graph::Id rev);

// (k x |Q|) matrix whose column i is sum_j a[i][j] h_j^P.
Graph::Id attended_context(Graph& g, Graph::Id attention, Graph::Id prem);

// Expectation of binary one-per-row alignment matrices under a distribution.
Tensor mix_alignments(std::span<const Tensor> alignments, std::span<const double> probs);

// Shannon entropy (nats) of each row.
std::vector<double> row_entropy(const Tensor& attention);

}  // namespace treentail
