#include "treentail/attention.hpp"

#include <cmath>

#include "treentail/error.hpp"

namespace treentail {

Graph::Id stack_outputs(Graph& g, std::span<const NodeState> states) {
  std::vector<Graph::Id> columns;
  columns.reserve(states.size());
  for (const auto& s : states) columns.push_back(s.h);
  return g.stack_columns(columns);
}

Graph::Id score_matrix(Graph& g, Graph::Id hyp, Graph::Id prem, Graph::Id scorer_weight, Graph::Id scorer_bias,
                       ScorerFeatures features) {
  const std::size_t k = g.value(hyp).rows();
  require_shape(g.value(prem).rows() == k && g.value(scorer_weight).rows() == 1 &&
                    g.value(scorer_weight).cols() == 2 * k,
                "scorer " + g.value(scorer_weight).shape_string() + " over node width " + std::to_string(k));
  const auto w_first = g.transpose(g.slice(scorer_weight, 0, 1, 0, k));
  const auto w_second = g.transpose(g.slice(scorer_weight, 0, 1, k, k));
  if (features == ScorerFeatures::Concat) {
    // The affine on [h_i; h_j] splits into a hypothesis part and a premise part.
    const auto u = g.matmul(g.transpose(hyp), w_first);
    const auto v = g.matmul(g.transpose(prem), w_second);
    return g.pairwise_sum(u, v, scorer_bias);
  }
  // w1 . (h_i * h_j) is the bilinear form h_i^T diag(w1) h_j.
  const std::size_t nq = g.value(hyp).cols();
  Tensor ones(1, nq);
  ones.fill(1.0);
  const auto weighted = g.hadamard(hyp, g.matmul(w_first, g.input(std::move(ones))));
  const auto bilinear = g.matmul(g.transpose(weighted), prem);
  Tensor minus_one(1, 1);
  minus_one[0] = -1.0;
  const auto u = g.matmul(g.transpose(hyp), w_second);
  const auto v = g.matmul(g.matmul(g.transpose(prem), w_second), g.input(std::move(minus_one)));
  return g.add(bilinear, g.pairwise_sum(u, v, scorer_bias));
}

Graph::Id forward_attention(Graph& g, Graph::Id scores) { return g.row_softmax(scores); }

Graph::Id reverse_attention(Graph& g, Graph::Id scores) { return g.row_softmax(g.transpose(scores)); }

Graph::Id dual_attention(Graph& g, Graph::Id fwd, Graph::Id rev) {
  const auto& f = g.value(fwd);
  const auto& r = g.value(rev);
  require_shape(f.rows() == r.cols() && f.cols() == r.rows(),
                "dual attention of " + f.shape_string() + " and " + r.shape_string());
  return g.row_normalize(g.hadamard(fwd, g.transpose(rev)), kDualFloor);
}

Graph::Id attended_context(Graph& g, Graph::Id attention, Graph::Id prem) {
  require_shape(g.value(attention).cols() == g.value(prem).cols(),
                "attention " + g.value(attention).shape_string() + " over premise " + g.value(prem).shape_string());
  return g.matmul(prem, g.transpose(attention));
}

Tensor mix_alignments(std::span<const Tensor> alignments, std::span<const double> probs) {
  if (alignments.empty() || alignments.size() != probs.size())
    throw Error(Errc::NotDistribution, "need one probability per alignment");
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw Error(Errc::NotDistribution, "negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(Errc::NotDistribution, "probabilities sum to " + std::to_string(total));

  Tensor out = Tensor::zeros_like(alignments.front());
  for (std::size_t m = 0; m < alignments.size(); ++m) {
    const Tensor& a = alignments[m];
    require_shape(a.same_shape(out), "alignment " + a.shape_string() + " vs " + out.shape_string());
    for (std::size_t i = 0; i < a.rows(); ++i) {
      int ones = 0;
      for (std::size_t j = 0; j < a.cols(); ++j) {
        if (a(i, j) == 1.0)
          ++ones;
        else if (a(i, j) != 0.0)
          throw Error(Errc::NotOnePerRow, "alignment entries must be 0 or 1");
      }
      if (ones != 1) throw Error(Errc::NotOnePerRow, "row " + std::to_string(i) + " has " + std::to_string(ones) + " ones");
    }
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += probs[m] * a[i];
  }
  return out;
}

std::vector<double> row_entropy(const Tensor& attention) {
  std::vector<double> out(attention.rows(), 0.0);
  for (std::size_t i = 0; i < attention.rows(); ++i)
    for (double p : attention.row(i))
      if (p > 0.0) out[i] -= p * std::log(p);
  return out;
}

}  // namespace treentail
