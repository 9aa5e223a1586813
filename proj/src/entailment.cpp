#include "treentail/entailment.hpp"

#include <cmath>

#include "treentail/error.hpp"

namespace treentail {

std::string_view label_name(Label label) { return kLabelNames[static_cast<std::size_t>(label)]; }

std::optional<Label> parse_label(std::string_view name) {
  for (std::size_t i = 0; i < kLabelNames.size(); ++i)
    if (kLabelNames[i] == name) return static_cast<Label>(i);
  return std::nullopt;
}

Label argmax_label(const LabelDistribution& dist) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < dist.size(); ++i)
    if (dist[i] > dist[best]) best = i;
  return static_cast<Label>(best);
}

std::vector<NodeState> compose_relations(Graph& g, const BinaryTree& hypothesis,
                                         std::span<const NodeState> hypothesis_states, Graph::Id contexts) {
  require_shape(hypothesis_states.size() == hypothesis.size() && g.value(contexts).cols() == hypothesis.size(),
                "relation composition over mismatched hypothesis states");
  const auto block = LstmBlock::relation(g);
  const NodeState zeros = zero_state(g, block.width);
  std::vector<NodeState> relations(hypothesis.size());
  for (NodeId id : post_order(hypothesis)) {
    const std::array<Graph::Id, 2> parts{hypothesis_states[id].h, g.column(contexts, id)};
    const auto x = g.concat(parts);
    const auto& node = hypothesis.node(id);
    relations[id] = node.is_leaf() ? lstm_cell(g, block, x, zeros, zeros)
                                   : lstm_cell(g, block, x, relations[node.left], relations[node.right]);
  }
  return relations;
}

Graph::Id classify(Graph& g, Graph::Id relation) {
  const auto logits = g.affine(g.parameter(Slot::ClassifierWeight), g.parameter(Slot::ClassifierBias), relation);
  return g.softmax(g.tanh(logits));
}

LabelDistribution classify_value(const ParameterSet& params, const Tensor& relation) {
  Tensor logits = apply(AffineMap{params[Slot::ClassifierWeight], params[Slot::ClassifierBias]}, relation);
  for (auto& x : logits.data()) x = std::tanh(x);
  const Tensor p = softmax(logits);
  return {p[0], p[1], p[2]};
}

Graph::Id loss(Graph& g, Graph::Id distribution, Label gold) {
  const auto index = static_cast<std::size_t>(gold);
  if (index >= kLabelNames.size()) throw Error(Errc::InvalidLabel, "label index " + std::to_string(index));
  return g.neg_log_pick(distribution, index);
}

double cross_entropy(const LabelDistribution& dist, Label gold) {
  const auto index = static_cast<std::size_t>(gold);
  if (index >= dist.size()) throw Error(Errc::InvalidLabel, "label index " + std::to_string(index));
  return -std::log(dist[index]);
}

ForwardTrace run_forward(Graph& g, const Model& model, const BinaryTree& premise, const BinaryTree& hypothesis,
                         const ForwardOptions& options) {
  ForwardTrace t;
  const EncodeOptions enc{options.dropout_rate, options.rng};
  t.premise = encode_tree(g, premise, model.vocab, enc);
  t.hypothesis = encode_tree(g, hypothesis, model.vocab, enc);

  const auto prem = stack_outputs(g, t.premise);
  const auto hyp = stack_outputs(g, t.hypothesis);
  const auto features = model.params.dims.scorer;
  t.scores = score_matrix(g, hyp, prem, g.parameter(Slot::ScorerWeight), g.parameter(Slot::ScorerBias), features);
  t.forward = forward_attention(g, t.scores);
  t.attention = t.forward;

  if (options.use_dual || options.keep_reverse) {
    auto reverse_scores = t.scores;
    if (model.params.dims.separate_reverse_scorer)
      reverse_scores =
          score_matrix(g, hyp, prem, g.parameter(Slot::ReverseWeight), g.parameter(Slot::ReverseBias), features);
    t.reverse = reverse_attention(g, reverse_scores);
    if (options.use_dual) t.attention = dual_attention(g, t.forward, *t.reverse);
  }

  const auto contexts = attended_context(g, t.attention, prem);
  t.relations = compose_relations(g, hypothesis, t.hypothesis, contexts);
  t.distribution = classify(g, t.relations[hypothesis.root()].h);
  return t;
}

Prediction predict(const Model& model, const BinaryTree& premise, const BinaryTree& hypothesis, bool use_dual) {
  Graph g(model.params);
  ForwardOptions options;
  options.use_dual = use_dual;
  options.keep_reverse = true;
  const auto t = run_forward(g, model, premise, hypothesis, options);

  Prediction p;
  const Tensor& dist = g.value(t.distribution);
  p.distribution = {dist[0], dist[1], dist[2]};
  p.label = argmax_label(p.distribution);
  p.attention = g.value(t.attention);
  p.forward = g.value(t.forward);
  p.reverse = g.value(*t.reverse);
  p.relations.reserve(t.relations.size());
  for (const auto& s : t.relations) p.relations.push_back(g.value(s.h));
  return p;
}

}  // namespace treentail
