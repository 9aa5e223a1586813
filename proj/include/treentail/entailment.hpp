#pragma once

#include <array>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "treentail/attention.hpp"
#include "treentail/composer.hpp"

namespace treentail {

// Fixed label order; argmax ties resolve toward the earlier label.
enum class Label : std::uint8_t { Contradiction = 0, Neutral = 1, Entailment = 2 };

inline constexpr std::array<std::string_view, 3> kLabelNames = {"contradiction", "neutral", "entailment"};

std::string_view label_name(Label label);
std::optional<Label> parse_label(std::string_view name);

using LabelDistribution = std::array<double, 3>;

Label argmax_label(const LabelDistribution& dist);

struct Model {
  Vocabulary vocab;
  ParameterSet params;
  bool use_dual = true;
};

// Relation states along the hypothesis tree. Node i consumes
// concat(h_i, context_i); leaves get zero child relation states.
// contexts is the (k x |Q|) matrix from attended_context.
std::vector<NodeState> compose_relations(Graph& g, const BinaryTree& hypothesis,
                                         std::span<const NodeState> hypothesis_states, Graph::Id contexts);

// softmax(tanh(W e + b)) over the three labels.
Graph::Id classify(Graph& g, Graph::Id relation);
LabelDistribution classify_value(const ParameterSet& params, const Tensor& relation);

// -log dist[gold]
Graph::Id loss(Graph& g, Graph::Id distribution, Label gold);
double cross_entropy(const LabelDistribution& dist, Label gold);

struct ForwardOptions {
  bool use_dual = true;
  bool keep_reverse = false;  // compute the reverse attention even without dual
  double dropout_rate = 0.0;
  std::mt19937_64* rng = nullptr;
};

struct ForwardTrace {
  std::vector<NodeState> premise;
  std::vector<NodeState> hypothesis;
  std::vector<NodeState> relations;
  Graph::Id scores;
  Graph::Id forward;
  std::optional<Graph::Id> reverse;
  Graph::Id attention;  // the one fed to composition: dual if enabled
  Graph::Id distribution;
};

ForwardTrace run_forward(Graph& g, const Model& model, const BinaryTree& premise, const BinaryTree& hypothesis,
                         const ForwardOptions& options);

struct Prediction {
  Label label;
  LabelDistribution distribution;
  Tensor attention;  // |Q| x |P|, final
  Tensor forward;    // |Q| x |P|
  Tensor reverse;    // |P| x |Q|
  std::vector<Tensor> relations;  // e_i per hypothesis node
};

// Inference forward pass with dropout off.
Prediction predict(const Model& model, const BinaryTree& premise, const BinaryTree& hypothesis, bool use_dual);

}  // namespace treentail
