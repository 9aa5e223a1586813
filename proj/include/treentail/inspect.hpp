#pragma once

#include <string>
#include <vector>

#include "treentail/dataset.hpp"
#include "treentail/entailment.hpp"

namespace treentail {

inline constexpr int kInspectionVersion = 1;

struct InspectedNode {
  NodeId id;
  bool leaf;
  std::size_t first_leaf;
  std::size_t last_leaf;
  std::string text;  // serialized subtree
};

struct InspectionRecord {
  bool dual = true;
  Label label = Label::Contradiction;
  LabelDistribution distribution{};
  std::vector<InspectedNode> premise;
  std::vector<InspectedNode> hypothesis;
  Tensor attention;  // final, |Q| x |P|
  Tensor forward;    // |Q| x |P|
  Tensor reverse;    // |P| x |Q|
  // Root classifier applied to every hypothesis node's relation vector.
  // Diagnostic only: training supervises the root alone.
  Tensor relation_confidence;  // |Q| x 3
};

InspectionRecord inspect(const Model& model, const ExamplePair& pair);

// Versioned, line-oriented text. Numbers use round-trip precision.
std::string format_inspection(const InspectionRecord& record);

// Binary 8-bit PGM, one pixel per entry: 0 maps to white, each row's maximum
// to black.
std::string attention_pgm(const Tensor& attention);

}  // namespace treentail
