#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string_view>

#include "treentail/embeddings.hpp"
#include "treentail/tensor.hpp"

namespace treentail {

// Features the 2k -> 1 attention scorer sees for hypothesis node i and premise
// node j. Concat is [h_i; h_j]; Interaction is [h_i * h_j; h_i - h_j].
enum class ScorerFeatures : std::uint8_t { Concat, Interaction };

struct ModelDims {
  std::size_t k = 150;  // meaning representation width
  std::size_t r = 150;  // entailment relation width
  std::size_t d = 300;  // word embedding width
  bool separate_reverse_scorer = false;
  ScorerFeatures scorer = ScorerFeatures::Concat;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// Every non-embedding trainable tensor, in checkpoint declaration order.
enum class Slot : std::uint8_t {
  MeaningWeight,     // 5k x (d + 2k), gate rows stacked as i, f1, f2, o, u
  MeaningBias,       // 5k
  RelationWeight,    // 5r x (2k + 2r)
  RelationBias,      // 5r
  ScorerWeight,      // 1 x 2k, applied to [h_hyp; h_prem]
  ScorerBias,        // 1
  ReverseWeight,     // 1 x 2k, or 0 x 0 when the scorer is shared
  ReverseBias,       // 1, or 0 x 0
  ClassifierWeight,  // 3 x r
  ClassifierBias,    // 3
};

inline constexpr std::size_t kSlotCount = 10;

inline constexpr std::array<std::string_view, kSlotCount> kSlotNames = {
    "meaning.weight", "meaning.bias",    "relation.weight", "relation.bias",   "scorer.weight",
    "scorer.bias",    "reverse.weight",  "reverse.bias",    "classifier.weight", "classifier.bias"};

inline constexpr std::size_t index_of(Slot s) { return static_cast<std::size_t>(s); }

struct ParameterSet {
  ModelDims dims;
  std::array<Tensor, kSlotCount> dense;
  EmbeddingTable embeddings;

  Tensor& operator[](Slot s) { return dense[index_of(s)]; }
  const Tensor& operator[](Slot s) const { return dense[index_of(s)]; }

  // Correctly shaped, all-zero dense tensors around the given embeddings.
  static ParameterSet zeros(const ModelDims& dims, EmbeddingTable embeddings);

  std::size_t dense_scalar_count() const;
};

// Gradients of one loss (or a sum of losses) with respect to a ParameterSet.
// Dense slots left empty are implicitly zero; embedding gradients are kept
// per trainable row.
struct GradientSet {
  std::array<Tensor, kSlotCount> dense;
  std::map<std::size_t, Tensor> embedding_rows;

  Tensor& operator[](Slot s) { return dense[index_of(s)]; }
  const Tensor& operator[](Slot s) const { return dense[index_of(s)]; }

  void add(const GradientSet& other);
  void scale(double factor);
  // Gradient of one scalar, zero when nothing was recorded.
  double dense_at(Slot s, std::size_t i) const;
  double embedding_at(std::size_t row, std::size_t j) const;
};

}  // namespace treentail
