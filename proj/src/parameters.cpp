#include "treentail/parameters.hpp"

namespace treentail {

ParameterSet ParameterSet::zeros(const ModelDims& dims, EmbeddingTable embeddings) {
  require_shape(dims.k > 0 && dims.r > 0 && dims.d > 0, "model widths must be positive");
  require_shape(embeddings.dim == dims.d, "embedding width differs from d");
  ParameterSet p;
  p.dims = dims;
  const auto k = dims.k, r = dims.r, d = dims.d;
  p[Slot::MeaningWeight] = Tensor(5 * k, d + 2 * k);
  p[Slot::MeaningBias] = Tensor(5 * k, 1);
  p[Slot::RelationWeight] = Tensor(5 * r, 2 * k + 2 * r);
  p[Slot::RelationBias] = Tensor(5 * r, 1);
  p[Slot::ScorerWeight] = Tensor(1, 2 * k);
  p[Slot::ScorerBias] = Tensor(1, 1);
  if (dims.separate_reverse_scorer) {
    p[Slot::ReverseWeight] = Tensor(1, 2 * k);
    p[Slot::ReverseBias] = Tensor(1, 1);
  }
  p[Slot::ClassifierWeight] = Tensor(3, r);
  p[Slot::ClassifierBias] = Tensor(3, 1);
  p.embeddings = std::move(embeddings);
  return p;
}

std::size_t ParameterSet::dense_scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : dense) n += t.size();
  return n;
}

void GradientSet::add(const GradientSet& other) {
  for (std::size_t s = 0; s < kSlotCount; ++s) {
    if (other.dense[s].empty()) continue;
    if (dense[s].empty())
      dense[s] = other.dense[s];
    else
      dense[s] += other.dense[s];
  }
  for (const auto& [row, g] : other.embedding_rows) {
    auto [it, inserted] = embedding_rows.try_emplace(row, g);
    if (!inserted) it->second += g;
  }
}

void GradientSet::scale(double factor) {
  for (auto& t : dense) t *= factor;
  for (auto& [row, g] : embedding_rows) g *= factor;
}

double GradientSet::dense_at(Slot s, std::size_t i) const {
  const auto& t = dense[index_of(s)];
  return t.empty() ? 0.0 : t[i];
}

double GradientSet::embedding_at(std::size_t row, std::size_t j) const {
  auto it = embedding_rows.find(row);
  return it == embedding_rows.end() ? 0.0 : it->second[j];
}

}  // namespace treentail
