#pragma once

// Small model builders shared by the tests.

#include <random>
#include <string>
#include <vector>

#include "treentail/entailment.hpp"
#include "treentail/trainer.hpp"

namespace fixture {

// A registered vocabulary over tokens (all trainable) with every dense and
// embedding scalar uniform in [-range, range].
inline treentail::Model random_model(std::size_t k, std::size_t r, std::size_t d,
                                     const std::vector<std::string>& tokens, std::uint64_t seed,
                                     double range = 0.5,
                                     treentail::ScorerFeatures scorer = treentail::ScorerFeatures::Concat) {
  using namespace treentail;
  std::mt19937_64 rng(seed);
  auto pv = empty_pretrained(d);
  register_oov(pv.vocab, pv.table, tokens, rng);
  Model m{std::move(pv.vocab), init_parameters({k, r, d, false, scorer}, std::move(pv.table), rng), true};
  std::uniform_real_distribution<double> u(-range, range);
  for (auto& t : m.params.dense)
    for (auto& x : t.data()) x = u(rng);
  for (auto& x : m.params.embeddings.trainable.data()) x = u(rng);
  return m;
}

inline treentail::Model zero_model(std::size_t k, std::size_t r, std::size_t d,
                                   const std::vector<std::string>& tokens) {
  auto m = random_model(k, r, d, tokens, 0);
  for (auto& t : m.params.dense) t.fill(0.0);
  m.params.embeddings.trainable.fill(0.0);
  return m;
}

inline std::vector<std::string> words() {
  return {"the", "a", "dog", "cat", "man", "is", "sitting", "standing", "old", "young", "near"};
}

}  // namespace fixture
