#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treentail/dataset.hpp"

namespace treentail {

// Closed vocabulary behind the synthetic entailment set. Sentences have the
// shape "the [adjective] noun is verb [near the noun]".
struct ToyLexicon {
  struct Category {
    std::string hypernym;
    std::vector<std::string> members;
  };
  std::vector<Category> categories;
  std::vector<std::string> adjectives;
  std::vector<std::pair<std::string, std::string>> antonyms;  // verb pairs

  static const ToyLexicon& standard();
};

// Balanced three-class set (class counts differ by at most one), left-branching
// trees, deterministic per seed. Entailment comes from detail drop or
// hypernym substitution, contradiction from swapping the verb for its
// antonym, neutral from a detail the premise lacks (an adjective, or a
// specific noun for a hypernym subject). About a quarter of premises carry a
// "near the X" tail.
std::vector<ExamplePair> generate_toy(std::uint64_t seed, std::size_t n);

// Same rules, but every premise ends in a "near the X" distractor whose noun
// is related to the hypothesis subject.
std::vector<ExamplePair> generate_toy_distractors(std::uint64_t seed, std::size_t n);

}  // namespace treentail
