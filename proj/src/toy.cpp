#include "treentail/toy.hpp"

#include <algorithm>
#include <random>

#include "treentail/error.hpp"

namespace treentail {

namespace {

struct Clause {
  std::string adjective;  // may be empty
  std::string noun;
  std::string verb;
};

std::vector<std::string> clause_tokens(const Clause& c) {
  std::vector<std::string> out{"the"};
  if (!c.adjective.empty()) out.push_back(c.adjective);
  out.push_back(c.noun);
  out.push_back("is");
  out.push_back(c.verb);
  return out;
}

class ToyGenerator {
 public:
  explicit ToyGenerator(std::uint64_t seed) : rng_(seed) {}

  ExamplePair make(Label label, bool with_tail) {
    const auto& lex = ToyLexicon::standard();
    const auto& cat = lex.categories[pick(lex.categories.size())];
    const auto& pair = lex.antonyms[pick(lex.antonyms.size())];

    Clause premise;
    bool general_subject = chance(0.25);
    bool bare = chance(0.5);
    // A neutral hypothesis needs a detail the premise lacks.
    if (label == Label::Neutral && !general_subject) bare = true;
    premise.noun = general_subject ? cat.hypernym : cat.members[pick(cat.members.size())];
    if (!bare) premise.adjective = lex.adjectives[pick(lex.adjectives.size())];
    premise.verb = chance(0.5) ? pair.first : pair.second;

    Clause hyp = premise;
    switch (label) {
      case Label::Entailment:
        // Generalize: drop the adjective and/or climb to the hypernym.
        if (chance(0.5)) hyp.adjective.clear();
        if (!general_subject && chance(0.5)) hyp.noun = cat.hypernym;
        break;
      case Label::Neutral:
        if (general_subject && (!bare || chance(0.5)))
          hyp.noun = cat.members[pick(cat.members.size())];
        else
          hyp.adjective = lex.adjectives[pick(lex.adjectives.size())];
        break;
      case Label::Contradiction:
        hyp.verb = premise.verb == pair.first ? pair.second : pair.first;
        break;
    }

    auto premise_tokens = clause_tokens(premise);
    if (with_tail) {
      premise_tokens.push_back("near");
      premise_tokens.push_back("the");
      premise_tokens.push_back(distractor(cat, premise.noun));
    }
    return ExamplePair{left_branching(premise_tokens), left_branching(clause_tokens(hyp)), label};
  }

  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  // Another member of the subject's category, or its hypernym.
  std::string distractor(const ToyLexicon::Category& cat, const std::string& subject) {
    std::vector<std::string> options;
    if (subject != cat.hypernym) options.push_back(cat.hypernym);
    for (const auto& m : cat.members)
      if (m != subject) options.push_back(m);
    return options[pick(options.size())];
  }

  std::mt19937_64 rng_;
};

std::vector<ExamplePair> generate(std::uint64_t seed, std::size_t n, double tail_rate) {
  if (n < 3) throw Error(Errc::EmptyDataset, "toy set needs at least 3 examples");
  ToyGenerator gen(seed);
  std::vector<ExamplePair> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool tail = tail_rate >= 1.0 || gen.chance(tail_rate);
    out.push_back(gen.make(static_cast<Label>(i % 3), tail));
  }
  std::shuffle(out.begin(), out.end(), gen.rng());
  return out;
}

}  // namespace

const ToyLexicon& ToyLexicon::standard() {
  static const ToyLexicon lex{
      {{"person", {"man", "woman", "boy", "girl"}}, {"animal", {"dog", "cat", "horse", "bird"}}},
      {"young", "old", "small", "tall", "happy", "wet"},
      {{"sitting", "standing"}, {"sleeping", "running"}, {"laughing", "crying"}, {"smiling", "frowning"}},
  };
  return lex;
}

std::vector<ExamplePair> generate_toy(std::uint64_t seed, std::size_t n) { return generate(seed, n, 0.25); }

std::vector<ExamplePair> generate_toy_distractors(std::uint64_t seed, std::size_t n) {
  return generate(seed, n, 1.0);
}

}  // namespace treentail
