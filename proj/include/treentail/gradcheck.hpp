#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "treentail/entailment.hpp"
#include "treentail/parameters.hpp"

namespace treentail {

// Evaluates a deterministic scalar objective; fills gradients when asked.
using ObjectiveFn = std::function<double(const ParameterSet&, GradientSet*)>;

// Acceptance threshold on the relative error.
inline constexpr double kGradTolerance = 1e-4;

struct ScalarMismatch {
  std::string where;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst;  // "slot[index]" of the worst scalar
  std::size_t checked = 0;
  std::vector<ScalarMismatch> mismatches;  // scalars at or above kGradTolerance
};

// |a - n| / max(1e-8, |a| + |n|)
double relative_error(double analytic, double numeric);

// Central differences over every dense scalar and every trainable embedding
// scalar of params.
GradCheckResult grad_check(const ObjectiveFn& objective, ParameterSet params, double eps);

// Random full bracketing over the given leaves.
BinaryTree random_tree(const std::vector<std::string>& leaves, std::mt19937_64& rng);

struct ModelCheckConfig {
  std::size_t k = 8;
  std::size_t r = 8;
  std::size_t d = 10;
  std::size_t pairs = 20;
  std::size_t min_leaves = 3;
  std::size_t max_leaves = 7;
  double eps = 1e-4;
  std::uint64_t seed = 0;
  bool use_dual = true;
  ScorerFeatures scorer = ScorerFeatures::Concat;
};

struct ModelCheckReport {
  std::vector<GradCheckResult> per_pair;
  double max_relative_error = 0.0;
};

// Finite-difference audit of the full loss (both Tree-LSTM blocks, attention,
// classifier, trainable embeddings) on random tree pairs.
ModelCheckReport full_model_gradcheck(const ModelCheckConfig& config);

}  // namespace treentail
