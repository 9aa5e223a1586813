#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "treentail/dataset.hpp"
#include "treentail/entailment.hpp"
#include "treentail/embeddings.hpp"
#include "treentail/parameters.hpp"

namespace treentail {

enum class Precision : std::uint8_t { Double, Single };

struct TrainConfig {
  std::size_t k = 150;
  std::size_t r = 150;
  std::size_t d = 300;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t batch_size = 32;
  double dropout_rate = 0.2;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  bool use_dual = true;
  bool separate_reverse_scorer = false;
  ScorerFeatures scorer = ScorerFeatures::Concat;
  Precision precision = Precision::Double;
  bool deterministic = true;

  ModelDims dims() const { return {k, r, d, separate_reverse_scorer, scorer}; }
  void validate() const;
};

inline constexpr double kInitRange = 0.05;

// Draws every dense parameter and every trainable embedding row i.i.d. from
// uniform[-0.05, 0.05]. Frozen rows are untouched.
ParameterSet init_parameters(const ModelDims& dims, EmbeddingTable embeddings, std::mt19937_64& rng);

// Builds the vocabulary over pretrained vectors plus the training-set OOV
// tokens and initializes a fresh model.
Model build_model(const TrainConfig& config, PretrainedVectors pretrained, std::span<const ExamplePair> training);

enum class DropoutMode : std::uint8_t { Train, Eval };

// Inverted dropout: each component is zeroed with probability rate and the
// survivors are scaled by 1 / (1 - rate).
Tensor dropout_mask(std::size_t n, double rate, std::mt19937_64& rng);
Tensor dropout(const Tensor& v, double rate, DropoutMode mode, std::mt19937_64& rng);

struct OptimizerState {
  std::array<Tensor, kSlotCount> first;
  std::array<Tensor, kSlotCount> second;
  Tensor embed_first;
  Tensor embed_second;
  std::uint64_t step = 0;

  static OptimizerState for_params(const ParameterSet& params);
};

// Bias-corrected Adam over dense slots and trainable embedding rows. Frozen
// embeddings are never touched.
void adam_step(ParameterSet& params, const GradientSet& grads, OptimizerState& state, const TrainConfig& config);

// Rounds every trainable scalar through float.
void round_to_single(ParameterSet& params);

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;      // mean minibatch loss, dropout active
  double train_accuracy = 0.0;  // evaluated after the epoch, dropout off
  std::optional<double> dev_accuracy;
};

struct TrainResult {
  Model model;  // best-dev parameters, or the last epoch without a dev set
  std::vector<EpochMetrics> epochs;
  std::vector<double> step_losses;
  std::size_t best_epoch = 0;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

TrainResult train(Model model, std::span<const ExamplePair> training, std::span<const ExamplePair> dev,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

struct EvalResult {
  double accuracy = 0.0;
  double mean_loss = 0.0;
  std::size_t total = 0;
  std::size_t correct = 0;
  // confusion[gold][predicted] in label order.
  std::array<std::array<std::size_t, 3>, 3> confusion{};
};

EvalResult evaluate(const Model& model, std::span<const ExamplePair> data);

// Trainable scalars outside the word embeddings:
// (d+2k+1)5k + (2k+2r+1)5r + (2k+1)(1 or 2) + 3(r+1).
std::size_t parameter_count(std::size_t k, std::size_t r, std::size_t d, bool shared_reverse_scorer);
std::size_t parameter_count(const ModelDims& dims);

}  // namespace treentail
