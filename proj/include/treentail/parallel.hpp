#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "treentail/dataset.hpp"
#include "treentail/entailment.hpp"

namespace treentail {

// Worker count: TREENTAIL_THREADS when set (and positive), else the OpenMP
// default.
int worker_threads();

// How per-example gradients are combined in the parallel kernel.
enum class Reduction : std::uint8_t {
  Ordered,     // summed in example order; bit-identical to the serial kernel
  Unordered,   // summed as workers finish
};

struct BatchRequest {
  std::span<const ExamplePair> data;
  std::span<const std::size_t> indices;  // examples of this batch
  std::span<const std::uint64_t> seeds;  // dropout seed per batch position
  bool use_dual = true;
  double dropout_rate = 0.0;
};

struct BatchOutcome {
  GradientSet gradient;  // sum over the batch, not yet averaged
  double loss_sum = 0.0;
  std::size_t correct = 0;
};

BatchOutcome example_gradient(const Model& model, const ExamplePair& example, bool use_dual, double dropout_rate,
                              std::uint64_t seed);

// Reference kernel: one example after another.
BatchOutcome batch_gradient_serial(const Model& model, const BatchRequest& request);
BatchOutcome batch_gradient_parallel(const Model& model, const BatchRequest& request, Reduction reduction);

// Label distributions for every example, dropout off.
std::vector<LabelDistribution> predict_all_serial(const Model& model, std::span<const ExamplePair> data);
std::vector<LabelDistribution> predict_all_parallel(const Model& model, std::span<const ExamplePair> data);

}  // namespace treentail
