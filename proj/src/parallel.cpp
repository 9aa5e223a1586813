#include "treentail/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <omp.h>
#include <random>
#include <string>

#include "treentail/error.hpp"

namespace treentail {

namespace {

Label require_gold(const ExamplePair& example) {
  if (!example.gold) throw Error(Errc::InvalidLabel, "training example without a gold label");
  return *example.gold;
}

// Captures the first failure inside a parallel region for rethrow outside it.
class FirstError {
 public:
  void capture() {
#pragma omp critical(treentail_first_error)
    if (!error_) error_ = std::current_exception();
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

LabelDistribution infer(const Model& model, const ExamplePair& ex) {
  Graph g(model.params);
  ForwardOptions options;
  options.use_dual = model.use_dual;
  const auto trace = run_forward(g, model, ex.premise, ex.hypothesis, options);
  const Tensor& dist = g.value(trace.distribution);
  return {dist[0], dist[1], dist[2]};
}

}  // namespace

int worker_threads() {
  if (const char* env = std::getenv("TREENTAIL_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}

BatchOutcome example_gradient(const Model& model, const ExamplePair& example, bool use_dual, double dropout_rate,
                              std::uint64_t seed) {
  const Label gold = require_gold(example);
  std::mt19937_64 rng(seed);
  Graph g(model.params);
  ForwardOptions options;
  options.use_dual = use_dual;
  options.dropout_rate = dropout_rate;
  options.rng = &rng;
  const auto trace = run_forward(g, model, example.premise, example.hypothesis, options);
  const auto objective = loss(g, trace.distribution, gold);

  BatchOutcome out;
  out.loss_sum = g.value(objective)[0];
  const Tensor& dist = g.value(trace.distribution);
  out.correct = argmax_label({dist[0], dist[1], dist[2]}) == gold ? 1 : 0;
  out.gradient = g.backward(objective);
  return out;
}

BatchOutcome batch_gradient_serial(const Model& model, const BatchRequest& request) {
  require_shape(request.indices.size() == request.seeds.size(), "one dropout seed per batch example");
  BatchOutcome total;
  for (std::size_t pos = 0; pos < request.indices.size(); ++pos) {
    auto one = example_gradient(model, request.data[request.indices[pos]], request.use_dual, request.dropout_rate,
                                request.seeds[pos]);
    total.gradient.add(one.gradient);
    total.loss_sum += one.loss_sum;
    total.correct += one.correct;
  }
  return total;
}

BatchOutcome batch_gradient_parallel(const Model& model, const BatchRequest& request, Reduction reduction) {
  require_shape(request.indices.size() == request.seeds.size(), "one dropout seed per batch example");
  const auto n = static_cast<std::int64_t>(request.indices.size());
  BatchOutcome total;
  FirstError failure;

  if (reduction == Reduction::Ordered) {
#pragma omp parallel for ordered schedule(static, 1) num_threads(worker_threads())
    for (std::int64_t pos = 0; pos < n; ++pos) {
      BatchOutcome one;
      bool ok = true;
      try {
        one = example_gradient(model, request.data[request.indices[pos]], request.use_dual, request.dropout_rate,
                               request.seeds[pos]);
      } catch (...) {
        failure.capture();
        ok = false;
      }
#pragma omp ordered
      if (ok) {
        total.gradient.add(one.gradient);
        total.loss_sum += one.loss_sum;
        total.correct += one.correct;
      }
    }
  } else {
#pragma omp parallel num_threads(worker_threads())
    {
      BatchOutcome local;
#pragma omp for schedule(dynamic, 1) nowait
      for (std::int64_t pos = 0; pos < n; ++pos) {
        try {
          auto one = example_gradient(model, request.data[request.indices[pos]], request.use_dual,
                                      request.dropout_rate, request.seeds[pos]);
          local.gradient.add(one.gradient);
          local.loss_sum += one.loss_sum;
          local.correct += one.correct;
        } catch (...) {
          failure.capture();
        }
      }
#pragma omp critical(treentail_reduce)
      {
        total.gradient.add(local.gradient);
        total.loss_sum += local.loss_sum;
        total.correct += local.correct;
      }
    }
  }
  failure.rethrow();
  return total;
}

std::vector<LabelDistribution> predict_all_serial(const Model& model, std::span<const ExamplePair> data) {
  std::vector<LabelDistribution> out;
  out.reserve(data.size());
  for (const auto& ex : data) out.push_back(infer(model, ex));
  return out;
}

std::vector<LabelDistribution> predict_all_parallel(const Model& model, std::span<const ExamplePair> data) {
  std::vector<LabelDistribution> out(data.size());
  FirstError failure;
  const auto n = static_cast<std::int64_t>(data.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(worker_threads())
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = infer(model, data[i]);
    } catch (...) {
      failure.capture();
    }
  }
  failure.rethrow();
  return out;
}

}  // namespace treentail
