// Serial vs OpenMP batch kernels on the toy set.
#include <chrono>
#include <cstdio>
#include <numeric>

#include "treentail/parallel.hpp"
#include "treentail/toy.hpp"
#include "treentail/trainer.hpp"

using namespace treentail;
using bench_clock = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& f, int reps) {
  const auto start = bench_clock::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double, std::milli>(bench_clock::now() - start).count() / reps;
}

int main(int argc, char** argv) {
  const std::size_t k = argc > 1 ? std::stoul(argv[1]) : 32;
  const int reps = argc > 2 ? std::stoi(argv[2]) : 5;
  TrainConfig config;
  config.k = k;
  config.r = k;
  const auto data = generate_toy(7, 256);
  const Model model = build_model(config, empty_pretrained(config.d), data);

  std::vector<std::size_t> indices(32);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  std::vector<std::uint64_t> seeds(indices.size());
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{100});
  const BatchRequest request{data, indices, seeds, true, 0.2};

  std::printf("threads %d, k = r = %zu, d = %zu, batch %zu\n", worker_threads(), k, config.d, indices.size());
  const double serial = time_ms([&] { batch_gradient_serial(model, request); }, reps);
  const double ordered = time_ms([&] { batch_gradient_parallel(model, request, Reduction::Ordered); }, reps);
  const double unordered = time_ms([&] { batch_gradient_parallel(model, request, Reduction::Unordered); }, reps);
  std::printf("batch gradient  serial %8.2f ms  parallel/ordered %8.2f ms  parallel/unordered %8.2f ms\n", serial,
              ordered, unordered);

  const double pred_serial = time_ms([&] { predict_all_serial(model, data); }, reps);
  const double pred_parallel = time_ms([&] { predict_all_parallel(model, data); }, reps);
  std::printf("predict %zu pairs  serial %8.2f ms  parallel %8.2f ms\n", data.size(), pred_serial, pred_parallel);
  return 0;
}
