#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "fixtures.hpp"
#include "treentail/error.hpp"
#include "treentail/parallel.hpp"
#include "treentail/toy.hpp"

using namespace treentail;

namespace {

struct Batch {
  std::vector<ExamplePair> data;
  std::vector<std::size_t> indices;
  std::vector<std::uint64_t> seeds;
  BatchRequest request(bool dual, double rate) const { return {data, indices, seeds, dual, rate}; }
};

Batch make_batch(std::size_t n) {
  Batch b{generate_toy(21, n), {}, {}};
  b.indices.resize(n);
  std::iota(b.indices.rbegin(), b.indices.rend(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) b.seeds.push_back(1000 + 7 * i);
  return b;
}

double max_gap(const GradientSet& a, const GradientSet& b) {
  double gap = 0.0;
  for (std::size_t s = 0; s < kSlotCount; ++s)
    for (std::size_t i = 0; i < a.dense[s].size(); ++i)
      gap = std::max(gap, std::abs(a.dense[s][i] - b.dense_at(static_cast<Slot>(s), i)));
  for (const auto& [row, t] : a.embedding_rows)
    for (std::size_t j = 0; j < t.size(); ++j) gap = std::max(gap, std::abs(t[j] - b.embedding_at(row, j)));
  return gap;
}

}  // namespace

TEST_CASE("worker count follows the environment") {
  setenv("TREENTAIL_THREADS", "3", 1);
  CHECK(worker_threads() == 3);
  setenv("TREENTAIL_THREADS", "0", 1);
  CHECK(worker_threads() >= 1);
  setenv("TREENTAIL_THREADS", "4", 1);
}

TEST_CASE("ordered reduction is bit-identical to the serial kernel") {
  setenv("TREENTAIL_THREADS", "4", 1);
  const auto batch = make_batch(13);
  const Model m = fixture::random_model(5, 4, 3, collect_tokens(batch.data), 3, 0.4);
  for (bool dual : {true, false}) {
    const auto serial = batch_gradient_serial(m, batch.request(dual, 0.2));
    const auto parallel = batch_gradient_parallel(m, batch.request(dual, 0.2), Reduction::Ordered);
    CHECK(serial.loss_sum == parallel.loss_sum);
    CHECK(serial.correct == parallel.correct);
    CHECK(serial.gradient.dense == parallel.gradient.dense);
    CHECK(serial.gradient.embedding_rows == parallel.gradient.embedding_rows);
  }
}

TEST_CASE("unordered reduction agrees to rounding") {
  setenv("TREENTAIL_THREADS", "4", 1);
  const auto batch = make_batch(17);
  const Model m = fixture::random_model(5, 4, 3, collect_tokens(batch.data), 4, 0.4);
  const auto serial = batch_gradient_serial(m, batch.request(true, 0.0));
  const auto loose = batch_gradient_parallel(m, batch.request(true, 0.0), Reduction::Unordered);
  CHECK(std::abs(serial.loss_sum - loose.loss_sum) < 1e-12);
  CHECK(max_gap(serial.gradient, loose.gradient) < 1e-12);
  CHECK(max_gap(loose.gradient, serial.gradient) < 1e-12);
}

TEST_CASE("the serial batch is the sum of single-example gradients") {
  const auto batch = make_batch(5);
  const Model m = fixture::random_model(4, 3, 3, collect_tokens(batch.data), 5, 0.4);
  GradientSet total;
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.indices.size(); ++i) {
    const auto one = example_gradient(m, batch.data[batch.indices[i]], true, 0.2, batch.seeds[i]);
    total.add(one.gradient);
    loss += one.loss_sum;
  }
  const auto serial = batch_gradient_serial(m, batch.request(true, 0.2));
  CHECK(serial.loss_sum == loss);
  CHECK(max_gap(serial.gradient, total) == 0.0);
}

TEST_CASE("parallel prediction equals serial prediction") {
  setenv("TREENTAIL_THREADS", "4", 1);
  const auto data = generate_toy(22, 25);
  const Model m = fixture::random_model(5, 4, 3, collect_tokens(data), 6, 0.5);
  CHECK(predict_all_serial(m, data) == predict_all_parallel(m, data));
}

TEST_CASE("errors inside workers surface to the caller") {
  setenv("TREENTAIL_THREADS", "4", 1);
  auto batch = make_batch(6);
  batch.data[2].gold.reset();
  const Model m = fixture::random_model(3, 3, 3, collect_tokens(batch.data), 7);
  CHECK_THROWS_AS(batch_gradient_parallel(m, batch.request(true, 0.0), Reduction::Ordered), Error);
  CHECK_THROWS_AS(batch_gradient_serial(m, batch.request(true, 0.0)), Error);
}
