#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "treentail/attention.hpp"
#include "treentail/error.hpp"

using namespace treentail;

namespace {

ParameterSet scratch() { return ParameterSet::zeros({1, 1, 1}, EmbeddingTable{1, Tensor(0, 1), Tensor(0, 1)}); }

struct Setup {
  Tensor hyp;
  Tensor prem;
  Tensor weight;
  Tensor bias;
};

Setup random_setup(std::mt19937_64& rng, std::size_t k, std::size_t nq, std::size_t np) {
  return {oracle::random_tensor(k, nq, rng, 1.0), oracle::random_tensor(k, np, rng, 1.0),
          oracle::random_tensor(1, 2 * k, rng, 1.0), oracle::random_tensor(1, 1, rng, 1.0)};
}

Tensor scores_of(const Setup& s, ScorerFeatures features = ScorerFeatures::Concat) {
  ParameterSet p = scratch();
  p[Slot::ScorerWeight] = s.weight;
  p[Slot::ScorerBias] = s.bias;
  Graph g(p);
  return g.value(score_matrix(g, g.input(s.hyp), g.input(s.prem), g.parameter(Slot::ScorerWeight),
                              g.parameter(Slot::ScorerBias), features));
}

void check_rows_sum_to_one(const Tensor& a) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double total = 0.0;
    for (double x : a.row(i)) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
      total += x;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

Errc mix_error(const std::vector<Tensor>& a, const std::vector<double>& p) {
  try {
    mix_alignments(a, p);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Io;
}

}  // namespace

TEST_CASE("zero scorer weight gives a constant score matrix") {
  std::mt19937_64 rng(1);
  Setup s = random_setup(rng, 3, 4, 5);
  s.weight.fill(0.0);
  s.bias[0] = -0.75;
  const Tensor scores = scores_of(s);
  CHECK(scores.rows() == 4);
  CHECK(scores.cols() == 5);
  for (double x : scores.data()) CHECK(x == -0.75);
}

TEST_CASE("property: scores match the pairwise oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 1 + trial % 4, nq = 1 + trial % 5, np = 1 + (trial / 5) % 6;
    const Setup s = random_setup(rng, k, nq, np);
    const Tensor scores = scores_of(s);
    for (std::size_t i = 0; i < nq; ++i)
      for (std::size_t j = 0; j < np; ++j) {
        const double expected =
            oracle::pair_score(s.weight, s.bias[0], oracle::column_of(s.hyp, i), oracle::column_of(s.prem, j));
        CHECK(std::abs(scores(i, j) - expected) < 1e-12);
      }
  }
}

TEST_CASE("interaction scorer matches its pairwise oracle") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 1 + trial % 4, nq = 1 + trial % 5, np = 1 + (trial / 3) % 4;
    const Setup s = random_setup(rng, k, nq, np);
    const Tensor scores = scores_of(s, ScorerFeatures::Interaction);
    for (std::size_t i = 0; i < nq; ++i)
      for (std::size_t j = 0; j < np; ++j) {
        double expected = s.bias[0];
        for (std::size_t m = 0; m < k; ++m)
          expected += s.weight[m] * s.hyp(m, i) * s.prem(m, j) + s.weight[k + m] * (s.hyp(m, i) - s.prem(m, j));
        CHECK(std::abs(scores(i, j) - expected) < 1e-12);
      }
  }
}

TEST_CASE("concatenated features give every hypothesis node the same forward row") {
  // w . [h_i; h_j] + b = u_i + v_j + b, so the row softmax forgets u_i.
  std::mt19937_64 rng(4);
  const Setup s = random_setup(rng, 3, 4, 5);
  ParameterSet p = scratch();
  Graph g(p);
  const auto fwd = g.value(forward_attention(g, g.input(scores_of(s))));
  for (std::size_t i = 1; i < fwd.rows(); ++i)
    for (std::size_t j = 0; j < fwd.cols(); ++j) CHECK(std::abs(fwd(i, j) - fwd(0, j)) < 1e-12);

  Graph h(p);
  const auto inter = h.value(forward_attention(h, h.input(scores_of(s, ScorerFeatures::Interaction))));
  double spread = 0.0;
  for (std::size_t j = 0; j < inter.cols(); ++j) spread = std::max(spread, std::abs(inter(1, j) - inter(0, j)));
  CHECK(spread > 1e-3);
}

TEST_CASE("forward, reverse and dual attention examples") {
  ParameterSet p = scratch();
  Graph g(p);
  const auto scores = g.input(Tensor(2, 3, {0.0, std::log(2.0), 0.0, 1.0, 1.0, 1.0}));
  const auto fwd = g.value(forward_attention(g, scores));
  CHECK(fwd(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fwd(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(fwd(1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const auto rev = g.value(reverse_attention(g, scores));
  CHECK(rev.rows() == 3);
  CHECK(rev.cols() == 2);
  CHECK(rev(0, 0) == doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-14));
  check_rows_sum_to_one(rev);

  // fwd row [0, .5, .5] against reverse weights [1, 0, 1] keeps only the last premise node.
  const auto f = g.input(Tensor(1, 3, {0.0, 0.5, 0.5}));
  const auto r = g.input(Tensor(3, 1, {1.0, 0.0, 1.0}));
  const auto dual = g.value(dual_attention(g, f, r));
  CHECK(dual(0, 0) < 1e-11);
  CHECK(dual(0, 1) < 1e-11);
  CHECK(dual(0, 2) == doctest::Approx(1.0).epsilon(1e-11));

  // All-zero products fall back to uniform through the floor.
  const auto zero = g.value(dual_attention(g, g.input(Tensor(1, 2, {1.0, 0.0})), g.input(Tensor(2, 1, {0.0, 1.0}))));
  CHECK(zero(0, 0) == doctest::Approx(0.5));
  CHECK(zero(0, 1) == doctest::Approx(0.5));

  CHECK_THROWS_AS(dual_attention(g, f, g.input(Tensor(1, 3))), Error);
}

TEST_CASE("property: attention rows are distributions and follow the softmax oracle") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t nq = 1 + trial % 6, np = 1 + (trial / 6) % 7;
    const Tensor s = oracle::random_tensor(nq, np, rng, 5.0);
    ParameterSet p = scratch();
    Graph g(p);
    const auto scores = g.input(s);
    const auto fwd = forward_attention(g, scores);
    const auto rev = reverse_attention(g, scores);
    const auto dual = dual_attention(g, fwd, rev);
    check_rows_sum_to_one(g.value(fwd));
    check_rows_sum_to_one(g.value(rev));
    check_rows_sum_to_one(g.value(dual));

    for (std::size_t i = 0; i < nq; ++i) {
      const auto expected = oracle::softmax(oracle::Vec(s.row(i).begin(), s.row(i).end()));
      for (std::size_t j = 0; j < np; ++j) CHECK(std::abs(g.value(fwd)(i, j) - expected[j]) < 1e-12);
    }
    for (std::size_t j = 0; j < np; ++j) {
      const auto expected = oracle::softmax(oracle::column_of(s, j));
      for (std::size_t i = 0; i < nq; ++i) CHECK(std::abs(g.value(rev)(j, i) - expected[i]) < 1e-12);
    }
    for (std::size_t i = 0; i < nq; ++i) {
      double total = 0.0;
      for (std::size_t j = 0; j < np; ++j) total += g.value(fwd)(i, j) * g.value(rev)(j, i) + kDualFloor;
      for (std::size_t j = 0; j < np; ++j) {
        const double raw = g.value(fwd)(i, j) * g.value(rev)(j, i) + kDualFloor;
        CHECK(std::abs(g.value(dual)(i, j) - raw / total) < 1e-12);
      }
    }
  }
}

TEST_CASE("property: permuting premise nodes permutes attention columns") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nq = 2 + trial % 4, np = 2 + trial % 5;
    const Tensor s = oracle::random_tensor(nq, np, rng, 3.0);
    std::vector<std::size_t> perm(np);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Tensor permuted(nq, np);
    for (std::size_t i = 0; i < nq; ++i)
      for (std::size_t j = 0; j < np; ++j) permuted(i, j) = s(i, perm[j]);

    ParameterSet p = scratch();
    Graph g(p);
    const auto a = g.input(s);
    const auto b = g.input(permuted);
    const auto da = g.value(dual_attention(g, forward_attention(g, a), reverse_attention(g, a)));
    const auto db = g.value(dual_attention(g, forward_attention(g, b), reverse_attention(g, b)));
    for (std::size_t i = 0; i < nq; ++i)
      for (std::size_t j = 0; j < np; ++j) CHECK(std::abs(db(i, j) - da(i, perm[j])) < 1e-12);

    Tensor shifted = s;
    for (auto& x : shifted.data()) x += 4.0;
    const auto fs = g.value(forward_attention(g, g.input(shifted)));
    const auto fa = g.value(forward_attention(g, a));
    for (std::size_t i = 0; i < fa.size(); ++i) CHECK(std::abs(fs[i] - fa[i]) < 1e-12);
  }
}

TEST_CASE("attended context is the attention-weighted premise sum") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 1 + trial % 4, nq = 1 + trial % 3, np = 1 + trial % 5;
    const Tensor prem = oracle::random_tensor(k, np, rng, 1.0);
    ParameterSet p = scratch();
    Graph g(p);
    const auto att = forward_attention(g, g.input(oracle::random_tensor(nq, np, rng, 2.0)));
    const auto ctx = g.value(attended_context(g, att, g.input(prem)));
    REQUIRE(ctx.rows() == k);
    REQUIRE(ctx.cols() == nq);
    std::vector<oracle::Vec> columns;
    for (std::size_t j = 0; j < np; ++j) columns.push_back(oracle::column_of(prem, j));
    for (std::size_t i = 0; i < nq; ++i) {
      const auto row = g.value(att).row(i);
      const auto expected = oracle::weighted_sum(oracle::Vec(row.begin(), row.end()), columns);
      for (std::size_t m = 0; m < k; ++m) CHECK(std::abs(ctx(m, i) - expected[m]) < 1e-12);
    }
  }

  ParameterSet p = scratch();
  Graph g(p);
  const auto onehot = g.input(Tensor(1, 2, {0.0, 1.0}));
  const auto prem = g.input(Tensor(2, 2, {1.0, 2.0, 3.0, 4.0}));
  CHECK(g.value(attended_context(g, onehot, prem)) == Tensor::column({2.0, 4.0}));
  CHECK_THROWS_AS(attended_context(g, g.input(Tensor(1, 3)), prem), Error);
}

TEST_CASE("mixing hard alignments") {
  const Tensor a(2, 2, {1, 0, 0, 1});
  const Tensor b(2, 2, {0, 1, 0, 1});
  const Tensor mixed = mix_alignments(std::vector<Tensor>{a, b}, std::vector<double>{5.0 / 6.0, 1.0 / 6.0});
  CHECK(mixed(0, 0) == doctest::Approx(5.0 / 6.0));
  CHECK(mixed(0, 1) == doctest::Approx(1.0 / 6.0));
  CHECK(mixed(1, 0) == 0.0);
  CHECK(mixed(1, 1) == doctest::Approx(1.0));

  CHECK(mix_error({a, b}, {0.5, 0.6}) == Errc::NotDistribution);
  CHECK(mix_error({a, b}, {1.5, -0.5}) == Errc::NotDistribution);
  CHECK(mix_error({a}, {0.5, 0.5}) == Errc::NotDistribution);
  CHECK(mix_error({}, {}) == Errc::NotDistribution);
  CHECK(mix_error({Tensor(2, 2, {1, 1, 0, 1})}, {1.0}) == Errc::NotOnePerRow);
  CHECK(mix_error({Tensor(2, 2, {0, 0, 0, 1})}, {1.0}) == Errc::NotOnePerRow);
  CHECK(mix_error({Tensor(1, 2, {0.5, 0.5})}, {1.0}) == Errc::NotOnePerRow);
}

TEST_CASE("property: mixtures are row-stochastic and equal the sampled average in expectation") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t rows = 1 + trial % 4, cols = 1 + trial % 5, count = 1 + trial % 4;
    std::vector<Tensor> alignments;
    for (std::size_t m = 0; m < count; ++m) {
      Tensor t(rows, cols);
      for (std::size_t i = 0; i < rows; ++i) t(i, rng() % cols) = 1.0;
      alignments.push_back(t);
    }
    std::vector<double> probs(count);
    for (auto& x : probs) x = 0.1 + static_cast<double>(rng() % 100);
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (auto& x : probs) x /= total;
    const Tensor mixed = mix_alignments(alignments, probs);
    check_rows_sum_to_one(mixed);

    // Monte Carlo estimate of the expected alignment.
    std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
    Tensor average(rows, cols);
    const int draws = 20000;
    for (int d = 0; d < draws; ++d) average += alignments[pick(rng)];
    average *= 1.0 / draws;
    for (std::size_t i = 0; i < mixed.size(); ++i) CHECK(std::abs(average[i] - mixed[i]) < 0.02);
  }
}

TEST_CASE("row entropy") {
  const auto h = row_entropy(Tensor(2, 4, {0.25, 0.25, 0.25, 0.25, 0, 1, 0, 0}));
  CHECK(h[0] == doctest::Approx(std::log(4.0)));
  CHECK(h[1] == 0.0);
}
