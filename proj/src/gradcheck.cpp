#include "treentail/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "treentail/trainer.hpp"

namespace treentail {

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

GradCheckResult grad_check(const ObjectiveFn& objective, ParameterSet params, double eps) {
  GradientSet analytic;
  objective(params, &analytic);

  GradCheckResult result;
  auto probe = [&](double& slot_value, double grad, const std::string& where) {
    const double saved = slot_value;
    slot_value = saved + eps;
    const double up = objective(params, nullptr);
    slot_value = saved - eps;
    const double down = objective(params, nullptr);
    slot_value = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double err = relative_error(grad, numeric);
    ++result.checked;
    if (err >= kGradTolerance) result.mismatches.push_back({where, grad, numeric});
    if (err > result.max_relative_error || result.worst.empty()) {
      result.max_relative_error = err;
      result.worst = where;
    }
  };

  for (std::size_t s = 0; s < kSlotCount; ++s) {
    auto& t = params.dense[s];
    for (std::size_t i = 0; i < t.size(); ++i)
      probe(t[i], analytic.dense_at(static_cast<Slot>(s), i),
            std::string(kSlotNames[s]) + "[" + std::to_string(i) + "]");
  }
  auto& table = params.embeddings.trainable;
  for (std::size_t row = 0; row < table.rows(); ++row)
    for (std::size_t j = 0; j < table.cols(); ++j)
      probe(table(row, j), analytic.embedding_at(row, j),
            "embedding.trainable[" + std::to_string(row) + "," + std::to_string(j) + "]");
  return result;
}

BinaryTree random_tree(const std::vector<std::string>& leaves, std::mt19937_64& rng) {
  std::vector<BinaryTree> forest;
  forest.reserve(leaves.size());
  for (const auto& tok : leaves) forest.push_back(BinaryTree::leaf(tok));
  // Repeatedly join a random adjacent pair; keeps the leaf order.
  while (forest.size() > 1) {
    std::uniform_int_distribution<std::size_t> pick(0, forest.size() - 2);
    const auto i = pick(rng);
    forest[i] = BinaryTree::join(forest[i], forest[i + 1]);
    forest.erase(forest.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  }
  return forest.front();
}

ModelCheckReport full_model_gradcheck(const ModelCheckConfig& config) {
  static const std::vector<std::string> kWords = {"two", "women", "are", "hugging", "one", "another",
                                                  "the", "sleeping", "men", "a", "dog", "runs"};
  ModelCheckReport report;
  for (std::size_t pair = 0; pair < config.pairs; ++pair) {
    std::mt19937_64 rng(config.seed * 1000003ULL + pair);

    // Half of the words get frozen pretrained vectors; the rest become
    // trainable OOV rows.
    PretrainedVectors pre = empty_pretrained(config.d);
    std::vector<double> frozen_values;
    std::normal_distribution<double> gauss(0.0, 0.5);
    for (std::size_t w = 0; w < kWords.size(); w += 2) {
      pre.vocab.add_frozen(kWords[w]);
      for (std::size_t j = 0; j < config.d; ++j) frozen_values.push_back(gauss(rng));
    }
    pre.table.frozen = Tensor(pre.vocab.size(), config.d, std::move(frozen_values));
    register_oov(pre.vocab, pre.table, kWords, rng);

    ModelDims dims{config.k, config.r, config.d, false, config.scorer};
    Model model;
    model.vocab = std::move(pre.vocab);
    model.use_dual = config.use_dual;
    // Wider than the training init so gates leave their linear regime.
    model.params = ParameterSet::zeros(dims, std::move(pre.table));
    std::uniform_real_distribution<double> init(-0.5, 0.5);
    for (auto& t : model.params.dense)
      for (auto& x : t.data()) x = init(rng);
    for (auto& x : model.params.embeddings.trainable.data()) x = init(rng);

    std::uniform_int_distribution<std::size_t> leaf_count(config.min_leaves, config.max_leaves);
    std::uniform_int_distribution<std::size_t> word(0, kWords.size() - 1);
    auto sentence = [&] {
      std::vector<std::string> leaves(leaf_count(rng));
      for (auto& l : leaves) l = kWords[word(rng)];
      return random_tree(leaves, rng);
    };
    const BinaryTree premise = sentence();
    const BinaryTree hypothesis = sentence();
    const auto gold = static_cast<Label>(pair % 3);

    const Vocabulary& vocab = model.vocab;
    const bool dual = config.use_dual;
    ObjectiveFn objective = [&](const ParameterSet& params, GradientSet* grads) {
      Model view{vocab, params, dual};
      Graph g(view.params);
      ForwardOptions options;
      options.use_dual = dual;
      const auto trace = run_forward(g, view, premise, hypothesis, options);
      const auto l = loss(g, trace.distribution, gold);
      if (grads) *grads = g.backward(l);
      return g.value(l)[0];
    };
    auto result = grad_check(objective, model.params, config.eps);
    report.max_relative_error = std::max(report.max_relative_error, result.max_relative_error);
    report.per_pair.push_back(std::move(result));
  }
  return report;
}

}  // namespace treentail
