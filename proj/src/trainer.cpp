#include "treentail/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "treentail/error.hpp"
#include "treentail/parallel.hpp"

namespace treentail {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void adam_update(Tensor& param, const Tensor& grad, Tensor& first, Tensor& second, const TrainConfig& c,
                 double correction1, double correction2) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad.empty() ? 0.0 : grad[i];
    first[i] = c.beta1 * first[i] + (1.0 - c.beta1) * g;
    second[i] = c.beta2 * second[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = first[i] / correction1;
    const double v_hat = second[i] / correction2;
    param[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.adam_epsilon);
  }
}

void round_tensor(Tensor& t) {
  for (auto& x : t.data()) x = static_cast<double>(static_cast<float>(x));
}

}  // namespace

void TrainConfig::validate() const {
  auto in_unit = [](double x) { return x > 0.0 && x < 1.0; };
  if (k == 0 || r == 0 || d == 0 || batch_size == 0)
    throw Error(Errc::ShapeMismatch, "widths and batch size must be at least 1");
  if (!in_unit(learning_rate) || !in_unit(beta1) || !in_unit(beta2) || dropout_rate < 0.0 || dropout_rate >= 1.0)
    throw Error(Errc::ShapeMismatch, "rates must lie in (0, 1); dropout in [0, 1)");
}

ParameterSet init_parameters(const ModelDims& dims, EmbeddingTable embeddings, std::mt19937_64& rng) {
  ParameterSet p = ParameterSet::zeros(dims, std::move(embeddings));
  std::uniform_real_distribution<double> init(-kInitRange, kInitRange);
  for (auto& t : p.dense)
    for (auto& x : t.data()) x = init(rng);
  for (auto& x : p.embeddings.trainable.data()) x = init(rng);
  return p;
}

Model build_model(const TrainConfig& config, PretrainedVectors pretrained, std::span<const ExamplePair> training) {
  config.validate();
  if (pretrained.table.dim != config.d)
    throw Error(Errc::InconsistentDimension, "embeddings have width " + std::to_string(pretrained.table.dim) +
                                                 " but d = " + std::to_string(config.d));
  std::mt19937_64 rng(config.seed);
  std::vector<ExamplePair> copy(training.begin(), training.end());
  const auto tokens = collect_tokens(copy);
  register_oov(pretrained.vocab, pretrained.table, tokens, rng);

  Model model;
  model.vocab = std::move(pretrained.vocab);
  model.params = init_parameters(config.dims(), std::move(pretrained.table), rng);
  model.use_dual = config.use_dual;
  if (config.precision == Precision::Single) {
    round_to_single(model.params);
    round_tensor(model.params.embeddings.frozen);
  }
  return model;
}

Tensor dropout_mask(std::size_t n, double rate, std::mt19937_64& rng) {
  Tensor mask(n, 1, 1.0);
  if (rate <= 0.0) return mask;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (auto& m : mask.data()) m = u(rng) < rate ? 0.0 : keep_scale;
  return mask;
}

Tensor dropout(const Tensor& v, double rate, DropoutMode mode, std::mt19937_64& rng) {
  if (mode == DropoutMode::Eval || rate <= 0.0) return v;
  const Tensor mask = dropout_mask(v.size(), rate, rng);
  Tensor out = v;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return out;
}

OptimizerState OptimizerState::for_params(const ParameterSet& params) {
  OptimizerState s;
  for (std::size_t i = 0; i < kSlotCount; ++i) {
    s.first[i] = Tensor::zeros_like(params.dense[i]);
    s.second[i] = Tensor::zeros_like(params.dense[i]);
  }
  s.embed_first = Tensor::zeros_like(params.embeddings.trainable);
  s.embed_second = Tensor::zeros_like(params.embeddings.trainable);
  return s;
}

void adam_step(ParameterSet& params, const GradientSet& grads, OptimizerState& state, const TrainConfig& config) {
  for (std::size_t i = 0; i < kSlotCount; ++i) {
    const Tensor& g = grads.dense[i];
    require_shape(g.empty() || g.same_shape(params.dense[i]),
                  "gradient " + g.shape_string() + " for " + std::string(kSlotNames[i]));
    require_shape(state.first[i].same_shape(params.dense[i]), "optimizer state does not match parameters");
  }
  Tensor& table = params.embeddings.trainable;
  require_shape(state.embed_first.same_shape(table), "optimizer state does not match embeddings");
  for (const auto& [row, g] : grads.embedding_rows)
    require_shape(row < table.rows() && g.size() == table.cols(), "embedding gradient out of range");

  ++state.step;
  const auto t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < kSlotCount; ++i)
    adam_update(params.dense[i], grads.dense[i], state.first[i], state.second[i], config, correction1, correction2);

  // Rows without a gradient in this batch still decay their moments.
  const std::size_t d = table.cols();
  Tensor row_grad(d, 1);
  for (std::size_t row = 0; row < table.rows(); ++row) {
    auto it = grads.embedding_rows.find(row);
    if (it != grads.embedding_rows.end())
      row_grad = it->second;
    else
      row_grad.fill(0.0);
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t i = row * d + j;
      const double g = row_grad[j];
      state.embed_first[i] = config.beta1 * state.embed_first[i] + (1.0 - config.beta1) * g;
      state.embed_second[i] = config.beta2 * state.embed_second[i] + (1.0 - config.beta2) * g * g;
      table[i] -= config.learning_rate * (state.embed_first[i] / correction1) /
                  (std::sqrt(state.embed_second[i] / correction2) + config.adam_epsilon);
    }
  }
  if (config.precision == Precision::Single) round_to_single(params);
}

void round_to_single(ParameterSet& params) {
  for (auto& t : params.dense) round_tensor(t);
  round_tensor(params.embeddings.trainable);
}

EvalResult evaluate(const Model& model, std::span<const ExamplePair> data) {
  if (data.empty()) throw Error(Errc::EmptyDataset, "nothing to evaluate");
  const auto dists = predict_all_parallel(model, data);
  EvalResult out;
  out.total = data.size();
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data[i].gold) throw Error(Errc::InvalidLabel, "evaluation example without a gold label");
    const Label gold = *data[i].gold;
    const Label guess = argmax_label(dists[i]);
    out.confusion[static_cast<std::size_t>(gold)][static_cast<std::size_t>(guess)] += 1;
    out.correct += gold == guess ? 1 : 0;
    loss_sum += cross_entropy(dists[i], gold);
  }
  out.accuracy = static_cast<double>(out.correct) / static_cast<double>(out.total);
  out.mean_loss = loss_sum / static_cast<double>(out.total);
  return out;
}

TrainResult train(Model model, std::span<const ExamplePair> training, std::span<const ExamplePair> dev,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (training.empty()) throw Error(Errc::EmptyDataset, "no training examples");

  TrainResult result;
  OptimizerState state = OptimizerState::for_params(model.params);
  std::vector<std::size_t> order(training.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::optional<double> best_dev;
  std::optional<ParameterSet> best_params;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::mt19937_64 shuffle_rng(derive_seed(config.seed, epoch, 0x5eed));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - start);
      const std::span<const std::size_t> indices(order.data() + start, count);
      std::vector<std::uint64_t> seeds(count);
      for (std::size_t i = 0; i < count; ++i) seeds[i] = derive_seed(config.seed, epoch, start + i + 1);

      const BatchRequest request{training, indices, seeds, model.use_dual, config.dropout_rate};
      auto outcome = batch_gradient_parallel(model, request,
                                             config.deterministic ? Reduction::Ordered : Reduction::Unordered);
      outcome.gradient.scale(1.0 / static_cast<double>(count));
      adam_step(model.params, outcome.gradient, state, config);

      const double batch_loss = outcome.loss_sum / static_cast<double>(count);
      result.step_losses.push_back(batch_loss);
      epoch_loss += batch_loss;
      ++batches;
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = epoch_loss / static_cast<double>(batches);
    m.train_accuracy = evaluate(model, training).accuracy;
    if (!dev.empty()) {
      m.dev_accuracy = evaluate(model, dev).accuracy;
      if (!best_dev || *m.dev_accuracy > *best_dev) {
        best_dev = m.dev_accuracy;
        best_params = model.params;
        result.best_epoch = epoch;
      }
    } else {
      result.best_epoch = epoch;
    }
    result.epochs.push_back(m);
    if (on_epoch) on_epoch(m);
  }

  if (best_params) model.params = std::move(*best_params);
  result.model = std::move(model);
  return result;
}

std::size_t parameter_count(std::size_t k, std::size_t r, std::size_t d, bool shared_reverse_scorer) {
  const std::size_t meaning = (d + 2 * k + 1) * 5 * k;
  const std::size_t relation = (2 * k + 2 * r + 1) * 5 * r;
  const std::size_t scorers = (2 * k + 1) * (shared_reverse_scorer ? 1 : 2);
  const std::size_t classifier = (r + 1) * 3;
  return meaning + relation + scorers + classifier;
}

std::size_t parameter_count(const ModelDims& dims) {
  return parameter_count(dims.k, dims.r, dims.d, !dims.separate_reverse_scorer);
}

}  // namespace treentail
