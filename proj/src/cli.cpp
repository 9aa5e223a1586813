#include "treentail/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <unordered_set>

#include <CLI11.hpp>

#include "treentail/checkpoint.hpp"
#include "treentail/error.hpp"
#include "treentail/gradcheck.hpp"
#include "treentail/inspect.hpp"
#include "treentail/toy.hpp"
#include "treentail/trainer.hpp"

namespace treentail::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string data;
  std::string dev;
  std::string out;
  std::string checkpoint;
  std::string embeddings;
  std::string premise;
  std::string hypothesis;
  std::string dual = "on";
  std::string precision = "f64";
  std::size_t k = 150;
  std::size_t r = 150;
  std::size_t d = 300;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  std::size_t n = 600;
  std::size_t pairs = 20;
  std::uint64_t seed = 0;
  double lr = 0.001;
  double dropout = 0.2;
  bool deterministic = false;
  bool distractors = false;
  bool separate_reverse = false;
  std::string scorer = "concat";
};

std::string fmt(double x, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::NonFiniteValue:
    case Errc::NonScalarLoss:
    case Errc::ShapeMismatch:
    case Errc::EmptyVector:
      return kNumericFailure;
    default:
      return kDataError;
  }
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot write " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::vector<ExamplePair> load_labeled(const std::string& path, std::ostream& out, const char* what) {
  auto loaded = load_snli(path);
  out << what << ": " << loaded.pairs.size() << " pairs (" << loaded.skipped << " unlabeled skipped)\n";
  return std::move(loaded.pairs);
}

TrainConfig config_from(const Options& o) {
  TrainConfig c;
  c.k = o.k;
  c.r = o.r;
  c.d = o.d;
  c.epochs = o.epochs;
  c.seed = o.seed;
  c.batch_size = o.batch_size;
  c.learning_rate = o.lr;
  c.dropout_rate = o.dropout;
  c.use_dual = o.dual == "on";
  c.precision = o.precision == "f32" ? Precision::Single : Precision::Double;
  c.deterministic = o.deterministic;
  c.separate_reverse_scorer = o.separate_reverse;
  c.scorer = o.scorer == "interaction" ? ScorerFeatures::Interaction : ScorerFeatures::Concat;
  return c;
}

int cmd_toy(const Options& o, std::ostream& out) {
  const auto pairs = o.distractors ? generate_toy_distractors(o.seed, o.n) : generate_toy(o.seed, o.n);
  write_snli(o.out, pairs);
  out << "wrote " << pairs.size() << " toy pairs to " << o.out << "\n";
  return kOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  const TrainConfig config = config_from(o);
  const auto training = load_labeled(o.data, out, "train");
  std::vector<ExamplePair> dev;
  if (!o.dev.empty()) dev = load_labeled(o.dev, out, "dev");

  PretrainedVectors pretrained = empty_pretrained(config.d);
  if (!o.embeddings.empty()) {
    std::unordered_set<std::string> wanted;
    for (const auto* set : std::array<const std::vector<ExamplePair>*, 2>{&training, &dev})
      for (const auto& tok : collect_tokens(*set)) {
        wanted.insert(tok);
        wanted.insert(ascii_lower(tok));
      }
    pretrained = load_pretrained(o.embeddings, &wanted);
    out << "pretrained vectors: " << pretrained.vocab.size() << " of width " << pretrained.table.dim << "\n";
  }

  Model model = build_model(config, std::move(pretrained), training);
  out << "vocabulary: " << model.vocab.frozen_count() << " frozen, " << model.vocab.oov_count()
      << " trainable; parameters (no embeddings): " << parameter_count(config.dims()) << "\n";

  const auto result = train(std::move(model), training, dev, config, [&](const EpochMetrics& m) {
    out << "epoch " << m.epoch << " loss " << fmt(m.train_loss) << " train_acc " << fmt(m.train_accuracy, 4);
    if (m.dev_accuracy) out << " dev_acc " << fmt(*m.dev_accuracy, 4);
    out << "\n" << std::flush;
  });

  save_checkpoint(o.out, result.model, config);
  {
    std::ofstream metrics(o.out + ".metrics.tsv");
    metrics << "epoch\ttrain_loss\ttrain_accuracy\tdev_accuracy\n";
    for (const auto& m : result.epochs)
      metrics << m.epoch << '\t' << fmt(m.train_loss, 17) << '\t' << fmt(m.train_accuracy, 6) << '\t'
              << (m.dev_accuracy ? fmt(*m.dev_accuracy, 6) : std::string("-")) << '\n';
    std::ofstream trace(o.out + ".trace.tsv");
    trace << "step\tloss\n";
    char buf[40];
    for (std::size_t i = 0; i < result.step_losses.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", result.step_losses[i]);
      trace << i + 1 << '\t' << buf << '\n';
    }
  }
  out << "best epoch " << result.best_epoch << "; checkpoint written to " << o.out << "\n";
  return kOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const auto ck = load_checkpoint(o.checkpoint);
  const auto data = load_labeled(o.data, out, "data");
  const auto r = evaluate(ck.model, data);
  out << "accuracy " << fmt(r.accuracy, 4) << " (" << r.correct << "/" << r.total << ")\n";
  out << "mean_loss " << fmt(r.mean_loss) << "\n";
  out << "confusion (rows gold, columns predicted): contradiction neutral entailment\n";
  for (std::size_t g = 0; g < 3; ++g) {
    out << kLabelNames[g];
    for (std::size_t p = 0; p < 3; ++p) out << ' ' << r.confusion[g][p];
    out << "\n";
  }
  return kOk;
}

int cmd_predict(const Options& o, std::ostream& out, bool dual_given) {
  auto ck = load_checkpoint(o.checkpoint);
  if (dual_given) ck.model.use_dual = o.dual == "on";
  const auto premise = parse_binary_tree(o.premise);
  const auto hypothesis = parse_binary_tree(o.hypothesis);
  const auto p = predict(ck.model, premise, hypothesis, ck.model.use_dual);
  out << label_name(p.label) << "\n";
  for (std::size_t i = 0; i < 3; ++i) out << kLabelNames[i] << ' ' << fmt(p.distribution[i]) << "\n";
  return kOk;
}

int cmd_inspect(const Options& o, std::ostream& out, bool dual_given) {
  auto ck = load_checkpoint(o.checkpoint);
  if (dual_given) ck.model.use_dual = o.dual == "on";
  std::vector<ExamplePair> pairs;
  if (!o.premise.empty() || !o.hypothesis.empty()) {
    pairs.push_back({parse_binary_tree(o.premise), parse_binary_tree(o.hypothesis), std::nullopt});
  } else {
    pairs = load_labeled(o.data, out, "data");
  }
  fs::create_directories(o.out);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "pair_%05zu", i);
    const auto record = inspect(ck.model, pairs[i]);
    write_file(fs::path(o.out) / (std::string(stem) + ".txt"), format_inspection(record));
    write_file(fs::path(o.out) / (std::string(stem) + ".pgm"), attention_pgm(record.attention));
  }
  out << "wrote " << pairs.size() << " inspection records to " << o.out << "\n";
  return kOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out) {
  ModelCheckConfig c;
  c.k = o.k;
  c.r = o.r;
  c.d = o.d;
  c.pairs = o.pairs;
  c.seed = o.seed;
  c.use_dual = o.dual == "on";
  c.scorer = o.scorer == "interaction" ? ScorerFeatures::Interaction : ScorerFeatures::Concat;
  const auto report = full_model_gradcheck(c);
  for (std::size_t i = 0; i < report.per_pair.size(); ++i) {
    const auto& p = report.per_pair[i];
    out << "pair " << i << " scalars " << p.checked << " max_rel_err " << p.max_relative_error << " at " << p.worst
        << "\n";
    for (const auto& m : p.mismatches)
      out << "  " << m.where << " analytic " << m.analytic << " numeric " << m.numeric << "\n";
  }
  const bool ok = report.max_relative_error < kGradTolerance;
  out << "max relative error " << report.max_relative_error << (ok ? " < 1e-4: ok" : " >= 1e-4: FAILED") << "\n";
  return ok ? kOk : kNumericFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tree-structured attention and entailment composition for sentence-pair inference"};
  app.require_subcommand(1);
  Options o;

  auto add_model_flags = [&](CLI::App* c) {
    c->add_option("--k", o.k, "meaning representation width");
    c->add_option("--r", o.r, "entailment relation width");
    c->add_option("--d", o.d, "word embedding width");
    c->add_option("--seed", o.seed, "random seed");
  };
  auto add_dual = [&](CLI::App* c) {
    return c->add_option("--dual", o.dual, "dual-attention")->check(CLI::IsMember({"on", "off"}));
  };

  auto* toy = app.add_subcommand("toy", "generate the synthetic entailment set");
  toy->add_option("--out", o.out, "output SNLI-style jsonl")->required();
  toy->add_option("--n", o.n, "number of pairs");
  toy->add_option("--seed", o.seed, "random seed");
  toy->add_flag("--distractors", o.distractors, "every premise carries a distractor phrase");

  auto* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--data", o.data, "training jsonl")->required();
  train_cmd->add_option("--dev", o.dev, "dev jsonl for model selection");
  train_cmd->add_option("--out", o.out, "checkpoint path")->required();
  train_cmd->add_option("--embeddings", o.embeddings, "pretrained text vectors");
  add_model_flags(train_cmd);
  train_cmd->add_option("--epochs", o.epochs);
  train_cmd->add_option("--batch-size", o.batch_size);
  train_cmd->add_option("--lr", o.lr);
  train_cmd->add_option("--dropout", o.dropout);
  add_dual(train_cmd);
  train_cmd->add_option("--precision", o.precision)->check(CLI::IsMember({"f32", "f64"}));
  train_cmd->add_flag("--deterministic", o.deterministic, "fixed-order gradient reduction");
  train_cmd->add_flag("--separate-reverse-scorer", o.separate_reverse, "own scorer for the reverse attention");
  train_cmd->add_option("--scorer", o.scorer, "attention scorer features: concat [h_i; h_j] or interaction")
      ->check(CLI::IsMember({"concat", "interaction"}));

  auto* eval_cmd = app.add_subcommand("eval", "accuracy and confusion matrix");
  eval_cmd->add_option("--checkpoint", o.checkpoint)->required();
  eval_cmd->add_option("--data", o.data)->required();

  auto* predict_cmd = app.add_subcommand("predict", "label one premise/hypothesis pair");
  predict_cmd->add_option("--checkpoint", o.checkpoint)->required();
  predict_cmd->add_option("--premise", o.premise, "binary parse")->required();
  predict_cmd->add_option("--hypothesis", o.hypothesis, "binary parse")->required();
  auto* predict_dual = add_dual(predict_cmd);

  auto* inspect_cmd = app.add_subcommand("inspect", "export attention and relation records");
  inspect_cmd->add_option("--checkpoint", o.checkpoint)->required();
  inspect_cmd->add_option("--data", o.data);
  inspect_cmd->add_option("--premise", o.premise);
  inspect_cmd->add_option("--hypothesis", o.hypothesis);
  inspect_cmd->add_option("--out", o.out, "output directory")->required();
  auto* inspect_dual = add_dual(inspect_cmd);

  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference audit of the full model");
  add_model_flags(grad_cmd);
  grad_cmd->add_option("--pairs", o.pairs);
  add_dual(grad_cmd);
  grad_cmd->add_option("--scorer", o.scorer)->check(CLI::IsMember({"concat", "interaction"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (*toy) return cmd_toy(o, out);
    if (*train_cmd) return cmd_train(o, out);
    if (*eval_cmd) return cmd_eval(o, out);
    if (*predict_cmd) return cmd_predict(o, out, predict_dual->count() > 0);
    if (*inspect_cmd) {
      if (o.data.empty() && (o.premise.empty() || o.hypothesis.empty())) {
        err << "inspect needs --data or both --premise and --hypothesis\n";
        return kUsage;
      }
      return cmd_inspect(o, out, inspect_dual->count() > 0);
    }
    if (*grad_cmd) {
      // Small defaults for the audit unless overridden.
      if (grad_cmd->count("--k") == 0) o.k = 8;
      if (grad_cmd->count("--r") == 0) o.r = 8;
      if (grad_cmd->count("--d") == 0) o.d = 10;
      return cmd_gradcheck(o, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace treentail::cli
