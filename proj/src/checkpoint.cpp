#include "treentail/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "treentail/error.hpp"

namespace treentail {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint64_t uint(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::string take(std::size_t n) {
    need(n);
    std::string out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw Error(Errc::BadCheckpoint, "truncated checkpoint");
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

void put_tensor(std::string& out, const Tensor& t, Precision precision) {
  put_u64(out, t.rows());
  put_u64(out, t.cols());
  for (double x : t.data()) {
    if (precision == Precision::Single)
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
    else
      put_u64(out, std::bit_cast<std::uint64_t>(x));
  }
}

Tensor get_tensor(Reader& in, Precision precision) {
  const auto rows = in.uint(8);
  const auto cols = in.uint(8);
  if (rows > (1ULL << 32) || cols > (1ULL << 32)) throw Error(Errc::BadCheckpoint, "implausible tensor shape");
  Tensor t(rows, cols);
  for (auto& x : t.data()) {
    if (precision == Precision::Single)
      x = static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(in.uint(4))));
    else
      x = std::bit_cast<double>(in.uint(8));
  }
  return t;
}

nlohmann::json config_json(const TrainConfig& c) {
  return {
      {"k", c.k},
      {"r", c.r},
      {"d", c.d},
      {"learning_rate", c.learning_rate},
      {"beta1", c.beta1},
      {"beta2", c.beta2},
      {"adam_epsilon", c.adam_epsilon},
      {"batch_size", c.batch_size},
      {"dropout_rate", c.dropout_rate},
      {"epochs", c.epochs},
      {"seed", c.seed},
      {"use_dual", c.use_dual},
      {"separate_reverse_scorer", c.separate_reverse_scorer},
      {"scorer", c.scorer == ScorerFeatures::Concat ? "concat" : "interaction"},
      {"deterministic", c.deterministic},
  };
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.k = j.at("k");
  c.r = j.at("r");
  c.d = j.at("d");
  c.learning_rate = j.at("learning_rate");
  c.beta1 = j.at("beta1");
  c.beta2 = j.at("beta2");
  c.adam_epsilon = j.at("adam_epsilon");
  c.batch_size = j.at("batch_size");
  c.dropout_rate = j.at("dropout_rate");
  c.epochs = j.at("epochs");
  c.seed = j.at("seed");
  c.use_dual = j.at("use_dual");
  c.separate_reverse_scorer = j.at("separate_reverse_scorer");
  const std::string scorer = j.at("scorer");
  if (scorer != "concat" && scorer != "interaction") throw Error(Errc::BadCheckpoint, "unknown scorer " + scorer);
  c.scorer = scorer == "concat" ? ScorerFeatures::Concat : ScorerFeatures::Interaction;
  c.deterministic = j.at("deterministic");
  return c;
}

}  // namespace

std::string encode_checkpoint(const Model& model, const TrainConfig& config) {
  nlohmann::json meta;
  meta["format"] = 1;
  meta["config"] = config_json(config);
  meta["config"]["use_dual"] = model.use_dual;
  meta["precision"] = config.precision == Precision::Single ? "f32" : "f64";
  meta["labels"] = std::vector<std::string>(kLabelNames.begin(), kLabelNames.end());
  meta["vocabulary"] = model.vocab.tokens();
  meta["frozen_count"] = model.vocab.frozen_count();
  std::vector<std::string> names(kSlotNames.begin(), kSlotNames.end());
  names.emplace_back("embedding.frozen");
  names.emplace_back("embedding.trainable");
  meta["tensors"] = names;

  const std::string header = meta.dump();
  std::string out(kCheckpointMagic);
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  for (const auto& t : model.params.dense) put_tensor(out, t, config.precision);
  put_tensor(out, model.params.embeddings.frozen, config.precision);
  put_tensor(out, model.params.embeddings.trainable, config.precision);
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  Reader in(bytes);
  if (in.take(kCheckpointMagic.size()) != kCheckpointMagic) throw Error(Errc::BadCheckpoint, "bad magic bytes");
  const auto header_len = in.uint(4);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(in.take(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadCheckpoint, std::string("metadata: ") + e.what());
  }

  Checkpoint ck;
  try {
    ck.config = config_from_json(meta.at("config"));
    ck.config.precision = meta.at("precision") == "f32" ? Precision::Single : Precision::Double;
    if (meta.at("labels") != nlohmann::json(std::vector<std::string>(kLabelNames.begin(), kLabelNames.end())))
      throw Error(Errc::BadCheckpoint, "label order differs from this build");
    ck.model.vocab = Vocabulary::restore(meta.at("vocabulary").get<std::vector<std::string>>(),
                                         meta.at("frozen_count").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadCheckpoint, std::string("metadata: ") + e.what());
  }
  ck.model.use_dual = ck.config.use_dual;

  EmbeddingTable table;
  table.dim = ck.config.d;
  auto& params = ck.model.params;
  params = ParameterSet::zeros(ck.config.dims(), table);
  for (std::size_t s = 0; s < kSlotCount; ++s) {
    Tensor t = get_tensor(in, ck.config.precision);
    if (!t.same_shape(params.dense[s]))
      throw Error(Errc::BadCheckpoint, std::string(kSlotNames[s]) + " has shape " + t.shape_string());
    params.dense[s] = std::move(t);
  }
  params.embeddings.frozen = get_tensor(in, ck.config.precision);
  params.embeddings.trainable = get_tensor(in, ck.config.precision);
  const auto& vocab = ck.model.vocab;
  if (params.embeddings.frozen.rows() != vocab.frozen_count() ||
      params.embeddings.trainable.rows() != vocab.oov_count() ||
      (params.embeddings.frozen.rows() > 0 && params.embeddings.frozen.cols() != table.dim) ||
      params.embeddings.trainable.cols() != table.dim)
    throw Error(Errc::BadCheckpoint, "embedding tables do not match the vocabulary");
  if (!in.done()) throw Error(Errc::BadCheckpoint, "trailing bytes after the last tensor");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model, const TrainConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  const auto bytes = encode_checkpoint(model, config);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace treentail
