#include "treentail/embeddings.hpp"

#include <charconv>
#include <fstream>

#include "treentail/error.hpp"

namespace treentail {

namespace {

constexpr double kInitRange = 0.05;

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw Error(Errc::UnreadableFloat, "line " + std::to_string(line_no) + ": '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out)
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  return out;
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::resolve(std::string_view token) const {
  if (auto hit = find(token)) return *hit;
  if (auto hit = find(ascii_lower(token))) return *hit;
  return unknown_index();
}

std::size_t Vocabulary::unknown_index() const {
  if (!oov_registered_) throw Error(Errc::EmptyInput, "vocabulary has no unknown row before register_oov");
  return tokens_.size() - 1;
}

std::size_t Vocabulary::add_frozen(std::string token) {
  if (oov_registered_) throw Error(Errc::CalledTwice, "pretrained tokens added after OOV registration");
  const auto id = tokens_.size();
  index_.emplace(token, id);
  tokens_.push_back(std::move(token));
  frozen_count_ = tokens_.size();
  return id;
}

Vocabulary Vocabulary::restore(std::vector<std::string> tokens, std::size_t frozen_count) {
  if (tokens.empty() || frozen_count >= tokens.size())
    throw Error(Errc::BadCheckpoint, "vocabulary without an unknown row");
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.frozen_count_ = frozen_count;
  v.oov_registered_ = true;
  for (std::size_t i = 0; i + 1 < v.tokens_.size(); ++i) v.index_.emplace(v.tokens_[i], i);
  return v;
}

Tensor EmbeddingTable::row(const Vocabulary& vocab, std::size_t index) const {
  Tensor out(dim, 1);
  const bool frozen_row = index < vocab.frozen_count();
  const Tensor& src = frozen_row ? frozen : trainable;
  const auto r = frozen_row ? index : index - vocab.frozen_count();
  const auto values = src.row(r);
  std::copy(values.begin(), values.end(), out.data().begin());
  return out;
}

PretrainedVectors load_pretrained(const std::filesystem::path& path,
                                  const std::unordered_set<std::string>* restrict_to) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open embeddings file " + path.string());

  PretrainedVectors out;
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  bool saw_vector = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_spaces(line);
    if (fields.empty()) continue;
    const auto width = fields.size() - 1;
    if (!saw_vector) {
      if (width == 0) throw Error(Errc::InconsistentDimension, "line " + std::to_string(line_no) + ": no values");
      dim = width;
      saw_vector = true;
    } else if (width != dim) {
      throw Error(Errc::InconsistentDimension, "line " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(dim) + " values, got " + std::to_string(width));
    }
    std::string token(fields[0]);
    std::vector<double> row(dim);
    for (std::size_t j = 0; j < dim; ++j) row[j] = parse_double(fields[j + 1], line_no);
    if (restrict_to && !restrict_to->contains(token)) continue;
    if (out.vocab.find(token)) continue;
    out.vocab.add_frozen(std::move(token));
    values.insert(values.end(), row.begin(), row.end());
  }
  if (!saw_vector) throw Error(Errc::EmptyFile, path.string());
  out.table.dim = dim;
  out.table.frozen = Tensor(out.vocab.size(), dim, std::move(values));
  out.table.trainable = Tensor(0, dim);
  return out;
}

PretrainedVectors empty_pretrained(std::size_t dim) {
  PretrainedVectors out;
  out.table.dim = dim;
  out.table.frozen = Tensor(0, dim);
  out.table.trainable = Tensor(0, dim);
  return out;
}

void register_oov(Vocabulary& vocab, EmbeddingTable& table, std::span<const std::string> training_tokens,
                  std::mt19937_64& rng) {
  if (vocab.oov_registered_) throw Error(Errc::CalledTwice, "register_oov already ran for this vocabulary");
  std::vector<std::string> novel;
  for (const auto& tok : training_tokens) {
    if (vocab.find(tok) || vocab.find(ascii_lower(tok))) continue;
    vocab.index_.emplace(tok, vocab.tokens_.size());
    vocab.tokens_.push_back(tok);
    novel.push_back(tok);
  }
  vocab.tokens_.emplace_back(Vocabulary::kUnknownToken);
  vocab.oov_registered_ = true;

  std::uniform_real_distribution<double> init(-kInitRange, kInitRange);
  Tensor rows(novel.size() + 1, table.dim);
  for (auto& x : rows.data()) x = init(rng);
  table.trainable = std::move(rows);
}

Tensor lookup(const Vocabulary& vocab, const EmbeddingTable& table, std::string_view token) {
  return table.row(vocab, vocab.resolve(token));
}

}  // namespace treentail
