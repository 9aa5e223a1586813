#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "treentail/tensor.hpp"

namespace treentail {

struct EmbeddingTable;

// Token index space. Pretrained (frozen) tokens occupy [0, frozen_count);
// training-set OOV tokens follow, and the shared unknown row is always the
// last index once register_oov has run.
class Vocabulary {
 public:
  static constexpr std::string_view kUnknownToken = "<unk>";

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t frozen_count() const noexcept { return frozen_count_; }
  std::size_t oov_count() const noexcept { return tokens_.size() - frozen_count_; }
  bool oov_registered() const noexcept { return oov_registered_; }
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::optional<std::size_t> find(std::string_view token) const;
  // Exact match, then lowercased match, then the unknown row.
  std::size_t resolve(std::string_view token) const;
  std::size_t unknown_index() const;

  // Appends a pretrained token; only valid before OOV registration.
  std::size_t add_frozen(std::string token);

  // Rebuilds a registered vocabulary from its serialized token list.
  static Vocabulary restore(std::vector<std::string> tokens, std::size_t frozen_count);

 private:
  friend void register_oov(Vocabulary&, EmbeddingTable&, std::span<const std::string>,
                           std::mt19937_64&);
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> tokens_;
  std::size_t frozen_count_ = 0;
  bool oov_registered_ = false;
};

struct EmbeddingTable {
  std::size_t dim = 0;
  Tensor frozen;     // frozen_count x dim, never updated
  Tensor trainable;  // oov_count x dim, optimizer-owned

  Tensor row(const Vocabulary& vocab, std::size_t index) const;
};

struct PretrainedVectors {
  Vocabulary vocab;
  EmbeddingTable table;
};

// Reads "token v1 ... vd" lines. d is taken from the first line. When
// restrict_to is given only those tokens are kept.
PretrainedVectors load_pretrained(const std::filesystem::path& path,
                                  const std::unordered_set<std::string>* restrict_to = nullptr);

// An empty pretrained set of width d, for training from scratch.
PretrainedVectors empty_pretrained(std::size_t dim);

// Adds a trainable row, uniform in [-0.05, 0.05], for every training token
// that resolves to nothing in the pretrained set, plus the shared unknown row.
void register_oov(Vocabulary& vocab, EmbeddingTable& table, std::span<const std::string> training_tokens,
                  std::mt19937_64& rng);

Tensor lookup(const Vocabulary& vocab, const EmbeddingTable& table, std::string_view token);

std::string ascii_lower(std::string_view s);

}  // namespace treentail
