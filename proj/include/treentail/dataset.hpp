#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "treentail/entailment.hpp"
#include "treentail/treebank.hpp"

namespace treentail {

struct ExamplePair {
  BinaryTree premise;
  BinaryTree hypothesis;
  std::optional<Label> gold;
};

struct SnliLoad {
  std::vector<ExamplePair> pairs;
  std::size_t skipped = 0;  // records whose gold_label is "-"
};

// Line-delimited JSON records with gold_label, sentence1_binary_parse and
// sentence2_binary_parse fields.
SnliLoad load_snli(const std::filesystem::path& path);
SnliLoad parse_snli(std::istream& in);

void write_snli(const std::filesystem::path& path, const std::vector<ExamplePair>& pairs);

// Every token of both trees, in order of first appearance.
std::vector<std::string> collect_tokens(const std::vector<ExamplePair>& pairs);

}  // namespace treentail
