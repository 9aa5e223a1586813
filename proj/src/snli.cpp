#include <fstream>
#include <istream>
#include <unordered_set>

#include <json.hpp>

#include "treentail/dataset.hpp"
#include "treentail/error.hpp"

namespace treentail {

namespace {

std::string join_tokens(const BinaryTree& tree) {
  std::string out;
  for (const auto& tok : tree.tokens()) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

BinaryTree parse_field(const nlohmann::json& record, const char* field, std::size_t line_no) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_string())
    throw Error(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": missing string field " + field);
  try {
    return parse_binary_tree(it->get<std::string>());
  } catch (const Error& e) {
    throw Error(e.code(), "line " + std::to_string(line_no) + ", " + field + ": " + e.what());
  }
}

}  // namespace

SnliLoad parse_snli(std::istream& in) {
  SnliLoad out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!record.is_object())
      throw Error(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": not a JSON object");
    auto label_it = record.find("gold_label");
    if (label_it == record.end() || !label_it->is_string())
      throw Error(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": missing gold_label");
    const auto label_text = label_it->get<std::string>();
    if (label_text == "-") {
      ++out.skipped;
      continue;
    }
    const auto label = parse_label(label_text);
    if (!label)
      throw Error(Errc::InvalidLabel, "line " + std::to_string(line_no) + ": unknown gold_label '" + label_text + "'");

    ExamplePair pair;
    pair.premise = parse_field(record, "sentence1_binary_parse", line_no);
    pair.hypothesis = parse_field(record, "sentence2_binary_parse", line_no);
    pair.gold = label;
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

SnliLoad load_snli(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return parse_snli(in);
}

void write_snli(const std::filesystem::path& path, const std::vector<ExamplePair>& pairs) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  for (const auto& p : pairs) {
    nlohmann::json record;
    record["gold_label"] = p.gold ? std::string(label_name(*p.gold)) : std::string("-");
    record["sentence1"] = join_tokens(p.premise);
    record["sentence2"] = join_tokens(p.hypothesis);
    record["sentence1_binary_parse"] = serialize(p.premise);
    record["sentence2_binary_parse"] = serialize(p.hypothesis);
    out << record.dump() << '\n';
  }
}

std::vector<std::string> collect_tokens(const std::vector<ExamplePair>& pairs) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  auto take = [&](const BinaryTree& t) {
    for (auto& tok : t.tokens())
      if (seen.insert(tok).second) out.push_back(tok);
  };
  for (const auto& p : pairs) {
    take(p.premise);
    take(p.hypothesis);
  }
  return out;
}

}  // namespace treentail
