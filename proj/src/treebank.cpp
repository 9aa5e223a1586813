#include "treentail/treebank.hpp"

#include <cctype>
#include <numeric>

#include "treentail/error.hpp"

namespace treentail {

namespace {

bool is_space(char ch) { return std::isspace(static_cast<unsigned char>(ch)) != 0; }

// Splits on whitespace; parentheses are always tokens of their own even when
// written flush against a word.
std::vector<std::string_view> tokenize(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char ch = text[i];
    if (is_space(ch)) {
      ++i;
    } else if (ch == '(' || ch == ')') {
      out.push_back(text.substr(i, 1));
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !is_space(text[j]) && text[j] != '(' && text[j] != ')') ++j;
      out.push_back(text.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

void append_shifted(std::vector<TreeNode>& dst, const std::vector<TreeNode>& src) {
  const auto offset = static_cast<NodeId>(dst.size());
  for (TreeNode n : src) {
    if (!n.is_leaf()) {
      n.left += offset;
      n.right += offset;
    }
    dst.push_back(std::move(n));
  }
}

}  // namespace

BinaryTree BinaryTree::leaf(std::string token) {
  BinaryTree t;
  t.nodes_.push_back(TreeNode{std::move(token), kNoChild, kNoChild});
  return t;
}

BinaryTree BinaryTree::join(const BinaryTree& left, const BinaryTree& right) {
  BinaryTree t;
  t.nodes_.reserve(left.size() + right.size() + 1);
  append_shifted(t.nodes_, left.nodes_);
  const NodeId left_root = t.root();
  append_shifted(t.nodes_, right.nodes_);
  const NodeId right_root = t.root();
  t.nodes_.push_back(TreeNode{{}, left_root, right_root});
  return t;
}

std::size_t BinaryTree::leaf_count() const noexcept {
  std::size_t n = 0;
  for (const auto& node : nodes_) n += node.is_leaf() ? 1 : 0;
  return n;
}

std::vector<std::string> BinaryTree::tokens() const {
  // Post-order visits leaves left to right.
  std::vector<std::string> out;
  for (const auto& node : nodes_)
    if (node.is_leaf()) out.push_back(node.token);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> BinaryTree::leaf_spans() const {
  std::vector<std::pair<std::size_t, std::size_t>> spans(nodes_.size());
  std::size_t next_leaf = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) {
      spans[i] = {next_leaf, next_leaf};
      ++next_leaf;
    } else {
      spans[i] = {spans[n.left].first, spans[n.right].second};
    }
  }
  return spans;
}

BinaryTree parse_binary_tree(std::string_view text) {
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw Error(Errc::EmptyInput, "no tokens in tree text");

  BinaryTree tree;
  auto& nodes = tree.nodes_;
  // One frame per open parenthesis, holding the ids of completed constituents.
  std::vector<std::vector<NodeId>> frames;
  bool have_root = false;

  auto complete = [&](NodeId id, std::size_t pos) {
    if (frames.empty()) {
      if (have_root)
        throw Error(Errc::UnbalancedParens,
                    "trailing input after complete tree at token " + std::to_string(pos));
      have_root = true;
    } else {
      frames.back().push_back(id);
    }
  };

  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    const auto tok = tokens[pos];
    if (tok == "(") {
      if (frames.empty() && have_root)
        throw Error(Errc::UnbalancedParens,
                    "trailing input after complete tree at token " + std::to_string(pos));
      frames.emplace_back();
    } else if (tok == ")") {
      if (frames.empty())
        throw Error(Errc::UnbalancedParens, "unmatched ')' at token " + std::to_string(pos));
      auto children = std::move(frames.back());
      frames.pop_back();
      if (children.size() != 2)
        throw Error(Errc::NonBinaryNode, "constituent with " + std::to_string(children.size()) +
                                             " children closed at token " + std::to_string(pos));
      nodes.push_back(TreeNode{{}, children[0], children[1]});
      complete(static_cast<NodeId>(nodes.size() - 1), pos);
    } else {
      nodes.push_back(TreeNode{std::string(tok), kNoChild, kNoChild});
      complete(static_cast<NodeId>(nodes.size() - 1), pos);
    }
  }
  if (!frames.empty())
    throw Error(Errc::UnbalancedParens, std::to_string(frames.size()) + " unclosed '('");
  return tree;
}

std::string serialize(const BinaryTree& tree) {
  std::vector<std::string> text(tree.size());
  for (NodeId id = 0; id < tree.size(); ++id) {
    const auto& n = tree.node(id);
    if (n.is_leaf())
      text[id] = n.token;
    else
      text[id] = "( " + std::move(text[n.left]) + " " + std::move(text[n.right]) + " )";
  }
  return tree.empty() ? std::string() : std::move(text[tree.root()]);
}

std::vector<NodeId> post_order(const BinaryTree& tree) {
  std::vector<NodeId> order(tree.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  return order;
}

BinaryTree left_branching(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw Error(Errc::EmptyInput, "left_branching over no tokens");
  BinaryTree t = BinaryTree::leaf(tokens.front());
  for (std::size_t i = 1; i < tokens.size(); ++i) t = BinaryTree::join(t, BinaryTree::leaf(tokens[i]));
  return t;
}

}  // namespace treentail
