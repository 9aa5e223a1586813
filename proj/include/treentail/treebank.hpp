#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace treentail {

// Post-order position of a node inside its tree.
using NodeId = std::uint32_t;

inline constexpr NodeId kNoChild = static_cast<NodeId>(-1);

struct TreeNode {
  std::string token;  // empty for internal nodes
  NodeId left = kNoChild;
  NodeId right = kNoChild;

  bool is_leaf() const noexcept { return left == kNoChild; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// A binarized constituency tree. Nodes are stored in post-order, so both
// children of a node have smaller ids and the root is the last node.
// Immutable once built.
class BinaryTree {
 public:
  BinaryTree() = default;

  static BinaryTree leaf(std::string token);
  static BinaryTree join(const BinaryTree& left, const BinaryTree& right);

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  NodeId root() const noexcept { return static_cast<NodeId>(nodes_.size() - 1); }
  const TreeNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

  std::size_t leaf_count() const noexcept;
  std::vector<std::string> tokens() const;

  // Inclusive range of leaf positions (left to right) covered by each node.
  std::vector<std::pair<std::size_t, std::size_t>> leaf_spans() const;

  friend bool operator==(const BinaryTree&, const BinaryTree&) = default;

 private:
  friend BinaryTree parse_binary_tree(std::string_view text);
  std::vector<TreeNode> nodes_;
};

// TREE := TOKEN | "(" TREE TREE ")". Throws Error with EmptyInput,
// UnbalancedParens or NonBinaryNode.
BinaryTree parse_binary_tree(std::string_view text);

std::string serialize(const BinaryTree& tree);

// Bottom-up evaluation order: every child precedes its parent.
std::vector<NodeId> post_order(const BinaryTree& tree);

// Left-branching tree over a token sequence: ((((t0 t1) t2) t3) ...).
BinaryTree left_branching(const std::vector<std::string>& tokens);

}  // namespace treentail
