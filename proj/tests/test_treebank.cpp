#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "treentail/error.hpp"
#include "treentail/gradcheck.hpp"
#include "treentail/treebank.hpp"

using namespace treentail;

namespace {

Errc parse_error(std::string_view text) {
  try {
    parse_binary_tree(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse error for " << text);
  return Errc::Io;
}

BinaryTree random_shape(std::size_t leaves, std::mt19937_64& rng) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < leaves; ++i) tokens.push_back("w" + std::to_string(i));
  return random_tree(tokens, rng);
}

}  // namespace

TEST_CASE("three-leaf tree from the parse grammar") {
  const auto t = parse_binary_tree("( ( the cat ) sleeps )");
  REQUIRE(t.size() == 5);
  CHECK(t.leaf_count() == 3);
  CHECK(t.tokens() == std::vector<std::string>{"the", "cat", "sleeps"});
  const auto& root = t.node(t.root());
  REQUIRE_FALSE(root.is_leaf());
  CHECK(t.root() == 4);
  CHECK(root.left == 2);
  CHECK(t.node(root.right).token == "sleeps");
  CHECK(t.node(2).left == 0);
  CHECK(t.node(2).right == 1);
  CHECK(t.node(0).token == "the");
  CHECK(t.node(1).token == "cat");
}

TEST_CASE("single token is a one-node tree") {
  const auto t = parse_binary_tree("dog");
  CHECK(t.size() == 1);
  CHECK(t.node(0).is_leaf());
  CHECK(t.node(0).token == "dog");
  CHECK(serialize(t) == "dog");
  CHECK(post_order(t) == std::vector<NodeId>{0});
}

TEST_CASE("parse errors") {
  CHECK(parse_error("( a ( b c )") == Errc::UnbalancedParens);
  CHECK(parse_error("( a b ) )") == Errc::UnbalancedParens);
  CHECK(parse_error(") a b (") == Errc::UnbalancedParens);
  CHECK(parse_error("a b") == Errc::UnbalancedParens);
  CHECK(parse_error("") == Errc::EmptyInput);
  CHECK(parse_error("   \t ") == Errc::EmptyInput);
  CHECK(parse_error("( a )") == Errc::NonBinaryNode);
  CHECK(parse_error("( a b c )") == Errc::NonBinaryNode);
  CHECK(parse_error("( )") == Errc::NonBinaryNode);
  CHECK(parse_error("( ( a b ) ( c d ) e )") == Errc::NonBinaryNode);
}

TEST_CASE("flush parentheses and verbatim tokens") {
  const auto t = parse_binary_tree("((-LRB- x)(y -RRB-))");
  CHECK(t.tokens() == std::vector<std::string>{"-LRB-", "x", "y", "-RRB-"});
  CHECK(serialize(t) == "( ( -LRB- x ) ( y -RRB- ) )");
  const auto cased = parse_binary_tree("( The Cat )");
  CHECK(cased.tokens() == std::vector<std::string>{"The", "Cat"});
}

TEST_CASE("serialize is canonical and round-trips") {
  const auto t = parse_binary_tree("( ( the cat ) sleeps )");
  CHECK(serialize(t) == "( ( the cat ) sleeps )");
  CHECK(parse_binary_tree(serialize(t)) == t);
  const auto spaced = parse_binary_tree("  (  (the   cat)\tsleeps )  ");
  CHECK(spaced == t);
}

TEST_CASE("post order of the five-node tree") {
  const auto t = parse_binary_tree("( ( the cat ) sleeps )");
  CHECK(post_order(t) == std::vector<NodeId>{0, 1, 2, 3, 4});
  CHECK(t.node(2).left == 0);
  CHECK(t.root() == 4);
}

TEST_CASE("leaf spans") {
  const auto t = parse_binary_tree("( ( a b ) ( c d ) )");
  const auto spans = t.leaf_spans();
  REQUIRE(spans.size() == 7);
  CHECK(spans[t.root()] == std::pair<std::size_t, std::size_t>{0, 3});
  CHECK(spans[2] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(spans[5] == std::pair<std::size_t, std::size_t>{2, 3});
}

TEST_CASE("left-branching construction") {
  const auto t = left_branching({"the", "dog", "is", "sitting"});
  CHECK(serialize(t) == "( ( ( the dog ) is ) sitting )");
  CHECK(serialize(left_branching({"one"})) == "one");
}

TEST_CASE("property: random trees satisfy the structural invariants") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const auto t = random_shape(n, rng);
    REQUIRE(t.leaf_count() == n);
    CHECK(t.size() == 2 * n - 1);
    CHECK(t.root() == t.size() - 1);
    for (NodeId id = 0; id < t.size(); ++id) {
      const auto& node = t.node(id);
      if (node.is_leaf()) {
        CHECK_FALSE(node.token.empty());
        CHECK(node.right == kNoChild);
      } else {
        CHECK(node.left < id);
        CHECK(node.right < id);
        CHECK(node.token.empty());
      }
    }

    const auto order = post_order(t);
    CHECK(order == oracle::dfs_post_order(t));
    std::vector<bool> seen(t.size(), false);
    for (NodeId id : order) {
      const auto& node = t.node(id);
      if (!node.is_leaf()) CHECK((seen[node.left] && seen[node.right]));
      seen[id] = true;
    }

    const auto reparsed = parse_binary_tree(serialize(t));
    CHECK(reparsed == t);
    CHECK(serialize(reparsed) == serialize(t));
  }
}
