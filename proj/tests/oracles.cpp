#include "oracles.hpp"

#include <cmath>
#include <map>
#include <set>

namespace oracle {

using treentail::BinaryTree;
using treentail::Label;
using treentail::NodeId;
using treentail::Tensor;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

CellState zeros(std::size_t k) { return {Vec(k, 0.0), Vec(k, 0.0)}; }

CellState lstm_cell(const Tensor& weight, const Tensor& bias, const Vec& x, const CellState& left,
                    const CellState& right) {
  const std::size_t k = left.h.size();
  Vec in = x;
  in.insert(in.end(), left.h.begin(), left.h.end());
  in.insert(in.end(), right.h.begin(), right.h.end());

  auto pre = [&](std::size_t row) {
    double z = bias[row];
    for (std::size_t j = 0; j < in.size(); ++j) z += weight(row, j) * in[j];
    return z;
  };
  CellState out{Vec(k), Vec(k)};
  for (std::size_t m = 0; m < k; ++m) {
    const double i = sigmoid(pre(m));
    const double f1 = sigmoid(pre(k + m));
    const double f2 = sigmoid(pre(2 * k + m));
    const double o = sigmoid(pre(3 * k + m));
    const double u = std::tanh(pre(4 * k + m));
    out.c[m] = i * u + f1 * left.c[m] + f2 * right.c[m];
    out.h[m] = o * std::tanh(out.c[m]);
  }
  return out;
}

namespace {

void encode_node(const BinaryTree& tree, NodeId id, const Tensor& weight, const Tensor& bias, std::size_t d,
                 const std::function<Vec(const std::string&)>& embed, std::vector<CellState>& states) {
  const std::size_t k = bias.size() / 5;
  const auto& node = tree.node(id);
  if (node.is_leaf()) {
    states[id] = lstm_cell(weight, bias, embed(node.token), zeros(k), zeros(k));
    return;
  }
  encode_node(tree, node.left, weight, bias, d, embed, states);
  encode_node(tree, node.right, weight, bias, d, embed, states);
  states[id] = lstm_cell(weight, bias, Vec(d, 0.0), states[node.left], states[node.right]);
}

void visit(const BinaryTree& tree, NodeId id, std::vector<NodeId>& out) {
  const auto& node = tree.node(id);
  if (!node.is_leaf()) {
    visit(tree, node.left, out);
    visit(tree, node.right, out);
  }
  out.push_back(id);
}

}  // namespace

std::vector<CellState> encode_tree(const BinaryTree& tree, const Tensor& weight, const Tensor& bias, std::size_t d,
                                   const std::function<Vec(const std::string&)>& embed) {
  std::vector<CellState> states(tree.size());
  encode_node(tree, tree.root(), weight, bias, d, embed, states);
  return states;
}

Vec softmax(const Vec& v) {
  long double total = 0.0L;
  for (double x : v) total += std::exp(static_cast<long double>(x));
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = static_cast<double>(std::exp(static_cast<long double>(v[i])) / total);
  return out;
}

double pair_score(const Tensor& weight, double bias, const Vec& hq, const Vec& hp) {
  double s = bias;
  for (std::size_t m = 0; m < hq.size(); ++m) s += weight[m] * hq[m];
  for (std::size_t m = 0; m < hp.size(); ++m) s += weight[hq.size() + m] * hp[m];
  return s;
}

Vec weighted_sum(const Vec& weights, const std::vector<Vec>& vectors) {
  Vec out(vectors.front().size(), 0.0);
  for (std::size_t j = 0; j < vectors.size(); ++j)
    for (std::size_t m = 0; m < out.size(); ++m) out[m] += weights[j] * vectors[j][m];
  return out;
}

std::vector<NodeId> dfs_post_order(const BinaryTree& tree) {
  std::vector<NodeId> out;
  visit(tree, tree.root(), out);
  return out;
}

double AdamScalar::step(double theta, double grad) {
  ++t;
  m = beta1 * m + (1 - beta1) * grad;
  v = beta2 * v + (1 - beta2) * grad * grad;
  const double m_hat = m / (1 - std::pow(beta1, t));
  const double v_hat = v / (1 - std::pow(beta2, t));
  return theta - lr * m_hat / (std::sqrt(v_hat) + eps);
}

namespace {

struct Clause {
  std::string adjective;
  std::string noun;
  std::string verb;
};

const std::map<std::string, std::string>& hypernyms() {
  static const std::map<std::string, std::string> m = {
      {"man", "person"}, {"woman", "person"}, {"boy", "person"},  {"girl", "person"},
      {"dog", "animal"}, {"cat", "animal"},   {"horse", "animal"}, {"bird", "animal"}};
  return m;
}

const std::map<std::string, std::string>& antonyms() {
  static const std::map<std::string, std::string> m = {
      {"sitting", "standing"}, {"standing", "sitting"}, {"sleeping", "running"}, {"running", "sleeping"},
      {"laughing", "crying"},  {"crying", "laughing"},  {"smiling", "frowning"}, {"frowning", "smiling"}};
  return m;
}

bool is_noun(const std::string& w) { return hypernyms().count(w) || w == "person" || w == "animal"; }

// "the [adj] noun is verb", optionally followed by "near the noun".
std::optional<Clause> read_clause(const std::vector<std::string>& t, bool allow_tail) {
  static const std::set<std::string> adjectives = {"young", "old", "small", "tall", "happy", "wet"};
  std::size_t i = 0;
  if (t.size() < 4 || t[i++] != "the") return std::nullopt;
  Clause c;
  if (adjectives.count(t[i])) c.adjective = t[i++];
  if (i + 2 > t.size() || !is_noun(t[i])) return std::nullopt;
  c.noun = t[i++];
  if (t[i++] != "is" || i >= t.size() || !antonyms().count(t[i])) return std::nullopt;
  c.verb = t[i++];
  if (i == t.size()) return c;
  if (!allow_tail || t.size() != i + 3 || t[i] != "near" || t[i + 1] != "the" || !is_noun(t[i + 2]))
    return std::nullopt;
  return c;
}

std::string category(const std::string& noun) {
  auto it = hypernyms().find(noun);
  return it == hypernyms().end() ? noun : it->second;
}

}  // namespace

std::optional<Label> toy_label(const treentail::ExamplePair& pair) {
  const auto p = read_clause(pair.premise.tokens(), true);
  const auto h = read_clause(pair.hypothesis.tokens(), false);
  if (!p || !h || category(p->noun) != category(h->noun)) return std::nullopt;

  if (h->verb != p->verb) {
    if (antonyms().at(p->verb) != h->verb) return std::nullopt;
    return Label::Contradiction;
  }
  const bool subject_follows = h->noun == p->noun || h->noun == category(p->noun);
  const bool adjective_follows = h->adjective.empty() || h->adjective == p->adjective;
  if (subject_follows && adjective_follows) return Label::Entailment;
  return Label::Neutral;
}

Tensor random_tensor(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double range) {
  std::uniform_real_distribution<double> u(-range, range);
  Tensor t(rows, cols);
  for (auto& x : t.data()) x = u(rng);
  return t;
}

Vec random_vec(std::size_t n, std::mt19937_64& rng, double range) {
  std::uniform_real_distribution<double> u(-range, range);
  Vec v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

Vec to_vec(const Tensor& t) { return Vec(t.data().begin(), t.data().end()); }

Vec column_of(const Tensor& m, std::size_t j) {
  Vec out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = m(i, j);
  return out;
}

}  // namespace oracle
