#include "treentail/inspect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace treentail {

namespace {

std::vector<InspectedNode> describe(const BinaryTree& tree) {
  const auto spans = tree.leaf_spans();
  std::vector<std::string> text(tree.size());
  std::vector<InspectedNode> out;
  out.reserve(tree.size());
  for (NodeId id : post_order(tree)) {
    const auto& n = tree.node(id);
    text[id] = n.is_leaf() ? n.token : "( " + text[n.left] + " " + text[n.right] + " )";
    out.push_back({id, n.is_leaf(), spans[id].first, spans[id].second, text[id]});
  }
  return out;
}

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void put_matrix(std::string& out, const char* name, const Tensor& m) {
  out += "matrix ";
  out += name;
  out += " " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += number(m(i, j));
    }
    out += '\n';
  }
}

void put_nodes(std::string& out, const char* name, const std::vector<InspectedNode>& nodes) {
  out += std::string("nodes ") + name + " " + std::to_string(nodes.size()) + "\n";
  for (const auto& n : nodes)
    out += std::to_string(n.id) + (n.leaf ? " leaf " : " phrase ") + std::to_string(n.first_leaf) + "-" +
           std::to_string(n.last_leaf) + " " + n.text + "\n";
}

}  // namespace

InspectionRecord inspect(const Model& model, const ExamplePair& pair) {
  const auto p = predict(model, pair.premise, pair.hypothesis, model.use_dual);
  InspectionRecord r;
  r.dual = model.use_dual;
  r.label = p.label;
  r.distribution = p.distribution;
  r.premise = describe(pair.premise);
  r.hypothesis = describe(pair.hypothesis);
  r.attention = p.attention;
  r.forward = p.forward;
  r.reverse = p.reverse;
  r.relation_confidence = Tensor(p.relations.size(), 3);
  for (std::size_t i = 0; i < p.relations.size(); ++i) {
    const auto conf = classify_value(model.params, p.relations[i]);
    for (std::size_t c = 0; c < 3; ++c) r.relation_confidence(i, c) = conf[c];
  }
  return r;
}

std::string format_inspection(const InspectionRecord& record) {
  std::string out = "treentail-inspection " + std::to_string(kInspectionVersion) + "\n";
  out += std::string("dual ") + (record.dual ? "on" : "off") + "\n";
  out += "label " + std::string(label_name(record.label)) + "\n";
  out += "labels contradiction neutral entailment\n";
  out += "distribution " + number(record.distribution[0]) + " " + number(record.distribution[1]) + " " +
         number(record.distribution[2]) + "\n";
  put_nodes(out, "premise", record.premise);
  put_nodes(out, "hypothesis", record.hypothesis);
  put_matrix(out, "attention", record.attention);
  put_matrix(out, "forward", record.forward);
  put_matrix(out, "reverse", record.reverse);
  put_matrix(out, "relation_confidence", record.relation_confidence);
  return out;
}

std::string attention_pgm(const Tensor& attention) {
  std::string out = "P5\n" + std::to_string(attention.cols()) + " " + std::to_string(attention.rows()) + "\n255\n";
  for (std::size_t i = 0; i < attention.rows(); ++i) {
    const auto row = attention.row(i);
    const double mx = row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
    for (double v : row) {
      const double darkness = mx > 0.0 ? std::clamp(v / mx, 0.0, 1.0) : 0.0;
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (1.0 - darkness)))));
    }
  }
  return out;
}

}  // namespace treentail
