#include "hyrule/trace.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hyrule/printer.hpp"

namespace hyrule {

std::optional<TraceFormat> parse_trace_format(const std::string& name) {
  if (name == "none") return TraceFormat::None;
  if (name == "text") return TraceFormat::Text;
  if (name == "dot") return TraceFormat::Dot;
  return std::nullopt;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string literals_text(const std::vector<RuleLiteral>& lits) {
  std::string out;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i) out += ", ";
    out += to_string(lits[i]);
  }
  return out;
}

const char* state_tag(const TreeNode& n) {
  switch (n.state) {
    case TreeNode::State::Successful:
      return "  [success]";
    case TreeNode::State::Leaf:
      return "  [leaf]";
    case TreeNode::State::Open:
      return "  [open]";
    case TreeNode::State::Expanded:
      return n.children.empty() ? "  [failed]" : "";
  }
  return "";
}

std::string header(const DerivationTree& tree) {
  return std::string("% ") + to_string(tree.kind) + "-tree of rank " + std::to_string(tree.rank) + " for " +
         to_string(tree.root()) + (tree.complete ? "" : " (incomplete)") + "\n";
}

}  // namespace

std::string trace_text(const DerivationTree& tree) {
  std::ostringstream out;
  out << header(tree);
  auto visit = [&](std::size_t i, std::size_t depth, auto&& self) -> void {
    const TreeNode& n = tree.nodes[i];
    out << std::string(2 * depth, ' ') << to_string(n.goal) << state_tag(n);
    if (n.negation && n.state != TreeNode::State::Leaf && n.negation->tree)
      out << "  <- " << (n.negation->subsidiary_kind == TreeKind::TU ? "negative answer " : "negated answer ")
          << to_string(n.negation->used);
    out << "\n";
    for (auto c : n.children) self(c, depth + 1, self);
  };
  visit(0, 0, visit);
  return out.str();
}

std::string trace_dot(const DerivationTree& tree) {
  std::ostringstream out;
  out << "digraph derivation {\n  label=\"" << dot_escape(header(tree).substr(2, header(tree).size() - 3)) << "\";\n";
  out << "  node [shape=box];\n";
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    out << "  n" << i << " [label=\"" << dot_escape(to_string(n.goal)) << "\"";
    if (n.state == TreeNode::State::Successful) out << ", peripheries=2";
    out << "];\n";
  }
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    for (auto c : tree.nodes[i].children) {
      const TreeNode& child = tree.nodes[c];
      std::string label = child.edge_label;
      if (child.negation && child.negation->tree) label += ": " + to_string(child.negation->used);
      out << "  n" << i << " -> n" << c << " [label=\"" << dot_escape(label) << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

namespace {

std::string maximal_header(const MaximalTree& tree) {
  return std::string("maximal ") + to_string(tree.kind) + "-tree of rank " + std::to_string(tree.rank) + " for " +
         to_string(tree.root);
}

std::string maximal_node(const MaximalTree::Node& n, const ModelTable& table) {
  std::string c = to_string(model_set_to_dnf(n.models, table));
  if (n.literals.empty()) return "{ " + c + " }";
  return "{ " + c + " }, " + literals_text(n.literals);
}

}  // namespace

std::string trace_text(const MaximalTree& tree, const ModelTable& table) {
  std::ostringstream out;
  out << "% " << maximal_header(tree) << "; answer " << to_string(model_set_to_dnf(tree.answer, table)) << "\n";
  auto visit = [&](std::size_t i, std::size_t depth, auto&& self) -> void {
    const auto& n = tree.nodes[i];
    out << std::string(2 * depth, ' ') << maximal_node(n, table);
    if (n.successful) out << "  [success]";
    else if (n.children.empty()) out << "  [leaf]";
    out << "\n";
    for (auto c : n.children) self(c, depth + 1, self);
  };
  visit(0, 0, visit);
  return out.str();
}

std::string trace_dot(const MaximalTree& tree, const ModelTable& table) {
  std::ostringstream out;
  out << "digraph derivation {\n  label=\"" << dot_escape(maximal_header(tree)) << "\";\n  node [shape=box];\n";
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    out << "  n" << i << " [label=\"" << dot_escape(maximal_node(tree.nodes[i], table)) << "\"";
    if (tree.nodes[i].successful) out << ", peripheries=2";
    out << "];\n";
  }
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    std::string label = n.selected && !n.literals[*n.selected].positive ? "neg" : "";
    for (auto c : n.children) out << "  n" << i << " -> n" << c << " [label=\"" << label << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
  f.close();
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace hyrule
