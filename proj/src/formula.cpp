#include "aag/formula.hpp"

#include <algorithm>
#include <stdexcept>

#include "aag/error.hpp"

namespace aag {

AccessFormula AccessFormula::var(NodeId id) {
  AccessFormula f;
  f.kind_ = Kind::Var;
  f.variable_ = std::move(id);
  return f;
}

AccessFormula AccessFormula::all_of(std::vector<AccessFormula> children) {
  if (children.empty()) throw std::invalid_argument("all_of needs at least one operand");
  AccessFormula f;
  f.kind_ = Kind::And;
  f.children_ = std::move(children);
  return f;
}

AccessFormula AccessFormula::any_of(std::vector<AccessFormula> children) {
  if (children.empty()) throw std::invalid_argument("any_of needs at least one operand");
  AccessFormula f;
  f.kind_ = Kind::Or;
  f.children_ = std::move(children);
  return f;
}

AccessFormula AccessFormula::unsatisfiable() { return AccessFormula{}; }

std::vector<NodeId> AccessFormula::variables() const {
  std::vector<NodeId> out;
  std::set<NodeId> seen;
  auto visit = [&](const AccessFormula& f, auto&& self) -> void {
    if (f.kind_ == Kind::Var) {
      if (seen.insert(f.variable_).second) out.push_back(f.variable_);
      return;
    }
    for (const auto& c : f.children_) self(c, self);
  };
  visit(*this, visit);
  return out;
}

std::string_view to_string(UnmappedLeafPolicy policy) {
  return policy == UnmappedLeafPolicy::Abstract ? "abstract" : "unsatisfiable";
}

std::optional<UnmappedLeafPolicy> parse_unmapped_leaf_policy(std::string_view text) {
  if (text == "abstract") return UnmappedLeafPolicy::Abstract;
  if (text == "unsatisfiable") return UnmappedLeafPolicy::Unsatisfiable;
  return std::nullopt;
}

NodeId abstract_variable(std::string_view node_id) {
  return std::string(kAbstractPrefix) + std::string(node_id);
}

namespace {

// Builds an And/Or list, applying the equivalence-preserving
// simplifications: flatten same-kind children, drop or propagate
// Unsatisfiable, collapse singletons.
AccessFormula combine(AccessFormula::Kind kind, std::vector<AccessFormula> operands) {
  using Kind = AccessFormula::Kind;
  std::vector<AccessFormula> flat;
  for (auto& op : operands) {
    if (op.kind() == Kind::Unsatisfiable) {
      if (kind == Kind::And) return AccessFormula::unsatisfiable();
      continue;
    }
    if (op.kind() == kind) {
      flat.insert(flat.end(), op.children().begin(), op.children().end());
    } else {
      flat.push_back(std::move(op));
    }
  }
  if (flat.empty()) return AccessFormula::unsatisfiable();
  if (flat.size() == 1) return std::move(flat.front());
  return kind == Kind::And ? AccessFormula::all_of(std::move(flat))
                           : AccessFormula::any_of(std::move(flat));
}

AccessFormula unmapped_leaf(const Node& n, UnmappedLeafPolicy policy) {
  if (policy == UnmappedLeafPolicy::Abstract) return AccessFormula::var(abstract_variable(n.id));
  return AccessFormula::unsatisfiable();
}

AccessFormula translate(const AccountAccessGraph& graph, const Node& n, UnmappedLeafPolicy policy) {
  auto children = graph.children(n.id);
  switch (n.kind) {
    case NodeKind::AccessMethod:
      return AccessFormula::var(n.id);
    case NodeKind::AuthMethod: {
      if (children.empty()) return unmapped_leaf(n, policy);
      std::vector<AccessFormula> ops;
      for (const auto& c : children) ops.push_back(AccessFormula::var(c));
      return combine(AccessFormula::Kind::Or, std::move(ops));
    }
    case NodeKind::Account:
    case NodeKind::Operator: {
      if (children.empty()) return unmapped_leaf(n, policy);
      std::vector<AccessFormula> ops;
      for (const auto& c : children) ops.push_back(translate(graph, graph.node(c), policy));
      bool conjunctive = n.kind == NodeKind::Operator && n.op == OperatorKind::And;
      return combine(conjunctive ? AccessFormula::Kind::And : AccessFormula::Kind::Or, std::move(ops));
    }
  }
  return AccessFormula::unsatisfiable();
}

}  // namespace

AccessFormula extract_formula(const AccountAccessGraph& graph, std::string_view account,
                              UnmappedLeafPolicy policy) {
  const auto& root = graph.node(account);
  if (root.kind != NodeKind::Account) {
    throw Error(ErrorCode::NotAnAccount, "'" + root.id + "' is not an account", root.id);
  }
  return translate(graph, root, policy);
}

std::map<NodeId, std::string> variable_labels(const AccountAccessGraph& graph) {
  std::map<NodeId, std::string> labels;
  for (const auto& n : graph.nodes()) {
    if (n.kind == NodeKind::AccessMethod) {
      labels[n.id] = n.label;
    } else if (n.kind == NodeKind::AuthMethod || n.kind == NodeKind::Account) {
      labels[abstract_variable(n.id)] = n.label;
    }
  }
  return labels;
}

bool evaluate(const AccessFormula& formula, const std::set<NodeId>& available) {
  switch (formula.kind()) {
    case AccessFormula::Kind::Var:
      return available.contains(formula.variable());
    case AccessFormula::Kind::And:
      return std::ranges::all_of(formula.children(),
                                 [&](const auto& c) { return evaluate(c, available); });
    case AccessFormula::Kind::Or:
      return std::ranges::any_of(formula.children(),
                                 [&](const auto& c) { return evaluate(c, available); });
    case AccessFormula::Kind::Unsatisfiable:
      return false;
  }
  return false;
}

namespace {

void render_into(const AccessFormula& f, const std::map<NodeId, std::string>& labels, bool nested,
                 std::string& out) {
  switch (f.kind()) {
    case AccessFormula::Kind::Var: {
      auto it = labels.find(f.variable());
      out += it == labels.end() ? f.variable() : it->second;
      return;
    }
    case AccessFormula::Kind::Unsatisfiable:
      out += "⊥";
      return;
    case AccessFormula::Kind::And:
    case AccessFormula::Kind::Or: {
      auto children = f.children();
      if (children.size() == 1) {
        render_into(children.front(), labels, nested, out);
        return;
      }
      const char* sep = f.kind() == AccessFormula::Kind::And ? " ∧ " : " ∨ ";
      if (nested) out += '(';
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) out += sep;
        render_into(children[i], labels, true, out);
      }
      if (nested) out += ')';
      return;
    }
  }
}

}  // namespace

std::string render(const AccessFormula& formula, const std::map<NodeId, std::string>& labels) {
  std::string out;
  render_into(formula, labels, false, out);
  return out;
}

}  // namespace aag
