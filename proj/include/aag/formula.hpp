#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "aag/graph.hpp"

namespace aag {

/// Monotone boolean formula over access-method variables.
class AccessFormula {
 public:
  enum class Kind { Var, And, Or, Unsatisfiable };

  static AccessFormula var(NodeId id);
  // Both throw std::invalid_argument on an empty child list.
  static AccessFormula all_of(std::vector<AccessFormula> children);
  static AccessFormula any_of(std::vector<AccessFormula> children);
  static AccessFormula unsatisfiable();

  Kind kind() const { return kind_; }
  const NodeId& variable() const { return variable_; }
  std::span<const AccessFormula> children() const { return children_; }

  /// Distinct variables in first-appearance (left-to-right) order.
  std::vector<NodeId> variables() const;

  bool operator==(const AccessFormula&) const = default;

 private:
  AccessFormula() = default;

  Kind kind_ = Kind::Unsatisfiable;
  NodeId variable_;
  std::vector<AccessFormula> children_;
};

/// How leaves with no access methods (auth methods without devices,
/// referenced accounts) enter the formula.
enum class UnmappedLeafPolicy {
  Abstract,       // synthesize a variable "abstract:<node id>"
  Unsatisfiable,  // the leaf can never be satisfied
};

std::string_view to_string(UnmappedLeafPolicy policy);
std::optional<UnmappedLeafPolicy> parse_unmapped_leaf_policy(std::string_view text);

NodeId abstract_variable(std::string_view node_id);

/// Structural translation of the account's subgraph. Single-child lists
/// collapse, nested lists of the same kind are flattened and unsatisfiable
/// alternatives are dropped, none of which changes the boolean function.
AccessFormula extract_formula(const AccountAccessGraph& graph, std::string_view account,
                              UnmappedLeafPolicy policy = UnmappedLeafPolicy::Abstract);

/// Display labels for every variable a formula extracted from `graph` can
/// contain: access-method labels plus labels for abstract variables.
std::map<NodeId, std::string> variable_labels(const AccountAccessGraph& graph);

bool evaluate(const AccessFormula& formula, const std::set<NodeId>& available);

/// Infix rendering with "∧"/"∨"; compound operands are parenthesized.
/// Variables without a label render as their id.
std::string render(const AccessFormula& formula, const std::map<NodeId, std::string>& labels = {});

}  // namespace aag
