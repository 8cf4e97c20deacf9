#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace aag {

using Json = nlohmann::ordered_json;
using NodeId = std::string;

enum class NodeKind { Account, AuthMethod, Operator, AccessMethod };
enum class OperatorKind { And, Or };
enum class MethodCategory { KnowledgeBased, SoftwareBased, HardwareBased, AccountReference };

std::string_view to_string(NodeKind kind);
std::string_view to_string(OperatorKind kind);
std::string_view to_string(MethodCategory category);
std::optional<MethodCategory> parse_method_category(std::string_view text);

// Ids with this prefix are reserved for variables synthesized from
// unmapped leaves and cannot appear in a graph document.
inline constexpr std::string_view kAbstractPrefix = "abstract:";

struct Node {
  NodeId id;
  NodeKind kind = NodeKind::Account;
  std::string label;
  // Only meaningful for AuthMethod nodes.
  MethodCategory category = MethodCategory::KnowledgeBased;
  // Only meaningful for Operator nodes.
  OperatorKind op = OperatorKind::Or;

  bool operator==(const Node&) const = default;
};

struct Edge {
  NodeId parent;
  NodeId child;

  bool operator==(const Edge&) const = default;
};

/// Immutable, validated Account Access Graph.
///
/// Nodes keep document order; children of a node are listed in the order
/// their edges appear in the document. Build instances with build_graph()
/// or parse_graph(); both enforce every structural invariant.
class AccountAccessGraph {
 public:
  AccountAccessGraph() = default;

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const NodeId> roots() const { return roots_; }
  std::span<const std::string> warnings() const { return warnings_; }

  bool contains(std::string_view id) const;
  const Node& node(std::string_view id) const;  // throws UnknownNode
  std::size_t index_of(std::string_view id) const;
  std::span<const NodeId> children(std::string_view id) const;
  std::span<const NodeId> parents(std::string_view id) const;

  /// Access-method node ids in document order.
  std::vector<NodeId> access_methods() const;

  /// Structural equality: nodes, edges and roots in order. Warnings are
  /// diagnostics and do not participate.
  bool operator==(const AccountAccessGraph& other) const;

 private:
  friend AccountAccessGraph assemble_graph(std::vector<Node>, std::vector<Edge>,
                                           std::vector<NodeId>, std::vector<std::string>);

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<NodeId> roots_;
  std::vector<std::string> warnings_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<std::vector<NodeId>> parents_;
};

struct ParseOptions {
  // Reject unknown object fields instead of recording a warning.
  bool strict = false;
};

/// Validates nodes/edges/roots and returns the graph, or throws aag::Error
/// with the first violated invariant.
AccountAccessGraph assemble_graph(std::vector<Node> nodes, std::vector<Edge> edges,
                                  std::vector<NodeId> roots,
                                  std::vector<std::string> warnings = {});

AccountAccessGraph build_graph(const Json& document, const ParseOptions& options = {});
AccountAccessGraph parse_graph(std::string_view text, const ParseOptions& options = {});

Json to_json(const AccountAccessGraph& graph);
std::string serialize(const AccountAccessGraph& graph);

/// Induced graph of everything reachable from `account`, rooted at it.
AccountAccessGraph subgraph_of(const AccountAccessGraph& graph, std::string_view account);

}  // namespace aag
