#include "aag/graph.hpp"

#include <algorithm>
#include <set>

#include "aag/error.hpp"

namespace aag {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Account: return "account";
    case NodeKind::AuthMethod: return "auth_method";
    case NodeKind::Operator: return "operator";
    case NodeKind::AccessMethod: return "access_method";
  }
  return "account";
}

std::string_view to_string(OperatorKind kind) {
  return kind == OperatorKind::And ? "and" : "or";
}

std::string_view to_string(MethodCategory category) {
  switch (category) {
    case MethodCategory::KnowledgeBased: return "knowledge_based";
    case MethodCategory::SoftwareBased: return "software_based";
    case MethodCategory::HardwareBased: return "hardware_based";
    case MethodCategory::AccountReference: return "account_reference";
  }
  return "knowledge_based";
}

std::optional<MethodCategory> parse_method_category(std::string_view text) {
  for (auto c : {MethodCategory::KnowledgeBased, MethodCategory::SoftwareBased,
                 MethodCategory::HardwareBased, MethodCategory::AccountReference}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

bool AccountAccessGraph::contains(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

std::size_t AccountAccessGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    throw Error(ErrorCode::UnknownNode, "unknown node '" + std::string(id) + "'", std::string(id));
  }
  return it->second;
}

const Node& AccountAccessGraph::node(std::string_view id) const { return nodes_[index_of(id)]; }

std::span<const NodeId> AccountAccessGraph::children(std::string_view id) const {
  return children_[index_of(id)];
}

std::span<const NodeId> AccountAccessGraph::parents(std::string_view id) const {
  return parents_[index_of(id)];
}

std::vector<NodeId> AccountAccessGraph::access_methods() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::AccessMethod) out.push_back(n.id);
  }
  return out;
}

bool AccountAccessGraph::operator==(const AccountAccessGraph& other) const {
  return nodes_ == other.nodes_ && edges_ == other.edges_ && roots_ == other.roots_;
}

namespace {

bool child_kind_allowed(NodeKind parent, NodeKind child) {
  switch (parent) {
    case NodeKind::Account:
    case NodeKind::Operator:
      return child != NodeKind::AccessMethod;
    case NodeKind::AuthMethod:
      return child == NodeKind::AccessMethod;
    case NodeKind::AccessMethod:
      return false;
  }
  return false;
}

// Iterative three-colour DFS; returns the node sequence of the first cycle
// found (first node repeated at the end), or an empty vector.
std::vector<NodeId> find_cycle(const std::vector<Node>& nodes,
                               const std::vector<std::vector<std::size_t>>& adj) {
  enum class Colour { White, Grey, Black };
  std::vector<Colour> colour(nodes.size(), Colour::White);
  std::vector<std::size_t> parent(nodes.size(), SIZE_MAX);

  for (std::size_t start = 0; start < nodes.size(); ++start) {
    if (colour[start] != Colour::White) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
    colour[start] = Colour::Grey;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next == adj[v].size()) {
        colour[v] = Colour::Black;
        stack.pop_back();
        continue;
      }
      std::size_t w = adj[v][next++];
      if (colour[w] == Colour::Grey) {
        std::vector<NodeId> cycle{nodes[w].id};
        std::vector<NodeId> back;
        for (std::size_t u = v; u != w; u = parent[u]) back.push_back(nodes[u].id);
        cycle.insert(cycle.end(), back.rbegin(), back.rend());
        cycle.push_back(nodes[w].id);
        return cycle;
      }
      if (colour[w] == Colour::White) {
        colour[w] = Colour::Grey;
        parent[w] = v;
        stack.emplace_back(w, 0);
      }
    }
  }
  return {};
}

std::string join(const std::vector<NodeId>& ids, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += sep;
    out += ids[i];
  }
  return out;
}

}  // namespace

AccountAccessGraph assemble_graph(std::vector<Node> nodes, std::vector<Edge> edges,
                                  std::vector<NodeId> roots,
                                  std::vector<std::string> warnings) {
  AccountAccessGraph g;

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    // Fields that do not apply to a kind are reset so equality ignores them.
    auto& n = nodes[i];
    if (n.kind != NodeKind::AuthMethod) n.category = Node{}.category;
    if (n.kind != NodeKind::Operator) n.op = Node{}.op;
    const auto& id = n.id;
    if (id.empty()) {
      throw Error(ErrorCode::InvalidNodeId, "node #" + std::to_string(i) + " has an empty id");
    }
    if (id.starts_with(kAbstractPrefix)) {
      throw Error(ErrorCode::InvalidNodeId,
                  "node id '" + id + "' uses the reserved prefix '" + std::string(kAbstractPrefix) + "'",
                  id);
    }
    if (!g.index_.emplace(id, i).second) {
      throw Error(ErrorCode::DuplicateNodeId, "duplicate node id '" + id + "'", id);
    }
  }

  std::vector<std::vector<std::size_t>> adj(nodes.size());
  g.children_.assign(nodes.size(), {});
  g.parents_.assign(nodes.size(), {});
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : edges) {
    auto p = g.index_.find(e.parent);
    auto c = g.index_.find(e.child);
    if (p == g.index_.end() || c == g.index_.end()) {
      const auto& missing = p == g.index_.end() ? e.parent : e.child;
      throw Error(ErrorCode::DanglingEdge,
                  "edge " + e.parent + " -> " + e.child + " references missing node '" + missing + "'",
                  missing);
    }
    if (!seen.emplace(p->second, c->second).second) {
      throw Error(ErrorCode::DuplicateEdge, "duplicate edge " + e.parent + " -> " + e.child,
                  e.parent);
    }
    const auto& pn = nodes[p->second];
    const auto& cn = nodes[c->second];
    if (!child_kind_allowed(pn.kind, cn.kind)) {
      throw Error(ErrorCode::IllegalChildKind,
                  std::string(to_string(cn.kind)) + " '" + cn.id + "' cannot be a child of " +
                      std::string(to_string(pn.kind)) + " '" + pn.id + "'",
                  cn.id);
    }
    adj[p->second].push_back(c->second);
    g.children_[p->second].push_back(cn.id);
    g.parents_[c->second].push_back(pn.id);
  }

  if (auto cycle = find_cycle(nodes, adj); !cycle.empty()) {
    throw Error(ErrorCode::CycleDetected, "cycle detected: " + join(cycle, " -> "), cycle.front());
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.kind != NodeKind::AccessMethod && g.parents_[i].size() > 1) {
      throw Error(ErrorCode::MultiParentNonAccessMethod,
                  std::string(to_string(n.kind)) + " '" + n.id + "' has " +
                      std::to_string(g.parents_[i].size()) + " parents (" + join(g.parents_[i], ", ") +
                      ")",
                  n.id);
    }
    if (n.kind == NodeKind::Operator && g.children_[i].empty()) {
      throw Error(ErrorCode::EmptyOperator, "operator '" + n.id + "' has no children", n.id);
    }
  }

  if (roots.empty()) {
    throw Error(ErrorCode::RootNotAccount, "graph has no root account");
  }
  for (const auto& r : roots) {
    auto it = g.index_.find(r);
    if (it == g.index_.end()) {
      throw Error(ErrorCode::UnknownNode, "root '" + r + "' is not a node", r);
    }
    if (nodes[it->second].kind != NodeKind::Account) {
      throw Error(ErrorCode::RootNotAccount, "root '" + r + "' is not an account", r);
    }
  }
  if (std::set<NodeId>(roots.begin(), roots.end()).size() != roots.size()) {
    throw Error(ErrorCode::DuplicateNodeId, "root listed more than once");
  }

  std::vector<bool> reached(nodes.size(), false);
  std::vector<std::size_t> stack;
  for (const auto& r : roots) stack.push_back(g.index_.at(r));
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (reached[v]) continue;
    reached[v] = true;
    for (auto w : adj[v]) stack.push_back(w);
  }
  std::vector<NodeId> orphans;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!reached[i] && nodes[i].kind == NodeKind::AccessMethod) orphans.push_back(nodes[i].id);
  }
  if (!orphans.empty()) {
    warnings.push_back("access methods not reachable from any root: " + join(orphans, ", "));
  }

  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  g.roots_ = std::move(roots);
  g.warnings_ = std::move(warnings);
  return g;
}

namespace {

const std::set<std::string, std::less<>> kTopFields{"nodes", "edges", "roots"};
const std::set<std::string, std::less<>> kNodeFields{"id", "kind", "label", "category", "op"};

void check_fields(const Json& object, const std::set<std::string, std::less<>>& allowed,
                  const std::string& where, const ParseOptions& options,
                  std::vector<std::string>& warnings) {
  for (const auto& [key, _] : object.items()) {
    if (allowed.contains(key)) continue;
    if (options.strict) {
      throw Error(ErrorCode::UnknownField, "unknown field '" + key + "' in " + where, where + "/" + key);
    }
    warnings.push_back("ignored unknown field '" + key + "' in " + where);
  }
}

std::string require_string(const Json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end() || !it->is_string()) {
    throw Error(ErrorCode::ParseError, where + ": field '" + key + "' must be a string",
                where + "/" + key);
  }
  return it->get<std::string>();
}

NodeKind parse_kind(const std::string& text, const std::string& where) {
  for (auto k : {NodeKind::Account, NodeKind::AuthMethod, NodeKind::Operator, NodeKind::AccessMethod}) {
    if (to_string(k) == text) return k;
  }
  throw Error(ErrorCode::ParseError, where + ": unknown node kind '" + text + "'", where + "/kind");
}

}  // namespace

AccountAccessGraph build_graph(const Json& document, const ParseOptions& options) {
  if (!document.is_object()) {
    throw Error(ErrorCode::ParseError, "graph document must be a JSON object");
  }
  std::vector<std::string> warnings;
  check_fields(document, kTopFields, "document", options, warnings);

  auto array_field = [&](const char* key) -> const Json& {
    auto it = document.find(key);
    if (it == document.end() || !it->is_array()) {
      throw Error(ErrorCode::ParseError, std::string("field '") + key + "' must be an array",
                  std::string("/") + key);
    }
    return *it;
  };

  std::vector<Node> nodes;
  const auto& jnodes = array_field("nodes");
  for (std::size_t i = 0; i < jnodes.size(); ++i) {
    const auto& jn = jnodes[i];
    std::string where = "/nodes/" + std::to_string(i);
    if (!jn.is_object()) throw Error(ErrorCode::ParseError, where + " must be an object", where);
    check_fields(jn, kNodeFields, where, options, warnings);

    Node n;
    n.id = require_string(jn, "id", where);
    n.kind = parse_kind(require_string(jn, "kind", where), where);
    n.label = jn.contains("label") ? require_string(jn, "label", where) : n.id;

    if (n.kind == NodeKind::AuthMethod) {
      auto text = require_string(jn, "category", where);
      auto category = parse_method_category(text);
      if (!category) {
        throw Error(ErrorCode::ParseError, where + ": unknown category '" + text + "'", where + "/category");
      }
      n.category = *category;
    } else if (jn.contains("category")) {
      if (options.strict) {
        throw Error(ErrorCode::UnknownField, where + ": 'category' only applies to auth_method nodes",
                    where + "/category");
      }
      warnings.push_back("ignored 'category' on non-auth_method node '" + n.id + "'");
    }

    if (n.kind == NodeKind::Operator) {
      auto text = require_string(jn, "op", where);
      if (text == "and") {
        n.op = OperatorKind::And;
      } else if (text == "or") {
        n.op = OperatorKind::Or;
      } else {
        throw Error(ErrorCode::ParseError, where + ": unknown operator '" + text + "'", where + "/op");
      }
    } else if (jn.contains("op")) {
      if (options.strict) {
        throw Error(ErrorCode::UnknownField, where + ": 'op' only applies to operator nodes", where + "/op");
      }
      warnings.push_back("ignored 'op' on non-operator node '" + n.id + "'");
    }
    nodes.push_back(std::move(n));
  }

  std::vector<Edge> edges;
  const auto& jedges = array_field("edges");
  for (std::size_t i = 0; i < jedges.size(); ++i) {
    const auto& je = jedges[i];
    if (!je.is_array() || je.size() != 2 || !je[0].is_string() || !je[1].is_string()) {
      throw Error(ErrorCode::ParseError, "edge #" + std::to_string(i) + " must be [\"parent\", \"child\"]",
                  "/edges/" + std::to_string(i));
    }
    edges.push_back({je[0].get<std::string>(), je[1].get<std::string>()});
  }

  std::vector<NodeId> roots;
  const auto& jroots = array_field("roots");
  for (std::size_t i = 0; i < jroots.size(); ++i) {
    if (!jroots[i].is_string()) {
      throw Error(ErrorCode::ParseError, "roots must be strings", "/roots/" + std::to_string(i));
    }
    roots.push_back(jroots[i].get<std::string>());
  }

  return assemble_graph(std::move(nodes), std::move(edges), std::move(roots), std::move(warnings));
}

AccountAccessGraph parse_graph(std::string_view text, const ParseOptions& options) {
  Json document;
  try {
    document = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
  return build_graph(document, options);
}

Json to_json(const AccountAccessGraph& graph) {
  Json nodes = Json::array();
  for (const auto& n : graph.nodes()) {
    Json jn;
    jn["id"] = n.id;
    jn["kind"] = to_string(n.kind);
    jn["label"] = n.label;
    if (n.kind == NodeKind::AuthMethod) jn["category"] = to_string(n.category);
    if (n.kind == NodeKind::Operator) jn["op"] = to_string(n.op);
    nodes.push_back(std::move(jn));
  }
  Json edges = Json::array();
  for (const auto& e : graph.edges()) edges.push_back(Json::array({e.parent, e.child}));
  Json roots = Json::array();
  for (const auto& r : graph.roots()) roots.push_back(r);

  Json doc;
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  doc["roots"] = std::move(roots);
  return doc;
}

std::string serialize(const AccountAccessGraph& graph) { return to_json(graph).dump(2); }

AccountAccessGraph subgraph_of(const AccountAccessGraph& graph, std::string_view account) {
  const auto& root = graph.node(account);
  if (root.kind != NodeKind::Account) {
    throw Error(ErrorCode::NotAnAccount, "'" + root.id + "' is not an account", root.id);
  }

  std::vector<bool> keep(graph.nodes().size(), false);
  std::vector<NodeId> stack{root.id};
  while (!stack.empty()) {
    auto id = std::move(stack.back());
    stack.pop_back();
    auto i = graph.index_of(id);
    if (keep[i]) continue;
    keep[i] = true;
    for (const auto& c : graph.children(id)) stack.push_back(c);
  }

  std::vector<Node> nodes;
  for (std::size_t i = 0; i < graph.nodes().size(); ++i) {
    if (keep[i]) nodes.push_back(graph.nodes()[i]);
  }
  std::vector<Edge> edges;
  for (const auto& e : graph.edges()) {
    if (keep[graph.index_of(e.parent)] && keep[graph.index_of(e.child)]) edges.push_back(e);
  }
  return assemble_graph(std::move(nodes), std::move(edges), {root.id});
}

}  // namespace aag
