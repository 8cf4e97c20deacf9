#include "aag/security.hpp"

#include <algorithm>
#include <unordered_map>

#include "aag/error.hpp"

namespace aag {

std::string_view to_string(SecurityLevel level) {
  switch (level) {
    case SecurityLevel::Low: return "low";
    case SecurityLevel::Medium: return "medium";
    case SecurityLevel::High: return "high";
  }
  return "low";
}

std::optional<SecurityLevel> parse_security_level(std::string_view text) {
  for (auto l : {SecurityLevel::Low, SecurityLevel::Medium, SecurityLevel::High}) {
    if (to_string(l) == text) return l;
  }
  return std::nullopt;
}

SecurityLevel ScoringPolicy::level_for(MethodCategory category) const {
  auto it = defaults.find(category);
  if (it != defaults.end()) return it->second;
  return ScoringPolicy{}.defaults.at(category);
}

ScoringPolicy parse_scoring_policy(const Json& document) {
  if (!document.is_object()) {
    throw Error(ErrorCode::InvalidPolicy, "scoring policy must be a JSON object");
  }
  ScoringPolicy policy;
  auto level_of = [](const Json& value, const std::string& path) {
    auto level = value.is_string() ? parse_security_level(value.get<std::string>()) : std::nullopt;
    if (!level) throw Error(ErrorCode::InvalidPolicy, path + ": expected low, medium or high", path);
    return *level;
  };
  for (const auto& [key, value] : document.items()) {
    if (key == "defaults") {
      if (!value.is_object()) throw Error(ErrorCode::InvalidPolicy, "defaults must be an object", "/defaults");
      for (const auto& [cat, level] : value.items()) {
        auto category = parse_method_category(cat);
        if (!category) {
          throw Error(ErrorCode::InvalidPolicy, "unknown category '" + cat + "'", "/defaults/" + cat);
        }
        policy.defaults[*category] = level_of(level, "/defaults/" + cat);
      }
    } else if (key == "overrides") {
      if (!value.is_object()) {
        throw Error(ErrorCode::InvalidPolicy, "overrides must be an object", "/overrides");
      }
      for (const auto& [id, level] : value.items()) {
        policy.overrides[id] = level_of(level, "/overrides/" + id);
      }
    } else {
      throw Error(ErrorCode::InvalidPolicy, "unknown policy field '" + key + "'", "/" + key);
    }
  }
  return policy;
}

Json to_json(const ScoringPolicy& policy) {
  Json out;
  Json defaults = Json::object();
  for (const auto& [cat, level] : policy.defaults) defaults[std::string(to_string(cat))] = to_string(level);
  Json overrides = Json::object();
  for (const auto& [id, level] : policy.overrides) overrides[id] = to_string(level);
  out["defaults"] = std::move(defaults);
  out["overrides"] = std::move(overrides);
  return out;
}

namespace {

bool is_scoring_leaf(const AccountAccessGraph& graph, const Node& n) {
  return n.kind == NodeKind::AuthMethod ||
         (n.kind == NodeKind::Account && graph.children(n.id).empty());
}

}  // namespace

void validate_policy(const ScoringPolicy& policy, const AccountAccessGraph& graph) {
  for (const auto& [id, _] : policy.overrides) {
    if (!graph.contains(id)) {
      throw Error(ErrorCode::InvalidPolicy, "override references unknown node '" + id + "'", id);
    }
    if (!is_scoring_leaf(graph, graph.node(id))) {
      throw Error(ErrorCode::InvalidPolicy,
                  "override on '" + id + "' must target an auth method or a leaf account", id);
    }
  }
}

SecurityLevel leaf_security(const AccountAccessGraph& graph, std::string_view node,
                            const ScoringPolicy& policy) {
  const auto& n = graph.node(node);
  if (!is_scoring_leaf(graph, n)) {
    throw Error(ErrorCode::NotALeaf, "'" + n.id + "' is not an auth method or leaf account", n.id);
  }
  if (auto it = policy.overrides.find(n.id); it != policy.overrides.end()) return it->second;
  return policy.level_for(n.kind == NodeKind::Account ? MethodCategory::AccountReference : n.category);
}

namespace {

class SecurityFolder {
 public:
  SecurityFolder(const AccountAccessGraph& graph, const ScoringPolicy& policy)
      : graph_(graph), policy_(policy) {}

  SecurityLevel score(const NodeId& id) {
    if (auto it = memo_.find(id); it != memo_.end()) return it->second;
    const auto& n = graph_.node(id);
    SecurityLevel level;
    if (is_scoring_leaf(graph_, n)) {
      level = leaf_security(graph_, id, policy_);
    } else if (n.kind == NodeKind::AccessMethod) {
      throw Error(ErrorCode::NotALeaf, "access method '" + id + "' carries no security level", id);
    } else {
      bool conjunctive = n.kind == NodeKind::Operator && n.op == OperatorKind::And;
      auto children = graph_.children(id);
      level = score(children.front());
      for (const auto& c : children.subspan(1)) {
        level = conjunctive ? std::max(level, score(c)) : std::min(level, score(c));
      }
    }
    memo_.emplace(id, level);
    return level;
  }

 private:
  const AccountAccessGraph& graph_;
  const ScoringPolicy& policy_;
  std::unordered_map<NodeId, SecurityLevel> memo_;
};

}  // namespace

SecurityLevel security_score(const AccountAccessGraph& graph, std::string_view node,
                             const ScoringPolicy& policy) {
  SecurityFolder folder(graph, policy);
  return folder.score(graph.node(node).id);
}

}  // namespace aag
