#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "aag/graph.hpp"

namespace aag {

// Ordinal assurance level; declaration order is the total order.
enum class SecurityLevel { Low = 0, Medium = 1, High = 2 };

std::string_view to_string(SecurityLevel level);
std::optional<SecurityLevel> parse_security_level(std::string_view text);

/// Category defaults plus per-node overrides.
struct ScoringPolicy {
  std::map<MethodCategory, SecurityLevel> defaults{
      {MethodCategory::KnowledgeBased, SecurityLevel::Low},
      {MethodCategory::SoftwareBased, SecurityLevel::Medium},
      {MethodCategory::HardwareBased, SecurityLevel::High},
      {MethodCategory::AccountReference, SecurityLevel::Low},
  };
  std::map<NodeId, SecurityLevel> overrides;

  SecurityLevel level_for(MethodCategory category) const;
};

/// Parses {"defaults": {...}, "overrides": {...}}. Missing categories keep
/// their built-in default.
ScoringPolicy parse_scoring_policy(const Json& document);
Json to_json(const ScoringPolicy& policy);

/// Throws InvalidPolicy if an override targets a node that is neither an
/// auth method nor a childless account.
void validate_policy(const ScoringPolicy& policy, const AccountAccessGraph& graph);

SecurityLevel leaf_security(const AccountAccessGraph& graph, std::string_view node,
                            const ScoringPolicy& policy);

// AND takes the max of its children, OR (and a multi-child account) the min.
SecurityLevel security_score(const AccountAccessGraph& graph, std::string_view node,
                             const ScoringPolicy& policy);

}  // namespace aag
