#pragma once

#include <map>
#include <string>
#include <vector>

#include "aag/accessibility.hpp"
#include "aag/narrative.hpp"
#include "aag/security.hpp"

namespace aag {

struct AnalysisOptions {
  UnmappedLeafPolicy unmapped = UnmappedLeafPolicy::Abstract;
  ScoringPolicy scoring;
  DnfLimits limits;
  Phrasing phrasing;
};

/// Everything computed for one root account.
struct AccountAnalysis {
  NodeId account;
  std::string label;
  SecurityLevel security = SecurityLevel::Low;
  AccessFormula formula = AccessFormula::unsatisfiable();
  Dnf expanded;
  AccessibilityResult accessibility;
  Rational legacy;
  std::string narrative;
  std::map<NodeId, std::string> labels;
  // Access methods whose loss alone locks the account (singleton lockout sets).
  std::vector<NodeId> key_access_methods;
};

AccountAnalysis analyze_account(const AccountAccessGraph& graph, std::string_view account,
                                const AnalysisOptions& options = {});

/// One analysis per root, in root order.
std::vector<AccountAnalysis> analyze_graph(const AccountAccessGraph& graph,
                                           const AnalysisOptions& options = {});

RiskBand security_band(SecurityLevel level);

Json to_json(const VarSet& ids);
Json to_json(const std::vector<VarSet>& sets);
Json to_json(const AccountAnalysis& analysis);

/// {"accounts": {id: report}, "warnings": [...]}.
Json analysis_report(const AccountAccessGraph& graph, const std::vector<AccountAnalysis>& analyses);

Json to_json(const WhatIfResult& what, std::string_view account, const std::set<NodeId>& lost,
             const std::map<NodeId, std::string>& labels);

}  // namespace aag
