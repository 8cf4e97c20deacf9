#include "aag/analysis.hpp"

namespace aag {

AccountAnalysis analyze_account(const AccountAccessGraph& graph, std::string_view account,
                                const AnalysisOptions& options) {
  AccountAnalysis a;
  const auto& root = graph.node(account);
  a.account = root.id;
  a.label = root.label;
  a.formula = extract_formula(graph, account, options.unmapped);
  a.security = security_score(graph, account, options.scoring);
  a.expanded = to_dnf(a.formula, options.limits);
  auto order = graph.access_methods();
  a.accessibility = accessibility_score(minimize_dnf(a.expanded), options.limits, order);
  a.legacy = legacy_accessibility_score(a.formula);
  a.labels = variable_labels(graph);
  a.narrative = narrative(a.accessibility, a.label, a.labels, options.phrasing);
  for (const auto& set : a.accessibility.lockout_sets) {
    if (set.size() == 1) a.key_access_methods.push_back(set.front());
  }
  return a;
}

std::vector<AccountAnalysis> analyze_graph(const AccountAccessGraph& graph,
                                           const AnalysisOptions& options) {
  std::vector<AccountAnalysis> out;
  for (const auto& root : graph.roots()) out.push_back(analyze_account(graph, root, options));
  return out;
}

RiskBand security_band(SecurityLevel level) {
  switch (level) {
    case SecurityLevel::Low: return RiskBand::Red;
    case SecurityLevel::Medium: return RiskBand::Yellow;
    case SecurityLevel::High: return RiskBand::Green;
  }
  return RiskBand::Red;
}

Json to_json(const VarSet& ids) {
  Json out = Json::array();
  for (const auto& id : ids) out.push_back(id);
  return out;
}

Json to_json(const std::vector<VarSet>& sets) {
  Json out = Json::array();
  for (const auto& s : sets) out.push_back(to_json(s));
  return out;
}

namespace {

Json accessibility_json(const AccessibilityResult& r, const std::map<NodeId, std::string>& labels) {
  Json j;
  j["score"] = format_rational(r.score);
  j["score_decimal"] = to_double(r.score);
  j["band"] = to_string(accessibility_band(r.score));
  j["reduced_term"] = to_json(r.reduced.terms());
  j["term"] = render(r.reduced, labels);
  j["lockout_sets"] = to_json(r.lockout_sets);
  Json occ = Json::object();
  for (const auto& [id, n] : r.occurrences) occ[id] = n;
  j["occurrences"] = std::move(occ);
  j["safe_loss_bound"] = format_rational(r.safe_loss_bound);
  j["fractional"] = r.fractional();
  j["unreachable"] = r.unreachable;
  return j;
}

}  // namespace

Json to_json(const AccountAnalysis& a) {
  Json j;
  j["label"] = a.label;
  j["security"] = to_string(a.security);
  j["security_band"] = to_string(security_band(a.security));
  auto acc = accessibility_json(a.accessibility, a.labels);
  acc["formula"] = render(a.formula, a.labels);
  acc["narrative"] = a.narrative;
  j["accessibility"] = std::move(acc);
  Json legacy;
  legacy["score"] = format_rational(a.legacy);
  legacy["score_decimal"] = to_double(a.legacy);
  legacy["note"] = "legacy (reconstructed)";
  j["legacy"] = std::move(legacy);
  j["key_access_methods"] = to_json(a.key_access_methods);
  return j;
}

Json analysis_report(const AccountAccessGraph& graph, const std::vector<AccountAnalysis>& analyses) {
  Json accounts = Json::object();
  for (const auto& a : analyses) accounts[a.account] = to_json(a);
  Json warnings = Json::array();
  for (const auto& w : graph.warnings()) warnings.push_back(w);
  Json out;
  out["accounts"] = std::move(accounts);
  out["warnings"] = std::move(warnings);
  return out;
}

Json to_json(const WhatIfResult& what, std::string_view account, const std::set<NodeId>& lost,
             const std::map<NodeId, std::string>& labels) {
  Json j;
  j["account"] = account;
  Json jl = Json::array();
  for (const auto& id : lost) jl.push_back(id);
  j["lost"] = std::move(jl);
  j["accessible"] = what.accessible;
  j["score"] = format_rational(what.result.score);
  j["accessibility"] = accessibility_json(what.result, labels);
  return j;
}

}  // namespace aag
