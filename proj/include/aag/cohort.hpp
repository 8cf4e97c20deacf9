#pragma once

#include <map>
#include <string>
#include <vector>

#include "aag/analysis.hpp"
#include "aag/provider.hpp"
#include "aag/survey.hpp"

namespace aag {

struct UserResult {
  std::string id;
  Provider provider = Provider::Google;
  SecurityLevel security = SecurityLevel::Low;
  Rational score;
  Rational legacy;
  std::vector<VarSet> lockout_sets;
  std::vector<NodeId> key_access_methods;
  std::vector<std::string> key_access_labels;
  std::string narrative;
};

struct ProviderAggregate {
  std::size_t users = 0;
  std::map<SecurityLevel, std::size_t> security;
  // floor(score) -> users
  std::map<long long, std::size_t> accessibility;
  std::map<RiskBand, std::size_t> bands;
  // method / password-access adoption counts
  std::map<std::string, std::size_t> adoption;
  std::map<std::string, std::size_t> password_access;
};

struct CohortReport {
  std::vector<UserResult> users;  // input order
  std::map<Provider, ProviderAggregate> aggregates;
  std::vector<RowError> errors;
};

struct BatchOptions {
  AnalysisOptions analysis;
  InstantiateOptions instantiate;
  // 0 = hardware concurrency.
  unsigned threads = 0;
};

/// Analyzes every record; records failing validation or analysis become
/// row errors instead of aborting. Results do not depend on thread count.
CohortReport batch_analyze(const std::vector<UserAccountRecord>& records, const BatchOptions& options = {});

Json to_json(const CohortReport& report);

}  // namespace aag
