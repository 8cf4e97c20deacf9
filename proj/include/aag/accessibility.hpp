#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "aag/dnf.hpp"
#include "aag/graph.hpp"

namespace aag {

using Rational = boost::multiprecision::cpp_rational;

/// "2" for integers, "3/2" otherwise.
std::string format_rational(const Rational& value);
/// Up to six decimals, trailing zeros trimmed: "1.5", "2", "0.333333".
std::string format_decimal(const Rational& value);
/// "2" or "3/2 (1.5)".
std::string format_score(const Rational& value);
double to_double(const Rational& value);

enum class RiskBand { Red, Yellow, Green };
std::string_view to_string(RiskBand band);
// score < 2 red, 2 <= score < 3 yellow, otherwise green.
RiskBand accessibility_band(const Rational& score);

struct AccessibilityResult {
  Dnf reduced;
  // Keyed by variable, in the reduced term's variable order.
  std::vector<std::pair<NodeId, std::size_t>> occurrences;
  std::vector<std::pair<NodeId, Rational>> weights;
  Rational score;
  std::vector<VarSet> lockout_sets;
  // max(score - 1, 0).
  Rational safe_loss_bound;
  // Empty reduced term: the account cannot be accessed at all.
  bool unreachable = false;

  // floor(safe_loss_bound); exact only when the score is an integer.
  long long safe_loss_count() const;
  bool fractional() const;
};

/// Weights each variable with 1/n (n = implicants containing it), takes the
/// minimum weight inside every implicant and sums over implicants.
/// Throws NotMinimized if `reduced` is not an antichain.
AccessibilityResult accessibility_score(const Dnf& reduced, const DnfLimits& limits = {},
                                        std::span<const NodeId> order = {});

/// Reconstructed legacy score on the raw (unexpanded) formula: occurrences
/// are counted over variable instances, Var -> 1/n, And -> min, Or -> sum.
Rational legacy_accessibility_score(const AccessFormula& formula);

struct WhatIfResult {
  bool accessible = false;
  AccessibilityResult result;
};

/// Accessibility after losing `lost`. Ids must be access methods of the
/// graph or abstract variables of the account's formula.
WhatIfResult what_if(const AccountAccessGraph& graph, std::string_view account,
                     const std::set<NodeId>& lost,
                     UnmappedLeafPolicy policy = UnmappedLeafPolicy::Abstract,
                     const DnfLimits& limits = {});

}  // namespace aag
