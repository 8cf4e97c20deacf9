#include "aag/accessibility.hpp"

#include <algorithm>
#include <map>

#include "aag/error.hpp"

namespace aag {

using boost::multiprecision::cpp_int;

std::string format_rational(const Rational& value) {
  auto num = boost::multiprecision::numerator(value);
  auto den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string format_decimal(const Rational& value) {
  cpp_int num = boost::multiprecision::numerator(value);
  cpp_int den = boost::multiprecision::denominator(value);
  bool negative = num < 0;
  if (negative) num = -num;
  constexpr int kDigits = 6;
  cpp_int scale = 1'000'000;
  cpp_int scaled = (num * scale * 2 + den) / (den * 2);  // round half up
  cpp_int whole = scaled / scale;
  cpp_int frac = scaled % scale;

  std::string out = (negative && scaled != 0 ? "-" : "") + whole.str();
  if (frac != 0) {
    std::string digits = frac.str();
    digits.insert(0, kDigits - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += "." + digits;
  }
  return out;
}

std::string format_score(const Rational& value) {
  if (boost::multiprecision::denominator(value) == 1) return format_rational(value);
  return format_rational(value) + " (" + format_decimal(value) + ")";
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::string_view to_string(RiskBand band) {
  switch (band) {
    case RiskBand::Red: return "red";
    case RiskBand::Yellow: return "yellow";
    case RiskBand::Green: return "green";
  }
  return "red";
}

RiskBand accessibility_band(const Rational& score) {
  if (score < 2) return RiskBand::Red;
  if (score < 3) return RiskBand::Yellow;
  return RiskBand::Green;
}

long long AccessibilityResult::safe_loss_count() const {
  cpp_int whole = boost::multiprecision::numerator(safe_loss_bound) /
                  boost::multiprecision::denominator(safe_loss_bound);
  return whole.convert_to<long long>();
}

bool AccessibilityResult::fractional() const {
  return boost::multiprecision::denominator(score) != 1;
}

AccessibilityResult accessibility_score(const Dnf& reduced, const DnfLimits& limits,
                                        std::span<const NodeId> order) {
  if (!reduced.is_antichain()) {
    throw Error(ErrorCode::NotMinimized, "term contains an implicant absorbed by another; minimize first");
  }

  AccessibilityResult r;
  r.reduced = reduced;
  auto vars = reduced.variables();

  std::vector<std::size_t> counts(vars.size(), 0);
  for (const auto& imp : reduced.implicants()) {
    for (auto i : imp) ++counts[i];
  }
  for (std::size_t i = 0; i < vars.size(); ++i) {
    r.occurrences.emplace_back(vars[i], counts[i]);
    r.weights.emplace_back(vars[i], Rational(1, counts[i]));
  }

  r.score = 0;
  for (const auto& imp : reduced.implicants()) {
    Rational smallest = r.weights[imp.front()].second;
    for (auto i : imp) smallest = std::min(smallest, r.weights[i].second);
    r.score += smallest;
  }

  r.unreachable = reduced.unsatisfiable();
  r.lockout_sets = minimal_hitting_sets(reduced, limits, order);
  r.safe_loss_bound = r.score > 1 ? Rational(r.score - 1) : Rational(0);
  return r;
}

namespace {

void count_instances(const AccessFormula& f, std::map<NodeId, std::size_t>& counts) {
  if (f.kind() == AccessFormula::Kind::Var) {
    ++counts[f.variable()];
    return;
  }
  for (const auto& c : f.children()) count_instances(c, counts);
}

Rational legacy_fold(const AccessFormula& f, const std::map<NodeId, std::size_t>& counts) {
  switch (f.kind()) {
    case AccessFormula::Kind::Var:
      return Rational(1, counts.at(f.variable()));
    case AccessFormula::Kind::Unsatisfiable:
      return 0;
    case AccessFormula::Kind::And: {
      Rational acc = legacy_fold(f.children().front(), counts);
      for (const auto& c : f.children().subspan(1)) acc = std::min(acc, legacy_fold(c, counts));
      return acc;
    }
    case AccessFormula::Kind::Or: {
      Rational acc = 0;
      for (const auto& c : f.children()) acc += legacy_fold(c, counts);
      return acc;
    }
  }
  return 0;
}

}  // namespace

Rational legacy_accessibility_score(const AccessFormula& formula) {
  std::map<NodeId, std::size_t> counts;
  count_instances(formula, counts);
  return legacy_fold(formula, counts);
}

WhatIfResult what_if(const AccountAccessGraph& graph, std::string_view account,
                     const std::set<NodeId>& lost, UnmappedLeafPolicy policy,
                     const DnfLimits& limits) {
  auto formula = extract_formula(graph, account, policy);
  auto known = formula.variables();
  for (const auto& id : lost) {
    bool is_access_method = graph.contains(id) && graph.node(id).kind == NodeKind::AccessMethod;
    if (!is_access_method && std::ranges::find(known, id) == known.end()) {
      throw Error(ErrorCode::UnknownAccessMethod, "'" + id + "' is not an access method of the graph", id);
    }
  }

  auto reduced = minimize_dnf(to_dnf(formula, limits));
  std::set<NodeId> available;
  for (const auto& v : reduced.variables()) {
    if (!lost.contains(v)) available.insert(v);
  }

  WhatIfResult out;
  out.accessible = evaluate(reduced, available);
  auto order = graph.access_methods();
  out.result = accessibility_score(minimize_dnf(reduced.without(lost)), limits, order);
  return out;
}

}  // namespace aag
