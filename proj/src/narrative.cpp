#include "aag/narrative.hpp"

#include <algorithm>
#include <cctype>

#include "aag/error.hpp"

namespace aag {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return std::ranges::equal(a, b, [](unsigned char x, unsigned char y) {
    return std::tolower(x) == std::tolower(y);
  });
}

std::string join_list(const std::vector<std::string>& items, std::string_view last_sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += i + 1 == items.size() ? std::string(last_sep) : ", ";
    out += items[i];
  }
  return out;
}

}  // namespace

AccessMethodKind classify_access_method(std::string_view id, std::string_view label) {
  if (id.starts_with(kAbstractPrefix)) return AccessMethodKind::Abstract;
  if (iequals(id, "memory") || iequals(label, "memory")) return AccessMethodKind::Memory;
  return AccessMethodKind::Device;
}

std::string narrative(const AccessibilityResult& result, std::string_view account_label,
                      const std::map<NodeId, std::string>& labels, const Phrasing& phrasing,
                      const std::map<NodeId, AccessMethodKind>& kinds) {
  for (const auto& v : result.reduced.variables()) {
    if (!labels.contains(v)) throw Error(ErrorCode::MissingLabel, "no label for '" + v + "'", v);
  }
  std::string head = "Access to " + std::string(account_label);
  if (result.unreachable) return head + " is not possible with the configured methods";

  std::vector<std::string> clauses;
  for (const auto& set : result.lockout_sets) {
    std::vector<std::string> things;
    bool memory = false;
    for (const auto& id : set) {
      const auto& label = labels.at(id);
      auto it = kinds.find(id);
      auto kind = it != kinds.end() ? it->second : classify_access_method(id, label);
      switch (kind) {
        case AccessMethodKind::Memory: memory = true; break;
        case AccessMethodKind::Device: things.push_back(label); break;
        case AccessMethodKind::Abstract: things.push_back(phrasing.abstract_noun + label); break;
      }
    }

    std::string clause;
    if (things.empty()) {
      clause = phrasing.forgetting;
    } else if (memory) {
      for (auto& t : things) t = "your " + t;
      clause = phrasing.losing + " " + join_list(things, " and ") + " and " +
               phrasing.forgetting;
    } else if (things.size() == 2) {
      clause = phrasing.losing + " both " + things[0] + " and " + things[1];
    } else {
      clause = phrasing.losing + " " + join_list(things, " and ");
    }
    clauses.push_back(std::move(clause));
  }

  std::string out = head + " might be lost when ";
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i) out += ", or ";
    out += clauses[i];
  }
  return out;
}

}  // namespace aag
