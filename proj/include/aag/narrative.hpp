#pragma once

#include <map>
#include <string>
#include <string_view>

#include "aag/accessibility.hpp"

namespace aag {

enum class AccessMethodKind { Memory, Device, Abstract };

/// Variables named or labelled "memory" are Memory, synthesized abstract
/// variables are Abstract, everything else is a Device.
AccessMethodKind classify_access_method(std::string_view id, std::string_view label);

struct Phrasing {
  std::string losing = "losing";
  std::string forgetting = "forgetting your password";
  // Prepended to the label of abstract variables.
  std::string abstract_noun = "access to ";
};

/// One sentence listing every lockout set, e.g. "Access to Account might be
/// lost when losing both Phone and Tablet, or losing your Phone and
/// forgetting your password". Throws MissingLabel for unlabelled variables.
/// `kinds` overrides classify_access_method per variable.
std::string narrative(const AccessibilityResult& result, std::string_view account_label,
                      const std::map<NodeId, std::string>& labels, const Phrasing& phrasing = {},
                      const std::map<NodeId, AccessMethodKind>& kinds = {});

}  // namespace aag
