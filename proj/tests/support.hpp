#pragma once

// Random generators and brute-force oracles shared by the test binaries.
// The oracles deliberately avoid the library's own evaluation code.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "aag/analysis.hpp"
#include "aag/graph.hpp"
#include "aag/provider.hpp"
#include "aag/security.hpp"
#include "aag/survey.hpp"

namespace aag::testing {

using Rng = std::mt19937_64;
using Mask = std::uint32_t;

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(AAG_FIXTURE_DIR) / name;
}

inline AccountAccessGraph example_graph() { return parse_graph(read_file(fixture("two_factor_example.json"))); }

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline std::string var_name(int i) { return "v" + std::to_string(i); }

// ---- formulas -------------------------------------------------------------

inline AccessFormula random_formula(Rng& rng, int n_vars, int depth) {
  if (depth == 0 || coin(rng, 0.3)) return AccessFormula::var(var_name(uniform(rng, 0, n_vars - 1)));
  std::vector<AccessFormula> kids;
  int fan = uniform(rng, 1, 3);
  for (int i = 0; i < fan; ++i) kids.push_back(random_formula(rng, n_vars, depth - 1));
  return coin(rng) ? AccessFormula::all_of(std::move(kids)) : AccessFormula::any_of(std::move(kids));
}

// Variables indexed by the number in their "v<i>" name.
inline bool eval_mask(const AccessFormula& f, Mask available) {
  switch (f.kind()) {
    case AccessFormula::Kind::Var:
      return (available >> std::stoi(f.variable().substr(1))) & 1u;
    case AccessFormula::Kind::And:
      for (const auto& c : f.children()) {
        if (!eval_mask(c, available)) return false;
      }
      return true;
    case AccessFormula::Kind::Or:
      for (const auto& c : f.children()) {
        if (eval_mask(c, available)) return true;
      }
      return false;
    case AccessFormula::Kind::Unsatisfiable:
      return false;
  }
  return false;
}

inline std::set<NodeId> names_of(Mask m) {
  std::set<NodeId> out;
  for (int i = 0; m; ++i, m >>= 1) {
    if (m & 1u) out.insert(var_name(i));
  }
  return out;
}

inline Mask mask_of(const VarSet& set) {
  Mask m = 0;
  for (const auto& v : set) m |= Mask{1} << std::stoi(v.substr(1));
  return m;
}

inline std::vector<Mask> masks_of(const std::vector<VarSet>& sets) {
  std::vector<Mask> out;
  for (const auto& s : sets) out.push_back(mask_of(s));
  return out;
}

// Random terms over v0..v<n-1>; not necessarily an antichain.
inline std::vector<VarSet> random_terms(Rng& rng, int n_vars, int max_terms) {
  std::vector<VarSet> terms;
  int count = uniform(rng, 1, max_terms);
  for (int t = 0; t < count; ++t) {
    VarSet term;
    int size = uniform(rng, 1, std::min(4, n_vars));
    while (static_cast<int>(term.size()) < size) {
      auto v = var_name(uniform(rng, 0, n_vars - 1));
      if (std::ranges::find(term, v) == term.end()) term.push_back(v);
    }
    terms.push_back(term);
  }
  return terms;
}

// ---- hitting sets ---------------------------------------------------------

inline bool hits_all(Mask s, const std::vector<Mask>& terms) {
  return std::ranges::all_of(terms, [&](Mask t) { return (t & s) != 0; });
}

/// Every inclusion-minimal hitting set of `terms`, by exhaustive search over
/// subsets of the variables that appear.
inline std::set<Mask> brute_hitting_sets(const std::vector<Mask>& terms) {
  Mask universe = 0;
  for (auto t : terms) universe |= t;
  std::set<Mask> out;
  if (terms.empty()) return out;
  for (Mask s = universe;; s = (s - 1) & universe) {
    if (hits_all(s, terms)) {
      bool minimal = true;
      for (Mask rest = s; rest && minimal; rest &= rest - 1) {
        if (hits_all(s & ~(rest & (~rest + 1)), terms)) minimal = false;
      }
      if (minimal) out.insert(s);
    }
    if (s == 0) break;
  }
  return out;
}

inline int brute_min_hitting_size(const std::vector<Mask>& terms) {
  int best = 1 << 30;
  for (auto s : brute_hitting_sets(terms)) best = std::min(best, std::popcount(s));
  return best;
}

// ---- graphs ---------------------------------------------------------------

/// Random valid graph of at most `max_nodes` nodes: a tree of accounts,
/// operators and auth methods whose auth methods share a pool of access
/// methods. Some auth methods and accounts are left as unmapped leaves.
inline AccountAccessGraph random_graph(Rng& rng, int max_nodes) {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  int pool = uniform(rng, 1, 6);
  int budget = max_nodes - pool;
  int next = 0;
  auto fresh = [&](const char* prefix) { return std::string(prefix) + std::to_string(next++); };

  std::vector<NodeId> access;
  for (int i = 0; i < pool; ++i) access.push_back("m" + std::to_string(i));

  auto cats = {MethodCategory::KnowledgeBased, MethodCategory::SoftwareBased, MethodCategory::HardwareBased};
  std::function<NodeId(int, bool)> grow = [&](int depth, bool root) -> NodeId {
    --budget;
    int pick = root ? 0 : uniform(rng, 0, depth > 3 || budget < 3 ? 2 : 4);
    Node n;
    if (pick == 0 || pick == 3) {
      n.id = fresh("acct");
      n.kind = NodeKind::Account;
    } else if (pick == 1 || pick == 2) {
      n.id = fresh("auth");
      n.kind = NodeKind::AuthMethod;
      n.category = *std::next(cats.begin(), uniform(rng, 0, 2));
    } else {
      n.id = fresh("op");
      n.kind = NodeKind::Operator;
      n.op = coin(rng) ? OperatorKind::And : OperatorKind::Or;
    }
    n.label = n.id;
    nodes.push_back(n);
    if (n.kind == NodeKind::AuthMethod) {
      std::vector<NodeId> chosen = access;
      std::shuffle(chosen.begin(), chosen.end(), rng);
      int k = coin(rng, 0.1) ? 0 : uniform(rng, 1, std::min(3, pool));
      for (int i = 0; i < k; ++i) edges.push_back({n.id, chosen[i]});
      return n.id;
    }
    bool must_have_children = n.kind == NodeKind::Operator || root;
    int kids = must_have_children ? uniform(rng, 1, 3) : (coin(rng, 0.3) ? 0 : uniform(rng, 1, 3));
    for (int i = 0; i < kids && budget > 0; ++i) {
      auto child = grow(depth + 1, false);
      edges.push_back({n.id, child});
    }
    if (n.kind == NodeKind::Operator && (edges.empty() || edges.back().parent != n.id)) {
      // Out of budget before any child was added: attach an auth method leaf.
      Node leaf{fresh("auth"), NodeKind::AuthMethod, "", MethodCategory::SoftwareBased, OperatorKind::Or};
      leaf.label = leaf.id;
      nodes.push_back(leaf);
      edges.push_back({leaf.id, access.front()});
      edges.push_back({n.id, leaf.id});
    }
    return n.id;
  };
  auto root = grow(0, true);
  for (const auto& id : access) nodes.push_back({id, NodeKind::AccessMethod, "Method " + id, {}, {}});
  return assemble_graph(std::move(nodes), std::move(edges), {root});
}

/// Direct evaluation on the graph: can the node be satisfied with the given
/// variables available? Unmapped leaves are abstract variables when
/// `abstract` is set, unsatisfiable otherwise.
inline bool graph_accessible(const AccountAccessGraph& g, const NodeId& id, const std::set<NodeId>& available,
                             bool abstract) {
  const auto& n = g.node(id);
  auto kids = g.children(id);
  if (n.kind == NodeKind::AccessMethod) return available.contains(id);
  if (kids.empty()) return abstract && available.contains("abstract:" + id);
  bool conjunctive = n.kind == NodeKind::Operator && n.op == OperatorKind::And;
  for (const auto& c : kids) {
    bool ok = graph_accessible(g, c, available, abstract);
    if (conjunctive && !ok) return false;
    if (!conjunctive && ok) return true;
  }
  return conjunctive;
}

/// Every variable an extracted formula for `root` may mention.
inline std::vector<NodeId> graph_variables(const AccountAccessGraph& g, const NodeId& root, bool abstract) {
  std::vector<NodeId> out;
  std::set<NodeId> seen;
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    auto id = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second) continue;
    const auto& n = g.node(id);
    auto kids = g.children(id);
    if (n.kind == NodeKind::AccessMethod) {
      out.push_back(id);
    } else if (kids.empty() && abstract) {
      out.push_back("abstract:" + id);
    }
    for (const auto& c : kids) stack.push_back(c);
  }
  std::ranges::sort(out);
  return out;
}

inline std::set<NodeId> reachable(const AccountAccessGraph& g, const NodeId& from) {
  std::set<NodeId> seen{from};
  std::vector<NodeId> queue{from};
  while (!queue.empty()) {
    auto id = queue.back();
    queue.pop_back();
    for (const auto& e : g.edges()) {
      if (e.parent == id && seen.insert(e.child).second) queue.push_back(e.child);
    }
  }
  return seen;
}

/// Security straight from the definitions: leaves take their category
/// level (or override), AND the maximum, OR and accounts the minimum.
inline SecurityLevel brute_security(const AccountAccessGraph& g, const NodeId& id, const ScoringPolicy& p) {
  const auto& n = g.node(id);
  auto kids = g.children(id);
  if (n.kind == NodeKind::AuthMethod || kids.empty()) {
    if (auto it = p.overrides.find(id); it != p.overrides.end()) return it->second;
    return p.defaults.at(n.kind == NodeKind::Account ? MethodCategory::AccountReference : n.category);
  }
  std::vector<SecurityLevel> levels;
  for (const auto& c : kids) levels.push_back(brute_security(g, c, p));
  bool conjunctive = n.kind == NodeKind::Operator && n.op == OperatorKind::And;
  return conjunctive ? *std::ranges::max_element(levels) : *std::ranges::min_element(levels);
}

// ---- survey records -------------------------------------------------------

/// Random record that passes validate_record.
inline UserAccountRecord random_record(Rng& rng, int index) {
  UserAccountRecord r;
  r.id = "user-" + std::to_string(index);
  r.provider = coin(rng) ? Provider::Google : Provider::Apple;
  int count = uniform(rng, 1, 4);
  std::vector<std::string> phones, any, keys;
  for (int i = 1; i <= count; ++i) {
    auto cat = static_cast<DeviceCategory>(uniform(rng, 0, 4));
    auto id = std::to_string(i);
    r.inventory.devices.push_back({id, cat, std::string(to_string(cat)) + " " + id});
    if (cat == DeviceCategory::SecurityKey) {
      keys.push_back(id);
    } else {
      any.push_back(id);
    }
    if (cat == DeviceCategory::Phone) phones.push_back(id);
  }
  auto some = [&](const std::vector<std::string>& from) {
    std::vector<std::string> out;
    for (const auto& id : from) {
      if (coin(rng, 0.5)) out.push_back(id);
    }
    return out;
  };

  r.password.memory = coin(rng, 0.7);
  r.password.password_manager = coin(rng, 0.3);
  r.password.browser_devices = some(any);
  r.password.browser_device = !r.password.browser_devices.empty();
  r.password.paper = coin(rng, 0.2);
  if (!r.password.memory && !r.password.password_manager && !r.password.browser_device && !r.password.paper) {
    r.password.memory = true;
  }

  if (r.provider == Provider::Google) {
    GoogleSettings g;
    g.mfa_enabled = coin(rng, 0.6);
    if (g.mfa_enabled) {
      std::vector<std::string> prompt_devices;
      for (const auto& d : r.inventory.devices) {
        if (d.category == DeviceCategory::Phone || d.category == DeviceCategory::Tablet) prompt_devices.push_back(d.id);
      }
      g.prompts = some(prompt_devices);
      g.authenticator_app = some(any);
      g.voice_text = some(phones);
      g.security_key = some(keys);
      g.backup_codes = coin(rng, 0.3);
      if (g.prompts.empty() && g.authenticator_app.empty() && g.voice_text.empty() && g.security_key.empty()) {
        g.backup_codes = true;
      }
    } else {
      g.sign_in_by_phone = some(phones);
    }
    if (!phones.empty() && coin(rng, 0.4)) g.recovery_phone = phones.front();
    g.recovery_email = coin(rng, 0.3);
    r.google = std::move(g);
  } else {
    AppleSettings a;
    a.trusted_devices = some(any);
    a.trusted_phone_numbers = some(phones);
    a.recovery_key = coin(rng, 0.2);
    r.apple = std::move(a);
  }
  return r;
}

}  // namespace aag::testing
