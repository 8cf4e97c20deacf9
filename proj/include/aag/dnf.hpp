#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "aag/formula.hpp"

namespace aag {

using VarSet = std::vector<NodeId>;

struct DnfLimits {
  std::size_t max_implicants = 10'000;
  // Hard ceiling of 64: the enumeration works on 64-bit masks.
  std::size_t max_hitting_set_variables = 20;
};

/// Disjunctive normal form over access-method variables.
///
/// Variables are kept in a table ordered by first appearance; every
/// implicant is a non-empty, sorted list of indices into that table.
/// Implicant order is the order produced by the expansion and is preserved
/// by every transformation. No implicants means unsatisfiable.
class Dnf {
 public:
  using Implicant = std::vector<std::size_t>;

  Dnf() = default;

  /// Throws std::invalid_argument for an empty term. Duplicate members are
  /// merged; duplicate terms are kept (use minimize_dnf to drop them).
  static Dnf from_terms(const std::vector<VarSet>& terms);

  std::span<const NodeId> variables() const { return variables_; }
  std::span<const Implicant> implicants() const { return implicants_; }
  std::size_t size() const { return implicants_.size(); }
  bool unsatisfiable() const { return implicants_.empty(); }

  /// Terms as id lists, members in variable-table order.
  std::vector<VarSet> terms() const;

  /// True when no implicant is a subset of (or equal to) another.
  bool is_antichain() const;

  /// Drops every implicant that mentions one of `lost`.
  Dnf without(const std::set<NodeId>& lost) const;

  bool operator==(const Dnf& other) const { return terms() == other.terms(); }

 private:
  friend Dnf to_dnf(const AccessFormula&, const DnfLimits&);
  friend Dnf minimize_dnf(const Dnf&);

  // Removes variables no implicant uses, keeping table order.
  void compact();

  std::vector<NodeId> variables_;
  std::vector<Implicant> implicants_;
};

/// Distributes AND over OR. Throws SizeLimitExceeded when an intermediate
/// expansion holds more than `limits.max_implicants` implicants.
Dnf to_dnf(const AccessFormula& formula, const DnfLimits& limits = {});

/// Absorption: removes every implicant that is a superset of another (and
/// repeated implicants). For monotone formulas the survivors are exactly
/// the prime implicants.
Dnf minimize_dnf(const Dnf& dnf);

bool evaluate(const Dnf& dnf, const std::set<NodeId>& available);

/// Inclusion-minimal sets hitting every implicant, i.e. the minimal sets of
/// variables whose loss falsifies the formula.
///
/// Sets are ordered by size, then lexicographically by member rank. A
/// variable's rank is its position in `order` when listed there, otherwise
/// it ranks after all listed ones by variable-table position. Members of
/// each set are listed by rank too.
std::vector<VarSet> minimal_hitting_sets(const Dnf& dnf, const DnfLimits& limits = {},
                                         std::span<const NodeId> order = {});

/// "(Memory ∧ Tablet) ∨ Phone" style rendering; "⊥" when unsatisfiable.
std::string render(const Dnf& dnf, const std::map<NodeId, std::string>& labels = {});

}  // namespace aag
