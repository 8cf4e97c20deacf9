#include "aag/dnf.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "aag/error.hpp"

namespace aag {

Dnf Dnf::from_terms(const std::vector<VarSet>& terms) {
  Dnf dnf;
  std::unordered_map<NodeId, std::size_t> index;
  for (const auto& term : terms) {
    if (term.empty()) throw std::invalid_argument("DNF terms must be non-empty");
    Implicant imp;
    for (const auto& v : term) {
      auto [it, inserted] = index.emplace(v, dnf.variables_.size());
      if (inserted) dnf.variables_.push_back(v);
      imp.push_back(it->second);
    }
    std::ranges::sort(imp);
    imp.erase(std::unique(imp.begin(), imp.end()), imp.end());
    dnf.implicants_.push_back(std::move(imp));
  }
  return dnf;
}

std::vector<VarSet> Dnf::terms() const {
  std::vector<VarSet> out;
  out.reserve(implicants_.size());
  for (const auto& imp : implicants_) {
    VarSet term;
    for (auto i : imp) term.push_back(variables_[i]);
    out.push_back(std::move(term));
  }
  return out;
}

bool Dnf::is_antichain() const {
  for (std::size_t i = 0; i < implicants_.size(); ++i) {
    for (std::size_t j = 0; j < implicants_.size(); ++j) {
      if (i != j && std::ranges::includes(implicants_[j], implicants_[i])) return false;
    }
  }
  return true;
}

Dnf Dnf::without(const std::set<NodeId>& lost) const {
  Dnf out;
  out.variables_ = variables_;
  for (const auto& imp : implicants_) {
    bool touched = std::ranges::any_of(imp, [&](auto i) { return lost.contains(variables_[i]); });
    if (!touched) out.implicants_.push_back(imp);
  }
  out.compact();
  return out;
}

void Dnf::compact() {
  std::vector<bool> used(variables_.size(), false);
  for (const auto& imp : implicants_) {
    for (auto i : imp) used[i] = true;
  }
  std::vector<std::size_t> remap(variables_.size());
  std::vector<NodeId> kept;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (used[i]) {
      remap[i] = kept.size();
      kept.push_back(std::move(variables_[i]));
    }
  }
  variables_ = std::move(kept);
  for (auto& imp : implicants_) {
    for (auto& i : imp) i = remap[i];
  }
}

namespace {

using Implicant = Dnf::Implicant;

class Expander {
 public:
  Expander(const std::unordered_map<NodeId, std::size_t>& index, std::size_t cap)
      : index_(index), cap_(cap) {}

  std::vector<Implicant> expand(const AccessFormula& f) {
    switch (f.kind()) {
      case AccessFormula::Kind::Var:
        return {{index_.at(f.variable())}};
      case AccessFormula::Kind::Unsatisfiable:
        return {};
      case AccessFormula::Kind::Or: {
        Collector out(cap_);
        for (const auto& c : f.children()) {
          for (auto& imp : expand(c)) out.add(std::move(imp));
        }
        return std::move(out.items);
      }
      case AccessFormula::Kind::And: {
        auto children = f.children();
        auto acc = expand(children.front());
        for (const auto& c : children.subspan(1)) {
          auto rhs = expand(c);
          Collector out(cap_);
          for (const auto& a : acc) {
            for (const auto& b : rhs) {
              Implicant merged;
              merged.reserve(a.size() + b.size());
              std::ranges::set_union(a, b, std::back_inserter(merged));
              out.add(std::move(merged));
            }
          }
          acc = std::move(out.items);
        }
        return acc;
      }
    }
    return {};
  }

 private:
  // Order-preserving de-duplicating accumulator with the size cap.
  struct Collector {
    explicit Collector(std::size_t cap) : cap(cap) {}

    void add(Implicant imp) {
      if (!seen.insert(imp).second) return;
      if (seen.size() > cap) {
        throw Error(ErrorCode::SizeLimitExceeded,
                    "DNF expansion exceeds " + std::to_string(cap) + " implicants");
      }
      items.push_back(std::move(imp));
    }

    std::size_t cap;
    std::set<Implicant> seen;
    std::vector<Implicant> items;
  };

  const std::unordered_map<NodeId, std::size_t>& index_;
  std::size_t cap_;
};

}  // namespace

Dnf to_dnf(const AccessFormula& formula, const DnfLimits& limits) {
  Dnf dnf;
  dnf.variables_ = formula.variables();
  std::unordered_map<NodeId, std::size_t> index;
  for (std::size_t i = 0; i < dnf.variables_.size(); ++i) index.emplace(dnf.variables_[i], i);
  dnf.implicants_ = Expander(index, limits.max_implicants).expand(formula);
  return dnf;
}

Dnf minimize_dnf(const Dnf& dnf) {
  const auto& imps = dnf.implicants_;
  std::vector<std::size_t> by_size(imps.size());
  std::iota(by_size.begin(), by_size.end(), 0);
  std::ranges::stable_sort(by_size, {}, [&](auto i) { return imps[i].size(); });

  // A subset (or earlier duplicate) of an implicant is always visited
  // before it, so checking against the kept ones suffices.
  std::vector<std::size_t> kept;
  std::vector<bool> keep(imps.size(), false);
  for (auto i : by_size) {
    bool absorbed = std::ranges::any_of(
        kept, [&](auto k) { return std::ranges::includes(imps[i], imps[k]); });
    if (!absorbed) {
      kept.push_back(i);
      keep[i] = true;
    }
  }

  Dnf out;
  out.variables_ = dnf.variables_;
  for (std::size_t i = 0; i < imps.size(); ++i) {
    if (keep[i]) out.implicants_.push_back(imps[i]);
  }
  out.compact();
  return out;
}

bool evaluate(const Dnf& dnf, const std::set<NodeId>& available) {
  auto vars = dnf.variables();
  return std::ranges::any_of(dnf.implicants(), [&](const auto& imp) {
    return std::ranges::all_of(imp, [&](auto i) { return available.contains(vars[i]); });
  });
}

std::vector<VarSet> minimal_hitting_sets(const Dnf& dnf, const DnfLimits& limits,
                                         std::span<const NodeId> order) {
  if (limits.max_hitting_set_variables > 64) {
    throw std::invalid_argument("max_hitting_set_variables cannot exceed 64");
  }
  auto vars = dnf.variables();
  if (vars.size() > limits.max_hitting_set_variables) {
    throw Error(ErrorCode::SizeLimitExceeded,
                "hitting-set enumeration limited to " + std::to_string(limits.max_hitting_set_variables) +
                    " variables, formula has " + std::to_string(vars.size()));
  }
  if (dnf.unsatisfiable()) return {};

  // Rank variables: explicit order first, then table order.
  std::vector<std::size_t> rank(vars.size());
  {
    std::unordered_map<NodeId, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos.emplace(order[i], i);
    for (std::size_t i = 0; i < vars.size(); ++i) {
      auto it = pos.find(vars[i]);
      rank[i] = it != pos.end() ? it->second : order.size() + i;
    }
  }
  std::vector<std::size_t> by_rank(vars.size());
  std::iota(by_rank.begin(), by_rank.end(), 0);
  std::ranges::sort(by_rank, {}, [&](auto i) { return rank[i]; });

  // Bit b of a mask is the variable by_rank[b], so mask bits follow rank.
  std::vector<std::size_t> bit_of(vars.size());
  for (std::size_t b = 0; b < by_rank.size(); ++b) bit_of[by_rank[b]] = b;

  // Berge's incremental transversal construction.
  std::vector<std::uint64_t> transversals{0};
  for (const auto& imp : dnf.implicants()) {
    std::uint64_t edge = 0;
    for (auto i : imp) edge |= std::uint64_t{1} << bit_of[i];

    std::vector<std::uint64_t> next;
    for (auto t : transversals) {
      if (t & edge) {
        next.push_back(t);
        continue;
      }
      for (auto rest = edge; rest; rest &= rest - 1) next.push_back(t | (rest & (~rest + 1)));
    }
    std::ranges::sort(next, [](auto a, auto b) {
      auto pa = std::popcount(a), pb = std::popcount(b);
      return pa != pb ? pa < pb : a < b;
    });
    next.erase(std::unique(next.begin(), next.end()), next.end());
    transversals.clear();
    for (auto t : next) {
      bool dominated = std::ranges::any_of(transversals, [&](auto k) { return (k & t) == k; });
      if (!dominated) transversals.push_back(t);
    }
  }

  auto members = [](std::uint64_t m) {
    std::vector<std::size_t> bits;
    for (; m; m &= m - 1) bits.push_back(static_cast<std::size_t>(std::countr_zero(m)));
    return bits;
  };
  std::ranges::sort(transversals, [&](auto a, auto b) {
    auto pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return members(a) < members(b);
  });

  std::vector<VarSet> out;
  for (auto t : transversals) {
    VarSet set;
    for (auto b : members(t)) set.push_back(vars[by_rank[b]]);
    out.push_back(std::move(set));
  }
  return out;
}

std::string render(const Dnf& dnf, const std::map<NodeId, std::string>& labels) {
  if (dnf.unsatisfiable()) return "⊥";
  auto label = [&](const NodeId& id) -> const std::string& {
    auto it = labels.find(id);
    return it == labels.end() ? id : it->second;
  };
  std::string out;
  auto terms = dnf.terms();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (t) out += " ∨ ";
    bool wrap = terms.size() > 1 && terms[t].size() > 1;
    if (wrap) out += '(';
    for (std::size_t i = 0; i < terms[t].size(); ++i) {
      if (i) out += " ∧ ";
      out += label(terms[t][i]);
    }
    if (wrap) out += ')';
  }
  return out;
}

}  // namespace aag
