#pragma once

// Conjunctions of Herbrand equalities in solved form.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mtteq/terms.hpp"

namespace mtteq {

using Equation = std::pair<TermId, TermId>;

/// False, or a reduced substitution {v ≐ t}: bound variables are distinct, do
/// not occur in any right-hand side, and a variable-variable binding always
/// maps the larger variable to the smaller one. Bindings are sorted by
/// variable order, so equal conjunctions compare equal. True has no bindings.
class Conjunction {
 public:
  using Binding = std::pair<SymbolId, TermId>;

  Conjunction() = default;  // True
  static Conjunction truth() { return Conjunction(); }
  static Conjunction falsity() {
    Conjunction c;
    c.false_ = true;
    return c;
  }

  /// Wraps bindings that are already reduced and sorted.
  static Conjunction from_canonical(std::vector<Binding> bindings) {
    Conjunction c;
    c.bindings_ = std::move(bindings);
    return c;
  }

  bool is_false() const { return false_; }
  bool is_true() const { return !false_ && bindings_.empty(); }
  const std::vector<Binding>& bindings() const { return bindings_; }
  /// Bound value of v, or nullopt if v is free.
  std::optional<TermId> lookup(SymbolId v) const;

  friend bool operator==(const Conjunction&, const Conjunction&) = default;

 private:
  bool false_ = false;
  std::vector<Binding> bindings_;
};

/// Most general unifier of eqs in canonical form, or False on a symbol clash
/// or a cyclic binding.
Conjunction reduce(TermStore& store, std::span<const Equation> eqs);
Conjunction conj_and(TermStore& store, const Conjunction& a, const Conjunction& b);
Conjunction conj_and(TermStore& store, std::span<const Conjunction> cs);

/// Simultaneous substitution of variables (given as symbols) by terms.
using Assignment = std::vector<std::pair<SymbolId, TermId>>;
TermId apply(TermStore& store, TermId t, const Assignment& sigma);
/// Applies sigma to both sides of every binding and reduces again.
Conjunction subst(TermStore& store, const Conjunction& c, const Assignment& sigma);

bool conj_equiv(const Conjunction& a, const Conjunction& b);
bool conj_implies(TermStore& store, const Conjunction& a, const Conjunction& b);

/// Whether every binding becomes an identity under a ground assignment.
/// Throws std::invalid_argument if a variable of c is not assigned.
bool eval_ground(TermStore& store, const Conjunction& c, const Assignment& sigma);

/// Variables occurring in t.
std::vector<SymbolId> term_vars(const TermStore& store, TermId t);

/// "z = h(b) & y1 = h(b)", "true" or "false".
std::string render_conjunction(const TermStore& store, const Conjunction& c);

}  // namespace mtteq
