#pragma once

// ΔO-prefixes of transducer states relative to a tree automaton, and the
// transformation into earliest form.

#include <cstddef>
#include <vector>

#include "mtteq/model.hpp"
#include "mtteq/terms.hpp"

namespace mtteq {

struct PrefixTable {
  std::vector<Pattern> prefix;  // indexed by StateId
  /// Full passes over the rules, counting the final pass that changed nothing.
  std::size_t passes = 0;
  /// Largest output tree (unfolded size) used for initialization.
  std::uint64_t init_tree_size = 0;

  const Pattern& operator[](StateId q) const { return prefix[raw(q)]; }
};

/// Least solution of Y_q ⊒ p[Z_1,...,Z_m] over the rules of m, started from the
/// prefix of each state's output on its automaton witness with formal
/// parameters as constants. d must be the automaton pi refers to.
PrefixTable compute_prefixes(TermStore& store, const Mtt& m, const StateMap& pi, const Dta& d);

struct EarliestOptions {
  /// Replace calls of states that always return one of their parameters by
  /// that parameter argument.
  bool inline_projections = true;
  /// Recompute prefixes of the result and throw InternalError unless all are ⊤.
  bool verify = true;
};

/// New states are named "q@v" for the ⊤ positions v of pref_o(q). Only states
/// reachable from the new axiom are kept.
AnnotatedMtt earliest_transform(TermStore& store, const Mtt& m, const Axiom& a, const StateMap& pi,
                                const Dta& d, const PrefixTable& prefixes,
                                const EarliestOptions& options = {});
AnnotatedMtt earliest_transform(TermStore& store, const AnnotatedMtt& m, const Dta& d,
                                const EarliestOptions& options = {});

/// Converts a pattern over ΔO into a right-hand side, filling its ⊤ holes
/// left to right with fills.
RhsNode pattern_to_rhs(const TermStore& store, TermId p, std::vector<RhsNode> fills);

}  // namespace mtteq
