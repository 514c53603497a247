#pragma once

// Partial transducers, automaton equivalence and look-ahead elimination.

#include <optional>
#include <string_view>

#include "mtteq/equiv.hpp"
#include "mtteq/model.hpp"

namespace mtteq {

/// Adds rule q(f(x...), y...) -> bottom for every missing (q, f). The bottom
/// symbol is registered in ΔO with rank 0 if needed.
Mtt totalize(SymbolTable& symbols, const Mtt& m, std::string_view bottom);

/// Automaton accepting exactly the inputs on which (m, a) is defined. States
/// are sets of transducer states, named "{q,r}"; "{}" accepts every tree.
/// The result is not analyzed, so an empty domain shows up in dta_analyze.
Dta domain_dta(const SymbolTable& symbols, const Mtt& m, const Axiom& a);

struct DtaEquivResult {
  bool equivalent = true;
  /// Tree of minimal height accepted by exactly one automaton. Ties go to the
  /// least root symbol, then to a difference in the leftmost possible child.
  std::optional<TermId> witness;
  bool witness_in_first = false;
};

DtaEquivResult dta_equiv(TermStore& store, const Dta& d1, const Dta& d2);

struct RemovedLookahead {
  Mtt m1;
  Axiom a1;
  Mtt m2;
  Axiom a2;
  Dta dta;
};

/// Input symbols become "f<r1,...,rk|r'1,...,r'k>" carrying the look-ahead
/// states of the children under both automata. The automaton accepts the
/// annotated trees that encode correct runs of both. Throws ValidationError
/// if some annotated symbol matches no rule.
RemovedLookahead remove_lookahead(SymbolTable& symbols, const LookaheadMtt& n1,
                                  const LookaheadMtt& n2);

struct PartialDecision {
  Verdict verdict = Verdict::Equivalent;
  /// Set when the domains differ.
  bool domains_differ = false;
  std::optional<TermId> domain_witness;
  std::optional<Decision> decision;
};

/// Equivalence of partial transducers: equal domains, and equal outputs on
/// that domain after totalization.
PartialDecision decide_partial(SymbolTable& symbols, TermStore& store, const Mtt& m1,
                               const Axiom& a1, const Mtt& m2, const Axiom& a2,
                               const DecideOptions& options = {});

}  // namespace mtteq
