#pragma once

// Equivalence of earliest transducers through Herbrand conditions on their
// parameters.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtteq/earliest.hpp"
#include "mtteq/herbrand.hpp"
#include "mtteq/model.hpp"
#include "mtteq/oracle.hpp"

namespace mtteq {

struct EngineOptions {
  /// Compute Φ for every state pair over the same automaton state instead of
  /// only the pairs reachable from the seeded ones.
  bool full = false;
  /// Rounds allowed before InternalError; 0 means n²(2l+1).
  std::size_t max_rounds = 0;
};

/// Round-by-round computation of Ψ (per state of each transducer) and Φ (per
/// state pair). Before the first step every entry is true; step k computes
/// round k-1 from the previous tables. Side A uses y_j, side B uses y'_j.
class EquivEngine {
 public:
  EquivEngine(TermStore& store, const AnnotatedMtt& a, const AnnotatedMtt& b, const Dta& d,
              EngineOptions options = {});

  /// Adds a Φ entry and everything it depends on. Call before the first step.
  void seed(StateId qa, StateId qb);

  /// Computes the next round. Returns whether any entry changed.
  bool step();
  /// Steps until nothing changes; returns the first round h with round h+1
  /// equal to round h. Throws InternalError past the round bound.
  std::size_t stabilize();

  /// Index of the current round, -1 before the first step.
  long round() const { return round_; }
  std::size_t bound() const { return bound_; }

  const Conjunction& psi_a(StateId q) const { return psi_[0][raw(q)]; }
  const Conjunction& psi_b(StateId q) const { return psi_[1][raw(q)]; }
  const Conjunction& phi(StateId qa, StateId qb) const;
  const std::vector<std::pair<StateId, StateId>>& phi_keys() const { return keys_; }
  /// Output of side-A state q on the witness of its automaton state, with
  /// formal parameters left as variables.
  TermId s_witness(StateId q) const { return s_[raw(q)]; }

 private:
  struct Leafed {
    Pattern pattern;
    std::vector<const RhsNode*> leaves;
  };

  std::size_t key_index(StateId qa, StateId qb);
  Conjunction psi_rule(int side, const Rule& r);
  Conjunction phi_entry(StateId qa, StateId qb);
  TermId inst(int side, const RhsNode& n);
  Assignment params_to(int side, const RhsNode& call);

  TermStore& store_;
  const AnnotatedMtt* m_[2];
  const Dta& d_;
  EngineOptions options_;
  std::size_t bound_ = 0;
  long round_ = -1;
  SymbolId z_{};
  std::vector<TermId> vars_[2];      // y_j leaves per side
  std::vector<SymbolId> var_syms_[2];
  std::vector<std::map<std::uint32_t, const Rule*>> rules_[2];  // per state: input symbol -> rule
  std::map<const Rule*, Leafed> decomposed_;
  std::vector<Conjunction> psi_[2];
  std::vector<TermId> s_;
  std::vector<std::pair<StateId, StateId>> keys_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> key_index_;
  std::vector<Conjunction> phi_;
};

enum class Verdict { Equivalent, Inequivalent };

struct ConjunctionReport {
  std::string state_a;
  std::string state_b;  // empty for Ψ entries
  std::string conjunction;
};

struct Decision {
  Verdict verdict = Verdict::Equivalent;
  /// "" when equivalent, otherwise "axiom-pattern" or "axiom-call".
  std::string failing_check;
  std::string reason;
  std::optional<TermId> counterexample;
  std::size_t rounds = 0;  // stabilization round
  std::size_t bound = 0;   // n²(2l+1)
  AnnotatedMtt earliest_a;
  AnnotatedMtt earliest_b;
  std::vector<ConjunctionReport> phi;
  std::vector<ConjunctionReport> psi_a;
  std::vector<ConjunctionReport> psi_b;
};

struct DecideOptions {
  EngineOptions engine;
  EarliestOptions earliest;
  bool search_counterexample = true;
  EnumBudget counterexample_budget{6, 200'000};
};

/// Decides whether (ma, aa) and (mb, ab) produce the same output on every tree
/// of dom(d). Throws ValidationError for malformed input and EmptyDomainError
/// when d accepts nothing.
Decision decide(SymbolTable& symbols, TermStore& store, const Mtt& ma, const Axiom& aa,
                const Mtt& mb, const Axiom& ab, const Dta& d, const DecideOptions& options = {});

}  // namespace mtteq
