#pragma once

// Brute-force comparison of transducers on enumerated input trees.

#include <cstdint>
#include <optional>
#include <vector>

#include "mtteq/model.hpp"
#include "mtteq/terms.hpp"

namespace mtteq {

struct EnumBudget {
  std::uint32_t max_height = 4;
  std::uint64_t max_count = 1'000'000;
};

/// Orders trees by root name, then children left to right (preorder
/// lexicographic by symbol name). Returns <0, 0 or >0.
int compare_lex(const TermStore& store, TermId a, TermId b);

/// Trees of dom(b) with height at most budget.max_height, ordered by height
/// and then by compare_lex. Stops after budget.max_count trees, and before a
/// height level whose child lists would exceed that count.
class InputEnumerator {
 public:
  InputEnumerator(TermStore& store, const Dta& d, DtaState b, EnumBudget budget);

  /// Remaining trees in order; empty once exhausted.
  std::optional<TermId> next();
  std::vector<TermId> all();
  bool truncated() const { return truncated_; }

 private:
  bool advance_level();
  std::vector<TermId> exact_level(DtaState c, std::uint32_t h, std::uint64_t cap, bool& capped);

  TermStore& store_;
  Dta d_;
  DtaState b_;
  EnumBudget budget_;
  std::uint32_t height_ = 0;
  std::uint64_t emitted_ = 0;
  bool truncated_ = false;
  bool done_ = false;
  std::vector<std::vector<TermId>> upto_;  // per state: trees of height <= height_, lex order
  std::vector<TermId> level_;              // current top-level trees of height exactly height_
  std::size_t level_pos_ = 0;
};

std::vector<TermId> enumerate_inputs(TermStore& store, const Dta& d, DtaState b, EnumBudget budget);
/// All trees over sigma (the trivial automaton).
std::vector<TermId> enumerate_inputs(TermStore& store, std::span<const SymbolId> sigma,
                                     EnumBudget budget);

struct Transduction {
  const Mtt* mtt;
  const Axiom* axiom;
};

struct OracleResult {
  bool agree = true;
  std::optional<TermId> counterexample;  // first differing input in enumeration order
  std::uint64_t checked = 0;             // inputs compared
  bool truncated = false;                // the count budget cut the enumeration short
};

/// Outputs that fail with DomainError count as undefined; two undefined
/// outputs agree. The inputs range over dom(d.initial), or all trees over
/// a.mtt->sigma when d is null.
OracleResult oracle_decide_serial(TermStore& store, Transduction a, Transduction b, const Dta* d,
                                  EnumBudget budget);
/// Same result as the serial version; inputs are split across OpenMP threads,
/// each with its own term store.
OracleResult oracle_decide_parallel(TermStore& store, Transduction a, Transduction b, const Dta* d,
                                    EnumBudget budget);
OracleResult oracle_decide(TermStore& store, Transduction a, Transduction b, const Dta* d,
                           EnumBudget budget);

/// Whether q(t, params) = q'(t, params') for every enumerated t in dom(b).
bool oracle_state_equiv(TermStore& store, const Mtt& m, StateId q, std::span<const TermId> params,
                        const Mtt& m2, StateId q2, std::span<const TermId> params2, const Dta& d,
                        DtaState b, EnumBudget budget);

/// Reference semantics of a transducer with look-ahead. Throws DomainError if
/// no rule matches.
TermId evaluate_lookahead(TermStore& store, const LookaheadMtt& n, TermId input);
OracleResult oracle_decide_lookahead(TermStore& store, const LookaheadMtt& a,
                                     const LookaheadMtt& b, EnumBudget budget);

}  // namespace mtteq
