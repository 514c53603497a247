#pragma once

// Text format for transducers, automata and trees.
//
//   sigma { g/2 f/2 0/0 }
//   delta_o { +/2 "*"/2 }
//   delta_i { s/1 z/0 }
//   params 1
//   state q q' r
//   rule q(f(x1,x2), y1) = +(r(x2,y1), q(x1,s(y1)))
//   for i in {0 1 2}, phi in {q q' r}: rule phi(i, y1) = *(i, EXP(3, y1))
//   axiom = q(x1, z)
//   dta { states b; init b; trans b(f) -> (b, b); trans b(0) -> (); }
//   lookahead { states ra rb; trans a -> ra; trans f(ra, rb) -> rb; }
//   rule q(f(x1,x2), y1) <ra, rb> = ...
//
// Comments start with '#'. Names that are not plain identifiers are written
// in double quotes.

#include <optional>
#include <string>
#include <string_view>

#include "mtteq/model.hpp"
#include "mtteq/terms.hpp"

namespace mtteq {

struct SpecFile {
  /// Whether the file declares a transducer (params, states, rules or axiom).
  bool has_mtt = false;
  Mtt mtt;
  std::optional<Axiom> axiom;
  std::optional<Dta> dta;
  /// Present when the file has a lookahead block; then mtt and axiom are
  /// also copied into it together with the rule guards.
  std::optional<LookaheadMtt> lookahead;
};

/// Throws ParseError with line and column on syntax errors, unknown symbols
/// and rank mismatches. Well-formedness is left to validate().
SpecFile parse_spec(SymbolTable& symbols, std::string_view text);
SpecFile load_spec(SymbolTable& symbols, const std::string& path);

/// Parses a tree whose symbols belong to cls (for parameter values, DeltaIn
/// first and then DeltaOut).
TermId parse_term(const SymbolTable& symbols, TermStore& store, std::string_view text,
                  SymbolClass cls);

std::string render_rhs(const SymbolTable& symbols, const Mtt& m, const RhsNode& n);
std::string render_rule(const SymbolTable& symbols, const Mtt& m, const Rule& r);
std::string render_mtt(const SymbolTable& symbols, const Mtt& m, const Axiom* a);
/// With with_sigma, a sigma section precedes the dta block.
std::string render_dta(const SymbolTable& symbols, const Dta& d, bool with_sigma = true);

}  // namespace mtteq
