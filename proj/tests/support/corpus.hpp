#pragma once

// Random transducers, automata and equivalence-preserving rewrites for
// property tests. MTT_EQUIV_SEED overrides the default seed.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mtteq/model.hpp"
#include "mtteq/terms.hpp"

namespace mtteq::corpus {

using Rng = std::mt19937_64;

std::uint64_t seed_from_env(std::uint64_t fallback = 0x5eed);

struct Alphabet {
  std::vector<SymbolId> sigma;
  std::vector<SymbolId> delta_out;
  std::vector<SymbolId> delta_in;
};

/// Σ = {f/2, g/1, a/0, b/0}, ΔO = {F/2, G/1, A/0, B/0}, ΔI = {c/1, k/2, e/0}.
Alphabet standard_alphabet(SymbolTable& symbols);

struct Config {
  std::uint32_t min_states = 1;
  std::uint32_t max_states = 3;
  std::uint32_t max_params = 2;
  std::uint32_t out_depth = 3;  // right-hand side depth in output positions
  std::uint32_t arg_depth = 2;  // depth of parameter arguments
};

struct Transducer {
  Mtt mtt;
  Axiom axiom;
};

/// Total transducer over the alphabet with a random axiom.
Transducer random_mtt(const SymbolTable& symbols, const Alphabet& alpha, Rng& rng,
                      const Config& cfg = {});

/// Same transducer with every state name suffixed.
Transducer rename_states(const Transducer& t, const std::string& suffix);
/// Equivalent transducer with the parameters of every state permuted.
Transducer permute_params(const Transducer& t, Rng& rng);
/// Equivalent transducer with one state copied and some calls redirected to the copy.
Transducer duplicate_state(const Transducer& t, Rng& rng);
/// One random local change to a right-hand side or the axiom. The result is
/// well-formed but usually not equivalent.
Transducer mutate(const SymbolTable& symbols, const Alphabet& alpha, const Transducer& t,
                  Rng& rng);
/// Removes each rule with probability p (keeps at least one rule).
Transducer drop_rules(const Transducer& t, Rng& rng, double p);

/// Random automaton with productive initial state.
Dta random_dta(const SymbolTable& symbols, const std::vector<SymbolId>& sigma, Rng& rng,
               std::uint32_t max_states = 3);

/// Random tree of dom(b) with height (in nodes) at most max_height. Inner
/// symbols are preferred while the height allows it. d must be analyzed.
TermId random_input(TermStore& store, const Dta& d, DtaState b, std::uint32_t max_height,
                    Rng& rng);

/// Compares the two axioms on `samples` random inputs of dom(d) up to
/// max_height and returns the smallest differing input found, if any.
std::optional<TermId> sample_difference(TermStore& store, const Mtt& ma, const Axiom& aa,
                                        const Mtt& mb, const Axiom& ab, const Dta& d,
                                        std::uint32_t max_height, std::uint64_t samples, Rng& rng);

/// All trees over the given symbols of height (in nodes) at most h.
std::vector<TermId> all_trees(TermStore& store, const std::vector<SymbolId>& syms,
                              std::uint32_t h);

}  // namespace mtteq::corpus
