#pragma once

// Transducer and tree-automaton data model, validation, and the reference
// interpreter.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mtteq/terms.hpp"

namespace mtteq {

enum class StateId : std::uint32_t {};
enum class DtaState : std::uint32_t {};

inline std::uint32_t raw(StateId q) { return static_cast<std::uint32_t>(q); }
inline std::uint32_t raw(DtaState b) { return static_cast<std::uint32_t>(b); }

struct SourceLoc {
  int line = 0;
  int column = 0;
};

/// Right-hand side tree of a rule. Independent of any TermStore so that a
/// transducer can be shared by workers that each own a store.
struct RhsNode {
  enum class Kind : std::uint8_t { Symbol, Param, Call };

  Kind kind = Kind::Symbol;
  SymbolId symbol{};          // Symbol
  std::uint32_t index = 0;    // Param: j of y_j; Call: i of x_i (both 1-based)
  StateId state{};            // Call
  std::vector<RhsNode> children;  // Symbol: subtrees; Call: parameter arguments

  static RhsNode make_symbol(SymbolId s, std::vector<RhsNode> kids = {}) {
    RhsNode n;
    n.kind = Kind::Symbol;
    n.symbol = s;
    n.children = std::move(kids);
    return n;
  }
  static RhsNode make_param(std::uint32_t j) {
    RhsNode n;
    n.kind = Kind::Param;
    n.index = j;
    return n;
  }
  static RhsNode make_call(StateId q, std::uint32_t input_var, std::vector<RhsNode> args) {
    RhsNode n;
    n.kind = Kind::Call;
    n.state = q;
    n.index = input_var;
    n.children = std::move(args);
    return n;
  }

  bool is_symbol() const { return kind == Kind::Symbol; }
  bool is_param() const { return kind == Kind::Param; }
  bool is_call() const { return kind == Kind::Call; }

  friend bool operator==(const RhsNode&, const RhsNode&) = default;
};

std::size_t rhs_size(const RhsNode& n);

struct Rule {
  StateId state{};
  SymbolId input{};
  std::vector<std::uint32_t> lhs_params;  // the y_j listed on the left-hand side
  RhsNode rhs;
  SourceLoc loc;
};

/// Deterministic separated basic macro tree transducer. Every state has the
/// same number of parameters.
class Mtt {
 public:
  std::uint32_t param_count = 0;
  std::vector<SymbolId> sigma;
  std::vector<SymbolId> delta_out;
  std::vector<SymbolId> delta_in;

  StateId add_state(std::string name);
  std::optional<StateId> find_state(std::string_view name) const;
  std::size_t state_count() const { return state_names_.size(); }
  const std::string& state_name(StateId q) const { return state_names_[raw(q)]; }

  /// Duplicate (state, symbol) pairs are kept so that validation can report them;
  /// lookups return the first one.
  void add_rule(Rule r);
  const std::vector<Rule>& rules() const { return rules_; }
  const Rule* find_rule(StateId q, SymbolId f) const;

  /// Number of rules plus total right-hand-side size.
  std::size_t size() const;

 private:
  static std::uint64_t key(StateId q, SymbolId f) {
    return (std::uint64_t{raw(q)} << 32) | raw(f);
  }

  std::vector<std::string> state_names_;
  std::unordered_map<std::string, StateId> state_index_;
  std::vector<Rule> rules_;
  std::unordered_map<std::uint64_t, std::size_t> rule_index_;
};

/// Axiom p[q1(x1,T1),...,qm(x1,Tm)], stored as a right-hand side whose calls
/// all read x1 and carry ground parameter vectors.
struct Axiom {
  RhsNode rhs;
  SourceLoc loc;
};

/// Deterministic top-down tree automaton.
class Dta {
 public:
  std::vector<SymbolId> sigma;
  DtaState initial{};

  DtaState add_state(std::string name);
  std::optional<DtaState> find_state(std::string_view name) const;
  std::size_t state_count() const { return state_names_.size(); }
  const std::string& state_name(DtaState b) const { return state_names_[raw(b)]; }

  /// Throws ValidationError if (b, f) already has a transition.
  void add_transition(DtaState b, SymbolId f, std::vector<DtaState> children);
  const std::vector<DtaState>* transition(DtaState b, SymbolId f) const;
  const std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<DtaState>>& transitions()
      const {
    return transitions_;
  }
  /// Symbols with a transition out of b.
  std::vector<SymbolId> symbols_of(DtaState b) const;

  /// Set by dta_analyze: every state is productive and has a witness.
  bool analyzed() const { return !min_height_.empty(); }
  /// Height (in nodes) of the smallest tree accepted from b.
  std::uint32_t min_height(DtaState b) const { return min_height_[raw(b)]; }
  /// Minimal-height tree of dom(b); among those, the lexicographically least by
  /// symbol names in preorder.
  TermId witness(TermStore& store, DtaState b) const;

 private:
  friend Dta dta_analyze(const SymbolTable& symbols, const Dta& d);

  std::vector<std::string> state_names_;
  std::unordered_map<std::string, DtaState> state_index_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<DtaState>> transitions_;
  std::vector<std::uint32_t> min_height_;
};

/// The automaton with one state accepting every tree over sigma.
Dta trivial_dta(const SymbolTable& symbols, std::span<const SymbolId> sigma);
/// Removes unproductive states and transitions into them, and records witness
/// heights. Throws EmptyDomainError if the initial state is unproductive.
Dta dta_analyze(const SymbolTable& symbols, const Dta& d);
/// Whether t belongs to dom(b).
bool dta_accepts(const TermStore& store, const Dta& d, DtaState b, TermId t);

/// π: transducer state → automaton state, indexed by StateId.
using StateMap = std::vector<DtaState>;

enum class Totality { Total, Partial };

enum class ViolationKind {
  ParameterCount,
  Nondeterministic,
  NotTotal,
  UnknownInputSymbol,
  InputVarRange,
  ParamRange,
  NotBasic,
  NotSeparated,
  CallArity,
  SymbolArity,
  AxiomShape,
};
const char* to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string message;
  SourceLoc loc;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(ViolationKind k) const;
};

ValidationReport validate(const SymbolTable& symbols, const Mtt& m, Totality mode);
ValidationReport validate_axiom(const SymbolTable& symbols, const Mtt& m, const Axiom& a);

/// Builds the term of a call-free right-hand side, reading y_j from params.
TermId instantiate(TermStore& store, const RhsNode& n, std::span<const TermId> params);

/// Reference interpreter. Memoizes on (state, input node, parameter vector),
/// so shared input subtrees are evaluated once per parameter vector.
class Evaluator {
 public:
  Evaluator(const Mtt& m, TermStore& store) : m_(&m), store_(&store) {}

  /// Throws DomainError naming the state, symbol and input path if a rule is missing.
  TermId state(StateId q, TermId input, std::span<const TermId> params);
  TermId axiom(const Axiom& a, TermId input);

  TermStore& store() { return *store_; }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& k) const;
  };

  TermId eval(const RhsNode& n, std::span<const TermId> inputs, std::span<const TermId> params);
  TermId eval_state(StateId q, TermId input, std::span<const TermId> params);

  const Mtt* m_;
  TermStore* store_;
  std::unordered_map<std::vector<std::uint32_t>, TermId, KeyHash> memo_;
  DeweyPath path_;
};

TermId evaluate_state(const Mtt& m, TermStore& store, StateId q, TermId input,
                      std::span<const TermId> params);
TermId evaluate_axiom(const Mtt& m, TermStore& store, const Axiom& a, TermId input);

/// Transducer with regular look-ahead. Rule i of mtt applies when the
/// look-ahead states of the input children equal guards[i].
struct LookaheadMtt {
  Mtt mtt;
  Axiom axiom;
  std::vector<std::vector<std::uint32_t>> guards;
  std::vector<std::string> la_states;
  /// Bottom-up transitions: (input symbol, child look-ahead states) -> state.
  std::map<std::pair<std::uint32_t, std::vector<std::uint32_t>>, std::uint32_t> la_trans;

  std::optional<std::uint32_t> find_la_state(std::string_view name) const;
  /// Look-ahead state reached on t. Throws ValidationError on a missing transition.
  std::uint32_t la_state_of(const TermStore& store, TermId t) const;
};

/// The output pattern of a right-hand side and the parameter / call leaves
/// hanging from its ⊤ holes, left to right.
struct RhsDecomposition {
  Pattern pattern;
  std::vector<const RhsNode*> leaves;
};
RhsDecomposition rhs_decompose(TermStore& store, const RhsNode& rhs);

struct AnnotatedMtt {
  Mtt mtt;
  Axiom axiom;
  StateMap pi;
};

/// Specializes the transducer to pairs ⟨q,b⟩ reachable from the axiom and the
/// initial automaton state. Rules exist only for defined automaton transitions.
/// In total mode a reachable pair without a rule throws ValidationError.
AnnotatedMtt product_annotate(const SymbolTable& symbols, const Mtt& m, const Axiom& a,
                              const Dta& d, Totality mode = Totality::Total);

}  // namespace mtteq
