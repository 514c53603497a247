#include "mtteq/model.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <set>

#include "mtteq/errors.hpp"

namespace mtteq {

std::size_t rhs_size(const RhsNode& n) {
  std::size_t s = 1;
  for (const RhsNode& c : n.children) s += rhs_size(c);
  return s;
}

// ---------------------------------------------------------------------------
// Mtt

StateId Mtt::add_state(std::string name) {
  if (auto it = state_index_.find(name); it != state_index_.end()) return it->second;
  auto id = static_cast<StateId>(state_names_.size());
  state_index_.emplace(name, id);
  state_names_.push_back(std::move(name));
  return id;
}

std::optional<StateId> Mtt::find_state(std::string_view name) const {
  auto it = state_index_.find(std::string(name));
  if (it == state_index_.end()) return std::nullopt;
  return it->second;
}

void Mtt::add_rule(Rule r) {
  rule_index_.try_emplace(key(r.state, r.input), rules_.size());
  rules_.push_back(std::move(r));
}

const Rule* Mtt::find_rule(StateId q, SymbolId f) const {
  auto it = rule_index_.find(key(q, f));
  return it == rule_index_.end() ? nullptr : &rules_[it->second];
}

std::size_t Mtt::size() const {
  std::size_t s = 0;
  for (const Rule& r : rules_) s += 1 + rhs_size(r.rhs);
  return s;
}

// ---------------------------------------------------------------------------
// Dta

DtaState Dta::add_state(std::string name) {
  if (auto it = state_index_.find(name); it != state_index_.end()) return it->second;
  auto id = static_cast<DtaState>(state_names_.size());
  state_index_.emplace(name, id);
  state_names_.push_back(std::move(name));
  return id;
}

std::optional<DtaState> Dta::find_state(std::string_view name) const {
  auto it = state_index_.find(std::string(name));
  if (it == state_index_.end()) return std::nullopt;
  return it->second;
}

void Dta::add_transition(DtaState b, SymbolId f, std::vector<DtaState> children) {
  auto [it, inserted] = transitions_.try_emplace({raw(b), raw(f)}, std::move(children));
  if (!inserted) {
    throw ValidationError("automaton state '" + state_name(b) +
                          "' has two transitions for one symbol");
  }
}

const std::vector<DtaState>* Dta::transition(DtaState b, SymbolId f) const {
  auto it = transitions_.find({raw(b), raw(f)});
  return it == transitions_.end() ? nullptr : &it->second;
}

std::vector<SymbolId> Dta::symbols_of(DtaState b) const {
  std::vector<SymbolId> out;
  auto it = transitions_.lower_bound({raw(b), 0});
  for (; it != transitions_.end() && it->first.first == raw(b); ++it) {
    out.push_back(static_cast<SymbolId>(it->first.second));
  }
  return out;
}

TermId Dta::witness(TermStore& store, DtaState b) const {
  if (!analyzed()) throw InternalError("witness requested from an unanalyzed automaton");
  const SymbolTable& sy = store.symbols();
  std::map<std::pair<std::uint32_t, std::uint32_t>, TermId> memo;
  // Least tree of dom(state) with height <= h, preorder-lexicographic by name.
  std::function<TermId(DtaState, std::uint32_t)> least = [&](DtaState s, std::uint32_t h) {
    if (auto it = memo.find({raw(s), h}); it != memo.end()) return it->second;
    const std::vector<DtaState>* best_kids = nullptr;
    SymbolId best{};
    for (SymbolId f : symbols_of(s)) {
      const auto* kids = transition(s, f);
      bool fits = std::all_of(kids->begin(), kids->end(),
                              [&](DtaState c) { return min_height(c) + 1 <= h; });
      if (!fits) continue;
      if (!best_kids || sy.name(f) < sy.name(best)) {
        best = f;
        best_kids = kids;
      }
    }
    if (!best_kids) throw InternalError("no witness within the recorded height");
    std::vector<TermId> kids;
    for (DtaState c : *best_kids) kids.push_back(least(c, h - 1));
    TermId t = store.intern(best, kids);
    memo.emplace(std::make_pair(raw(s), h), t);
    return t;
  };
  return least(b, min_height(b));
}

Dta trivial_dta(const SymbolTable& symbols, std::span<const SymbolId> sigma) {
  Dta d;
  d.sigma.assign(sigma.begin(), sigma.end());
  DtaState b = d.add_state("b");
  d.initial = b;
  for (SymbolId f : sigma) d.add_transition(b, f, std::vector<DtaState>(symbols.rank(f), b));
  return d;
}

Dta dta_analyze(const SymbolTable&, const Dta& d) {
  constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> height(d.state_count(), kInf);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [key, kids] : d.transitions()) {
      std::uint32_t h = 1;
      for (DtaState c : kids) {
        if (height[raw(c)] == kInf) {
          h = kInf;
          break;
        }
        h = std::max(h, height[raw(c)] + 1);
      }
      if (h < height[key.first]) {
        height[key.first] = h;
        changed = true;
      }
    }
  }
  if (height[raw(d.initial)] == kInf) {
    throw EmptyDomainError("initial automaton state '" + d.state_name(d.initial) +
                           "' accepts no tree");
  }
  Dta out;
  out.sigma = d.sigma;
  std::vector<std::optional<DtaState>> renamed(d.state_count());
  for (std::uint32_t b = 0; b < d.state_count(); ++b) {
    if (height[b] != kInf) {
      renamed[b] = out.add_state(d.state_name(static_cast<DtaState>(b)));
      out.min_height_.push_back(height[b]);
    }
  }
  out.initial = *renamed[raw(d.initial)];
  for (const auto& [key, kids] : d.transitions()) {
    if (!renamed[key.first]) continue;
    std::vector<DtaState> nk;
    bool ok = true;
    for (DtaState c : kids) {
      if (!renamed[raw(c)]) {
        ok = false;
        break;
      }
      nk.push_back(*renamed[raw(c)]);
    }
    if (ok) out.add_transition(*renamed[key.first], static_cast<SymbolId>(key.second), nk);
  }
  return out;
}

bool dta_accepts(const TermStore& store, const Dta& d, DtaState b, TermId t) {
  const auto* kids = d.transition(b, store.symbol(t));
  if (!kids) return false;
  auto ch = store.children(t);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (!dta_accepts(store, d, (*kids)[i], ch[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Validation

const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::ParameterCount: return "parameter-count";
    case ViolationKind::Nondeterministic: return "nondeterministic";
    case ViolationKind::NotTotal: return "not-total";
    case ViolationKind::UnknownInputSymbol: return "unknown-input-symbol";
    case ViolationKind::InputVarRange: return "input-variable-range";
    case ViolationKind::ParamRange: return "parameter-range";
    case ViolationKind::NotBasic: return "not-basic";
    case ViolationKind::NotSeparated: return "not-separated";
    case ViolationKind::CallArity: return "call-arity";
    case ViolationKind::SymbolArity: return "symbol-arity";
    case ViolationKind::AxiomShape: return "axiom-shape";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind k) const {
  return std::any_of(violations.begin(), violations.end(),
                     [k](const Violation& v) { return v.kind == k; });
}

namespace {

struct RhsChecker {
  const SymbolTable& sy;
  const Mtt& m;
  std::uint32_t input_rank;  // rank of the rule's input symbol; 1 for the axiom
  bool allow_params;
  std::string where;
  SourceLoc loc;
  std::vector<Violation>& out;

  void report(ViolationKind k, const std::string& msg) {
    out.push_back(Violation{k, where + ": " + msg, loc});
  }

  // Output position: DeltaOut symbols, parameters and calls.
  void output(const RhsNode& n) {
    switch (n.kind) {
      case RhsNode::Kind::Param:
        param(n);
        return;
      case RhsNode::Kind::Call:
        call(n);
        return;
      case RhsNode::Kind::Symbol:
        if (sy.cls(n.symbol) != SymbolClass::DeltaOut) {
          report(ViolationKind::NotSeparated,
                 "symbol '" + sy.name(n.symbol) + "' is not an output-position symbol");
        }
        arity(n);
        for (const RhsNode& c : n.children) output(c);
        return;
    }
  }

  // Parameter argument: DeltaIn symbols and parameters only.
  void argument(const RhsNode& n) {
    switch (n.kind) {
      case RhsNode::Kind::Param:
        param(n);
        return;
      case RhsNode::Kind::Call:
        report(ViolationKind::NotBasic, "state call '" + m.state_name(n.state) +
                                            "' nested inside a parameter argument");
        for (const RhsNode& c : n.children) argument(c);
        return;
      case RhsNode::Kind::Symbol:
        if (sy.cls(n.symbol) != SymbolClass::DeltaIn) {
          report(ViolationKind::NotSeparated,
                 "symbol '" + sy.name(n.symbol) + "' is not a parameter-position symbol");
        }
        arity(n);
        for (const RhsNode& c : n.children) argument(c);
        return;
    }
  }

  void param(const RhsNode& n) {
    if (!allow_params) {
      report(ViolationKind::AxiomShape, "parameter y" + std::to_string(n.index) +
                                            " used in the axiom");
    } else if (n.index < 1 || n.index > m.param_count) {
      report(ViolationKind::ParamRange, "y" + std::to_string(n.index) + " exceeds " +
                                            std::to_string(m.param_count) + " parameters");
    }
  }

  void call(const RhsNode& n) {
    if (n.index < 1 || n.index > input_rank) {
      report(ViolationKind::InputVarRange,
             "x" + std::to_string(n.index) + " out of range for rank " +
                 std::to_string(input_rank));
    }
    if (!allow_params && n.index != 1) {
      report(ViolationKind::AxiomShape, "axiom calls must read x1");
    }
    if (n.children.size() != m.param_count) {
      report(ViolationKind::CallArity, "call of '" + m.state_name(n.state) + "' passes " +
                                           std::to_string(n.children.size()) +
                                           " arguments, expected " +
                                           std::to_string(m.param_count));
    }
    for (const RhsNode& c : n.children) argument(c);
  }

  void arity(const RhsNode& n) {
    if (n.children.size() != sy.rank(n.symbol)) {
      report(ViolationKind::SymbolArity, "symbol '" + sy.name(n.symbol) + "' has rank " +
                                             std::to_string(sy.rank(n.symbol)));
    }
  }
};

}  // namespace

ValidationReport validate(const SymbolTable& sy, const Mtt& m, Totality mode) {
  ValidationReport report;
  auto& out = report.violations;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const Rule& r : m.rules()) {
    const std::string where = "rule " + m.state_name(r.state) + "(" + sy.name(r.input) + ")";
    if (sy.cls(r.input) != SymbolClass::SigmaInput ||
        std::find(m.sigma.begin(), m.sigma.end(), r.input) == m.sigma.end()) {
      out.push_back({ViolationKind::UnknownInputSymbol,
                     where + ": '" + sy.name(r.input) + "' is not an input symbol", r.loc});
    }
    if (!seen.insert({raw(r.state), raw(r.input)}).second) {
      out.push_back({ViolationKind::Nondeterministic, where + ": duplicate rule", r.loc});
    }
    bool params_ok = r.lhs_params.size() == m.param_count;
    for (std::size_t j = 0; params_ok && j < r.lhs_params.size(); ++j) {
      params_ok = r.lhs_params[j] == j + 1;
    }
    if (!params_ok) {
      out.push_back({ViolationKind::ParameterCount,
                     where + ": left-hand side must list y1..y" + std::to_string(m.param_count),
                     r.loc});
    }
    RhsChecker check{sy, m, sy.rank(r.input), true, where, r.loc, out};
    check.output(r.rhs);
  }
  if (mode == Totality::Total) {
    for (std::uint32_t q = 0; q < m.state_count(); ++q) {
      for (SymbolId f : m.sigma) {
        if (!seen.count({q, raw(f)})) {
          out.push_back({ViolationKind::NotTotal,
                         "state " + m.state_name(static_cast<StateId>(q)) + " has no rule for '" +
                             sy.name(f) + "'",
                         {}});
        }
      }
    }
  }
  return report;
}

ValidationReport validate_axiom(const SymbolTable& sy, const Mtt& m, const Axiom& a) {
  ValidationReport report;
  RhsChecker check{sy, m, 1, false, "axiom", a.loc, report.violations};
  check.output(a.rhs);
  return report;
}

// ---------------------------------------------------------------------------
// Evaluation

TermId instantiate(TermStore& store, const RhsNode& n, std::span<const TermId> params) {
  switch (n.kind) {
    case RhsNode::Kind::Param:
      if (n.index < 1 || n.index > params.size()) {
        throw ValidationError("parameter y" + std::to_string(n.index) + " has no value");
      }
      return params[n.index - 1];
    case RhsNode::Kind::Call:
      throw ValidationError("state call inside a call-free term");
    case RhsNode::Kind::Symbol:
      break;
  }
  std::vector<TermId> kids;
  kids.reserve(n.children.size());
  for (const RhsNode& c : n.children) kids.push_back(instantiate(store, c, params));
  return store.intern(n.symbol, kids);
}

std::size_t Evaluator::KeyHash::operator()(const std::vector<std::uint32_t>& k) const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint32_t v : k) {
    h ^= v;
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h ^ (h >> 31));
}

TermId Evaluator::state(StateId q, TermId input, std::span<const TermId> params) {
  if (params.size() != m_->param_count) {
    throw ArityError("state " + m_->state_name(q) + " expects " +
                     std::to_string(m_->param_count) + " parameters");
  }
  path_.clear();
  return eval_state(q, input, params);
}

TermId Evaluator::axiom(const Axiom& a, TermId input) {
  path_.clear();
  TermId inputs[1] = {input};
  return eval(a.rhs, inputs, {});
}

TermId Evaluator::eval_state(StateId q, TermId input, std::span<const TermId> params) {
  std::vector<std::uint32_t> key;
  key.reserve(2 + params.size());
  key.push_back(raw(q));
  key.push_back(raw(input));
  for (TermId p : params) key.push_back(raw(p));
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  const SymbolId f = store_->symbol(input);
  const Rule* r = m_->find_rule(q, f);
  if (!r) {
    throw DomainError("no rule for state " + m_->state_name(q) + " on '" +
                      store_->symbols().name(f) + "' at input position " + dewey_string(path_));
  }
  auto kids = store_->children(input);
  std::vector<TermId> inputs(kids.begin(), kids.end());
  TermId out = eval(r->rhs, inputs, params);
  memo_.emplace(std::move(key), out);
  return out;
}

TermId Evaluator::eval(const RhsNode& n, std::span<const TermId> inputs,
                       std::span<const TermId> params) {
  switch (n.kind) {
    case RhsNode::Kind::Param:
      return params[n.index - 1];
    case RhsNode::Kind::Call: {
      std::vector<TermId> args;
      args.reserve(n.children.size());
      for (const RhsNode& c : n.children) args.push_back(eval(c, inputs, params));
      path_.push_back(n.index);
      TermId out = eval_state(n.state, inputs[n.index - 1], args);
      path_.pop_back();
      return out;
    }
    case RhsNode::Kind::Symbol:
      break;
  }
  if (n.children.empty()) return store_->leaf(n.symbol);
  std::vector<TermId> kids;
  kids.reserve(n.children.size());
  for (const RhsNode& c : n.children) kids.push_back(eval(c, inputs, params));
  return store_->intern(n.symbol, kids);
}

TermId evaluate_state(const Mtt& m, TermStore& store, StateId q, TermId input,
                      std::span<const TermId> params) {
  Evaluator ev(m, store);
  return ev.state(q, input, params);
}

TermId evaluate_axiom(const Mtt& m, TermStore& store, const Axiom& a, TermId input) {
  Evaluator ev(m, store);
  return ev.axiom(a, input);
}

std::optional<std::uint32_t> LookaheadMtt::find_la_state(std::string_view name) const {
  auto it = std::find(la_states.begin(), la_states.end(), name);
  if (it == la_states.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - la_states.begin());
}

std::uint32_t LookaheadMtt::la_state_of(const TermStore& store, TermId t) const {
  std::vector<std::uint32_t> kids;
  for (TermId c : store.children(t)) kids.push_back(la_state_of(store, c));
  auto it = la_trans.find({raw(store.symbol(t)), kids});
  if (it == la_trans.end()) {
    throw ValidationError("look-ahead automaton has no transition for '" +
                          store.symbols().name(store.symbol(t)) + "'");
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// Decomposition and product annotation

RhsDecomposition rhs_decompose(TermStore& store, const RhsNode& rhs) {
  RhsDecomposition out;
  const SymbolTable& sy = store.symbols();
  std::function<TermId(const RhsNode&)> go = [&](const RhsNode& n) -> TermId {
    if (!n.is_symbol() || sy.cls(n.symbol) != SymbolClass::DeltaOut) {
      out.leaves.push_back(&n);
      return store.leaf(sy.top());
    }
    std::vector<TermId> kids;
    kids.reserve(n.children.size());
    for (const RhsNode& c : n.children) kids.push_back(go(c));
    return store.intern(n.symbol, kids);
  };
  out.pattern = Pattern(go(rhs));
  return out;
}

AnnotatedMtt product_annotate(const SymbolTable& sy, const Mtt& m, const Axiom& a,
                              const Dta& input_dta, Totality mode) {
  const Dta d = input_dta.analyzed() ? input_dta : dta_analyze(sy, input_dta);
  AnnotatedMtt out;
  out.mtt.param_count = m.param_count;
  out.mtt.sigma = m.sigma;
  out.mtt.delta_out = m.delta_out;
  out.mtt.delta_in = m.delta_in;

  const bool single = d.state_count() == 1;
  std::map<std::pair<std::uint32_t, std::uint32_t>, StateId> pairs;
  std::deque<std::pair<StateId, DtaState>> work;
  auto pair_state = [&](StateId q, DtaState b) {
    auto key = std::make_pair(raw(q), raw(b));
    if (auto it = pairs.find(key); it != pairs.end()) return it->second;
    std::string name = single ? m.state_name(q) : m.state_name(q) + "[" + d.state_name(b) + "]";
    StateId id = out.mtt.add_state(std::move(name));
    pairs.emplace(key, id);
    out.pi.push_back(b);
    work.emplace_back(q, b);
    return id;
  };

  // Rewrites calls to read the automaton state of the child they consume.
  std::function<RhsNode(const RhsNode&, const std::vector<DtaState>&)> specialize =
      [&](const RhsNode& n, const std::vector<DtaState>& kids) -> RhsNode {
    RhsNode r = n;
    if (n.is_call()) {
      if (n.index < 1 || n.index > kids.size()) {
        throw ValidationError("call reads x" + std::to_string(n.index) + " out of range");
      }
      r.state = pair_state(n.state, kids[n.index - 1]);
      return r;
    }
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      r.children[i] = specialize(n.children[i], kids);
    }
    return r;
  };

  out.axiom.loc = a.loc;
  out.axiom.rhs = specialize(a.rhs, std::vector<DtaState>{d.initial});

  while (!work.empty()) {
    auto [q, b] = work.front();
    work.pop_front();
    StateId self = pairs.at({raw(q), raw(b)});
    for (SymbolId f : d.symbols_of(b)) {
      const Rule* r = m.find_rule(q, f);
      if (!r) {
        if (mode == Totality::Total) {
          throw ValidationError("state " + m.state_name(q) + " has no rule for '" + sy.name(f) +
                                "' although automaton state '" + d.state_name(b) +
                                "' accepts it");
        }
        continue;
      }
      Rule nr;
      nr.state = self;
      nr.input = f;
      nr.lhs_params = r->lhs_params;
      nr.loc = r->loc;
      nr.rhs = specialize(r->rhs, *d.transition(b, f));
      out.mtt.add_rule(std::move(nr));
    }
  }
  return out;
}

}  // namespace mtteq
