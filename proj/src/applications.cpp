#include "mtteq/applications.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "mtteq/errors.hpp"
#include "mtteq/oracle.hpp"

namespace mtteq {

Mtt totalize(SymbolTable& symbols, const Mtt& m, std::string_view bottom) {
  const SymbolId bot = symbols.intern(bottom, 0, SymbolClass::DeltaOut);
  Mtt out = m;
  if (std::find(out.delta_out.begin(), out.delta_out.end(), bot) == out.delta_out.end()) {
    out.delta_out.push_back(bot);
  }
  std::vector<std::uint32_t> params;
  for (std::uint32_t j = 1; j <= m.param_count; ++j) params.push_back(j);
  for (std::uint32_t q = 0; q < m.state_count(); ++q) {
    for (SymbolId f : m.sigma) {
      if (m.find_rule(static_cast<StateId>(q), f)) continue;
      Rule r;
      r.state = static_cast<StateId>(q);
      r.input = f;
      r.lhs_params = params;
      r.rhs = RhsNode::make_symbol(bot);
      out.add_rule(std::move(r));
    }
  }
  return out;
}

Dta domain_dta(const SymbolTable& symbols, const Mtt& m, const Axiom& a) {
  using Set = std::vector<std::uint32_t>;
  auto name_of = [&](const Set& s) {
    std::string n = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) n += ',';
      n += m.state_name(static_cast<StateId>(s[i]));
    }
    return n + "}";
  };

  Dta d;
  d.sigma = m.sigma;
  std::map<Set, DtaState> ids;
  std::deque<Set> work;
  auto state_of = [&](Set s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (auto it = ids.find(s); it != ids.end()) return it->second;
    DtaState b = d.add_state(name_of(s));
    ids.emplace(s, b);
    work.push_back(s);
    return b;
  };

  Set init;
  std::function<void(const RhsNode&, std::vector<Set>&)> calls = [&](const RhsNode& n,
                                                                     std::vector<Set>& out) {
    if (n.is_call()) {
      out[n.index - 1].push_back(raw(n.state));
      return;  // parameter arguments contain no calls
    }
    for (const RhsNode& c : n.children) calls(c, out);
  };
  {
    std::vector<Set> root(1);
    calls(a.rhs, root);
    init = root[0];
  }
  d.initial = state_of(init);

  while (!work.empty()) {
    Set s = work.front();
    work.pop_front();
    const DtaState b = ids.at(s);
    for (SymbolId f : m.sigma) {
      const std::uint32_t k = symbols.rank(f);
      std::vector<Set> succ(k);
      bool defined = true;
      for (std::uint32_t q : s) {
        const Rule* r = m.find_rule(static_cast<StateId>(q), f);
        if (!r) {
          defined = false;
          break;
        }
        calls(r->rhs, succ);
      }
      if (!defined) continue;
      std::vector<DtaState> kids;
      for (Set& c : succ) kids.push_back(state_of(c));
      d.add_transition(b, f, kids);
    }
  }
  return d;
}

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// Smallest tree in L(x) \ L(y) for states of two analyzed automata; y may be
// the dead state (kNone).
class Difference {
 public:
  Difference(TermStore& store, const Dta& a, const Dta& b) : store_(store), a_(a), b_(b) {}

  std::optional<TermId> witness(DtaState x, std::optional<DtaState> y) {
    solve();
    const Key k{raw(x), y ? raw(*y) : kNone};
    auto it = best_.find(k);
    if (it == best_.end() || it->second.height == kNone) return std::nullopt;
    return build(k);
  }

 private:
  using Key = std::pair<std::uint32_t, std::uint32_t>;
  struct Choice {
    std::uint32_t height = kNone;
    SymbolId symbol{};
    std::uint32_t child = kNone;  // kNone: the symbol is undefined on the right side
  };

  void collect(Key k) {
    if (!best_.emplace(k, Choice{}).second) return;
    for (SymbolId f : a_.symbols_of(static_cast<DtaState>(k.first))) {
      const auto* ka = a_.transition(static_cast<DtaState>(k.first), f);
      const std::vector<DtaState>* kb =
          k.second == kNone ? nullptr : b_.transition(static_cast<DtaState>(k.second), f);
      for (std::size_t i = 0; i < ka->size(); ++i) {
        collect({raw((*ka)[i]), kb ? raw((*kb)[i]) : kNone});
      }
    }
  }

  void solve() {
    if (solved_) return;
    solved_ = true;
    for (std::uint32_t x = 0; x < a_.state_count(); ++x) {
      collect({x, kNone});
      for (std::uint32_t y = 0; y < b_.state_count(); ++y) collect({x, y});
    }
    const SymbolTable& sy = store_.symbols();
    auto better = [&](const Choice& c, const Choice& cur) {
      if (c.height != cur.height) return c.height < cur.height;
      if (c.symbol != cur.symbol) return sy.name(c.symbol) < sy.name(cur.symbol);
      return c.child < cur.child;
    };
    for (bool changed = true; changed;) {
      changed = false;
      for (auto& [k, cur] : best_) {
        for (SymbolId f : a_.symbols_of(static_cast<DtaState>(k.first))) {
          const auto& ka = *a_.transition(static_cast<DtaState>(k.first), f);
          const std::vector<DtaState>* kb =
              k.second == kNone ? nullptr : b_.transition(static_cast<DtaState>(k.second), f);
          std::uint32_t base = 1;
          for (DtaState c : ka) base = std::max(base, a_.min_height(c) + 1);
          if (!kb) {
            Choice c{base, f, kNone};
            if (better(c, cur)) {
              cur = c;
              changed = true;
            }
            continue;
          }
          for (std::uint32_t j = 0; j < ka.size(); ++j) {
            const Choice& sub = best_.at({raw(ka[j]), raw((*kb)[j])});
            if (sub.height == kNone) continue;
            std::uint32_t h = sub.height + 1;
            for (std::uint32_t i = 0; i < ka.size(); ++i) {
              if (i != j) h = std::max(h, a_.min_height(ka[i]) + 1);
            }
            Choice c{h, f, j};
            if (better(c, cur)) {
              cur = c;
              changed = true;
            }
          }
        }
      }
    }
  }

  TermId build(Key k) {
    const Choice& c = best_.at(k);
    const auto& ka = *a_.transition(static_cast<DtaState>(k.first), c.symbol);
    std::vector<TermId> kids;
    for (std::uint32_t i = 0; i < ka.size(); ++i) {
      if (i == c.child) {
        const auto& kb = *b_.transition(static_cast<DtaState>(k.second), c.symbol);
        kids.push_back(build({raw(ka[i]), raw(kb[i])}));
      } else {
        kids.push_back(a_.witness(store_, ka[i]));
      }
    }
    return store_.intern(c.symbol, kids);
  }

  TermStore& store_;
  const Dta& a_;
  const Dta& b_;
  bool solved_ = false;
  std::map<Key, Choice> best_;
};

std::optional<Dta> analyzed_or_empty(const SymbolTable& sy, const Dta& d) {
  try {
    return dta_analyze(sy, d);
  } catch (const EmptyDomainError&) {
    return std::nullopt;
  }
}

}  // namespace

DtaEquivResult dta_equiv(TermStore& store, const Dta& d1, const Dta& d2) {
  const SymbolTable& sy = store.symbols();
  std::optional<Dta> a = analyzed_or_empty(sy, d1);
  std::optional<Dta> b = analyzed_or_empty(sy, d2);
  DtaEquivResult out;
  if (!a || !b) {
    out.equivalent = !a && !b;
    if (a) {
      out.witness = a->witness(store, a->initial);
      out.witness_in_first = true;
    } else if (b) {
      out.witness = b->witness(store, b->initial);
    }
    return out;
  }
  Difference ab(store, *a, *b);
  Difference ba(store, *b, *a);
  std::optional<TermId> w1 = ab.witness(a->initial, b->initial);
  std::optional<TermId> w2 = ba.witness(b->initial, a->initial);
  if (!w1 && !w2) return out;
  out.equivalent = false;
  bool first = w1.has_value();
  if (w1 && w2) {
    const std::uint32_t h1 = store.height(*w1);
    const std::uint32_t h2 = store.height(*w2);
    first = h1 != h2 ? h1 < h2 : compare_lex(store, *w1, *w2) <= 0;
  }
  out.witness = first ? w1 : w2;
  out.witness_in_first = first;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string join_names(const std::vector<std::string>& names, const std::vector<std::uint32_t>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ',';
    s += names[ids[i]];
  }
  return s;
}

// All tuples of length k over {0..n-1} in lexicographic order.
std::vector<std::vector<std::uint32_t>> tuples(std::uint32_t n, std::uint32_t k) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> cur(k, 0);
  if (n == 0 && k > 0) return out;
  while (true) {
    out.push_back(cur);
    std::uint32_t pos = k;
    while (pos > 0 && ++cur[pos - 1] == n) cur[--pos] = 0;
    if (pos == 0) break;
  }
  return out;
}

const Rule* guarded_rule(const LookaheadMtt& n, StateId q, SymbolId f,
                         const std::vector<std::uint32_t>& guard) {
  const auto& rules = n.mtt.rules();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (rules[i].state == q && rules[i].input == f && n.guards[i] == guard) return &rules[i];
  }
  return nullptr;
}

}  // namespace

RemovedLookahead remove_lookahead(SymbolTable& symbols, const LookaheadMtt& n1,
                                  const LookaheadMtt& n2) {
  if (n1.mtt.sigma != n2.mtt.sigma) {
    throw ValidationError("look-ahead transducers use different input alphabets");
  }
  RemovedLookahead out;
  Dta& d = out.dta;
  const DtaState any = d.add_state("*");
  d.initial = any;
  std::map<std::pair<std::uint32_t, std::uint32_t>, DtaState> pair_state;
  for (std::uint32_t r = 0; r < n1.la_states.size(); ++r) {
    for (std::uint32_t r2 = 0; r2 < n2.la_states.size(); ++r2) {
      pair_state[{r, r2}] = d.add_state("(" + n1.la_states[r] + "," + n2.la_states[r2] + ")");
    }
  }

  auto start = [&](Mtt& m, const LookaheadMtt& n) {
    m.param_count = n.mtt.param_count;
    m.delta_out = n.mtt.delta_out;
    m.delta_in = n.mtt.delta_in;
    for (std::uint32_t q = 0; q < n.mtt.state_count(); ++q) {
      m.add_state(n.mtt.state_name(static_cast<StateId>(q)));
    }
  };
  start(out.m1, n1);
  start(out.m2, n2);
  out.a1 = n1.axiom;
  out.a2 = n2.axiom;

  for (SymbolId f : n1.mtt.sigma) {
    const std::uint32_t k = symbols.rank(f);
    for (const auto& g1 : tuples(static_cast<std::uint32_t>(n1.la_states.size()), k)) {
      auto v1 = n1.la_trans.find({raw(f), g1});
      if (v1 == n1.la_trans.end()) continue;
      for (const auto& g2 : tuples(static_cast<std::uint32_t>(n2.la_states.size()), k)) {
        auto v2 = n2.la_trans.find({raw(f), g2});
        if (v2 == n2.la_trans.end()) continue;
        const std::string name = symbols.name(f) + "<" + join_names(n1.la_states, g1) + "|" +
                                 join_names(n2.la_states, g2) + ">";
        const SymbolId fa = symbols.intern(name, k, SymbolClass::SigmaInput);
        out.m1.sigma.push_back(fa);
        out.m2.sigma.push_back(fa);
        d.sigma.push_back(fa);

        std::vector<DtaState> kids;
        for (std::uint32_t i = 0; i < k; ++i) kids.push_back(pair_state.at({g1[i], g2[i]}));
        d.add_transition(any, fa, kids);
        d.add_transition(pair_state.at({v1->second, v2->second}), fa, kids);

        auto copy_rules = [&](Mtt& m, const LookaheadMtt& n, const std::vector<std::uint32_t>& g) {
          for (std::uint32_t q = 0; q < n.mtt.state_count(); ++q) {
            const Rule* r = guarded_rule(n, static_cast<StateId>(q), f, g);
            if (!r) {
              throw ValidationError("no rule of state " + n.mtt.state_name(static_cast<StateId>(q)) +
                                    " matches " + name);
            }
            Rule nr = *r;
            nr.input = fa;
            m.add_rule(std::move(nr));
          }
        };
        copy_rules(out.m1, n1, g1);
        copy_rules(out.m2, n2, g2);
      }
    }
  }
  return out;
}

PartialDecision decide_partial(SymbolTable& symbols, TermStore& store, const Mtt& m1,
                               const Axiom& a1, const Mtt& m2, const Axiom& a2,
                               const DecideOptions& options) {
  PartialDecision out;
  const Dta d1 = domain_dta(symbols, m1, a1);
  const Dta d2 = domain_dta(symbols, m2, a2);
  DtaEquivResult same = dta_equiv(store, d1, d2);
  if (!same.equivalent) {
    out.verdict = Verdict::Inequivalent;
    out.domains_differ = true;
    out.domain_witness = same.witness;
    return out;
  }
  try {
    (void)dta_analyze(symbols, d1);
  } catch (const EmptyDomainError&) {
    return out;  // both domains are empty
  }
  const std::string bottom = "⊥";
  const Mtt t1 = totalize(symbols, m1, bottom);
  const Mtt t2 = totalize(symbols, m2, bottom);
  out.decision = decide(symbols, store, t1, a1, t2, a2, d1, options);
  out.verdict = out.decision->verdict;
  return out;
}

}  // namespace mtteq
