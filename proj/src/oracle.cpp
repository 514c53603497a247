#include "mtteq/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_map>

#include <omp.h>

#include "mtteq/errors.hpp"

namespace mtteq {

int compare_lex(const TermStore& store, TermId a, TermId b) {
  if (a == b) return 0;
  const SymbolTable& sy = store.symbols();
  if (store.symbol(a) != store.symbol(b)) {
    int c = sy.name(store.symbol(a)).compare(sy.name(store.symbol(b)));
    if (c != 0) return c;
    return raw(store.symbol(a)) < raw(store.symbol(b)) ? -1 : 1;
  }
  auto ka = store.children(a);
  auto kb = store.children(b);
  for (std::size_t i = 0; i < ka.size(); ++i) {
    if (int c = compare_lex(store, ka[i], kb[i]); c != 0) return c;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Enumeration

InputEnumerator::InputEnumerator(TermStore& store, const Dta& d, DtaState b, EnumBudget budget)
    : store_(store), d_(d), b_(b), budget_(budget) {
  if (!d_.analyzed()) throw InternalError("enumeration needs an analyzed automaton");
  upto_.resize(d_.state_count());
}

std::vector<TermId> InputEnumerator::exact_level(DtaState c, std::uint32_t h, std::uint64_t cap,
                                                 bool& capped) {
  const SymbolTable& sy = store_.symbols();
  std::vector<SymbolId> syms = d_.symbols_of(c);
  std::sort(syms.begin(), syms.end(),
            [&](SymbolId x, SymbolId y) { return sy.name(x) < sy.name(y); });
  std::vector<TermId> out;
  for (SymbolId f : syms) {
    const std::vector<DtaState>& kids = *d_.transition(c, f);
    if (kids.empty()) {
      if (h == 1) out.push_back(store_.leaf(f));
      continue;
    }
    if (h < 2) continue;
    std::vector<const std::vector<TermId>*> lists;
    bool empty = false;
    for (DtaState k : kids) {
      lists.push_back(&upto_[raw(k)]);
      empty = empty || upto_[raw(k)].empty();
    }
    if (empty) continue;
    std::vector<std::size_t> idx(kids.size(), 0);
    std::vector<TermId> tuple(kids.size());
    for (;;) {
      std::uint32_t tallest = 0;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        tuple[i] = (*lists[i])[idx[i]];
        tallest = std::max(tallest, store_.height(tuple[i]));
      }
      if (tallest == h - 1) {
        out.push_back(store_.intern(f, tuple));
        if (out.size() >= cap) {
          capped = true;
          return out;
        }
      }
      bool more = false;
      for (std::size_t pos = kids.size(); pos > 0; --pos) {
        if (++idx[pos - 1] < lists[pos - 1]->size()) {
          more = true;
          break;
        }
        idx[pos - 1] = 0;
      }
      if (!more) break;
    }
  }
  return out;
}

bool InputEnumerator::advance_level() {
  if (done_ || height_ >= budget_.max_height) {
    done_ = true;
    return false;
  }
  const std::uint32_t h = height_ + 1;
  const bool last = h == budget_.max_height;
  bool capped = false;
  std::vector<std::vector<TermId>> exact(d_.state_count());
  for (std::uint32_t c = 0; c < d_.state_count(); ++c) {
    if (last && c != raw(b_)) continue;
    exact[c] = exact_level(static_cast<DtaState>(c), h, budget_.max_count, capped);
  }
  for (std::uint32_t c = 0; c < d_.state_count(); ++c) {
    if (exact[c].empty()) continue;
    std::vector<TermId> merged;
    merged.reserve(upto_[c].size() + exact[c].size());
    std::merge(upto_[c].begin(), upto_[c].end(), exact[c].begin(), exact[c].end(),
               std::back_inserter(merged),
               [&](TermId x, TermId y) { return compare_lex(store_, x, y) < 0; });
    upto_[c].swap(merged);
  }
  level_ = std::move(exact[raw(b_)]);
  level_pos_ = 0;
  height_ = h;
  if (capped) {
    // The next level would need complete child lists.
    truncated_ = true;
    budget_.max_height = h;
  }
  return true;
}

std::optional<TermId> InputEnumerator::next() {
  while (true) {
    if (level_pos_ < level_.size()) {
      if (emitted_ >= budget_.max_count) {
        truncated_ = true;
        done_ = true;
        return std::nullopt;
      }
      ++emitted_;
      return level_[level_pos_++];
    }
    if (!advance_level()) return std::nullopt;
  }
}

std::vector<TermId> InputEnumerator::all() {
  std::vector<TermId> out;
  while (auto t = next()) out.push_back(*t);
  return out;
}

std::vector<TermId> enumerate_inputs(TermStore& store, const Dta& d, DtaState b, EnumBudget budget) {
  const Dta a = d.analyzed() ? d : dta_analyze(store.symbols(), d);
  InputEnumerator e(store, a, b, budget);
  return e.all();
}

std::vector<TermId> enumerate_inputs(TermStore& store, std::span<const SymbolId> sigma,
                                     EnumBudget budget) {
  const Dta d = dta_analyze(store.symbols(), trivial_dta(store.symbols(), sigma));
  InputEnumerator e(store, d, d.initial, budget);
  return e.all();
}

// ---------------------------------------------------------------------------
// Comparison

namespace {

struct Inputs {
  std::vector<TermId> trees;
  bool truncated = false;
};

Inputs collect_inputs(TermStore& store, const Transduction& a, const Dta* d, EnumBudget budget) {
  const Dta dd = d ? (d->analyzed() ? *d : dta_analyze(store.symbols(), *d))
                   : dta_analyze(store.symbols(), trivial_dta(store.symbols(), a.mtt->sigma));
  InputEnumerator e(store, dd, dd.initial, budget);
  Inputs in;
  in.trees = e.all();
  in.truncated = e.truncated();
  return in;
}

std::optional<TermId> try_axiom(Evaluator& ev, const Axiom& a, TermId t) {
  try {
    return ev.axiom(a, t);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace

OracleResult oracle_decide_serial(TermStore& store, Transduction a, Transduction b, const Dta* d,
                                  EnumBudget budget) {
  Inputs in = collect_inputs(store, a, d, budget);
  OracleResult r;
  r.truncated = in.truncated;
  Evaluator ea(*a.mtt, store);
  Evaluator eb(*b.mtt, store);
  for (TermId t : in.trees) {
    ++r.checked;
    if (try_axiom(ea, *a.axiom, t) != try_axiom(eb, *b.axiom, t)) {
      r.agree = false;
      r.counterexample = t;
      return r;
    }
  }
  return r;
}

OracleResult oracle_decide_parallel(TermStore& store, Transduction a, Transduction b, const Dta* d,
                                    EnumBudget budget) {
  Inputs in = collect_inputs(store, a, d, budget);
  const auto n = static_cast<std::int64_t>(in.trees.size());
  std::atomic<std::int64_t> best{n};
  const TermStore& shared = store;

#pragma omp parallel
  {
    TermStore local(shared.symbols());
    Evaluator ea(*a.mtt, local);
    Evaluator eb(*b.mtt, local);
    std::vector<TermId> memo;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
      if (i >= best.load(std::memory_order_relaxed)) continue;
      TermId t = local.import(shared, in.trees[i], memo);
      if (try_axiom(ea, *a.axiom, t) != try_axiom(eb, *b.axiom, t)) {
        std::int64_t cur = best.load();
        while (i < cur && !best.compare_exchange_weak(cur, i)) {
        }
      }
    }
  }

  OracleResult r;
  r.truncated = in.truncated;
  const std::int64_t found = best.load();
  if (found < n) {
    r.agree = false;
    r.counterexample = in.trees[found];
    r.checked = static_cast<std::uint64_t>(found) + 1;
  } else {
    r.checked = static_cast<std::uint64_t>(n);
  }
  return r;
}

OracleResult oracle_decide(TermStore& store, Transduction a, Transduction b, const Dta* d,
                           EnumBudget budget) {
  if (omp_get_max_threads() > 1) return oracle_decide_parallel(store, a, b, d, budget);
  return oracle_decide_serial(store, a, b, d, budget);
}

bool oracle_state_equiv(TermStore& store, const Mtt& m, StateId q, std::span<const TermId> params,
                        const Mtt& m2, StateId q2, std::span<const TermId> params2, const Dta& d,
                        DtaState b, EnumBudget budget) {
  const Dta dd = d.analyzed() ? d : dta_analyze(store.symbols(), d);
  InputEnumerator e(store, dd, b, budget);
  Evaluator ea(m, store);
  Evaluator eb(m2, store);
  auto run = [](Evaluator& ev, StateId s, TermId t,
                std::span<const TermId> ps) -> std::optional<TermId> {
    try {
      return ev.state(s, t, ps);
    } catch (const DomainError&) {
      return std::nullopt;
    }
  };
  while (auto t = e.next()) {
    if (run(ea, q, *t, params) != run(eb, q2, *t, params2)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Look-ahead semantics

namespace {

class LookaheadEvaluator {
 public:
  LookaheadEvaluator(const LookaheadMtt& n, TermStore& store) : n_(n), store_(store) {}

  TermId axiom(TermId t) {
    TermId inputs[1] = {t};
    return eval(n_.axiom.rhs, inputs, {});
  }

 private:
  std::uint32_t la(TermId t) {
    if (auto it = la_memo_.find(raw(t)); it != la_memo_.end()) return it->second;
    std::uint32_t s = n_.la_state_of(store_, t);
    la_memo_.emplace(raw(t), s);
    return s;
  }

  TermId state(StateId q, TermId t, std::span<const TermId> params) {
    std::vector<std::uint32_t> key{raw(q), raw(t)};
    for (TermId p : params) key.push_back(raw(p));
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<std::uint32_t> guard;
    for (TermId c : store_.children(t)) guard.push_back(la(c));
    const Rule* rule = nullptr;
    const auto& rules = n_.mtt.rules();
    for (std::size_t i = 0; i < rules.size(); ++i) {
      if (rules[i].state == q && rules[i].input == store_.symbol(t) && n_.guards[i] == guard) {
        rule = &rules[i];
        break;
      }
    }
    if (!rule) {
      throw DomainError("no look-ahead rule for state " + n_.mtt.state_name(q) + " on '" +
                        store_.symbols().name(store_.symbol(t)) + "'");
    }
    auto kids = store_.children(t);
    std::vector<TermId> inputs(kids.begin(), kids.end());
    TermId out = eval(rule->rhs, inputs, params);
    memo_.emplace(std::move(key), out);
    return out;
  }

  TermId eval(const RhsNode& n, std::span<const TermId> inputs, std::span<const TermId> params) {
    if (n.is_param()) return params[n.index - 1];
    std::vector<TermId> kids;
    for (const RhsNode& c : n.children) kids.push_back(eval(c, inputs, params));
    if (n.is_call()) return state(n.state, inputs[n.index - 1], kids);
    return store_.intern(n.symbol, kids);
  }

  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& k) const {
      std::size_t h = 1469598103934665603ULL;
      for (auto v : k) h = (h ^ v) * 1099511628211ULL;
      return h;
    }
  };

  const LookaheadMtt& n_;
  TermStore& store_;
  std::unordered_map<std::uint32_t, std::uint32_t> la_memo_;
  std::unordered_map<std::vector<std::uint32_t>, TermId, KeyHash> memo_;
};

}  // namespace

TermId evaluate_lookahead(TermStore& store, const LookaheadMtt& n, TermId input) {
  LookaheadEvaluator ev(n, store);
  return ev.axiom(input);
}

OracleResult oracle_decide_lookahead(TermStore& store, const LookaheadMtt& a,
                                     const LookaheadMtt& b, EnumBudget budget) {
  std::vector<TermId> inputs = enumerate_inputs(store, a.mtt.sigma, budget);
  LookaheadEvaluator ea(a, store);
  LookaheadEvaluator eb(b, store);
  auto run = [](LookaheadEvaluator& ev, TermId t) -> std::optional<TermId> {
    try {
      return ev.axiom(t);
    } catch (const DomainError&) {
      return std::nullopt;
    }
  };
  OracleResult r;
  for (TermId t : inputs) {
    ++r.checked;
    if (run(ea, t) != run(eb, t)) {
      r.agree = false;
      r.counterexample = t;
      return r;
    }
  }
  return r;
}

}  // namespace mtteq
