#include "mtteq/herbrand.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "mtteq/errors.hpp"

namespace mtteq {

std::optional<TermId> Conjunction::lookup(SymbolId v) const {
  for (const auto& [var, t] : bindings_) {
    if (var == v) return t;
  }
  return std::nullopt;
}

std::vector<SymbolId> term_vars(const TermStore& store, TermId t) {
  const SymbolTable& sy = store.symbols();
  std::vector<SymbolId> out;
  std::unordered_set<std::uint32_t> seen;
  std::vector<TermId> stack{t};
  while (!stack.empty()) {
    TermId u = stack.back();
    stack.pop_back();
    if (!seen.insert(raw(u)).second) continue;
    if (sy.is_var(store.symbol(u))) out.push_back(store.symbol(u));
    for (TermId c : store.children(u)) stack.push_back(c);
  }
  return out;
}

namespace {

// Union-find over term nodes. A class keeps at most one non-variable member
// (others are unified into it) and its least variable.
class Unifier {
 public:
  explicit Unifier(TermStore& store) : store_(store), sy_(store.symbols()) {}

  bool unify(TermId a, TermId b) {
    std::vector<std::pair<TermId, TermId>> todo{{a, b}};
    while (!todo.empty()) {
      auto [x, y] = todo.back();
      todo.pop_back();
      std::uint32_t rx = find(x);
      std::uint32_t ry = find(y);
      if (rx == ry) continue;
      Class& cx = classes_[rx];
      Class& cy = classes_[ry];
      if (cx.term && cy.term) {
        TermId tx = *cx.term;
        TermId ty = *cy.term;
        if (store_.symbol(tx) != store_.symbol(ty)) return false;
        auto kx = store_.children(tx);
        auto ky = store_.children(ty);
        for (std::size_t i = 0; i < kx.size(); ++i) todo.emplace_back(kx[i], ky[i]);
      }
      merge(rx, ry);
    }
    return true;
  }

  Conjunction solve(std::vector<SymbolId> vars) {
    std::sort(vars.begin(), vars.end(), [&](SymbolId a, SymbolId b) {
      return sy_.var_order(a) < sy_.var_order(b);
    });
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    std::vector<std::pair<SymbolId, TermId>> bindings;
    for (SymbolId v : vars) {
      TermId leaf = store_.leaf(v);
      std::optional<TermId> value = resolve(leaf);
      if (!value) return Conjunction::falsity();
      if (*value != leaf) bindings.emplace_back(v, *value);
    }
    return Conjunction::from_canonical(std::move(bindings));
  }

 private:
  struct Class {
    std::uint32_t parent;
    std::optional<TermId> term;     // the non-variable member, if any
    std::optional<SymbolId> least;  // least variable member
    enum : std::uint8_t { Fresh, Active, Done, Failed } state = Fresh;
    TermId value{};
  };

  std::uint32_t node(TermId t) {
    auto [it, inserted] = index_.try_emplace(raw(t), static_cast<std::uint32_t>(classes_.size()));
    if (inserted) {
      Class c;
      c.parent = it->second;
      if (sy_.is_var(store_.symbol(t))) {
        c.least = store_.symbol(t);
      } else {
        c.term = t;
      }
      classes_.push_back(c);
    }
    return it->second;
  }

  std::uint32_t find(TermId t) { return root(node(t)); }

  std::uint32_t root(std::uint32_t i) {
    while (classes_[i].parent != i) {
      classes_[i].parent = classes_[classes_[i].parent].parent;
      i = classes_[i].parent;
    }
    return i;
  }

  void merge(std::uint32_t a, std::uint32_t b) {
    Class& ca = classes_[a];
    Class& cb = classes_[b];
    cb.parent = a;
    if (!ca.term) ca.term = cb.term;
    if (!ca.least || (cb.least && sy_.var_order(*cb.least) < sy_.var_order(*ca.least))) {
      ca.least = cb.least;
    }
  }

  // Fully substituted value of t; nullopt on a cycle through a variable.
  std::optional<TermId> resolve(TermId t) {
    if (sy_.is_var(store_.symbol(t))) {
      std::uint32_t r = find(t);
      Class& c = classes_[r];
      switch (c.state) {
        case Class::Done: return c.value;
        case Class::Active:
        case Class::Failed: return std::nullopt;
        case Class::Fresh: break;
      }
      if (!c.term) {
        c.state = Class::Done;
        c.value = store_.leaf(*c.least);
        return c.value;
      }
      c.state = Class::Active;
      TermId term = *c.term;
      std::optional<TermId> v = resolve(term);
      Class& c2 = classes_[r];
      if (!v) {
        c2.state = Class::Failed;
        return std::nullopt;
      }
      c2.state = Class::Done;
      c2.value = *v;
      return v;
    }
    if (auto it = term_memo_.find(raw(t)); it != term_memo_.end()) return it->second;
    auto kids = store_.children(t);
    std::optional<TermId> out;
    if (kids.empty()) {
      out = t;
    } else {
      std::vector<TermId> vals;
      vals.reserve(kids.size());
      bool ok = true;
      for (TermId k : kids) {
        std::optional<TermId> v = resolve(k);
        if (!v) {
          ok = false;
          break;
        }
        vals.push_back(*v);
      }
      if (ok) out = store_.intern(store_.symbol(t), vals);
    }
    // Ground and cycle-free results are position independent; failures are
    // memoized too since a cycle stays a cycle.
    term_memo_.emplace(raw(t), out);
    return out;
  }

  TermStore& store_;
  const SymbolTable& sy_;
  std::vector<Class> classes_;
  std::unordered_map<std::uint32_t, std::uint32_t> index_;
  std::unordered_map<std::uint32_t, std::optional<TermId>> term_memo_;
};

}  // namespace

Conjunction reduce(TermStore& store, std::span<const Equation> eqs) {
  Unifier u(store);
  std::vector<SymbolId> vars;
  for (const auto& [a, b] : eqs) {
    if (a == b) continue;
    for (SymbolId v : term_vars(store, a)) vars.push_back(v);
    for (SymbolId v : term_vars(store, b)) vars.push_back(v);
    if (!u.unify(a, b)) return Conjunction::falsity();
  }
  return u.solve(std::move(vars));
}

namespace {

void add_equations(TermStore& store, const Conjunction& c, std::vector<Equation>& eqs) {
  for (const auto& [v, t] : c.bindings()) eqs.emplace_back(store.leaf(v), t);
}

}  // namespace

Conjunction conj_and(TermStore& store, const Conjunction& a, const Conjunction& b) {
  if (a.is_false() || b.is_false()) return Conjunction::falsity();
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  std::vector<Equation> eqs;
  add_equations(store, a, eqs);
  add_equations(store, b, eqs);
  return reduce(store, eqs);
}

Conjunction conj_and(TermStore& store, std::span<const Conjunction> cs) {
  std::vector<Equation> eqs;
  const Conjunction* only = nullptr;
  std::size_t nontrivial = 0;
  for (const Conjunction& c : cs) {
    if (c.is_false()) return Conjunction::falsity();
    if (c.is_true()) continue;
    only = &c;
    ++nontrivial;
    add_equations(store, c, eqs);
  }
  if (nontrivial == 0) return Conjunction::truth();
  if (nontrivial == 1) return *only;
  return reduce(store, eqs);
}

TermId apply(TermStore& store, TermId t, const Assignment& sigma) {
  if (sigma.empty()) return t;
  std::unordered_map<std::uint32_t, TermId> memo;
  std::function<TermId(TermId)> go = [&](TermId u) -> TermId {
    if (auto it = memo.find(raw(u)); it != memo.end()) return it->second;
    TermId out = u;
    auto kids = store.children(u);
    if (kids.empty()) {
      for (const auto& [v, val] : sigma) {
        if (v == store.symbol(u)) {
          out = val;
          break;
        }
      }
    } else {
      std::vector<TermId> next;
      next.reserve(kids.size());
      bool same = true;
      for (TermId k : kids) {
        next.push_back(go(k));
        same = same && next.back() == k;
      }
      if (!same) out = store.intern(store.symbol(u), next);
    }
    memo.emplace(raw(u), out);
    return out;
  };
  return go(t);
}

Conjunction subst(TermStore& store, const Conjunction& c, const Assignment& sigma) {
  if (c.is_false()) return c;
  if (sigma.empty() || c.is_true()) return c;
  std::vector<Equation> eqs;
  for (const auto& [v, t] : c.bindings()) {
    eqs.emplace_back(apply(store, store.leaf(v), sigma), apply(store, t, sigma));
  }
  return reduce(store, eqs);
}

bool conj_equiv(const Conjunction& a, const Conjunction& b) { return a == b; }

bool conj_implies(TermStore& store, const Conjunction& a, const Conjunction& b) {
  if (a.is_false()) return true;
  return conj_and(store, a, b) == a;
}

bool eval_ground(TermStore& store, const Conjunction& c, const Assignment& sigma) {
  if (c.is_false()) return false;
  auto covered = [&](SymbolId v) {
    return std::any_of(sigma.begin(), sigma.end(), [&](const auto& p) { return p.first == v; });
  };
  for (const auto& [v, t] : c.bindings()) {
    if (!covered(v)) {
      throw std::invalid_argument("variable " + store.symbols().name(v) + " is not assigned");
    }
    for (SymbolId w : term_vars(store, t)) {
      if (!covered(w)) {
        throw std::invalid_argument("variable " + store.symbols().name(w) + " is not assigned");
      }
    }
    if (apply(store, store.leaf(v), sigma) != apply(store, t, sigma)) return false;
  }
  return true;
}

std::string render_conjunction(const TermStore& store, const Conjunction& c) {
  if (c.is_false()) return "false";
  if (c.is_true()) return "true";
  std::string out;
  for (const auto& [v, t] : c.bindings()) {
    if (!out.empty()) out += " & ";
    out += store.symbols().name(v) + " = " + render_term(store, t);
  }
  return out;
}

}  // namespace mtteq
