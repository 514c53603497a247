#include "mtteq/equiv.hpp"

#include <algorithm>
#include <deque>

#include "mtteq/errors.hpp"

namespace mtteq {

EquivEngine::EquivEngine(TermStore& store, const AnnotatedMtt& a, const AnnotatedMtt& b,
                         const Dta& d, EngineOptions options)
    : store_(store), m_{&a, &b}, d_(d), options_(options) {
  if (!d.analyzed()) throw InternalError("the engine needs an analyzed automaton");
  const SymbolTable& sy = store.symbols();
  auto var = [&](const std::string& name) {
    auto id = sy.find(name, SymbolClass::ParamVar);
    if (!id) throw InternalError("variable " + name + " is not registered");
    return *id;
  };
  z_ = var("z");
  for (int side = 0; side < 2; ++side) {
    const Mtt& m = m_[side]->mtt;
    for (std::uint32_t j = 1; j <= m.param_count; ++j) {
      SymbolId v = var("y" + std::to_string(j) + (side ? "'" : ""));
      var_syms_[side].push_back(v);
      vars_[side].push_back(store.leaf(v));
    }
    rules_[side].resize(m.state_count());
    for (const Rule& r : m.rules()) {
      rules_[side][raw(r.state)].emplace(raw(r.input), &r);
      RhsDecomposition dec = rhs_decompose(store, r.rhs);
      decomposed_[&r] = Leafed{dec.pattern, dec.leaves};
    }
    psi_[side].assign(m.state_count(), Conjunction::truth());
  }

  const Mtt& ma = a.mtt;
  for (std::uint32_t q = 0; q < ma.state_count(); ++q) {
    s_.push_back(evaluate_state(ma, store, static_cast<StateId>(q),
                                d.witness(store, a.pi[q]), vars_[0]));
  }

  const std::size_t n = std::max(a.mtt.state_count(), b.mtt.state_count());
  const std::size_t l = std::max(a.mtt.param_count, b.mtt.param_count);
  bound_ = n * n * (2 * l + 1);

  if (options_.full) {
    for (std::uint32_t qa = 0; qa < a.mtt.state_count(); ++qa) {
      for (std::uint32_t qb = 0; qb < b.mtt.state_count(); ++qb) {
        if (a.pi[qa] == b.pi[qb]) key_index(static_cast<StateId>(qa), static_cast<StateId>(qb));
      }
    }
  }
}

std::size_t EquivEngine::key_index(StateId qa, StateId qb) {
  auto [it, inserted] = key_index_.try_emplace({raw(qa), raw(qb)}, keys_.size());
  if (inserted) {
    keys_.emplace_back(qa, qb);
    phi_.push_back(Conjunction::truth());
  }
  return it->second;
}

void EquivEngine::seed(StateId qa, StateId qb) {
  if (round_ >= 0) throw InternalError("seed after the first round");
  if (m_[0]->pi[raw(qa)] != m_[1]->pi[raw(qb)]) {
    throw InternalError("seeded states read different automaton states");
  }
  std::deque<std::pair<StateId, StateId>> work;
  if (key_index_.count({raw(qa), raw(qb)}) == 0) work.emplace_back(qa, qb);
  key_index(qa, qb);
  while (!work.empty()) {
    auto [x, y] = work.front();
    work.pop_front();
    for (const auto& [f, ra] : rules_[0][raw(x)]) {
      auto it = rules_[1][raw(y)].find(f);
      if (it == rules_[1][raw(y)].end()) continue;
      const Leafed& la = decomposed_.at(ra);
      const Leafed& lb = decomposed_.at(it->second);
      if (la.pattern != lb.pattern) continue;
      for (std::size_t i = 0; i < la.leaves.size(); ++i) {
        const RhsNode* u = la.leaves[i];
        const RhsNode* v = lb.leaves[i];
        if (u->is_call() && v->is_call() && u->index == v->index &&
            key_index_.count({raw(u->state), raw(v->state)}) == 0) {
          key_index(u->state, v->state);
          work.emplace_back(u->state, v->state);
        }
      }
    }
  }
}

const Conjunction& EquivEngine::phi(StateId qa, StateId qb) const {
  auto it = key_index_.find({raw(qa), raw(qb)});
  if (it == key_index_.end()) throw InternalError("no Φ entry for this state pair");
  return phi_[it->second];
}

TermId EquivEngine::inst(int side, const RhsNode& n) {
  return instantiate(store_, n, vars_[side]);
}

Assignment EquivEngine::params_to(int side, const RhsNode& call) {
  Assignment sigma;
  for (std::size_t k = 0; k < call.children.size(); ++k) {
    sigma.emplace_back(var_syms_[side][k], inst(side, call.children[k]));
  }
  return sigma;
}

Conjunction EquivEngine::psi_rule(int side, const Rule& r) {
  const RhsNode& rhs = r.rhs;
  if (rhs.is_param()) {
    Equation eq{store_.leaf(z_), vars_[side][rhs.index - 1]};
    return reduce(store_, std::span<const Equation>(&eq, 1));
  }
  if (rhs.is_call()) return subst(store_, psi_[side][raw(rhs.state)], params_to(side, rhs));
  return Conjunction::falsity();
}

Conjunction EquivEngine::phi_entry(StateId qa, StateId qb) {
  std::vector<Conjunction> parts;
  const auto& ra = rules_[0][raw(qa)];
  const auto& rb = rules_[1][raw(qb)];
  for (SymbolId f : d_.symbols_of(m_[0]->pi[raw(qa)])) {
    auto ia = ra.find(raw(f));
    auto ib = rb.find(raw(f));
    if (ia == ra.end() && ib == rb.end()) continue;
    if (ia == ra.end() || ib == rb.end()) return Conjunction::falsity();
    const Leafed& la = decomposed_.at(ia->second);
    const Leafed& lb = decomposed_.at(ib->second);
    if (la.pattern != lb.pattern) return Conjunction::falsity();
    for (std::size_t i = 0; i < la.leaves.size(); ++i) {
      const RhsNode& u = *la.leaves[i];
      const RhsNode& v = *lb.leaves[i];
      if (u.is_param() && v.is_param()) {
        Equation eq{vars_[0][u.index - 1], vars_[1][v.index - 1]};
        parts.push_back(reduce(store_, std::span<const Equation>(&eq, 1)));
      } else if (u.is_param() && v.is_call()) {
        Assignment sigma = params_to(1, v);
        sigma.emplace_back(z_, vars_[0][u.index - 1]);
        parts.push_back(subst(store_, psi_[1][raw(v.state)], sigma));
      } else if (u.is_call() && v.is_param()) {
        Assignment sigma = params_to(0, u);
        sigma.emplace_back(z_, vars_[1][v.index - 1]);
        parts.push_back(subst(store_, psi_[0][raw(u.state)], sigma));
      } else if (u.is_call() && v.is_call() && u.index == v.index) {
        Assignment sigma = params_to(0, u);
        Assignment sb = params_to(1, v);
        sigma.insert(sigma.end(), sb.begin(), sb.end());
        parts.push_back(subst(store_, phi_[key_index_.at({raw(u.state), raw(v.state)})], sigma));
      } else if (u.is_call() && v.is_call()) {
        // Both sides must equal the constant output of u's state on its
        // witness, instantiated with u's arguments.
        Assignment sa = params_to(0, u);
        TermId s = apply(store_, s_[raw(u.state)], sa);
        sa.emplace_back(z_, s);
        Assignment sb = params_to(1, v);
        sb.emplace_back(z_, s);
        parts.push_back(subst(store_, psi_[0][raw(u.state)], sa));
        parts.push_back(subst(store_, psi_[1][raw(v.state)], sb));
      } else {
        throw InternalError("right-hand side leaf is neither a parameter nor a call");
      }
      if (parts.back().is_false()) return Conjunction::falsity();
    }
  }
  return conj_and(store_, parts);
}

bool EquivEngine::step() {
  bool changed = false;
  std::vector<Conjunction> next_psi[2];
  for (int side = 0; side < 2; ++side) {
    const Mtt& m = m_[side]->mtt;
    next_psi[side].resize(m.state_count());
    for (std::uint32_t q = 0; q < m.state_count(); ++q) {
      std::vector<Conjunction> parts;
      for (const auto& [f, r] : rules_[side][q]) {
        parts.push_back(psi_rule(side, *r));
        if (parts.back().is_false()) break;
      }
      next_psi[side][q] = conj_and(store_, parts);
      changed = changed || next_psi[side][q] != psi_[side][q];
    }
  }
  std::vector<Conjunction> next_phi(keys_.size());
  for (std::size_t k = 0; k < keys_.size(); ++k) {
    next_phi[k] = phi_entry(keys_[k].first, keys_[k].second);
    changed = changed || next_phi[k] != phi_[k];
  }
  psi_[0].swap(next_psi[0]);
  psi_[1].swap(next_psi[1]);
  phi_.swap(next_phi);
  ++round_;
  return changed;
}

std::size_t EquivEngine::stabilize() {
  const std::size_t limit = options_.max_rounds ? options_.max_rounds : bound_;
  while (step()) {
    if (static_cast<std::size_t>(round_) > limit) {
      throw InternalError("Φ did not stabilize within " + std::to_string(limit) + " rounds");
    }
  }
  return round_ > 0 ? static_cast<std::size_t>(round_ - 1) : 0;
}

// ---------------------------------------------------------------------------

namespace {

void require_valid(const SymbolTable& sy, const Mtt& m, const Axiom& a, const char* which) {
  ValidationReport r = validate(sy, m, Totality::Partial);
  ValidationReport ra = validate_axiom(sy, m, a);
  r.violations.insert(r.violations.end(), ra.violations.begin(), ra.violations.end());
  if (!r.ok()) {
    throw ValidationError(std::string(which) + " transducer: " + r.violations.front().message);
  }
}

std::vector<TermId> ground_args(TermStore& store, const RhsNode& call) {
  std::vector<TermId> out;
  for (const RhsNode& c : call.children) out.push_back(instantiate(store, c, {}));
  return out;
}

}  // namespace

Decision decide(SymbolTable& symbols, TermStore& store, const Mtt& ma, const Axiom& aa,
                const Mtt& mb, const Axiom& ab, const Dta& d, const DecideOptions& options) {
  symbols.ensure_vars(std::max(ma.param_count, mb.param_count));
  require_valid(symbols, ma, aa, "first");
  require_valid(symbols, mb, ab, "second");
  const Dta dd = dta_analyze(symbols, d);

  Decision out;
  AnnotatedMtt pa = product_annotate(symbols, ma, aa, dd, Totality::Total);
  AnnotatedMtt pb = product_annotate(symbols, mb, ab, dd, Totality::Total);
  out.earliest_a = earliest_transform(store, pa, dd, options.earliest);
  out.earliest_b = earliest_transform(store, pb, dd, options.earliest);
  const AnnotatedMtt& ea = out.earliest_a;
  const AnnotatedMtt& eb = out.earliest_b;

  auto fail = [&](std::string check, std::string reason) {
    out.verdict = Verdict::Inequivalent;
    out.failing_check = std::move(check);
    out.reason = std::move(reason);
    if (options.search_counterexample) {
      OracleResult r = oracle_decide(store, {&ma, &aa}, {&mb, &ab}, &dd,
                                     options.counterexample_budget);
      out.counterexample = r.counterexample;
    }
  };

  RhsDecomposition xa = rhs_decompose(store, ea.axiom.rhs);
  RhsDecomposition xb = rhs_decompose(store, eb.axiom.rhs);
  if (xa.pattern != xb.pattern) {
    fail("axiom-pattern", "axiom prefixes differ: " + render_pattern(store, xa.pattern) + " vs " +
                              render_pattern(store, xb.pattern));
    return out;
  }

  EquivEngine engine(store, ea, eb, dd, options.engine);
  for (std::size_t j = 0; j < xa.leaves.size(); ++j) {
    const RhsNode* u = xa.leaves[j];
    const RhsNode* v = xb.leaves[j];
    if (u->is_call() && v->is_call()) engine.seed(u->state, v->state);
  }
  out.rounds = engine.stabilize();
  out.bound = engine.bound();

  for (const auto& [qa, qb] : engine.phi_keys()) {
    out.phi.push_back({ea.mtt.state_name(qa), eb.mtt.state_name(qb),
                       render_conjunction(store, engine.phi(qa, qb))});
  }
  for (std::uint32_t q = 0; q < ea.mtt.state_count(); ++q) {
    out.psi_a.push_back({ea.mtt.state_name(static_cast<StateId>(q)), "",
                         render_conjunction(store, engine.psi_a(static_cast<StateId>(q)))});
  }
  for (std::uint32_t q = 0; q < eb.mtt.state_count(); ++q) {
    out.psi_b.push_back({eb.mtt.state_name(static_cast<StateId>(q)), "",
                         render_conjunction(store, engine.psi_b(static_cast<StateId>(q)))});
  }

  const SymbolId z = *symbols.find("z", SymbolClass::ParamVar);
  for (std::size_t j = 0; j < xa.leaves.size(); ++j) {
    const RhsNode* u = xa.leaves[j];
    const RhsNode* v = xb.leaves[j];
    bool holds = false;
    std::string what;
    if (u->is_call() && v->is_call()) {
      Assignment sigma;
      std::vector<TermId> ta = ground_args(store, *u);
      std::vector<TermId> tb = ground_args(store, *v);
      for (std::uint32_t k = 0; k < ta.size(); ++k) sigma.emplace_back(symbols.var_y(k + 1), ta[k]);
      for (std::uint32_t k = 0; k < tb.size(); ++k) {
        sigma.emplace_back(symbols.var_y(k + 1, true), tb[k]);
      }
      holds = eval_ground(store, engine.phi(u->state, v->state), sigma);
      what = ea.mtt.state_name(u->state) + " / " + eb.mtt.state_name(v->state);
    } else {
      // A ground leaf on one side (the other cannot be a parameter in an axiom).
      const RhsNode* call = u->is_call() ? u : v;
      const RhsNode* value = u->is_call() ? v : u;
      TermId s = instantiate(store, *value, {});
      if (!call->is_call()) {
        holds = s == instantiate(store, *call, {});
      } else {
        const bool side_a = call == u;
        Assignment sigma{{z, s}};
        std::vector<TermId> t = ground_args(store, *call);
        for (std::uint32_t k = 0; k < t.size(); ++k) {
          sigma.emplace_back(symbols.var_y(k + 1, !side_a), t[k]);
        }
        holds = eval_ground(store,
                            side_a ? engine.psi_a(call->state) : engine.psi_b(call->state), sigma);
      }
      what = "constant axiom leaf " + std::to_string(j + 1);
    }
    if (!holds) {
      fail("axiom-call", "axiom call " + std::to_string(j + 1) + " (" + what +
                             ") parameters violate the equivalence condition");
      return out;
    }
  }
  return out;
}

}  // namespace mtteq
