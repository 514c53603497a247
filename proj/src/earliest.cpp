#include "mtteq/earliest.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "mtteq/errors.hpp"

namespace mtteq {

namespace {

// Callee-first order of the call graph, so most callees are final before
// their callers are revisited.
std::vector<StateId> callee_first_order(const Mtt& m) {
  std::vector<std::vector<StateId>> callees(m.state_count());
  std::function<void(std::uint32_t, const RhsNode&)> collect = [&](std::uint32_t q,
                                                                   const RhsNode& n) {
    if (n.is_call()) callees[q].push_back(n.state);
    for (const RhsNode& c : n.children) collect(q, c);
  };
  for (const Rule& r : m.rules()) collect(raw(r.state), r.rhs);

  std::vector<StateId> order;
  std::vector<char> seen(m.state_count(), 0);
  std::function<void(std::uint32_t)> visit = [&](std::uint32_t q) {
    seen[q] = 1;
    for (StateId c : callees[q]) {
      if (!seen[raw(c)]) visit(raw(c));
    }
    order.push_back(static_cast<StateId>(q));
  };
  for (std::uint32_t q = 0; q < m.state_count(); ++q) {
    if (!seen[q]) visit(q);
  }
  return order;
}

}  // namespace

PrefixTable compute_prefixes(TermStore& store, const Mtt& m, const StateMap& pi, const Dta& d) {
  const SymbolTable& sy = store.symbols();
  PrefixTable table;
  table.prefix.resize(m.state_count());

  std::vector<TermId> formal;
  {
    // var_y needs a mutable table; the ids are stable once created, so look
    // them up here.
    for (std::uint32_t j = 1; j <= m.param_count; ++j) {
      auto id = sy.find("y" + std::to_string(j), SymbolClass::ParamVar);
      if (!id) throw InternalError("parameter variable y" + std::to_string(j) + " not registered");
      formal.push_back(store.leaf(*id));
    }
  }

  Evaluator ev(m, store);
  for (std::uint32_t q = 0; q < m.state_count(); ++q) {
    const auto s = static_cast<StateId>(q);
    try {
      TermId out = ev.state(s, d.witness(store, pi[q]), formal);
      table.init_tree_size = std::max(table.init_tree_size, store.tree_size(out));
      table.prefix[q] = prefix_decompose(store, out).prefix;
    } catch (const DomainError&) {
      table.prefix[q] = Pattern::bottom();
    }
  }

  std::vector<std::vector<const Rule*>> by_state(m.state_count());
  for (const Rule& r : m.rules()) by_state[raw(r.state)].push_back(&r);
  std::vector<RhsDecomposition> decomposed;
  std::map<const Rule*, std::size_t> index;
  for (const Rule& r : m.rules()) {
    index[&r] = decomposed.size();
    decomposed.push_back(rhs_decompose(store, r.rhs));
  }

  const std::vector<StateId> order = callee_first_order(m);
  const Pattern top = top_pattern(store);
  for (bool changed = true; changed;) {
    changed = false;
    ++table.passes;
    for (StateId q : order) {
      Pattern y = table.prefix[raw(q)];
      for (const Rule* r : by_state[raw(q)]) {
        const RhsDecomposition& dec = decomposed[index[r]];
        std::vector<Pattern> z;
        z.reserve(dec.leaves.size());
        for (const RhsNode* leaf : dec.leaves) {
          z.push_back(leaf->is_call() ? table.prefix[raw(leaf->state)] : top);
        }
        y = pattern_join(store, y, pattern_substitute(store, dec.pattern, z));
      }
      if (y != table.prefix[raw(q)]) {
        table.prefix[raw(q)] = y;
        changed = true;
      }
    }
  }
  return table;
}

RhsNode pattern_to_rhs(const TermStore& store, TermId p, std::vector<RhsNode> fills) {
  std::size_t next = 0;
  std::function<RhsNode(TermId)> go = [&](TermId u) -> RhsNode {
    if (is_top(store, u)) {
      if (next >= fills.size()) throw ArityError("pattern has more ⊤ holes than fills");
      return std::move(fills[next++]);
    }
    std::vector<RhsNode> kids;
    for (TermId c : store.children(u)) kids.push_back(go(c));
    return RhsNode::make_symbol(store.symbol(u), std::move(kids));
  };
  RhsNode out = go(p);
  if (next != fills.size()) throw ArityError("pattern has fewer ⊤ holes than fills");
  return out;
}

namespace {

class EarliestBuilder {
 public:
  EarliestBuilder(TermStore& store, const Mtt& m, const StateMap& pi, const PrefixTable& pt)
      : store_(store), m_(m), pi_(pi), pt_(pt) {
    out_.mtt.param_count = m.param_count;
    out_.mtt.sigma = m.sigma;
    out_.mtt.delta_out = m.delta_out;
    out_.mtt.delta_in = m.delta_in;
    positions_.resize(m.state_count());
    for (std::uint32_t q = 0; q < m.state_count(); ++q) {
      const Pattern& p = pt.prefix[q];
      if (p.is_bottom()) {
        throw ValidationError("state " + m.state_name(static_cast<StateId>(q)) +
                              " has an empty domain; earliest form needs a total transducer");
      }
      positions_[q] = top_positions(store, p.term());
    }
  }

  AnnotatedMtt run(const Axiom& a) {
    out_.axiom.loc = a.loc;
    out_.axiom.rhs = expand(a.rhs);
    while (!work_.empty()) {
      auto [q, v] = work_.front();
      work_.pop_front();
      emit_rules(q, v);
    }
    return std::move(out_);
  }

 private:
  StateId new_state(StateId q, std::size_t v) {
    auto key = std::make_pair(raw(q), v);
    if (auto it = states_.find(key); it != states_.end()) return it->second;
    StateId id =
        out_.mtt.add_state(m_.state_name(q) + "@" + dewey_string(positions_[raw(q)][v]));
    states_.emplace(key, id);
    out_.pi.push_back(pi_[raw(q)]);
    work_.emplace_back(q, v);
    return id;
  }

  // Replaces each call q_i(x_j, T) by pref_o(q_i)[<q_i,v>(x_j, T), ...].
  RhsNode expand(const RhsNode& n) {
    if (n.is_call()) {
      const auto& pos = positions_[raw(n.state)];
      std::vector<RhsNode> fills;
      fills.reserve(pos.size());
      for (std::size_t v = 0; v < pos.size(); ++v) {
        fills.push_back(RhsNode::make_call(new_state(n.state, v), n.index, n.children));
      }
      return pattern_to_rhs(store_, pt_.prefix[raw(n.state)].term(), std::move(fills));
    }
    RhsNode r = n;
    for (std::size_t i = 0; i < n.children.size(); ++i) r.children[i] = expand(n.children[i]);
    return r;
  }

  // Splits an expanded right-hand side along pref_o(q), returning the
  // subtrees at its ⊤ positions.
  void split(TermId p, const RhsNode& n, std::vector<RhsNode>& out, const Rule& r) {
    if (is_top(store_, p)) {
      out.push_back(n);
      return;
    }
    if (!n.is_symbol() || n.symbol != store_.symbol(p)) {
      throw InternalError("right-hand side of " + m_.state_name(r.state) + "(" +
                          store_.symbols().name(r.input) + ") does not extend the state prefix");
    }
    auto kids = store_.children(p);
    for (std::size_t i = 0; i < kids.size(); ++i) split(kids[i], n.children[i], out, r);
  }

  void emit_rules(StateId q, std::size_t v) {
    const StateId self = states_.at({raw(q), v});
    for (const Rule& r : m_.rules()) {
      if (r.state != q) continue;
      auto it = split_cache_.find(&r);
      if (it == split_cache_.end()) {
        std::vector<RhsNode> parts;
        split(pt_.prefix[raw(q)].term(), expand(r.rhs), parts, r);
        it = split_cache_.emplace(&r, std::move(parts)).first;
      }
      Rule nr;
      nr.state = self;
      nr.input = r.input;
      nr.lhs_params = r.lhs_params;
      nr.loc = r.loc;
      nr.rhs = it->second[v];
      out_.mtt.add_rule(std::move(nr));
    }
  }

  TermStore& store_;
  const Mtt& m_;
  const StateMap& pi_;
  const PrefixTable& pt_;
  AnnotatedMtt out_;
  std::vector<std::vector<DeweyPath>> positions_;
  std::map<std::pair<std::uint32_t, std::size_t>, StateId> states_;
  std::deque<std::pair<StateId, std::size_t>> work_;
  std::map<const Rule*, std::vector<RhsNode>> split_cache_;
};

// For each state, the parameter index it always returns, if any. Greatest
// fixpoint: a state keeps candidate j while each of its rules is y_j or a call
// that forwards y_j into a position its callee may return.
std::vector<std::uint32_t> projection_index(const Mtt& m) {
  const std::uint32_t l = m.param_count;
  std::vector<std::vector<char>> cand(m.state_count(), std::vector<char>(l + 1, 1));
  std::vector<std::vector<const Rule*>> by_state(m.state_count());
  for (const Rule& r : m.rules()) by_state[raw(r.state)].push_back(&r);
  for (std::uint32_t q = 0; q < m.state_count(); ++q) {
    if (by_state[q].empty()) std::fill(cand[q].begin(), cand[q].end(), 0);
    cand[q][0] = 0;
  }
  auto returns = [&](const RhsNode& n, std::uint32_t j) {
    if (n.is_param()) return n.index == j;
    if (!n.is_call()) return false;
    for (std::uint32_t k = 1; k <= l; ++k) {
      const RhsNode& arg = n.children[k - 1];
      if (cand[raw(n.state)][k] && arg.is_param() && arg.index == j) return true;
    }
    return false;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::uint32_t q = 0; q < m.state_count(); ++q) {
      for (std::uint32_t j = 1; j <= l; ++j) {
        if (!cand[q][j]) continue;
        for (const Rule* r : by_state[q]) {
          if (!returns(r->rhs, j)) {
            cand[q][j] = 0;
            changed = true;
            break;
          }
        }
      }
    }
  }
  std::vector<std::uint32_t> out(m.state_count(), 0);
  for (std::uint32_t q = 0; q < m.state_count(); ++q) {
    for (std::uint32_t j = 1; j <= l; ++j) {
      if (cand[q][j]) {
        out[q] = j;
        break;
      }
    }
  }
  return out;
}

// Only calls whose selected argument is a parameter are replaced, so that no
// ΔI term ends up at an output position.
RhsNode inline_calls(const RhsNode& n, const std::vector<std::uint32_t>& proj) {
  RhsNode r = n;
  for (std::size_t i = 0; i < n.children.size(); ++i) r.children[i] = inline_calls(n.children[i], proj);
  if (r.is_call() && proj[raw(r.state)] != 0 && r.children[proj[raw(r.state)] - 1].is_param()) {
    return r.children[proj[raw(r.state)] - 1];
  }
  return r;
}

// Inlines projection states and drops states no longer reachable from the axiom.
AnnotatedMtt inline_projections(const AnnotatedMtt& in) {
  const std::vector<std::uint32_t> proj = projection_index(in.mtt);
  if (std::all_of(proj.begin(), proj.end(), [](std::uint32_t j) { return j == 0; })) return in;

  AnnotatedMtt out;
  out.mtt.param_count = in.mtt.param_count;
  out.mtt.sigma = in.mtt.sigma;
  out.mtt.delta_out = in.mtt.delta_out;
  out.mtt.delta_in = in.mtt.delta_in;

  std::map<std::uint32_t, StateId> renamed;
  std::deque<StateId> work;
  std::function<RhsNode(const RhsNode&)> relink = [&](const RhsNode& n) -> RhsNode {
    RhsNode r = n;
    if (n.is_call()) {
      auto it = renamed.find(raw(n.state));
      if (it == renamed.end()) {
        it = renamed.emplace(raw(n.state), out.mtt.add_state(in.mtt.state_name(n.state))).first;
        out.pi.push_back(in.pi[raw(n.state)]);
        work.push_back(n.state);
      }
      r.state = it->second;
    }
    for (std::size_t i = 0; i < n.children.size(); ++i) r.children[i] = relink(n.children[i]);
    return r;
  };

  out.axiom.loc = in.axiom.loc;
  out.axiom.rhs = relink(inline_calls(in.axiom.rhs, proj));
  while (!work.empty()) {
    StateId q = work.front();
    work.pop_front();
    for (const Rule& r : in.mtt.rules()) {
      if (r.state != q) continue;
      Rule nr = r;
      nr.rhs = relink(inline_calls(r.rhs, proj));
      nr.state = renamed.at(raw(q));
      out.mtt.add_rule(std::move(nr));
    }
  }
  return out;
}

}  // namespace

AnnotatedMtt earliest_transform(TermStore& store, const Mtt& m, const Axiom& a, const StateMap& pi,
                                const Dta& d, const PrefixTable& prefixes,
                                const EarliestOptions& options) {
  EarliestBuilder builder(store, m, pi, prefixes);
  AnnotatedMtt out = builder.run(a);
  if (options.inline_projections) out = inline_projections(out);
  if (options.verify) {
    PrefixTable check = compute_prefixes(store, out.mtt, out.pi, d);
    for (std::uint32_t q = 0; q < out.mtt.state_count(); ++q) {
      const Pattern& p = check.prefix[q];
      if (p.is_bottom() || !is_top(store, p.term())) {
        throw InternalError("state " + out.mtt.state_name(static_cast<StateId>(q)) +
                            " of the earliest form still has prefix " + render_pattern(store, p));
      }
    }
  }
  return out;
}

AnnotatedMtt earliest_transform(TermStore& store, const AnnotatedMtt& m, const Dta& d,
                                const EarliestOptions& options) {
  PrefixTable pt = compute_prefixes(store, m.mtt, m.pi, d);
  return earliest_transform(store, m.mtt, m.axiom, m.pi, d, pt, options);
}

}  // namespace mtteq
