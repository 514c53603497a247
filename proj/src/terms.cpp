#include "mtteq/terms.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <unordered_map>

#include "mtteq/errors.hpp"

namespace mtteq {

// ---------------------------------------------------------------------------
// SymbolTable

SymbolTable::SymbolTable() { top_ = intern("⊤", 0, SymbolClass::Top); }

SymbolId SymbolTable::intern(std::string_view name, std::uint32_t rank, SymbolClass cls) {
  auto key = std::make_pair(cls, std::string(name));
  if (auto it = by_name_.find(key); it != by_name_.end()) {
    if (infos_[raw(it->second)].rank != rank) {
      throw ArityError("symbol '" + std::string(name) + "' already declared with rank " +
                       std::to_string(infos_[raw(it->second)].rank) + ", not " +
                       std::to_string(rank));
    }
    return it->second;
  }
  auto id = static_cast<SymbolId>(infos_.size());
  infos_.push_back(SymbolInfo{std::string(name), rank, cls, 0, false});
  by_name_.emplace(std::move(key), id);
  return id;
}

std::optional<SymbolId> SymbolTable::find(std::string_view name, SymbolClass cls) const {
  auto it = by_name_.find(std::make_pair(cls, std::string(name)));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

SymbolId SymbolTable::var_z() {
  SymbolId s = intern("z", 0, SymbolClass::ParamVar);
  infos_[raw(s)].index = 0;
  return s;
}

SymbolId SymbolTable::var_y(std::uint32_t j, bool primed) {
  std::string name = "y" + std::to_string(j) + (primed ? "'" : "");
  SymbolId s = intern(name, 0, SymbolClass::ParamVar);
  infos_[raw(s)].index = j;
  infos_[raw(s)].primed = primed;
  return s;
}

void SymbolTable::ensure_vars(std::uint32_t l) {
  var_z();
  for (std::uint32_t j = 1; j <= l; ++j) {
    var_y(j, false);
    var_y(j, true);
  }
}

std::uint64_t SymbolTable::var_order(SymbolId s) const {
  const SymbolInfo& i = info(s);
  return (i.primed ? (std::uint64_t{1} << 32) : 0) + i.index;
}

// ---------------------------------------------------------------------------
// TermStore

TermStore::TermStore(const SymbolTable& symbols) : symbols_(&symbols) { slots_.assign(1024, 0); }

std::uint64_t TermStore::hash_of(SymbolId symbol, std::span<const TermId> children) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ (raw(symbol) * 0xff51afd7ed558ccdULL);
  for (TermId c : children) {
    h ^= raw(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xc4ceb9fe1a85ec53ULL;
  }
  return h ^ (h >> 29);
}

bool TermStore::equal(const Node& n, SymbolId symbol, std::span<const TermId> children) const {
  if (n.symbol != symbol || n.arity != children.size()) return false;
  return std::equal(children.begin(), children.end(), children_.begin() + n.first_child);
}

void TermStore::grow() {
  std::vector<std::uint32_t> next(slots_.size() * 2, 0);
  const std::size_t mask = next.size() - 1;
  for (std::uint32_t id = 0; id < nodes_.size(); ++id) {
    std::size_t pos = nodes_[id].hash & mask;
    while (next[pos] != 0) pos = (pos + 1) & mask;
    next[pos] = id + 1;
  }
  slots_.swap(next);
}

TermId TermStore::intern(SymbolId symbol, std::span<const TermId> children) {
  if (symbols_->rank(symbol) != children.size()) {
    throw ArityError("symbol '" + symbols_->name(symbol) + "' has rank " +
                     std::to_string(symbols_->rank(symbol)) + " but got " +
                     std::to_string(children.size()) + " children");
  }
  const std::uint64_t h = hash_of(symbol, children);
  const std::size_t mask = slots_.size() - 1;
  std::size_t pos = h & mask;
  while (slots_[pos] != 0) {
    const Node& n = nodes_[slots_[pos] - 1];
    if (n.hash == h && equal(n, symbol, children)) return static_cast<TermId>(slots_[pos] - 1);
    pos = (pos + 1) & mask;
  }
  std::uint32_t height = 0;
  for (TermId c : children) height = std::max(height, nodes_[raw(c)].height);
  auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(Node{symbol, static_cast<std::uint32_t>(children_.size()),
                        static_cast<std::uint32_t>(children.size()), height + 1, h});
  // children may alias children_ (e.g. a span from this->children()).
  std::vector<TermId> copy(children.begin(), children.end());
  children_.insert(children_.end(), copy.begin(), copy.end());
  slots_[pos] = id + 1;
  if (nodes_.size() * 2 > slots_.size()) grow();
  return static_cast<TermId>(id);
}

std::uint64_t TermStore::tree_size(TermId t) const {
  std::unordered_map<std::uint32_t, std::uint64_t> memo;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::function<std::uint64_t(TermId)> go = [&](TermId u) -> std::uint64_t {
    if (auto it = memo.find(raw(u)); it != memo.end()) return it->second;
    std::uint64_t s = 1;
    for (TermId c : children(u)) {
      std::uint64_t cs = go(c);
      s = (kMax - s < cs) ? kMax : s + cs;
    }
    memo.emplace(raw(u), s);
    return s;
  };
  return go(t);
}

TermId TermStore::import(const TermStore& other, TermId t, std::vector<TermId>& memo) {
  constexpr auto kUnset = static_cast<TermId>(std::numeric_limits<std::uint32_t>::max());
  if (memo.size() < other.size()) memo.resize(other.size(), kUnset);
  if (memo[raw(t)] != kUnset) return memo[raw(t)];
  std::vector<TermId> kids;
  kids.reserve(other.children(t).size());
  for (TermId c : other.children(t)) kids.push_back(import(other, c, memo));
  TermId r = intern(other.symbol(t), kids);
  memo[raw(t)] = r;
  return r;
}

// ---------------------------------------------------------------------------
// Rendering

bool is_plain_name(std::string_view name) {
  if (name.empty()) return false;
  for (unsigned char c : name) {
    if (std::isalnum(c) || c >= 0x80) continue;
    switch (c) {
      case '_': case '\'': case '+': case '*': case '.': case '@':
      case '^': case '~': case '!': case '?': case '$': case '%': case '[': case ']':
        continue;
      default:
        return false;
    }
  }
  return true;
}

std::string render_name(std::string_view name) {
  if (is_plain_name(name)) return std::string(name);
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string render_term(const TermStore& store, TermId t) {
  std::string out;
  std::function<void(TermId)> go = [&](TermId u) {
    out += render_name(store.symbols().name(store.symbol(u)));
    auto kids = store.children(u);
    if (kids.empty()) return;
    out += '(';
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) out += ',';
      go(kids[i]);
    }
    out += ')';
  };
  go(t);
  return out;
}

std::string render_pattern(const TermStore& store, const Pattern& p) {
  return p.is_bottom() ? "⊥" : render_term(store, p.term());
}

std::string dewey_string(const DeweyPath& path) {
  if (path.empty()) return "ε";
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(path[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Patterns

Pattern top_pattern(TermStore& store) { return Pattern(store.leaf(store.symbols().top())); }

bool is_top(const TermStore& store, TermId t) {
  return store.symbol(t) == store.symbols().top();
}

namespace {

bool term_leq(const TermStore& store, TermId p, TermId q) {
  if (p == q || is_top(store, q)) return true;
  if (is_top(store, p) || store.symbol(p) != store.symbol(q)) return false;
  auto pk = store.children(p);
  auto qk = store.children(q);
  for (std::size_t i = 0; i < pk.size(); ++i) {
    if (!term_leq(store, pk[i], qk[i])) return false;
  }
  return true;
}

TermId term_join(TermStore& store, TermId p, TermId q) {
  if (p == q) return p;
  if (is_top(store, p) || is_top(store, q) || store.symbol(p) != store.symbol(q)) {
    return store.leaf(store.symbols().top());
  }
  std::vector<TermId> kids;
  const std::size_t n = store.children(p).size();
  kids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    kids.push_back(term_join(store, store.child(p, i), store.child(q, i)));
  }
  return store.intern(store.symbol(p), kids);
}

}  // namespace

bool pattern_leq(const TermStore& store, const Pattern& p, const Pattern& q) {
  if (p.is_bottom()) return true;
  if (q.is_bottom()) return false;
  return term_leq(store, p.term(), q.term());
}

Pattern pattern_join(TermStore& store, const Pattern& p, const Pattern& q) {
  if (p.is_bottom()) return q;
  if (q.is_bottom()) return p;
  return Pattern(term_join(store, p.term(), q.term()));
}

std::size_t count_tops(const TermStore& store, TermId p) {
  if (is_top(store, p)) return 1;
  std::size_t n = 0;
  for (TermId c : store.children(p)) n += count_tops(store, c);
  return n;
}

std::vector<DeweyPath> top_positions(const TermStore& store, TermId p) {
  std::vector<DeweyPath> out;
  DeweyPath cur;
  std::function<void(TermId)> go = [&](TermId u) {
    if (is_top(store, u)) {
      out.push_back(cur);
      return;
    }
    auto kids = store.children(u);
    for (std::uint32_t i = 0; i < kids.size(); ++i) {
      cur.push_back(i + 1);
      go(kids[i]);
      cur.pop_back();
    }
  };
  go(p);
  return out;
}

TermId fill_pattern(TermStore& store, TermId p, std::span<const TermId> fills) {
  std::size_t next = 0;
  std::function<TermId(TermId)> go = [&](TermId u) -> TermId {
    if (is_top(store, u)) {
      if (next >= fills.size()) throw ArityError("pattern has more ⊤ holes than fills");
      return fills[next++];
    }
    auto kids = store.children(u);
    if (kids.empty()) return u;
    std::vector<TermId> out;
    out.reserve(kids.size());
    for (TermId c : kids) out.push_back(go(c));
    return store.intern(store.symbol(u), out);
  };
  TermId r = go(p);
  if (next != fills.size()) throw ArityError("pattern has fewer ⊤ holes than fills");
  return r;
}

Pattern pattern_substitute(TermStore& store, const Pattern& p, std::span<const Pattern> fills) {
  if (p.is_bottom()) throw ArityError("cannot substitute into Bottom");
  std::vector<TermId> terms;
  terms.reserve(fills.size());
  bool any_bottom = false;
  for (const Pattern& f : fills) {
    if (f.is_bottom()) {
      any_bottom = true;
      terms.push_back(store.leaf(store.symbols().top()));
    } else {
      terms.push_back(f.term());
    }
  }
  if (count_tops(store, p.term()) != fills.size()) {
    throw ArityError("pattern has " + std::to_string(count_tops(store, p.term())) +
                     " ⊤ holes but " + std::to_string(fills.size()) + " fills were given");
  }
  if (any_bottom) return Pattern::bottom();
  return Pattern(fill_pattern(store, p.term(), terms));
}

PrefixDecomposition prefix_decompose(TermStore& store, TermId t) {
  PrefixDecomposition out;
  const SymbolTable& sy = store.symbols();
  std::function<TermId(TermId)> go = [&](TermId u) -> TermId {
    if (sy.cls(store.symbol(u)) != SymbolClass::DeltaOut) {
      out.residuals.push_back(u);
      return store.leaf(sy.top());
    }
    auto kids = store.children(u);
    if (kids.empty()) return u;
    std::vector<TermId> ps;
    ps.reserve(kids.size());
    for (TermId c : kids) ps.push_back(go(c));
    return store.intern(store.symbol(u), ps);
  };
  out.prefix = Pattern(go(t));
  return out;
}

}  // namespace mtteq
