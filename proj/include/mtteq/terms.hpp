#pragma once

// Ranked alphabets, hash-consed trees and the pattern lattice.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mtteq {

enum class SymbolId : std::uint32_t {};
enum class TermId : std::uint32_t {};

inline std::uint32_t raw(SymbolId s) { return static_cast<std::uint32_t>(s); }
inline std::uint32_t raw(TermId t) { return static_cast<std::uint32_t>(t); }

/// Which alphabet a symbol belongs to. Names are unique within a class only, so
/// the digit `0` may exist both as an input and as an output symbol.
enum class SymbolClass : std::uint8_t {
  SigmaInput,  // input alphabet
  DeltaOut,    // output symbols produced outside parameter positions
  DeltaIn,     // output symbols produced inside parameter positions
  ParamVar,    // z, y_j, y'_j: Herbrand variables and parameter placeholders
  Top,         // the pattern hole
};

struct SymbolInfo {
  std::string name;
  std::uint32_t rank = 0;
  SymbolClass cls = SymbolClass::SigmaInput;
  // ParamVar only: 0 for z, j for y_j / y'_j.
  std::uint32_t index = 0;
  bool primed = false;
};

/// Append-only symbol registry shared by every store and transducer of a run.
class SymbolTable {
 public:
  SymbolTable();

  /// Returns the existing symbol with this name and class, or registers it.
  /// Throws ArityError if the name is already registered with another rank.
  SymbolId intern(std::string_view name, std::uint32_t rank, SymbolClass cls);
  std::optional<SymbolId> find(std::string_view name, SymbolClass cls) const;

  const SymbolInfo& info(SymbolId s) const { return infos_[raw(s)]; }
  const std::string& name(SymbolId s) const { return info(s).name; }
  std::uint32_t rank(SymbolId s) const { return info(s).rank; }
  SymbolClass cls(SymbolId s) const { return info(s).cls; }
  std::size_t size() const { return infos_.size(); }

  SymbolId top() const { return top_; }
  SymbolId var_z();
  /// y_j (1-based), or y'_j when primed.
  SymbolId var_y(std::uint32_t j, bool primed = false);
  bool is_var(SymbolId s) const { return cls(s) == SymbolClass::ParamVar; }
  /// Registers z, y1..yl and y1'..yl' so that const users can find them.
  void ensure_vars(std::uint32_t l);
  /// Total order z < y1 < ... < yl < y1' < ... < yl'.
  std::uint64_t var_order(SymbolId s) const;

 private:
  std::vector<SymbolInfo> infos_;
  std::map<std::pair<SymbolClass, std::string>, SymbolId, std::less<>> by_name_;
  SymbolId top_{};
};

/// Hash-consed tree nodes. Two terms get the same TermId iff they are
/// structurally identical, so isomorphic subtrees are stored once.
/// Append-only: handles stay valid for the lifetime of the store.
class TermStore {
 public:
  explicit TermStore(const SymbolTable& symbols);

  /// Throws ArityError if children.size() differs from the symbol's rank.
  TermId intern(SymbolId symbol, std::span<const TermId> children);
  TermId intern(SymbolId symbol, std::initializer_list<TermId> children) {
    return intern(symbol, std::span<const TermId>(children.begin(), children.size()));
  }
  TermId leaf(SymbolId symbol) { return intern(symbol, std::span<const TermId>{}); }

  SymbolId symbol(TermId t) const { return nodes_[raw(t)].symbol; }
  std::span<const TermId> children(TermId t) const {
    const Node& n = nodes_[raw(t)];
    return {children_.data() + n.first_child, n.arity};
  }
  TermId child(TermId t, std::size_t i) const { return children(t)[i]; }
  /// Height in nodes: a leaf has height 1.
  std::uint32_t height(TermId t) const { return nodes_[raw(t)].height; }
  /// Size of the tree unfolded (saturating at UINT64_MAX).
  std::uint64_t tree_size(TermId t) const;

  std::size_t size() const { return nodes_.size(); }
  const SymbolTable& symbols() const { return *symbols_; }

  /// Recursively copies a term from another store that uses the same symbol table.
  TermId import(const TermStore& other, TermId t, std::vector<TermId>& memo);

 private:
  struct Node {
    SymbolId symbol;
    std::uint32_t first_child;
    std::uint32_t arity;
    std::uint32_t height;
    std::uint64_t hash;
  };

  std::uint64_t hash_of(SymbolId symbol, std::span<const TermId> children) const;
  bool equal(const Node& n, SymbolId symbol, std::span<const TermId> children) const;
  void grow();

  const SymbolTable* symbols_;
  std::vector<Node> nodes_;
  std::vector<TermId> children_;
  std::vector<std::uint32_t> slots_;  // open addressing; 0 = empty, else id + 1
};

/// Dewey position: 1-based child indices from the root.
using DeweyPath = std::vector<std::uint32_t>;
std::string dewey_string(const DeweyPath& path);

/// Element of the pattern lattice: Bottom or a tree over output symbols and ⊤.
class Pattern {
 public:
  Pattern() = default;  // Bottom
  explicit Pattern(TermId t) : term_(t) {}
  static Pattern bottom() { return Pattern(); }

  bool is_bottom() const { return !term_.has_value(); }
  TermId term() const { return *term_; }

  friend bool operator==(const Pattern&, const Pattern&) = default;

 private:
  std::optional<TermId> term_;
};

Pattern top_pattern(TermStore& store);
bool is_top(const TermStore& store, TermId t);

bool pattern_leq(const TermStore& store, const Pattern& p, const Pattern& q);
Pattern pattern_join(TermStore& store, const Pattern& p, const Pattern& q);
/// Replaces the i-th ⊤ (left-to-right preorder) by fills[i]. Any Bottom fill
/// yields Bottom. Throws ArityError on a count mismatch or a Bottom pattern.
Pattern pattern_substitute(TermStore& store, const Pattern& p, std::span<const Pattern> fills);
std::size_t count_tops(const TermStore& store, TermId p);
std::vector<DeweyPath> top_positions(const TermStore& store, TermId p);

struct PrefixDecomposition {
  Pattern prefix;
  std::vector<TermId> residuals;
};

/// Splits t into its maximal DeltaOut top part and the subtrees hanging below it.
PrefixDecomposition prefix_decompose(TermStore& store, TermId t);
/// Fills the ⊤ holes of p with arbitrary terms (inverse of prefix_decompose).
TermId fill_pattern(TermStore& store, TermId p, std::span<const TermId> fills);

/// Prints `f(a,g(b))`; names that are not plain identifiers are quoted.
std::string render_term(const TermStore& store, TermId t);
std::string render_pattern(const TermStore& store, const Pattern& p);
/// Quotes a name if it contains characters outside the identifier set.
std::string render_name(std::string_view name);
bool is_plain_name(std::string_view name);

}  // namespace mtteq
