#include "mtteq/spec_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mtteq/errors.hpp"

namespace mtteq {

namespace {

struct Token {
  enum Kind { Name, Quoted, Punct, Newline, End };
  Kind kind = End;
  std::string text;
  int line = 1;
  int col = 1;

  bool is(std::string_view p) const { return kind == Punct && text == p; }
  bool is_word(std::string_view w) const { return kind == Name && text == w; }
  bool is_name() const { return kind == Name || kind == Quoted; }
};

bool name_char(unsigned char c) {
  if (std::isalnum(c) || c >= 0x80) return true;
  switch (c) {
    case '_': case '\'': case '+': case '*': case '.': case '@':
    case '^': case '~': case '!': case '?': case '$': case '%': case '[': case ']':
      return true;
    default:
      return false;
  }
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  int depth = 0;  // parentheses; newlines inside them are not separators
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const unsigned char c = text[i];
    Token t;
    t.line = line;
    t.col = col;
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (c == '\n') {
      if (depth == 0) {
        t.kind = Token::Newline;
        out.push_back(t);
      }
      advance(1);
      continue;
    }
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    if (c == '"') {
      advance(1);
      t.kind = Token::Quoted;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\n') throw ParseError("unterminated quoted name", t.line, t.col);
        if (text[i] == '\\' && i + 1 < text.size()) advance(1);
        t.text += text[i];
        advance(1);
      }
      if (i >= text.size()) throw ParseError("unterminated quoted name", t.line, t.col);
      advance(1);
      if (t.text.empty()) throw ParseError("empty quoted name", t.line, t.col);
      out.push_back(t);
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      t.kind = Token::Punct;
      t.text = "->";
      advance(2);
      out.push_back(t);
      continue;
    }
    if (std::string_view("(){},;=/:<>|").find(static_cast<char>(c)) != std::string_view::npos) {
      t.kind = Token::Punct;
      t.text = std::string(1, static_cast<char>(c));
      if (c == '(') ++depth;
      if (c == ')' && depth > 0) --depth;
      advance(1);
      out.push_back(t);
      continue;
    }
    if (name_char(c)) {
      t.kind = Token::Name;
      while (i < text.size() && name_char(static_cast<unsigned char>(text[i]))) {
        t.text += text[i];
        advance(1);
      }
      out.push_back(t);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", line, col);
  }
  Token end;
  end.kind = Token::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// Index of x<i> / y<j> written without quotes, or 0.
std::uint32_t var_index(const Token& t, char prefix) {
  if (t.kind != Token::Name || t.text.size() < 2 || t.text[0] != prefix) return 0;
  std::uint32_t v = 0;
  for (std::size_t k = 1; k < t.text.size(); ++k) {
    if (!std::isdigit(static_cast<unsigned char>(t.text[k]))) return 0;
    v = v * 10 + static_cast<std::uint32_t>(t.text[k] - '0');
    if (v > 1'000'000) return 0;
  }
  return v;
}

struct Tree {
  Token head;
  std::vector<Tree> kids;
};

struct RawRule {
  Token state;
  Token input;
  std::vector<Token> xs;
  std::vector<Token> ys;
  bool has_guard = false;
  std::vector<Token> guard;
  Tree rhs;
};

struct RawTrans {
  Token state;
  Token symbol;
  std::vector<Token> children;
};

struct RawDta {
  std::vector<Token> states;
  std::optional<Token> init;
  std::vector<RawTrans> trans;
  Token where;
};

struct RawLookahead {
  std::vector<Token> states;
  std::vector<RawTrans> trans;  // state = target, symbol, children = argument states
  Token where;
};

class Parser {
 public:
  Parser(SymbolTable& symbols, std::vector<Token> tokens)
      : sy_(symbols), toks_(std::move(tokens)) {}

  SpecFile run() {
    while (true) {
      skip_separators();
      if (peek().kind == Token::End) break;
      statement();
    }
    return resolve();
  }

 private:
  // -- token helpers -------------------------------------------------------
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError(msg, t.line, t.col);
  }

  Token expect_punct(std::string_view p) {
    if (!peek().is(p)) fail(peek(), "expected '" + std::string(p) + "'" + found());
    return take();
  }

  Token expect_name(const char* what) {
    if (!peek().is_name()) fail(peek(), std::string("expected ") + what + found());
    return take();
  }

  std::string found() const {
    const Token& t = peek();
    switch (t.kind) {
      case Token::End: return " but reached the end of input";
      case Token::Newline: return " but reached the end of the line";
      default: return " but found '" + t.text + "'";
    }
  }

  void skip_separators() {
    while (peek().kind == Token::Newline || peek().is(";")) take();
  }

  void end_statement() {
    const Token& t = peek();
    if (t.kind == Token::Newline || t.is(";")) {
      take();
      return;
    }
    if (t.kind == Token::End || t.is("}")) return;
    fail(t, "unexpected '" + t.text + "' after statement");
  }

  std::uint32_t number(const Token& t) {
    if (t.kind != Token::Name || t.text.empty() ||
        !std::all_of(t.text.begin(), t.text.end(),
                     [](unsigned char c) { return std::isdigit(c); }) ||
        t.text.size() > 6) {
      fail(t, "expected a number but found '" + t.text + "'");
    }
    return static_cast<std::uint32_t>(std::stoul(t.text));
  }

  // -- statements ----------------------------------------------------------
  void statement() {
    const Token head = expect_name("a statement");
    if (head.kind == Token::Quoted) fail(head, "expected a statement keyword");
    const std::string& k = head.text;
    if (k == "sigma") {
      alphabet(SymbolClass::SigmaInput, sigma_, head);
      sigma_declared_ = true;
    } else if (k == "delta_o") {
      alphabet(SymbolClass::DeltaOut, out_.mtt.delta_out, head);
    } else if (k == "delta_i") {
      alphabet(SymbolClass::DeltaIn, out_.mtt.delta_in, head);
    } else if (k == "params") {
      out_.mtt.param_count = number(take());
      out_.has_mtt = true;
    } else if (k == "state" || k == "states") {
      while (peek().is_name()) state_decls_.push_back(take());
      out_.has_mtt = true;
    } else if (k == "rule") {
      rule();
      out_.has_mtt = true;
    } else if (k == "axiom") {
      if (axiom_) fail(head, "second axiom");
      expect_punct("=");
      axiom_ = term();
      axiom_where_ = head;
      out_.has_mtt = true;
    } else if (k == "for") {
      for_template(head, [this] { statement(); });
      return;
    } else if (k == "dta") {
      dta_block(head);
    } else if (k == "lookahead") {
      lookahead_block(head);
    } else {
      fail(head, "unknown statement '" + k + "'");
    }
    end_statement();
  }

  void alphabet(SymbolClass cls, std::vector<SymbolId>& into, const Token& head) {
    (void)head;
    expect_punct("{");
    while (true) {
      while (peek().kind == Token::Newline || peek().is(",") || peek().is(";")) take();
      if (peek().is("}")) {
        take();
        return;
      }
      Token name = expect_name("a symbol");
      expect_punct("/");
      Token rank = take();
      std::uint32_t r = number(rank);
      try {
        SymbolId s = sy_.intern(name.text, r, cls);
        if (std::find(into.begin(), into.end(), s) != into.end()) {
          fail(name, "symbol '" + name.text + "' declared twice");
        }
        into.push_back(s);
      } catch (const ArityError& e) {
        fail(name, e.what());
      }
    }
  }

  Tree term() {
    Tree t;
    t.head = expect_name("a term");
    if (peek().is("(")) {
      take();
      if (peek().is(")")) fail(peek(), "empty argument list");
      while (true) {
        t.kids.push_back(term());
        if (peek().is(",")) {
          take();
          continue;
        }
        expect_punct(")");
        break;
      }
    }
    return t;
  }

  void rule() {
    RawRule r;
    r.state = expect_name("a state");
    expect_punct("(");
    r.input = expect_name("an input symbol");
    if (peek().is("(")) {
      take();
      while (true) {
        r.xs.push_back(expect_name("an input variable"));
        if (peek().is(",")) {
          take();
          continue;
        }
        expect_punct(")");
        break;
      }
    }
    while (peek().is(",")) {
      take();
      r.ys.push_back(expect_name("a parameter"));
    }
    expect_punct(")");
    if (peek().is("<")) {
      take();
      r.has_guard = true;
      while (!peek().is(">")) {
        r.guard.push_back(expect_name("a look-ahead state"));
        if (peek().is(",")) take();
      }
      take();
    }
    expect_punct("=");
    if (!peek().is_name()) fail(peek(), "expected a right-hand side" + found());
    r.rhs = term();
    rules_.push_back(std::move(r));
  }

  // Expands "for v in {..}, w in {..}: body" by token substitution and parses
  // each instance with item().
  void for_template(const Token& head, const std::function<void()>& item) {
    std::vector<std::pair<std::string, std::vector<Token>>> vars;
    while (true) {
      Token var = expect_name("a template variable");
      Token in = expect_name("'in'");
      if (!in.is_word("in")) fail(in, "expected 'in'");
      expect_punct("{");
      std::vector<Token> values;
      while (!peek().is("}")) {
        if (peek().is(",")) {
          take();
          continue;
        }
        values.push_back(expect_name("a template value"));
      }
      take();
      if (values.empty()) fail(var, "template variable without values");
      vars.emplace_back(var.text, std::move(values));
      if (peek().is(",")) {
        take();
        continue;
      }
      expect_punct(":");
      break;
    }
    std::vector<Token> body;
    int braces = 0;
    while (peek().kind != Token::Newline && peek().kind != Token::End && !peek().is(";") &&
           !(braces == 0 && peek().is("}"))) {
      if (peek().is("{")) ++braces;
      if (peek().is("}")) --braces;
      body.push_back(take());
    }
    if (body.empty()) fail(head, "empty template body");

    std::vector<std::size_t> idx(vars.size(), 0);
    while (true) {
      std::vector<Token> inst;
      for (const Token& t : body) {
        Token u = t;
        if (t.kind == Token::Name) {
          for (std::size_t v = 0; v < vars.size(); ++v) {
            if (vars[v].first == t.text) {
              const Token& val = vars[v].second[idx[v]];
              u.kind = val.kind;
              u.text = val.text;
            }
          }
        }
        inst.push_back(u);
      }
      Token end;
      end.kind = Token::End;
      end.line = body.back().line;
      end.col = body.back().col;
      inst.push_back(end);

      std::vector<Token> saved = std::move(toks_);
      std::size_t saved_pos = pos_;
      toks_ = std::move(inst);
      pos_ = 0;
      item();
      if (peek().kind != Token::End) fail(peek(), "unexpected tokens in template body");
      toks_ = std::move(saved);
      pos_ = saved_pos;

      std::size_t v = vars.size();
      while (v > 0 && ++idx[v - 1] == vars[v - 1].second.size()) idx[--v] = 0;
      if (v == 0) break;
    }
  }

  std::vector<Token> state_tuple() {
    std::vector<Token> out;
    expect_punct("(");
    while (!peek().is(")")) {
      out.push_back(expect_name("a state"));
      if (peek().is(",")) take();
    }
    take();
    return out;
  }

  void dta_block(const Token& head) {
    if (dta_) fail(head, "second dta block");
    RawDta d;
    d.where = head;
    expect_punct("{");
    while (true) {
      skip_separators();
      if (peek().is("}")) {
        take();
        break;
      }
      dta_item(d);
      end_statement();
    }
    dta_ = std::move(d);
  }

  void dta_item(RawDta& d) {
    {
      Token k = expect_name("'states', 'init', 'trans' or 'for'");
      if (k.is_word("for")) {
        for_template(k, [this, &d] { dta_item(d); });
      } else if (k.is_word("states") || k.is_word("state")) {
        while (peek().is_name()) d.states.push_back(take());
      } else if (k.is_word("init")) {
        d.init = expect_name("a state");
      } else if (k.is_word("trans")) {
        RawTrans t;
        t.state = expect_name("a state");
        expect_punct("(");
        t.symbol = expect_name("an input symbol");
        expect_punct(")");
        expect_punct("->");
        t.children = state_tuple();
        d.trans.push_back(std::move(t));
      } else {
        fail(k, "unknown dta item '" + k.text + "'");
      }
    }
  }

  void lookahead_block(const Token& head) {
    if (lookahead_) fail(head, "second lookahead block");
    RawLookahead la;
    la.where = head;
    expect_punct("{");
    while (true) {
      skip_separators();
      if (peek().is("}")) {
        take();
        break;
      }
      lookahead_item(la);
      end_statement();
    }
    lookahead_ = std::move(la);
  }

  void lookahead_item(RawLookahead& la) {
    {
      Token k = expect_name("'states', 'trans' or 'for'");
      if (k.is_word("for")) {
        for_template(k, [this, &la] { lookahead_item(la); });
      } else if (k.is_word("states") || k.is_word("state")) {
        while (peek().is_name()) la.states.push_back(take());
      } else if (k.is_word("trans")) {
        RawTrans t;
        t.symbol = expect_name("an input symbol");
        if (peek().is("(")) t.children = state_tuple();
        expect_punct("->");
        t.state = expect_name("a look-ahead state");
        la.trans.push_back(std::move(t));
      } else {
        fail(k, "unknown lookahead item '" + k.text + "'");
      }
    }
  }

  // -- resolution ----------------------------------------------------------
  SymbolId input_symbol(const Token& t, std::uint32_t arity, bool may_declare) {
    auto s = sy_.find(t.text, SymbolClass::SigmaInput);
    const bool known = s && (!sigma_declared_ ||
                             std::find(sigma_.begin(), sigma_.end(), *s) != sigma_.end());
    if (!known) {
      if (!may_declare || sigma_declared_) fail(t, "unknown input symbol '" + t.text + "'");
      s = sy_.intern(t.text, arity, SymbolClass::SigmaInput);
      sigma_.push_back(*s);
    }
    if (sy_.rank(*s) != arity) {
      fail(t, "input symbol '" + t.text + "' has rank " + std::to_string(sy_.rank(*s)) +
                  ", not " + std::to_string(arity));
    }
    return *s;
  }

  SymbolId output_symbol(const Tree& t, bool output_position) {
    const SymbolClass first = output_position ? SymbolClass::DeltaOut : SymbolClass::DeltaIn;
    const SymbolClass second = output_position ? SymbolClass::DeltaIn : SymbolClass::DeltaOut;
    const auto& l1 = output_position ? out_.mtt.delta_out : out_.mtt.delta_in;
    const auto& l2 = output_position ? out_.mtt.delta_in : out_.mtt.delta_out;
    std::optional<SymbolId> s;
    if (auto a = sy_.find(t.head.text, first); a && std::count(l1.begin(), l1.end(), *a)) {
      s = a;
    } else if (auto b = sy_.find(t.head.text, second); b && std::count(l2.begin(), l2.end(), *b)) {
      s = b;
    }
    if (!s) fail(t.head, "unknown symbol '" + t.head.text + "'");
    if (sy_.rank(*s) != t.kids.size()) {
      fail(t.head, "symbol '" + t.head.text + "' has rank " + std::to_string(sy_.rank(*s)) +
                       " but is given " + std::to_string(t.kids.size()) + " arguments");
    }
    return *s;
  }

  RhsNode rhs(const Tree& t, bool output_position) {
    if (std::uint32_t j = var_index(t.head, 'y'); j && t.kids.empty()) {
      return RhsNode::make_param(j);
    }
    if (auto q = out_.mtt.find_state(t.head.text); q && !t.kids.empty() &&
                                                   var_index(t.kids[0].head, 'x') &&
                                                   t.kids[0].kids.empty()) {
      std::vector<RhsNode> args;
      for (std::size_t k = 1; k < t.kids.size(); ++k) args.push_back(rhs(t.kids[k], false));
      return RhsNode::make_call(*q, var_index(t.kids[0].head, 'x'), std::move(args));
    }
    if (var_index(t.head, 'x')) fail(t.head, "input variable outside a state call");
    SymbolId s = output_symbol(t, output_position);
    std::vector<RhsNode> kids;
    for (const Tree& k : t.kids) kids.push_back(rhs(k, output_position));
    return RhsNode::make_symbol(s, std::move(kids));
  }

  SourceLoc loc(const Token& t) const { return SourceLoc{t.line, t.col}; }

  SpecFile resolve() {
    Mtt& m = out_.mtt;
    for (const Token& t : state_decls_) m.add_state(t.text);
    for (const RawRule& r : rules_) m.add_state(r.state.text);
    if (!rules_.empty() || axiom_) {
      if (!sigma_declared_) fail(rules_.empty() ? axiom_where_ : rules_[0].state,
                                 "transducer without a sigma section");
    }

    std::optional<std::vector<std::uint32_t>> la_ids;
    if (lookahead_) {
      out_.lookahead.emplace();
      for (const Token& t : lookahead_->states) {
        if (out_.lookahead->find_la_state(t.text)) fail(t, "look-ahead state declared twice");
        out_.lookahead->la_states.push_back(t.text);
      }
    }
    auto la_state = [&](const Token& t) {
      auto s = out_.lookahead->find_la_state(t.text);
      if (!s) fail(t, "unknown look-ahead state '" + t.text + "'");
      return *s;
    };

    for (const RawRule& r : rules_) {
      Rule rule;
      rule.state = *m.find_state(r.state.text);
      rule.input = input_symbol(r.input, static_cast<std::uint32_t>(r.xs.size()), false);
      for (std::size_t i = 0; i < r.xs.size(); ++i) {
        if (var_index(r.xs[i], 'x') != i + 1) {
          fail(r.xs[i], "expected x" + std::to_string(i + 1));
        }
      }
      for (const Token& y : r.ys) {
        std::uint32_t j = var_index(y, 'y');
        if (!j) fail(y, "expected a parameter y<j>");
        rule.lhs_params.push_back(j);
      }
      rule.rhs = rhs(r.rhs, true);
      rule.loc = loc(r.state);
      if (r.has_guard && !lookahead_) fail(r.state, "guard without a lookahead block");
      if (lookahead_) {
        std::vector<std::uint32_t> g;
        for (const Token& t : r.guard) g.push_back(la_state(t));
        if (g.size() != r.xs.size()) {
          fail(r.state, "guard needs one look-ahead state per input variable");
        }
        out_.lookahead->guards.push_back(std::move(g));
      }
      m.add_rule(std::move(rule));
    }
    m.sigma = sigma_;

    if (axiom_) {
      Axiom a;
      a.rhs = rhs(*axiom_, true);
      a.loc = loc(axiom_where_);
      out_.axiom = std::move(a);
    }

    if (lookahead_) {
      for (const RawTrans& t : lookahead_->trans) {
        std::vector<std::uint32_t> kids;
        for (const Token& c : t.children) kids.push_back(la_state(c));
        SymbolId f = input_symbol(t.symbol, static_cast<std::uint32_t>(kids.size()), false);
        if (!out_.lookahead->la_trans.emplace(std::make_pair(raw(f), kids), la_state(t.state))
                 .second) {
          fail(t.symbol, "duplicate look-ahead transition");
        }
      }
      out_.lookahead->mtt = m;
      if (out_.axiom) out_.lookahead->axiom = *out_.axiom;
    }

    if (dta_) {
      Dta d;
      for (const Token& t : dta_->states) d.add_state(t.text);
      for (const RawTrans& t : dta_->trans) {
        auto b = d.find_state(t.state.text);
        if (!b) fail(t.state, "unknown automaton state '" + t.state.text + "'");
        std::vector<DtaState> kids;
        for (const Token& c : t.children) {
          auto k = d.find_state(c.text);
          if (!k) fail(c, "unknown automaton state '" + c.text + "'");
          kids.push_back(*k);
        }
        SymbolId f = input_symbol(t.symbol, static_cast<std::uint32_t>(kids.size()), true);
        try {
          d.add_transition(*b, f, kids);
        } catch (const ValidationError& e) {
          fail(t.symbol, e.what());
        }
      }
      if (!dta_->init) fail(dta_->where, "dta block without 'init'");
      auto init = d.find_state(dta_->init->text);
      if (!init) fail(*dta_->init, "unknown automaton state '" + dta_->init->text + "'");
      d.initial = *init;
      d.sigma = sigma_;
      if (m.sigma.empty()) m.sigma = sigma_;
      out_.dta = std::move(d);
    }
    return std::move(out_);
  }

  SymbolTable& sy_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SpecFile out_;
  std::vector<SymbolId> sigma_;
  bool sigma_declared_ = false;
  std::vector<Token> state_decls_;
  std::vector<RawRule> rules_;
  std::optional<Tree> axiom_;
  Token axiom_where_;
  std::optional<RawDta> dta_;
  std::optional<RawLookahead> lookahead_;
};

}  // namespace

SpecFile parse_spec(SymbolTable& symbols, std::string_view text) {
  Parser p(symbols, lex(text));
  return p.run();
}

SpecFile load_spec(SymbolTable& symbols, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_spec(symbols, ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path, e);
  }
}

TermId parse_term(const SymbolTable& symbols, TermStore& store, std::string_view text,
                  SymbolClass cls) {
  std::vector<Token> toks = lex(text);
  std::size_t pos = 0;
  auto fail = [&](const Token& t, const std::string& msg) -> void {
    throw ParseError(msg, t.line, t.col);
  };
  std::function<TermId()> go = [&]() -> TermId {
    const Token head = toks[pos];
    if (!head.is_name()) fail(head, "expected a tree");
    ++pos;
    std::vector<TermId> kids;
    if (toks[pos].is("(")) {
      ++pos;
      while (true) {
        kids.push_back(go());
        if (toks[pos].is(",")) {
          ++pos;
          continue;
        }
        if (!toks[pos].is(")")) fail(toks[pos], "expected ')'");
        ++pos;
        break;
      }
    }
    std::optional<SymbolId> s = symbols.find(head.text, cls);
    if (!s && cls == SymbolClass::DeltaIn) s = symbols.find(head.text, SymbolClass::DeltaOut);
    if (!s) fail(head, "unknown symbol '" + head.text + "'");
    if (symbols.rank(*s) != kids.size()) {
      fail(head, "symbol '" + head.text + "' has rank " + std::to_string(symbols.rank(*s)));
    }
    return store.intern(*s, kids);
  };
  while (toks[pos].kind == Token::Newline) ++pos;
  TermId t = go();
  while (toks[pos].kind == Token::Newline) ++pos;
  if (toks[pos].kind != Token::End) fail(toks[pos], "trailing input after tree");
  return t;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_rhs(const SymbolTable& symbols, const Mtt& m, const RhsNode& n) {
  switch (n.kind) {
    case RhsNode::Kind::Param:
      return "y" + std::to_string(n.index);
    case RhsNode::Kind::Call: {
      std::string s = render_name(m.state_name(n.state)) + "(x" + std::to_string(n.index);
      for (const RhsNode& c : n.children) s += "," + render_rhs(symbols, m, c);
      return s + ")";
    }
    case RhsNode::Kind::Symbol:
      break;
  }
  std::string s = render_name(symbols.name(n.symbol));
  if (n.children.empty()) return s;
  s += '(';
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (i) s += ',';
    s += render_rhs(symbols, m, n.children[i]);
  }
  return s + ')';
}

std::string render_rule(const SymbolTable& symbols, const Mtt& m, const Rule& r) {
  std::string s = "rule " + render_name(m.state_name(r.state)) + "(" +
                  render_name(symbols.name(r.input));
  const std::uint32_t k = symbols.rank(r.input);
  if (k > 0) {
    s += '(';
    for (std::uint32_t i = 1; i <= k; ++i) {
      if (i > 1) s += ',';
      s += "x" + std::to_string(i);
    }
    s += ')';
  }
  for (std::uint32_t j : r.lhs_params) s += ", y" + std::to_string(j);
  return s + ") = " + render_rhs(symbols, m, r.rhs);
}

namespace {

std::string render_alphabet(const SymbolTable& symbols, const char* name,
                            const std::vector<SymbolId>& syms) {
  std::string s = std::string(name) + " {";
  for (SymbolId f : syms) s += " " + render_name(symbols.name(f)) + "/" + std::to_string(symbols.rank(f));
  return s + " }\n";
}

}  // namespace

std::string render_mtt(const SymbolTable& symbols, const Mtt& m, const Axiom* a) {
  std::string s;
  s += render_alphabet(symbols, "sigma", m.sigma);
  s += render_alphabet(symbols, "delta_o", m.delta_out);
  s += render_alphabet(symbols, "delta_i", m.delta_in);
  s += "params " + std::to_string(m.param_count) + "\n";
  s += "state";
  for (std::uint32_t q = 0; q < m.state_count(); ++q) {
    s += " " + render_name(m.state_name(static_cast<StateId>(q)));
  }
  s += "\n";
  for (const Rule& r : m.rules()) s += render_rule(symbols, m, r) + "\n";
  if (a) s += "axiom = " + render_rhs(symbols, m, a->rhs) + "\n";
  return s;
}

std::string render_dta(const SymbolTable& symbols, const Dta& d, bool with_sigma) {
  std::string s;
  if (with_sigma) s += render_alphabet(symbols, "sigma", d.sigma);
  s += "dta {\n  states";
  for (std::uint32_t b = 0; b < d.state_count(); ++b) {
    s += " " + render_name(d.state_name(static_cast<DtaState>(b)));
  }
  s += ";\n  init " + render_name(d.state_name(d.initial)) + ";\n";
  for (const auto& [key, kids] : d.transitions()) {
    s += "  trans " + render_name(d.state_name(static_cast<DtaState>(key.first))) + "(" +
         render_name(symbols.name(static_cast<SymbolId>(key.second))) + ") -> (";
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) s += ", ";
      s += render_name(d.state_name(kids[i]));
    }
    s += ");\n";
  }
  return s + "}\n";
}

}  // namespace mtteq
