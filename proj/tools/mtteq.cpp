// Command-line front end: validation, evaluation, earliest form and
// equivalence of transducers written in the text format of spec_io.hpp.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtteq/applications.hpp"
#include "mtteq/earliest.hpp"
#include "mtteq/equiv.hpp"
#include "mtteq/errors.hpp"
#include "mtteq/model.hpp"
#include "mtteq/oracle.hpp"
#include "mtteq/spec_io.hpp"

using namespace mtteq;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kDiffers = 1;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

struct Ctx {
  SymbolTable symbols;
  TermStore store{symbols};
  bool text = false;
};

void emit(const Ctx& c, const Json& j, const std::string& text) {
  if (c.text) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    std::cout << j.dump(2) << '\n';
  }
}

SpecFile load_mtt(Ctx& c, const std::string& path) {
  SpecFile f = load_spec(c.symbols, path);
  if (!f.has_mtt) throw ValidationError(path + ": no transducer in file");
  return f;
}

const Axiom& axiom_of(const SpecFile& f, const std::string& path) {
  if (!f.axiom) throw ValidationError(path + ": no axiom");
  return *f.axiom;
}

// --dta file if given, else a dta block of the transducer file, else the
// automaton accepting every tree over sigma.
Dta pick_dta(Ctx& c, const std::string& dta_path, const SpecFile& f) {
  if (!dta_path.empty()) {
    SpecFile d = load_spec(c.symbols, dta_path);
    if (!d.dta) throw ValidationError(dta_path + ": no dta block");
    return *d.dta;
  }
  if (f.dta) return *f.dta;
  return trivial_dta(c.symbols, f.mtt.sigma);
}

bool is_trivial(const Dta& d) { return d.state_count() == 1; }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << content;
}

// Splits "a(b,c),d" at top-level commas.
std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  bool quoted = false;
  for (char ch : s) {
    if (ch == '"') quoted = !quoted;
    if (!quoted && ch == '(') ++depth;
    if (!quoted && ch == ')') --depth;
    if (!quoted && depth == 0 && ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

Json violations_json(const ValidationReport& r) {
  Json arr = Json::array();
  for (const Violation& v : r.violations) {
    arr.push_back({{"kind", to_string(v.kind)},
                   {"message", v.message},
                   {"line", v.loc.line},
                   {"column", v.loc.column}});
  }
  return arr;
}

Json reports_json(const std::vector<ConjunctionReport>& rs, bool pairs) {
  Json arr = Json::array();
  for (const ConjunctionReport& r : rs) {
    Json e;
    if (pairs) {
      e["state"] = r.state_a;
      e["state'"] = r.state_b;
    } else {
      e["state"] = r.state_a;
    }
    e["conjunction"] = r.conjunction;
    arr.push_back(e);
  }
  return arr;
}

// -- subcommands -----------------------------------------------------------

int cmd_validate(Ctx& c, const std::string& path, bool partial) {
  SpecFile f = load_spec(c.symbols, path);
  ValidationReport rep;
  if (f.has_mtt) {
    rep = validate(c.symbols, f.mtt, partial ? Totality::Partial : Totality::Total);
    if (f.axiom) {
      ValidationReport ra = validate_axiom(c.symbols, f.mtt, *f.axiom);
      rep.violations.insert(rep.violations.end(), ra.violations.begin(), ra.violations.end());
    }
  }
  if (f.dta) (void)dta_analyze(c.symbols, *f.dta);
  Json j{{"valid", rep.ok()}, {"violations", violations_json(rep)}};
  std::string text = rep.ok() ? "valid\n" : "";
  for (const Violation& v : rep.violations) {
    text += std::to_string(v.loc.line) + ":" + std::to_string(v.loc.column) + ": " +
            to_string(v.kind) + ": " + v.message + "\n";
  }
  emit(c, j, text);
  return rep.ok() ? kOk : kUsage;
}

int cmd_eval(Ctx& c, const std::string& path, const std::string& input,
             const std::string& state, const std::string& params) {
  SpecFile f = load_mtt(c, path);
  ValidationReport rep = validate(c.symbols, f.mtt, Totality::Partial);
  if (!rep.ok()) throw ValidationError(path + ": " + rep.violations.front().message);
  TermId t = parse_term(c.symbols, c.store, input, SymbolClass::SigmaInput);
  TermId out;
  if (!state.empty()) {
    auto q = f.mtt.find_state(state);
    if (!q) throw ValidationError("unknown state " + state);
    std::vector<TermId> ps;
    for (const std::string& p : split_args(params)) {
      ps.push_back(parse_term(c.symbols, c.store, p, SymbolClass::DeltaIn));
    }
    if (ps.size() != f.mtt.param_count) {
      throw ValidationError("expected " + std::to_string(f.mtt.param_count) + " parameters");
    }
    out = evaluate_state(f.mtt, c.store, *q, t, ps);
  } else {
    out = evaluate_axiom(f.mtt, c.store, axiom_of(f, path), t);
  }
  const std::string s = render_term(c.store, out);
  emit(c, Json{{"output", s}, {"height", c.store.height(out)}}, s);
  return kOk;
}

int cmd_prefixes(Ctx& c, const std::string& path, const std::string& dta_path) {
  SpecFile f = load_mtt(c, path);
  c.symbols.ensure_vars(f.mtt.param_count);
  ValidationReport rep = validate(c.symbols, f.mtt, Totality::Partial);
  if (!rep.ok()) throw ValidationError(path + ": " + rep.violations.front().message);
  const Dta d = dta_analyze(c.symbols, pick_dta(c, dta_path, f));
  Mtt m;
  StateMap pi;
  if (f.axiom) {
    AnnotatedMtt ann = product_annotate(c.symbols, f.mtt, *f.axiom, d, Totality::Partial);
    m = std::move(ann.mtt);
    pi = std::move(ann.pi);
  } else if (is_trivial(d)) {
    m = f.mtt;
    pi.assign(m.state_count(), d.initial);
  } else {
    throw ValidationError(path + ": prefixes relative to an automaton need an axiom");
  }
  PrefixTable pt = compute_prefixes(c.store, m, pi, d);
  Json j = Json::object();
  std::string text;
  for (std::uint32_t q = 0; q < m.state_count(); ++q) {
    const std::string& name = m.state_name(static_cast<StateId>(q));
    const std::string p = render_pattern(c.store, pt.prefix[q]);
    j[name] = p;
    text += name + ": " + p + "\n";
  }
  emit(c, j, text);
  return kOk;
}

int cmd_earliest(Ctx& c, const std::string& path, const std::string& dta_path,
                 const std::string& out_path) {
  SpecFile f = load_mtt(c, path);
  c.symbols.ensure_vars(f.mtt.param_count);
  ValidationReport rep = validate(c.symbols, f.mtt, Totality::Partial);
  const Axiom& a = axiom_of(f, path);
  ValidationReport ra = validate_axiom(c.symbols, f.mtt, a);
  if (!rep.ok()) throw ValidationError(path + ": " + rep.violations.front().message);
  if (!ra.ok()) throw ValidationError(path + ": " + ra.violations.front().message);
  const Dta d = dta_analyze(c.symbols, pick_dta(c, dta_path, f));
  AnnotatedMtt ann = product_annotate(c.symbols, f.mtt, a, d, Totality::Total);
  AnnotatedMtt e = earliest_transform(c.store, ann, d);
  const std::string rendered = render_mtt(c.symbols, e.mtt, &e.axiom);
  write_file(out_path, rendered);
  emit(c,
       Json{{"output", out_path},
            {"states", e.mtt.state_count()},
            {"rules", e.mtt.rules().size()}},
       rendered);
  return kOk;
}

Json decision_json(Ctx& c, const Decision& d, bool explain) {
  Json j;
  j["verdict"] = d.verdict == Verdict::Equivalent ? "Equivalent" : "Inequivalent";
  if (d.verdict == Verdict::Inequivalent) {
    j["failing_check"] = d.failing_check;
    j["reason"] = d.reason;
    j["counterexample"] =
        d.counterexample ? Json(render_term(c.store, *d.counterexample)) : Json(nullptr);
  }
  j["rounds"] = d.rounds;
  j["bound"] = d.bound;
  if (explain) {
    j["phi"] = reports_json(d.phi, true);
    j["psi_a"] = reports_json(d.psi_a, false);
    j["psi_b"] = reports_json(d.psi_b, false);
    j["earliest_a"] = render_mtt(c.symbols, d.earliest_a.mtt, &d.earliest_a.axiom);
    j["earliest_b"] = render_mtt(c.symbols, d.earliest_b.mtt, &d.earliest_b.axiom);
  }
  return j;
}

std::string decision_text(Ctx& c, const Decision& d, bool explain) {
  std::string s = d.verdict == Verdict::Equivalent ? "Equivalent\n" : "Inequivalent\n";
  if (d.verdict == Verdict::Inequivalent) {
    s += "check: " + d.failing_check + "\nreason: " + d.reason + "\n";
    if (d.counterexample) s += "counterexample: " + render_term(c.store, *d.counterexample) + "\n";
  }
  s += "rounds: " + std::to_string(d.rounds) + " (bound " + std::to_string(d.bound) + ")\n";
  if (explain) {
    for (const ConjunctionReport& r : d.phi) {
      s += "Phi(" + r.state_a + ", " + r.state_b + ") = " + r.conjunction + "\n";
    }
    for (const ConjunctionReport& r : d.psi_a) s += "Psi(" + r.state_a + ") = " + r.conjunction + "\n";
    for (const ConjunctionReport& r : d.psi_b) s += "Psi'(" + r.state_a + ") = " + r.conjunction + "\n";
  }
  return s;
}

int cmd_equiv(Ctx& c, const std::string& p1, const std::string& p2, const std::string& dta_path,
              bool explain, std::optional<std::uint32_t> oracle_height, bool full, bool partial) {
  SpecFile f1 = load_mtt(c, p1);
  SpecFile f2 = load_mtt(c, p2);
  const Axiom& a1 = axiom_of(f1, p1);
  const Axiom& a2 = axiom_of(f2, p2);
  DecideOptions opts;
  opts.engine.full = full;
  // Without an automaton, transducers that are only partial go through the
  // domain comparison.
  auto only_partial = [&](const Mtt& m) {
    ValidationReport r = validate(c.symbols, m, Totality::Total);
    return !r.ok() && std::all_of(r.violations.begin(), r.violations.end(), [](const Violation& v) {
      return v.kind == ViolationKind::NotTotal;
    });
  };
  if (dta_path.empty() && !f1.dta && (only_partial(f1.mtt) || only_partial(f2.mtt))) partial = true;

  Json j;
  std::string text;
  Verdict verdict = Verdict::Equivalent;
  std::optional<Dta> dta;
  if (partial) {
    PartialDecision pd = decide_partial(c.symbols, c.store, f1.mtt, a1, f2.mtt, a2, opts);
    verdict = pd.verdict;
    if (pd.decision) {
      j = decision_json(c, *pd.decision, explain);
      text = decision_text(c, *pd.decision, explain);
    } else {
      j["verdict"] = verdict == Verdict::Equivalent ? "Equivalent" : "Inequivalent";
      text = j["verdict"].get<std::string>() + "\n";
    }
    j["domains_differ"] = pd.domains_differ;
    if (pd.domain_witness) {
      const std::string w = render_term(c.store, *pd.domain_witness);
      j["domain_witness"] = w;
      text += "domains differ on " + w + "\n";
    }
  } else {
    dta = pick_dta(c, dta_path, f1);
    try {
      Decision d = decide(c.symbols, c.store, f1.mtt, a1, f2.mtt, a2, *dta, opts);
      verdict = d.verdict;
      j = decision_json(c, d, explain);
      text = decision_text(c, d, explain);
    } catch (const EmptyDomainError&) {
      j["verdict"] = "Equivalent";
      j["reason"] = "the automaton accepts no tree";
      text = "Equivalent (empty domain)\n";
    }
  }

  if (oracle_height) {
    // In partial mode undefined outputs only agree with each other, so the
    // oracle compares the domains as well.
    EnumBudget budget{*oracle_height, 1'000'000};
    std::optional<Dta> analyzed;
    if (dta) {
      try {
        analyzed = dta_analyze(c.symbols, *dta);
      } catch (const EmptyDomainError&) {
      }
    }
    OracleResult r;
    if (!dta || analyzed) {
      r = oracle_decide(c.store, {&f1.mtt, &a1}, {&f2.mtt, &a2}, analyzed ? &*analyzed : nullptr,
                        budget);
    }
    j["oracle"] = {{"height", *oracle_height},
                   {"agree", r.agree},
                   {"checked", r.checked},
                   {"truncated", r.truncated}};
    if (r.counterexample) j["oracle"]["counterexample"] = render_term(c.store, *r.counterexample);
    text += std::string("oracle up to height ") + std::to_string(*oracle_height) + ": " +
            (r.agree ? "agree" : "differ") + "\n";
    if (verdict == Verdict::Equivalent && !r.agree) {
      emit(c, j, text + "mismatch between decision and oracle\n");
      return kInternal;
    }
  }
  emit(c, j, text);
  return verdict == Verdict::Equivalent ? kOk : kDiffers;
}

int cmd_oracle(Ctx& c, const std::string& p1, const std::string& p2, const std::string& dta_path,
               std::uint32_t height, std::uint64_t max_count) {
  SpecFile f1 = load_mtt(c, p1);
  SpecFile f2 = load_mtt(c, p2);
  const Axiom& a1 = axiom_of(f1, p1);
  const Axiom& a2 = axiom_of(f2, p2);
  std::optional<Dta> d;
  if (!dta_path.empty() || f1.dta) d = dta_analyze(c.symbols, pick_dta(c, dta_path, f1));
  OracleResult r = oracle_decide(c.store, {&f1.mtt, &a1}, {&f2.mtt, &a2}, d ? &*d : nullptr,
                                 EnumBudget{height, max_count});
  Json j{{"agree", r.agree}, {"checked", r.checked}, {"truncated", r.truncated}};
  std::string text = r.agree ? "agree" : "differ";
  text += " (" + std::to_string(r.checked) + " inputs" + (r.truncated ? ", truncated" : "") + ")\n";
  if (r.counterexample) {
    const std::string t = render_term(c.store, *r.counterexample);
    j["counterexample"] = t;
    text += "counterexample: " + t + "\n";
  }
  emit(c, j, text);
  return r.agree ? kOk : kDiffers;
}

int cmd_totalize(Ctx& c, const std::string& path, const std::string& bottom,
                 const std::string& out_path) {
  SpecFile f = load_mtt(c, path);
  Mtt t = totalize(c.symbols, f.mtt, bottom);
  const std::string rendered = render_mtt(c.symbols, t, f.axiom ? &*f.axiom : nullptr);
  write_file(out_path, rendered);
  emit(c, Json{{"output", out_path}, {"rules", t.rules().size()}}, rendered);
  return kOk;
}

int cmd_domain(Ctx& c, const std::string& path, const std::string& out_path) {
  SpecFile f = load_mtt(c, path);
  Dta d = domain_dta(c.symbols, f.mtt, axiom_of(f, path));
  bool empty = false;
  try {
    (void)dta_analyze(c.symbols, d);
  } catch (const EmptyDomainError&) {
    empty = true;
  }
  const std::string rendered = render_dta(c.symbols, d);
  write_file(out_path, rendered);
  emit(c, Json{{"output", out_path}, {"states", d.state_count()}, {"empty", empty}}, rendered);
  return kOk;
}

int cmd_dta_equiv(Ctx& c, const std::string& p1, const std::string& p2) {
  SpecFile f1 = load_spec(c.symbols, p1);
  SpecFile f2 = load_spec(c.symbols, p2);
  if (!f1.dta) throw ValidationError(p1 + ": no dta block");
  if (!f2.dta) throw ValidationError(p2 + ": no dta block");
  DtaEquivResult r = dta_equiv(c.store, *f1.dta, *f2.dta);
  Json j{{"equivalent", r.equivalent}};
  std::string text = r.equivalent ? "equivalent\n" : "languages differ\n";
  if (r.witness) {
    const std::string w = render_term(c.store, *r.witness);
    j["witness"] = w;
    j["accepted_by"] = r.witness_in_first ? p1 : p2;
    text += "witness: " + w + " (accepted by " + (r.witness_in_first ? p1 : p2) + " only)\n";
  }
  emit(c, j, text);
  return r.equivalent ? kOk : kDiffers;
}

int cmd_remove_lookahead(Ctx& c, const std::string& p1, const std::string& p2,
                         const std::string& prefix) {
  SpecFile f1 = load_spec(c.symbols, p1);
  SpecFile f2 = load_spec(c.symbols, p2);
  if (!f1.lookahead) throw ValidationError(p1 + ": no lookahead block");
  if (!f2.lookahead) throw ValidationError(p2 + ": no lookahead block");
  if (!f1.axiom || !f2.axiom) throw ValidationError("look-ahead transducers need an axiom");
  RemovedLookahead r = remove_lookahead(c.symbols, *f1.lookahead, *f2.lookahead);
  const std::string o1 = prefix + "_1.mtt";
  const std::string o2 = prefix + "_2.mtt";
  const std::string od = prefix + ".dta";
  write_file(o1, render_mtt(c.symbols, r.m1, &r.a1));
  write_file(o2, render_mtt(c.symbols, r.m2, &r.a2));
  write_file(od, render_dta(c.symbols, r.dta));
  emit(c, Json{{"first", o1}, {"second", o2}, {"dta", od}},
       o1 + "\n" + o2 + "\n" + od + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  // "-o-prefix" is accepted as a spelling of --o-prefix.
  std::vector<std::string> args(argv, argv + argc);
  for (std::string& a : args) {
    if (a == "-o-prefix") a = "--o-prefix";
  }
  std::vector<char*> argp;
  for (std::string& a : args) argp.push_back(a.data());

  CLI::App app{"Equivalence of separated basic macro tree transducers"};
  app.require_subcommand(1);
  Ctx ctx;
  app.add_flag("--text", ctx.text, "human-readable output instead of JSON");
  app.fallthrough();

  std::string f1, f2, dta, out, input, state, params, bottom, prefix;
  bool partial = false, explain = false, full = false;
  std::optional<std::uint32_t> oracle_check;
  std::uint32_t height = 4;
  std::uint64_t max_count = 1'000'000;

  auto* validate_cmd = app.add_subcommand("validate", "check well-formedness");
  validate_cmd->add_option("file", f1, "transducer file")->required();
  validate_cmd->add_flag("--partial", partial, "do not require totality");

  auto* eval_cmd = app.add_subcommand("eval", "run a transducer on an input tree");
  eval_cmd->add_option("file", f1, "transducer file")->required();
  eval_cmd->add_option("--input", input, "input tree, e.g. g(f(1,2),0)")->required();
  eval_cmd->add_option("--state", state, "start in this state instead of the axiom");
  eval_cmd->add_option("--params", params, "comma-separated parameter trees");

  auto* prefixes_cmd = app.add_subcommand("prefixes", "output prefixes of all states");
  prefixes_cmd->add_option("file", f1, "transducer file")->required();
  prefixes_cmd->add_option("--dta", dta, "automaton file restricting the inputs");

  auto* earliest_cmd = app.add_subcommand("earliest", "write the earliest form");
  earliest_cmd->add_option("file", f1, "transducer file")->required();
  earliest_cmd->add_option("--dta", dta, "automaton file restricting the inputs");
  earliest_cmd->add_option("-o,--output", out, "output file")->required();

  auto* equiv_cmd = app.add_subcommand("equiv", "decide equivalence");
  equiv_cmd->add_option("file1", f1, "first transducer")->required();
  equiv_cmd->add_option("file2", f2, "second transducer")->required();
  equiv_cmd->add_option("--dta", dta, "automaton file restricting the inputs");
  equiv_cmd->add_flag("--explain", explain, "print Phi, Psi and both earliest forms");
  equiv_cmd->add_option("--oracle-check", oracle_check,
                        "also enumerate inputs up to this height; exit 3 on a contradiction");
  equiv_cmd->add_flag("--full", full, "compute Phi for all state pairs");
  equiv_cmd->add_flag("--partial", partial, "partial transducers: compare domains first");

  auto* oracle_cmd = app.add_subcommand("oracle", "compare outputs on enumerated inputs");
  oracle_cmd->add_option("file1", f1, "first transducer")->required();
  oracle_cmd->add_option("file2", f2, "second transducer")->required();
  oracle_cmd->add_option("--height", height, "input height bound in nodes")->required();
  oracle_cmd->add_option("--max-count", max_count, "stop after this many inputs");
  oracle_cmd->add_option("--dta", dta, "automaton file restricting the inputs");

  auto* totalize_cmd = app.add_subcommand("totalize", "add rules producing a bottom symbol");
  totalize_cmd->add_option("file", f1, "transducer file")->required();
  totalize_cmd->add_option("--bottom", bottom, "name of the bottom output symbol")->required();
  totalize_cmd->add_option("-o,--output", out, "output file")->required();

  auto* domain_cmd = app.add_subcommand("domain", "write an automaton for the domain");
  domain_cmd->add_option("file", f1, "transducer file")->required();
  domain_cmd->add_option("-o,--output", out, "output file")->required();

  auto* dta_equiv_cmd = app.add_subcommand("dta-equiv", "compare two automata");
  dta_equiv_cmd->add_option("a", f1, "first automaton")->required();
  dta_equiv_cmd->add_option("b", f2, "second automaton")->required();

  auto* rla_cmd = app.add_subcommand("remove-lookahead", "eliminate regular look-ahead");
  rla_cmd->add_option("file1", f1, "first transducer")->required();
  rla_cmd->add_option("file2", f2, "second transducer")->required();
  rla_cmd->add_option("--o-prefix", prefix, "writes PREFIX_1.mtt, PREFIX_2.mtt and PREFIX.dta")->required();

  try {
    app.parse(static_cast<int>(argp.size()), argp.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*validate_cmd) return cmd_validate(ctx, f1, partial);
    if (*eval_cmd) return cmd_eval(ctx, f1, input, state, params);
    if (*prefixes_cmd) return cmd_prefixes(ctx, f1, dta);
    if (*earliest_cmd) return cmd_earliest(ctx, f1, dta, out);
    if (*equiv_cmd) return cmd_equiv(ctx, f1, f2, dta, explain, oracle_check, full, partial);
    if (*oracle_cmd) return cmd_oracle(ctx, f1, f2, dta, height, max_count);
    if (*totalize_cmd) return cmd_totalize(ctx, f1, bottom, out);
    if (*domain_cmd) return cmd_domain(ctx, f1, out);
    if (*dta_equiv_cmd) return cmd_dta_equiv(ctx, f1, f2);
    if (*rla_cmd) return cmd_remove_lookahead(ctx, f1, f2, prefix);
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
