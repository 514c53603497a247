// Acceptance suite. Usage: acceptance [N...]; without arguments every
// criterion runs. Prints one PASS/FAIL line per criterion and exits non-zero
// if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "mtteq/applications.hpp"
#include "mtteq/earliest.hpp"
#include "mtteq/equiv.hpp"
#include "mtteq/errors.hpp"
#include "mtteq/herbrand.hpp"
#include "mtteq/model.hpp"
#include "mtteq/oracle.hpp"
#include "mtteq/spec_io.hpp"

using namespace mtteq;
namespace cp = mtteq::corpus;

namespace {

const std::string kData = MTTEQ_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

SpecFile load(SymbolTable& sy, const std::string& name) { return load_spec(sy, kData + "/" + name); }

std::string strip_instances(const std::string& s) {
  static const std::regex at("@[^(,)]*");
  return std::regex_replace(s, at, "");
}

// -- shared corpora for criteria 6-8 -----------------------------------------

struct PairCase {
  cp::Transducer a;
  cp::Transducer b;
  Dta dta;
  std::string kind;
};

Dta corpus_dta(const SymbolTable& sy, const cp::Alphabet& alpha, cp::Rng& rng) {
  if (std::bernoulli_distribution(0.3)(rng)) return cp::random_dta(sy, alpha.sigma, rng, 3);
  return trivial_dta(sy, alpha.sigma);
}

// Total transducer pairs: equivalence-preserving rewrites, mutated
// near-duplicates and independent pairs.
std::vector<PairCase> decision_corpus(SymbolTable& sy, const cp::Alphabet& alpha,
                                      std::size_t count) {
  cp::Rng rng(cp::seed_from_env(7001));
  std::vector<PairCase> out;
  while (out.size() < count) {
    cp::Transducer base = cp::random_mtt(sy, alpha, rng);
    Dta d = corpus_dta(sy, alpha, rng);
    const std::uint32_t kind = std::uniform_int_distribution<std::uint32_t>(0, 9)(rng);
    PairCase c{base, base, d, ""};
    if (kind < 1) {
      c.b = cp::rename_states(base, "_r");
      c.kind = "renamed";
    } else if (kind < 2) {
      c.b = cp::permute_params(base, rng);
      c.kind = "permuted";
    } else if (kind < 3) {
      c.b = cp::duplicate_state(cp::permute_params(base, rng), rng);
      c.kind = "duplicated";
    } else if (kind < 8) {
      c.b = cp::mutate(sy, alpha, base, rng);
      if (kind >= 6) c.b = cp::mutate(sy, alpha, c.b, rng);
      c.kind = "mutated";
    } else {
      c.b = cp::random_mtt(sy, alpha, rng);
      c.kind = "independent";
    }
    out.push_back(std::move(c));
  }
  return out;
}

struct EarliestPair {
  AnnotatedMtt a;
  AnnotatedMtt b;
  Dta dta;  // analyzed
};

// D-earliest transducer pairs with at most four states and two parameters.
std::vector<EarliestPair> earliest_corpus(SymbolTable& sy, TermStore& store,
                                          const cp::Alphabet& alpha, std::size_t min_state_pairs) {
  cp::Rng rng(cp::seed_from_env(6001));
  cp::Config cfg;
  cfg.max_states = 2;
  std::vector<EarliestPair> out;
  std::size_t state_pairs = 0;
  while (state_pairs < min_state_pairs) {
    cp::Transducer a = cp::random_mtt(sy, alpha, rng, cfg);
    cp::Transducer b = std::bernoulli_distribution(0.5)(rng)
                           ? cp::mutate(sy, alpha, a, rng)
                           : cp::random_mtt(sy, alpha, rng, cfg);
    if (std::bernoulli_distribution(0.3)(rng)) b = cp::permute_params(a, rng);
    const Dta d = dta_analyze(sy, corpus_dta(sy, alpha, rng));
    sy.ensure_vars(2);
    EarliestPair p{earliest_transform(store, product_annotate(sy, a.mtt, a.axiom, d), d),
                   earliest_transform(store, product_annotate(sy, b.mtt, b.axiom, d), d), d};
    if (p.a.mtt.state_count() > 4 || p.b.mtt.state_count() > 4) continue;
    for (std::uint32_t qa = 0; qa < p.a.mtt.state_count(); ++qa) {
      for (std::uint32_t qb = 0; qb < p.b.mtt.state_count(); ++qb) {
        if (p.a.pi[qa] == p.b.pi[qb]) ++state_pairs;
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

// -- criteria ----------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = Clock::now();
  SymbolTable sy;
  TermStore store(sy);
  SpecFile f = load(sy, "mtern.mtt");
  TermId in = parse_term(sy, store, "g(f(f(f(2,1),0),1),f(0,2))", SymbolClass::SigmaInput);
  const std::string got = render_term(store, evaluate_axiom(f.mtt, store, *f.axiom, in));
  const std::string want =
      "+(+(*(1,EXP(3,z)),+(*(0,EXP(3,s(z))),+(*(1,EXP(3,s(s(z)))),*(2,EXP(3,s(s(s(z)))))))),"
      "+(*(0,EXP(3,p(z))),*(2,EXP(3,p(p(z))))))";
  const double s = seconds_since(t0);
  return {got == want && s < 1.0, "output " + std::string(got == want ? "matches" : "differs: " + got) +
                                       ", " + fmt_seconds(s)};
}

Outcome criterion2() {
  SymbolTable sy;
  TermStore store(sy);
  SpecFile f = load(sy, "mtern_total.mtt");
  sy.ensure_vars(f.mtt.param_count);
  const Dta d = dta_analyze(sy, trivial_dta(sy, f.mtt.sigma));
  AnnotatedMtt ann = product_annotate(sy, f.mtt, *f.axiom, d);
  PrefixTable pt = compute_prefixes(store, ann.mtt, ann.pi, d);
  std::map<std::string, std::string> want{{"q", "⊤"}, {"q'", "⊤"}, {"r", "*(⊤,EXP(3,⊤))"}};
  bool ok = pt.passes <= 2;
  std::string detail;
  for (const auto& [name, p] : want) {
    auto q = ann.mtt.find_state(name);
    const std::string got = q ? render_pattern(store, pt[*q]) : "<missing>";
    ok = ok && got == p;
    detail += name + "=" + got + " ";
  }
  return {ok, detail + "passes=" + std::to_string(pt.passes)};
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  SymbolTable sy;
  TermStore store(sy);
  SpecFile f = load(sy, "mtern_total.mtt");
  sy.ensure_vars(f.mtt.param_count);
  const Dta d = dta_analyze(sy, trivial_dta(sy, f.mtt.sigma));
  AnnotatedMtt e = earliest_transform(store, product_annotate(sy, f.mtt, *f.axiom, d), d);

  bool q_rule = false;
  std::map<std::string, bool> leaf_ok{{"0", false}, {"1", false}, {"2", false}};
  bool leaves_exact = true;
  for (const Rule& r : e.mtt.rules()) {
    const std::string state = strip_instances(e.mtt.state_name(r.state));
    const std::string rhs = strip_instances(render_rhs(sy, e.mtt, r.rhs));
    const std::string& in = sy.name(r.input);
    if (state == "q" && in == "f") q_rule = rhs == "+(*(r(x2,y1),EXP(3,y1)),q(x1,s(y1)))";
    if (state == "r" && leaf_ok.count(in)) {
      leaf_ok[in] = true;
      leaves_exact = leaves_exact && rhs == in;
    }
  }
  const bool leaves = leaves_exact && leaf_ok["0"] && leaf_ok["1"] && leaf_ok["2"];

  OracleResult r = oracle_decide(store, {&f.mtt, &*f.axiom}, {&e.mtt, &e.axiom}, nullptr,
                                 EnumBudget{4, 5'000'000});
  const double s = seconds_since(t0);
  const bool ok = q_rule && leaves && r.agree && !r.truncated && s < 30;
  return {ok, std::string("q-rule ") + (q_rule ? "ok" : "missing") + ", r leaf rules " +
                  (leaves ? "ok" : "wrong") + ", oracle " + (r.agree ? "agrees" : "differs") +
                  " on " + std::to_string(r.checked) + " inputs" +
                  (r.truncated ? " (truncated)" : "") + ", " + fmt_seconds(s)};
}

Conjunction conj_of(TermStore& store, const std::vector<Equation>& eqs) {
  return reduce(store, eqs);
}

Outcome criterion4() {
  SymbolTable sy;
  TermStore store(sy);
  SpecFile f = load(sy, "psi.mtt");
  sy.ensure_vars(2);
  const Dta d = dta_analyze(sy, trivial_dta(sy, f.mtt.sigma));
  AnnotatedMtt ann = product_annotate(sy, f.mtt, *f.axiom, d);
  EquivEngine engine(store, ann, ann, d);
  const StateId q = *ann.mtt.find_state("q");

  const TermId z = store.leaf(sy.var_z());
  const TermId y1 = store.leaf(sy.var_y(1));
  const TermId y2 = store.leaf(sy.var_y(2));
  const SymbolId h = *sy.find("h", SymbolClass::DeltaIn);
  const TermId b = store.leaf(*sy.find("b", SymbolClass::DeltaIn));
  const TermId hb = store.intern(h, {b});
  const TermId hy2 = store.intern(h, {y2});
  // The printed rounds, transcribed equation by equation.
  std::vector<Conjunction> want{
      conj_of(store, {{z, y1}}),
      conj_of(store, {{z, y1}, {z, hy2}}),
      conj_of(store, {{z, y1}, {z, hy2}, {z, hb}}),
      conj_of(store, {{z, y1}, {b, b}, {hy2, hb}, {z, hb}}),
  };
  const Conjunction printed_reduced = conj_of(store, {{y2, b}, {y1, hb}, {z, hb}});
  bool ok = want[2] == printed_reduced && want[3] == printed_reduced;
  std::string detail;
  std::vector<Conjunction> got;
  for (int k = 0; k < 4; ++k) {
    engine.step();
    got.push_back(engine.psi_a(q));
    const bool same = got.back() == want[k];
    ok = ok && same;
    detail += "Psi" + std::to_string(k) + (same ? " ok" : " = " + render_conjunction(store, got.back())) +
              "; ";
  }
  ok = ok && got[2] == got[3];
  return {ok, detail + "Psi2 == Psi3: " + (got[2] == got[3] ? "yes" : "no")};
}

Outcome criterion5() {
  SymbolTable sy;
  TermStore store(sy);
  SpecFile fa = load(sy, "phi_q.mtt");
  SpecFile fb = load(sy, "phi_q2.mtt");
  SpecFile fbad = load(sy, "phi_q2_bad.mtt");
  SpecFile fd = load(sy, "phi.dta");
  sy.ensure_vars(2);
  const Dta d = dta_analyze(sy, *fd.dta);
  AnnotatedMtt a = product_annotate(sy, fa.mtt, *fa.axiom, d);
  AnnotatedMtt b = product_annotate(sy, fb.mtt, *fb.axiom, d);
  EquivEngine engine(store, a, b, d);
  const StateId q = *a.mtt.find_state("q");
  const StateId q2 = *b.mtt.find_state("q'");
  engine.seed(q, q2);
  engine.step();
  const Conjunction phi0 = engine.phi(q, q2);
  engine.step();
  const Conjunction phi1 = engine.phi(q, q2);

  auto y = [&](std::uint32_t j, bool primed) { return store.leaf(sy.var_y(j, primed)); };
  const Conjunction want0 = reduce(store, std::vector<Equation>{{y(1, false), y(2, true)},
                                                                {y(2, false), y(1, true)}});
  const bool rounds_ok = phi0 == want0 && phi1 == phi0;

  DecideOptions opts;
  Decision good = decide(sy, store, fa.mtt, *fa.axiom, fb.mtt, *fb.axiom, *fd.dta, opts);
  opts.search_counterexample = false;
  Decision bad = decide(sy, store, fa.mtt, *fa.axiom, fbad.mtt, *fbad.axiom, *fd.dta, opts);
  OracleResult r = oracle_decide(store, {&fa.mtt, &*fa.axiom}, {&fbad.mtt, &*fbad.axiom}, &d,
                                 EnumBudget{2, 1000});
  const bool cex = !r.agree && r.counterexample && store.height(*r.counterexample) <= 2;
  const bool ok = rounds_ok && good.verdict == Verdict::Equivalent &&
                  bad.verdict == Verdict::Inequivalent && cex;
  return {ok, "Phi0 = " + render_conjunction(store, phi0) + ", Phi1 " +
                  (phi1 == phi0 ? "==" : "!=") + " Phi0, satisfying axiom: " +
                  (good.verdict == Verdict::Equivalent ? "Equivalent" : "Inequivalent") +
                  ", violating axiom: " +
                  (bad.verdict == Verdict::Equivalent ? "Equivalent" : "Inequivalent") +
                  ", oracle counterexample " +
                  (r.counterexample ? render_term(store, *r.counterexample) : "none")};
}

// Φ^(h) against exhaustive comparison on dom(b) trees of height at most h,
// where a leaf has height 0 (h + 1 levels of nodes).
struct PhiCheck {
  std::size_t state_pairs = 0;
  std::size_t checks = 0;
  std::size_t sound_violations = 0;     // Φ true but outputs differ
  std::size_t complete_violations = 0;  // outputs agree but Φ false
  std::size_t explained = 0;  // of those: the outputs differ on a higher input
  // Stabilized Φ against all enumerated heights.
  std::size_t limit_sound_violations = 0;
  std::size_t limit_unconfirmed = 0;
  std::size_t max_rounds = 0;
  bool bound_exceeded = false;
  std::string first_mismatch;
};

PhiCheck run_phi_check(bool stabilize_only) {
  SymbolTable sy;
  TermStore store(sy);
  cp::Alphabet alpha = cp::standard_alphabet(sy);
  sy.ensure_vars(2);
  std::vector<EarliestPair> pairs = earliest_corpus(sy, store, alpha, 200);
  PhiCheck out;
  const std::vector<TermId> values = cp::all_trees(store, alpha.delta_in, 2);
  for (const EarliestPair& p : pairs) {
    EngineOptions eo;
    eo.full = true;
    EquivEngine engine(store, p.a, p.b, p.dta, eo);
    std::vector<std::vector<Conjunction>> phi_h(engine.phi_keys().size());
    if (!stabilize_only) {
      for (int h = 0; h <= 3; ++h) {
        engine.step();
        for (std::size_t k = 0; k < engine.phi_keys().size(); ++k) {
          phi_h[k].push_back(engine.phi(engine.phi_keys()[k].first, engine.phi_keys()[k].second));
        }
      }
    }
    std::vector<Conjunction> phi_final;
    try {
      const std::size_t rounds = engine.stabilize();
      for (const auto& [qa, qb] : engine.phi_keys()) phi_final.push_back(engine.phi(qa, qb));
      out.max_rounds = std::max(out.max_rounds, rounds);
      if (rounds > engine.bound()) out.bound_exceeded = true;
    } catch (const InternalError&) {
      out.bound_exceeded = true;
      continue;
    }
    out.state_pairs += engine.phi_keys().size();
    if (stabilize_only) continue;

    auto vectors = [&](std::uint32_t l) {
      std::vector<std::vector<TermId>> vs{{}};
      for (std::uint32_t j = 0; j < l; ++j) {
        std::vector<std::vector<TermId>> next;
        for (const auto& v : vs) {
          for (TermId t : values) {
            next.push_back(v);
            next.back().push_back(t);
          }
        }
        vs = std::move(next);
      }
      return vs;
    };
    const auto va = vectors(p.a.mtt.param_count);
    const auto vb = vectors(p.b.mtt.param_count);
    for (std::size_t k = 0; k < engine.phi_keys().size(); ++k) {
      const auto [qa, qb] = engine.phi_keys()[k];
      const DtaState b = p.a.pi[raw(qa)];
      const std::vector<TermId> inputs = enumerate_inputs(store, p.dta, b, EnumBudget{4, 1'000'000});
      for (const auto& ta : va) {
        for (const auto& tb : vb) {
          // Height (leaf = 0) of the first input on which the outputs differ.
          std::uint32_t first_diff = 99;
          for (TermId t : inputs) {
            if (evaluate_state(p.a.mtt, store, qa, t, ta) != evaluate_state(p.b.mtt, store, qb, t, tb)) {
              first_diff = store.height(t) - 1;
              break;
            }
          }
          Assignment sigma;
          for (std::uint32_t j = 0; j < ta.size(); ++j) sigma.emplace_back(sy.var_y(j + 1), ta[j]);
          for (std::uint32_t j = 0; j < tb.size(); ++j) sigma.emplace_back(sy.var_y(j + 1, true), tb[j]);
          const bool limit = eval_ground(store, phi_final[k], sigma);
          if (limit && first_diff != 99) ++out.limit_sound_violations;
          if (!limit && first_diff == 99) ++out.limit_unconfirmed;
          for (std::uint32_t h = 0; h <= 3; ++h) {
            const bool phi = eval_ground(store, phi_h[k][h], sigma);
            const bool agree = first_diff > h;
            ++out.checks;
            if (phi && !agree) ++out.sound_violations;
            if (!phi && agree) {
              ++out.complete_violations;
              if (first_diff != 99) ++out.explained;
            }
            if (phi != agree && out.first_mismatch.empty()) {
              out.first_mismatch = p.a.mtt.state_name(qa) + "/" + p.b.mtt.state_name(qb) +
                                   " h=" + std::to_string(h) + " Phi=" +
                                   render_conjunction(store, phi_h[k][h]);
            }
          }
        }
      }
    }
  }
  return out;
}

Outcome criterion6() {
  const auto t0 = Clock::now();
  PhiCheck c = run_phi_check(false);
  const double s = seconds_since(t0);
  const std::size_t mismatches = c.sound_violations + c.complete_violations;
  const bool ok = c.state_pairs >= 200 && mismatches == 0 && s < 300;
  std::string detail = std::to_string(c.state_pairs) + " state pairs, " +
                       std::to_string(c.checks) + " checks, " + std::to_string(mismatches) +
                       " mismatches (Phi true but outputs differ: " +
                       std::to_string(c.sound_violations) + ", outputs agree but Phi false: " +
                       std::to_string(c.complete_violations) + ", of which " +
                       std::to_string(c.explained) +
                       " differ on a higher input); stabilized Phi: " +
                       std::to_string(c.limit_sound_violations) + " true with differing outputs, " +
                       std::to_string(c.limit_unconfirmed) +
                       " false without a difference up to height 3; " + fmt_seconds(s);
  if (!c.first_mismatch.empty()) detail += "; first: " + c.first_mismatch;
  return {ok, detail};
}

struct DecisionRun {
  std::size_t cases = 0;
  std::size_t equivalent = 0;
  std::size_t confirmed_cap4 = 0;
  std::size_t confirmed_cap6 = 0;
  std::size_t confirmed_cap8 = 0;
  std::size_t outstanding = 0;
  std::size_t wrong_equivalent = 0;  // Equivalent but the oracle found a difference
  std::size_t max_rounds = 0;
  bool bound_exceeded = false;
  std::string first_problem;
};

DecisionRun run_decisions(bool with_oracle) {
  SymbolTable sy;
  TermStore store(sy);
  cp::Alphabet alpha = cp::standard_alphabet(sy);
  std::vector<PairCase> cases = decision_corpus(sy, alpha, 500);
  DecisionRun out;
  DecideOptions opts;
  opts.search_counterexample = false;
  cp::Rng sample_rng(cp::seed_from_env(7001) + 1);
  for (const PairCase& c : cases) {
    Decision d;
    try {
      d = decide(sy, store, c.a.mtt, c.a.axiom, c.b.mtt, c.b.axiom, c.dta, opts);
    } catch (const InternalError& e) {
      out.bound_exceeded = true;
      if (out.first_problem.empty()) out.first_problem = e.what();
      continue;
    }
    ++out.cases;
    out.max_rounds = std::max(out.max_rounds, d.rounds);
    if (d.rounds > d.bound) out.bound_exceeded = true;
    if (!with_oracle) continue;
    const Dta dd = dta_analyze(sy, c.dta);
    auto oracle = [&](std::uint32_t h, std::uint64_t n) {
      return oracle_decide(store, {&c.a.mtt, &c.a.axiom}, {&c.b.mtt, &c.b.axiom}, &dd,
                           EnumBudget{h, n});
    };
    OracleResult r4 = oracle(4, 1'000'000);
    if (d.verdict == Verdict::Equivalent) {
      ++out.equivalent;
      if (!r4.agree) {
        ++out.wrong_equivalent;
        if (out.first_problem.empty()) {
          out.first_problem = c.kind + " pair decided Equivalent, differs on " +
                              render_term(store, *r4.counterexample);
        }
      }
      continue;
    }
    if (!r4.agree) {
      ++out.confirmed_cap4;
      continue;
    }
    if (!oracle(6, 2'000'000).agree) {
      ++out.confirmed_cap6;
      continue;
    }
    // Exhaustive enumeration stops well short of height 8 on this alphabet, so
    // cap 8 also tries random inputs up to that height.
    if (!oracle(8, 4'000'000).agree ||
        cp::sample_difference(store, c.a.mtt, c.a.axiom, c.b.mtt, c.b.axiom, dd, 8, 200'000,
                                                     sample_rng)) {
      ++out.confirmed_cap8;
      continue;
    }
    ++out.outstanding;
    if (out.first_problem.empty()) {
      out.first_problem = c.kind + " pair decided Inequivalent (" + d.failing_check +
                          ") without an oracle counterexample";
    }
  }
  return out;
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  DecisionRun r = run_decisions(true);
  const double s = seconds_since(t0);
  const bool ok = r.cases >= 500 && r.wrong_equivalent == 0 && r.outstanding == 0 &&
                  !r.bound_exceeded && s < 900;
  std::string detail = std::to_string(r.cases) + " pairs, " + std::to_string(r.equivalent) +
                       " equivalent (" + std::to_string(r.wrong_equivalent) +
                       " contradicted), inequivalent confirmed at cap 4/6/8: " +
                       std::to_string(r.confirmed_cap4) + "/" + std::to_string(r.confirmed_cap6) +
                       "/" + std::to_string(r.confirmed_cap8) + ", outstanding " +
                       std::to_string(r.outstanding) + ", " + fmt_seconds(s);
  if (!r.first_problem.empty()) detail += "; " + r.first_problem;
  return {ok, detail};
}

Outcome criterion8() {
  PhiCheck p = run_phi_check(true);
  DecisionRun d = run_decisions(false);
  const bool ok = !p.bound_exceeded && !d.bound_exceeded;
  return {ok, "max stabilization round " + std::to_string(std::max(p.max_rounds, d.max_rounds)) +
                  " over " + std::to_string(p.state_pairs) + " Phi state pairs and " +
                  std::to_string(d.cases) + " decisions; bound exceeded: " +
                  (ok ? "never" : "yes")};
}

Outcome criterion9() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;

  {
    // y1 = a, y_i = f(y_{i-1}, y_{i-1}): the solved form has exponentially
    // large trees that must stay shared.
    SymbolTable sy;
    TermStore store(sy);
    const SymbolId a = sy.intern("a", 0, SymbolClass::DeltaIn);
    const SymbolId f = sy.intern("f", 2, SymbolClass::DeltaIn);
    const std::uint32_t n = 20;
    sy.ensure_vars(n);
    std::vector<Equation> eqs{{store.leaf(sy.var_y(1)), store.leaf(a)}};
    for (std::uint32_t i = 2; i <= n; ++i) {
      const TermId prev = store.leaf(sy.var_y(i - 1));
      eqs.push_back({store.leaf(sy.var_y(i)), store.intern(f, {prev, prev})});
    }
    const std::size_t before = store.size();
    Conjunction c = reduce(store, eqs);
    const std::size_t growth = store.size() - before;
    const auto top = c.lookup(sy.var_y(n));
    const bool chain_ok = top && store.tree_size(*top) == (std::uint64_t{1} << n) - 1 &&
                          growth <= 4 * n;
    ok = ok && chain_ok;
    detail += "chain n=20: store +" + std::to_string(growth) + " nodes, y20 unfolds to " +
              (top ? std::to_string(store.tree_size(*top)) : "?") + "; ";
  }

  {
    SymbolTable sy;
    TermStore store(sy);
    const SymbolId f = sy.intern("f", 1, SymbolClass::SigmaInput);
    const SymbolId a = sy.intern("a", 0, SymbolClass::SigmaInput);
    const SymbolId o = sy.intern("o", 1, SymbolClass::DeltaOut);
    const SymbolId k = sy.intern("k", 2, SymbolClass::DeltaIn);
    const SymbolId e = sy.intern("e", 0, SymbolClass::DeltaIn);
    Mtt m;
    m.param_count = 1;
    m.sigma = {f, a};
    m.delta_out = {o};
    m.delta_in = {k, e};
    const StateId q = m.add_state("q");
    m.add_rule({q, f, {1},
                RhsNode::make_call(q, 1, {RhsNode::make_symbol(k, {RhsNode::make_param(1),
                                                                   RhsNode::make_param(1)})}),
                {}});
    m.add_rule({q, a, {1}, RhsNode::make_symbol(o, {RhsNode::make_param(1)}), {}});
    Axiom ax{RhsNode::make_call(q, 1, {RhsNode::make_symbol(e)}), {}};

    std::vector<std::size_t> growth;
    TermId out{};
    for (std::uint32_t n : {10u, 20u, 30u}) {
      TermStore s2(sy);
      TermId t = s2.leaf(a);
      for (std::uint32_t i = 0; i < n; ++i) t = s2.intern(f, {t});
      const std::size_t before = s2.size();
      out = evaluate_axiom(m, s2, ax, t);
      growth.push_back(s2.size() - before);
      if (n == 30) ok = ok && s2.tree_size(out) == (std::uint64_t{1} << 31);
    }
    const bool linear = growth[2] <= 3 * 30 + 4 && growth[2] - growth[1] == growth[1] - growth[0];
    ok = ok && linear;

    Mtt m2 = m;
    Mtt renamed;
    renamed.param_count = 1;
    renamed.sigma = m.sigma;
    renamed.delta_out = m.delta_out;
    renamed.delta_in = m.delta_in;
    const StateId p = renamed.add_state("p");
    for (Rule r : m.rules()) {
      r.state = p;
      if (r.rhs.is_call()) r.rhs.state = p;
      renamed.add_rule(r);
    }
    Axiom ax2 = ax;
    ax2.rhs.state = p;
    Decision d = decide(sy, store, m, ax, renamed, ax2, trivial_dta(sy, m.sigma));
    ok = ok && d.verdict == Verdict::Equivalent;
    detail += "accumulator depth 10/20/30: store +" + std::to_string(growth[0]) + "/" +
              std::to_string(growth[1]) + "/" + std::to_string(growth[2]) + " nodes, decide " +
              (d.verdict == Verdict::Equivalent ? "Equivalent" : "Inequivalent") + "; ";
  }
  const double s = seconds_since(t0);
  ok = ok && s < 2.0;
  return {ok, detail + fmt_seconds(s)};
}

Outcome criterion10() {
  const auto t0 = Clock::now();
  std::string detail;
  bool ok = true;
  {
    SymbolTable sy;
    TermStore store(sy);
    SpecFile f = load(sy, "mtern.mtt");
    SpecFile hand = load(sy, "app.dta");
    Dta dom = domain_dta(sy, f.mtt, *f.axiom);
    DtaEquivResult r = dta_equiv(store, dom, *hand.dta);
    ok = ok && r.equivalent;
    detail += std::string("domain vs hand-written automaton: ") +
              (r.equivalent ? "equivalent" : "differ") +
              (r.witness ? " on " + render_term(store, *r.witness) + " (accepted only by the " +
                               (r.witness_in_first ? "computed domain" : "hand-written automaton") + ")"
                         : std::string()) +
              "; ";
  }
  {
    SymbolTable sy;
    TermStore store(sy);
    cp::Alphabet alpha = cp::standard_alphabet(sy);
    cp::Rng rng(cp::seed_from_env(10001));
    std::size_t agree = 0, total = 0, equivalent = 0;
    std::string first;
    while (total < 100) {
      cp::Transducer base = cp::random_mtt(sy, alpha, rng);
      cp::Transducer a = cp::drop_rules(base, rng, 0.2);
      cp::Transducer b;
      const std::uint32_t kind = std::uniform_int_distribution<std::uint32_t>(0, 3)(rng);
      if (kind == 0) {
        b = cp::rename_states(a, "_r");
      } else if (kind == 1) {
        b = cp::drop_rules(base, rng, 0.2);
      } else if (kind == 2) {
        b = cp::mutate(sy, alpha, a, rng);
      } else {
        b = cp::permute_params(a, rng);
      }
      ++total;
      PartialDecision pd = decide_partial(sy, store, a.mtt, a.axiom, b.mtt, b.axiom);
      bool match = false;
      OracleResult r = oracle_decide(store, {&a.mtt, &a.axiom}, {&b.mtt, &b.axiom}, nullptr,
                                     EnumBudget{4, 1'000'000});
      if (pd.verdict == Verdict::Equivalent) {
        ++equivalent;
        match = r.agree;
      } else {
        match = !r.agree;
        if (!match) {
          r = oracle_decide(store, {&a.mtt, &a.axiom}, {&b.mtt, &b.axiom}, nullptr,
                            EnumBudget{6, 2'000'000});
          match = !r.agree;
        }
        if (!match) {
          const Dta triv = dta_analyze(sy, trivial_dta(sy, alpha.sigma));
          if (auto t = cp::sample_difference(store, a.mtt, a.axiom, b.mtt, b.axiom, triv, 8,
                                             200'000, rng)) {
            r.agree = false;
            r.counterexample = *t;
            match = true;
          }
        }
      }
      if (match) {
        ++agree;
      } else if (first.empty()) {
        first = std::string("verdict ") +
                (pd.verdict == Verdict::Equivalent ? "Equivalent" : "Inequivalent") +
                " but oracle " + (r.agree ? "agrees" : "differs");
      }
    }
    ok = ok && agree == total;
    detail += "partial pairs: " + std::to_string(agree) + "/" + std::to_string(total) +
              " match the oracle (" + std::to_string(equivalent) + " equivalent)";
    if (!first.empty()) detail += ", first mismatch: " + first;
  }
  return {ok, detail + "; " + fmt_seconds(seconds_since(t0))};
}

Outcome criterion11() {
  SymbolTable sy;
  TermStore store(sy);
  SpecFile a = load(sy, "dewey.mtt");
  SpecFile b = load(sy, "dewey_renamed.mtt");
  TermId in = parse_term(sy, store, "f(f(a,a),a)", SymbolClass::SigmaInput);
  const std::string got = render_term(store, evaluate_axiom(a.mtt, store, *a.axiom, in));
  const std::string want = "f(f(a(1(1(e))),a(2(1(e)))),a(2(e)))";
  Decision d = decide(sy, store, a.mtt, *a.axiom, b.mtt, *b.axiom, trivial_dta(sy, a.mtt.sigma));
  const bool ok = got == want && d.verdict == Verdict::Equivalent;
  return {ok, "output " + got + ", renamed copy " +
                  (d.verdict == Verdict::Equivalent ? "Equivalent" : "Inequivalent")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{
      criterion1, criterion2, criterion3, criterion4,  criterion5, criterion6,
      criterion7, criterion8, criterion9, criterion10, criterion11};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::stoi(argv[i]));
  if (which.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) which.push_back(i);
  }
  int failed = 0;
  for (int n : which) {
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "no criterion " << n << '\n';
      return 2;
    }
    Outcome o;
    try {
      o = criteria[n - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail
              << std::endl;
    if (!o.pass) ++failed;
  }
  return failed ? 1 : 0;
}
