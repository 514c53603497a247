#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "mtteq/applications.hpp"
#include "mtteq/errors.hpp"
#include "mtteq/spec_io.hpp"

using namespace mtteq;
namespace cp = mtteq::corpus;

namespace {

SpecFile load(SymbolTable& sy, const std::string& name) {
  return load_spec(sy, std::string(MTTEQ_DATA_DIR) + "/" + name);
}

bool defined(const Mtt& m, TermStore& store, const Axiom& a, TermId t) {
  try {
    (void)evaluate_axiom(m, store, a, t);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

}  // namespace

TEST_CASE("totalize adds bottom rules only where rules are missing") {
  SymbolTable sy;
  TermStore store(sy);
  SpecFile f = load(sy, "mtern.mtt");
  Mtt t = totalize(sy, f.mtt, "⊥");
  CHECK(validate(sy, t, Totality::Total).ok());
  CHECK(t.rules().size() == f.mtt.state_count() * f.mtt.sigma.size());
  TermId ok = parse_term(sy, store, "g(f(1,2),0)", SymbolClass::SigmaInput);
  CHECK(evaluate_axiom(t, store, *f.axiom, ok) == evaluate_axiom(f.mtt, store, *f.axiom, ok));
  TermId bad = parse_term(sy, store, "g(0,g(0,0))", SymbolClass::SigmaInput);
  CHECK(render_term(store, evaluate_axiom(t, store, *f.axiom, bad)).find("⊥") != std::string::npos);
}

TEST_CASE("domain automaton accepts exactly the defined inputs") {
  SymbolTable sy;
  TermStore store(sy);
  SpecFile f = load(sy, "mtern.mtt");
  const Dta d = dta_analyze(sy, domain_dta(sy, f.mtt, *f.axiom));
  std::size_t accepted = 0;
  for (TermId t : enumerate_inputs(store, f.mtt.sigma, EnumBudget{3, 100'000})) {
    const bool in = dta_accepts(store, d, d.initial, t);
    CHECK(in == defined(f.mtt, store, *f.axiom, t));
    accepted += in;
  }
  CHECK(accepted > 0);
}

TEST_CASE("domain automaton on random partial transducers") {
  SymbolTable sy;
  TermStore store(sy);
  cp::Alphabet alpha = cp::standard_alphabet(sy);
  cp::Rng rng(cp::seed_from_env(505));
  int nonempty = 0;
  for (int i = 0; i < 40; ++i) {
    cp::Transducer t = cp::drop_rules(cp::random_mtt(sy, alpha, rng), rng, 0.3);
    const Dta raw_d = domain_dta(sy, t.mtt, t.axiom);
    Dta d;
    try {
      d = dta_analyze(sy, raw_d);
    } catch (const EmptyDomainError&) {
      for (TermId u : enumerate_inputs(store, alpha.sigma, EnumBudget{3, 10'000})) {
        CHECK_FALSE(defined(t.mtt, store, t.axiom, u));
      }
      continue;
    }
    ++nonempty;
    for (TermId u : enumerate_inputs(store, alpha.sigma, EnumBudget{3, 10'000})) {
      CHECK(dta_accepts(store, d, d.initial, u) == defined(t.mtt, store, t.axiom, u));
    }
  }
  CHECK(nonempty > 0);
}

TEST_CASE("automaton equivalence") {
  SymbolTable sy;
  TermStore store(sy);
  SpecFile f = load(sy, "app.dta");
  const Dta& d = *f.dta;
  CHECK(dta_equiv(store, d, d).equivalent);

  const Dta any = trivial_dta(sy, d.sigma);
  DtaEquivResult r = dta_equiv(store, d, any);
  CHECK_FALSE(r.equivalent);
  REQUIRE(r.witness.has_value());
  CHECK(render_term(store, *r.witness) == "0");
  CHECK_FALSE(r.witness_in_first);

  // Same language with the digit states split in two.
  SpecFile g = parse_spec(sy, R"(
sigma { g/2 f/2 0/0 1/0 2/0 }
dta {
  states top left right
  init top
  trans top(g) -> (left, right)
  trans left(f) -> (left, right)
  trans right(f) -> (right, left)
  for i in {0 1 2}: trans left(i) -> ()
  for i in {0 1 2}: trans right(i) -> ()
}
)");
  CHECK(dta_equiv(store, d, *g.dta).equivalent);
}

TEST_CASE("partial transducers") {
  SymbolTable sy;
  TermStore store(sy);
  SpecFile f = load(sy, "mtern.mtt");
  SpecFile total = load(sy, "mtern_total.mtt");
  PartialDecision same = decide_partial(sy, store, f.mtt, *f.axiom, f.mtt, *f.axiom);
  CHECK(same.verdict == Verdict::Equivalent);
  CHECK_FALSE(same.domains_differ);

  PartialDecision diff = decide_partial(sy, store, f.mtt, *f.axiom, total.mtt, *total.axiom);
  CHECK(diff.verdict == Verdict::Inequivalent);
  CHECK(diff.domains_differ);
  REQUIRE(diff.domain_witness.has_value());
  CHECK_FALSE(defined(f.mtt, store, *f.axiom, *diff.domain_witness));
  CHECK(defined(total.mtt, store, *total.axiom, *diff.domain_witness));
}

TEST_CASE("look-ahead removal preserves the translations") {
  SymbolTable sy;
  TermStore store(sy);
  SpecFile a = load(sy, "la_first.mtt");
  SpecFile b = load(sy, "la_second.mtt");
  RemovedLookahead r = remove_lookahead(sy, *a.lookahead, *b.lookahead);
  CHECK(validate(sy, r.m1, Totality::Partial).ok());
  const Dta d = dta_analyze(sy, r.dta);
  Decision dec = decide(sy, store, r.m1, r.a1, r.m2, r.a2, r.dta);
  CHECK(dec.verdict == Verdict::Equivalent);
  CHECK(oracle_decide_lookahead(store, *a.lookahead, *b.lookahead, EnumBudget{5, 10'000}).agree);

  // Annotated inputs accepted by the automaton carry the original translation.
  std::size_t seen = 0;
  for (TermId t : enumerate_inputs(store, d, d.initial, EnumBudget{4, 1000})) {
    // Strip the annotation: "g<..|..>" -> "g".
    std::string text = render_term(store, t);
    std::string plain;
    bool skip = false;
    for (char c : text) {
      if (c == '"') continue;
      if (c == '<') skip = true;
      if (!skip) plain += c;
      if (c == '>') skip = false;
    }
    TermId u = parse_term(sy, store, plain, SymbolClass::SigmaInput);
    const std::string want = render_term(store, evaluate_lookahead(store, *a.lookahead, u));
    const std::string got = render_term(store, evaluate_axiom(r.m1, store, r.a1, t));
    CHECK(got == want);
    ++seen;
  }
  CHECK(seen > 3);
}

TEST_CASE("look-ahead removal separates different translations") {
  SymbolTable sy;
  TermStore store(sy);
  SpecFile a = load(sy, "la_first.mtt");
  SpecFile b = parse_spec(sy, R"(
sigma { g/1 a/0 b/0 }
delta_o { A/1 B/1 E/0 }
delta_i { }
params 0
lookahead {
  states ea eb
  trans a -> ea
  trans b -> eb
  trans g(ea) -> ea
  trans g(eb) -> eb
}
rule q(g(x1)) <ea> = A(q(x1))
rule q(g(x1)) <eb> = A(q(x1))
rule q(a) = E
rule q(b) = E
axiom = q(x1)
)");
  RemovedLookahead r = remove_lookahead(sy, *a.lookahead, *b.lookahead);
  Decision dec = decide(sy, store, r.m1, r.a1, r.m2, r.a2, r.dta);
  CHECK(dec.verdict == Verdict::Inequivalent);
  CHECK_FALSE(oracle_decide_lookahead(store, *a.lookahead, *b.lookahead, EnumBudget{3, 1000}).agree);
}
