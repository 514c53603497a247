// Serial versus OpenMP oracle on a transducer compared with itself, so that
// every enumerated input is evaluated.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "mtteq/errors.hpp"
#include "mtteq/oracle.hpp"
#include "mtteq/spec_io.hpp"

using namespace mtteq;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Oracle benchmark: serial against parallel comparison");
  std::string path = std::string(MTTEQ_DATA_DIR) + "/mtern_total.mtt";
  std::uint32_t height = 4;
  std::uint64_t count = 2'000'000;
  int reps = 3;
  app.add_option("file", path, "Transducer file with an axiom");
  app.add_option("--height", height, "Input height bound in nodes");
  app.add_option("--max-count", count, "Input count bound");
  app.add_option("--reps", reps, "Repetitions; the best time is reported");
  CLI11_PARSE(app, argc, argv);

  try {
    SymbolTable sy;
    SpecFile f = load_spec(sy, path);
    if (!f.axiom) throw Error(path + ": no axiom");
    const EnumBudget budget{height, count};
    const Transduction t{&f.mtt, &*f.axiom};

    OracleResult rs;
    OracleResult rp;
    const double serial = best_of(reps, [&] {
      TermStore store(sy);
      rs = oracle_decide_serial(store, t, t, nullptr, budget);
    });
    const double parallel = best_of(reps, [&] {
      TermStore store(sy);
      rp = oracle_decide_parallel(store, t, t, nullptr, budget);
    });
    std::printf("file      %s\n", path.c_str());
    std::printf("inputs    %llu%s\n", static_cast<unsigned long long>(rs.checked),
                rs.truncated ? " (truncated)" : "");
    std::printf("threads   %d\n", omp_get_max_threads());
    std::printf("serial    %.3f s\n", serial);
    std::printf("parallel  %.3f s\n", parallel);
    std::printf("speedup   %.2fx\n", serial / parallel);
    if (rs.agree != rp.agree) {
      std::fprintf(stderr, "serial and parallel results differ\n");
      return 1;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
