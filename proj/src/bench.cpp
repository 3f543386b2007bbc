#include "symcons/bench.hpp"

#include <chrono>
#include <random>
#include <stdexcept>

#include "symcons/calculus.hpp"
#include "symcons/codegen.hpp"
#include "symcons/vm.hpp"

namespace symcons {

namespace {

// Self-contained draws so generated systems do not depend on the standard
// library's distribution implementations.
double rand_u01(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

double rand_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * rand_u01(rng);
}

std::uint32_t rand_below(std::mt19937_64& rng, std::uint32_t n) {
  return std::uint32_t(rng() % n);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  return x;
}

std::uint64_t ns(std::chrono::steady_clock::duration d) {
  return std::uint64_t(std::chrono::duration_cast<std::chrono::nanoseconds>(d).count());
}

}  // namespace

GeneratedSystem gen_reaction(int n, std::uint64_t seed, Session& session) {
  if (n < 2) throw std::invalid_argument("reaction family needs N >= 2");

  GeneratedSystem sys;
  sys.variables.reserve(std::size_t(n));
  for (int i = 1; i <= n; ++i) sys.variables.push_back(session.variable("s" + std::to_string(i)));

  const std::size_t species = std::size_t(n);
  std::vector<std::vector<Term>> production(species);
  std::vector<std::vector<Term>> decay(species);

  std::mt19937_64 rng(mix_seed(seed, 0xbc4));
  const int reactions = 4 * n;
  for (int r = 0; r < reactions; ++r) {
    const std::uint32_t type = rand_below(rng, 4);
    const std::uint32_t i = rand_below(rng, std::uint32_t(n));
    const std::uint32_t j = rand_below(rng, std::uint32_t(n));
    const double k = rand_range(rng, 0.1, 10.0);
    const double big_k = rand_range(rng, 0.1, 10.0);

    // Built twice on purpose: the production and decay slots each construct
    // their own copy of the same rate expression.
    auto build_rate = [&]() -> Term {
      const Term& si = sys.variables[i];
      switch (type) {
        case 0:  // mass-action binding k*si*sj
          return session.mul({session.constant(k), si, sys.variables[j]});
        case 1:  // unary conversion k*si
          return session.mul({session.constant(k), si});
        case 2:  // Michaelis-Menten V*si/(K+si)
          return session.div(session.mul({session.constant(k), si}),
                             session.add({session.constant(big_k), si}));
        default:  // Hill si^2/(K^2+si^2)
          return session.div(
              session.pow(si, session.constant(2.0)),
              session.add({session.constant(big_k * big_k),
                           session.pow(si, session.constant(2.0))}));
      }
    };

    const std::uint32_t produced = rand_below(rng, std::uint32_t(n));
    const std::uint32_t decayed = rand_below(rng, std::uint32_t(n));
    production[produced].push_back(build_rate());
    decay[decayed].push_back(build_rate());
  }

  auto sum_terms = [&](std::vector<Term>& terms) -> Term {
    if (terms.empty()) return session.constant(0.0);
    if (terms.size() == 1) return terms[0];
    return session.add(std::move(terms));
  };

  sys.equations.reserve(std::size_t(n));
  for (int s = 0; s < n; ++s) {
    Term prod = sum_terms(production[std::size_t(s)]);
    if (decay[std::size_t(s)].empty()) {
      sys.equations.push_back(prod);
    } else {
      sys.equations.push_back(session.sub(prod, sum_terms(decay[std::size_t(s)])));
    }
  }
  return sys;
}

GeneratedSystem gen_region(int n, std::uint64_t seed, Session& session) {
  if (n < 1) throw std::invalid_argument("region family needs N >= 1");

  GeneratedSystem sys;
  Term p = session.variable("p");
  Term temp = session.variable("T");
  sys.variables = {p, temp};

  // Small coefficient pool so later functions mostly reuse subterms the
  // interner has already seen.
  std::mt19937_64 pool_rng(mix_seed(seed, 0x1f97));
  std::vector<double> pool;
  for (int i = 0; i < 16; ++i) {
    double c = rand_range(pool_rng, 0.5, 5.0);
    if (pool_rng() & 1) c = -c;
    pool.push_back(c);
  }

  sys.equations.reserve(std::size_t(n));
  for (int f = 0; f < n; ++f) {
    // Per-function stream: function f is identical for every N that includes it.
    std::mt19937_64 rng(mix_seed(seed, 0x2000 + std::uint64_t(f)));
    std::vector<Term> terms;
    terms.reserve(12);
    for (int t = 0; t < 12; ++t) {
      const double c = pool[rand_below(rng, 16)];
      const double ie = double(rand_below(rng, 6));  // I in [0,5]
      const double je = double(rand_below(rng, 9));  // J in [0,8]
      Term base_p = session.div(p, session.constant(16.53));
      Term base_t =
          session.sub(session.div(temp, session.constant(1386.0)), session.constant(0.5));
      terms.push_back(session.mul({session.constant(c),
                                   session.pow(base_p, session.constant(ie)),
                                   session.pow(base_t, session.constant(je))}));
    }
    sys.equations.push_back(session.add(std::move(terms)));
  }
  return sys;
}

std::vector<BenchRecord> run_bench(const ProblemSpec& spec) {
  std::vector<BenchRecord> records;
  const std::string family = spec.family == Family::Reaction ? "reaction" : "region";
  const std::string mode = spec.mode == Mode::Consing ? "consing" : "naive";

  for (int rep = 0; rep < spec.repeats; ++rep) {
    Session session(spec.mode);
    GeneratedSystem sys = spec.family == Family::Reaction
                              ? gen_reaction(spec.size, spec.seed, session)
                              : gen_region(spec.size, spec.seed, session);

    auto record = [&](const std::string& stage) {
      BenchRecord r;
      r.family = family;
      r.size = spec.size;
      r.mode = mode;
      r.stage = stage;
      r.repeat = rep;
      return r;
    };

    // Stage 1: symbolic Jacobian.
    JacobianResult jac = jacobian(sys.equations, sys.variables, session);
    {
      BenchRecord r = record("jacobian");
      r.time_ns = ns(jac.build_time);
      r.allocated_nodes = jac.allocated_nodes;
      r.distinct_nodes = jac.distinct_nodes;
      const InternStats& st = session.intern_stats();
      r.intern_hit_rate = st.lookups ? double(st.hits) / double(st.lookups) : 0.0;
      records.push_back(std::move(r));
    }

    std::vector<Term> flat;  // row-major
    for (const auto& row : jac.entries)
      for (const Term& e : row) flat.push_back(e);

    // Stage 2: code generation. Naive mode lacks DAG awareness and re-emits
    // per tree occurrence.
    StraightLineProgram slp;
    {
      const auto t0 = std::chrono::steady_clock::now();
      slp = spec.mode == Mode::Consing ? emit_dag(flat, sys.variables)
                                       : emit_tree(flat, sys.variables);
      BenchRecord r = record("codegen");
      r.time_ns = ns(std::chrono::steady_clock::now() - t0);
      r.instructions = slp.instructions.size();
      records.push_back(std::move(r));
    }

    // Stage 3: validation + register-file allocation (compile analog).
    PreparedProgram pp = prepare(std::move(slp));
    {
      BenchRecord r = record("prepare");
      r.time_ns = ns(pp.prep_time);
      records.push_back(std::move(r));
    }

    // Stage 4: evaluate over 1000 seeded positive inputs (shared across modes).
    {
      std::mt19937_64 rng(mix_seed(spec.seed, 0xe7a1 + std::uint64_t(rep)));
      const std::size_t nvars = sys.variables.size();
      std::vector<std::vector<double>> inputs(1000, std::vector<double>(nvars));
      for (auto& point : inputs)
        for (double& x : point) x = rand_range(rng, 0.1, 2.0);

      const auto t0 = std::chrono::steady_clock::now();
      double sink = 0.0;
      for (const auto& point : inputs) {
        RunResult rr = run(pp, point);
        sink += rr.values.empty() ? 0.0 : rr.values.front();
      }
      BenchRecord r = record("evaluate");
      r.time_ns = ns(std::chrono::steady_clock::now() - t0);
      // keep the loop from being optimized out
      if (sink == 0.12345) r.time_ns += 1;
      records.push_back(std::move(r));
    }
  }
  return records;
}

std::string demo_fig1() {
  Session s;
  Term a = s.variable("a");
  Term b = s.variable("b");
  Term c = s.variable("c");
  Term d = s.variable("d");
  Term x = s.mul({s.add({a, b}), s.add({c, d})});
  Term y = s.mul({s.sub(a, b), s.sub(c, d)});
  Term z = s.mul({s.add({a, b}), s.sub(c, d)});
  Term w = s.mul({s.sub(a, b), s.add({c, d})});
  Term term = s.div(s.add({x, y}), s.sub(z, w));

  NodeCounts counts = count_nodes(term);
  std::vector<Term> roots{term};
  std::vector<Term> params{a, b, c, d};
  StraightLineProgram dag = emit_dag(roots, params);
  StraightLineProgram tree = emit_tree(roots, params);
  RunResult value = run(prepare(dag), std::vector<double>{1.0, 2.0, 3.0, 4.0});

  std::string out;
  out += "term: " + to_string(term) + "\n";
  out += "distinct=" + std::to_string(counts.distinct) +
         " occurrences=" + std::to_string(counts.occurrences) + "\n";
  out += "dag_instructions=" + std::to_string(dag.instructions.size()) +
         " tree_instructions=" + std::to_string(tree.instructions.size()) + "\n";
  out += "value=" + format_double(value.values.front()) + "\n";
  return out;
}

void write_csv(std::ostream& out, std::span<const BenchRecord> records) {
  out << kCsvHeader << "\n";
  for (const BenchRecord& r : records) {
    out << r.family << ',' << r.size << ',' << r.mode << ',' << r.stage << ',' << r.repeat
        << ',' << r.time_ns << ',' << r.allocated_nodes << ',' << r.distinct_nodes << ','
        << r.instructions << ',' << format_double(r.intern_hit_rate) << "\n";
  }
}

}  // namespace symcons
