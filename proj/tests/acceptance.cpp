// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support/expr_gen.hpp"
#include "support/oracles.hpp"
#include "symcons/bench.hpp"
#include "symcons/calculus.hpp"
#include "symcons/codegen.hpp"
#include "symcons/term.hpp"
#include "symcons/vm.hpp"

using namespace symcons;
using testsupport::build_recipe;
using testsupport::central_diff;
using testsupport::oracle_deep_equal;
using testsupport::rel_err;

namespace {

int failures = 0;

struct Check {
  std::string name;
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

void criterion(int index, const std::string& name, const std::function<void(Check&)>& body) {
  Check check;
  check.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.require(false, std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream line;
  line << (check.ok ? "PASS" : "FAIL") << " criterion " << index << ": " << name << " ("
       << secs << " s)";
  if (!check.ok) line << " -- " << check.detail;
  std::cout << line.str() << std::endl;
  if (!check.ok) ++failures;
}

std::vector<std::string> csv_lines_without_time(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  write_csv(out, records);
  std::vector<std::string> lines;
  std::istringstream in(out.str());
  std::string line;
  while (std::getline(in, line)) {
    // blank the time_ns column (6th)
    std::size_t start = 0;
    for (int i = 0; i < 5; ++i) start = line.find(',', start) + 1;
    std::size_t end = line.find(',', start);
    if (end != std::string::npos) line = line.substr(0, start) + line.substr(end + 1);
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

int main() {
  criterion(1, "maximal sharing over 1000 random recipes", [](Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    Session s;
    std::vector<Term> roots;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      Term first = build_recipe(s, seed);
      Term second = build_recipe(s, seed);
      c.require(first.id() == second.id(), "rebuild changed root id");
      roots.push_back(first);
    }
    std::size_t sample = 0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      for (std::size_t j = i; j < roots.size(); ++j) {
        bool fast = struct_eq(roots[i], roots[j], s);
        bool deep = deep_equal(roots[i], roots[j]);
        c.require(fast == deep, "struct_eq disagrees with deep comparison");
        if (((i + j) % 97) == 0 && sample < 2000) {
          // spot-check against the independent recursive oracle too
          c.require(fast == oracle_deep_equal(roots[i], roots[j]),
                    "struct_eq disagrees with oracle comparison");
          ++sample;
        }
      }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(secs < 10.0, "runtime exceeded 10 s");
  });

  criterion(2, "shared-products fixture counts and value", [](Check& c) {
    Session s;
    Term a = s.variable("a"), b = s.variable("b"), cc = s.variable("c"), d = s.variable("d");
    Term x = s.mul({s.add({a, b}), s.add({cc, d})});
    Term y = s.mul({s.sub(a, b), s.sub(cc, d)});
    Term z = s.mul({s.add({a, b}), s.sub(cc, d)});
    Term w = s.mul({s.sub(a, b), s.add({cc, d})});
    Term term = s.div(s.add({x, y}), s.sub(z, w));

    NodeCounts counts = count_nodes(term);
    c.require(counts.distinct == 15, "distinct != 15");
    c.require(counts.occurrences == 31, "occurrences != 31");
    c.require(testsupport::oracle_occurrences(term) == 31, "occurrence oracle mismatch");
    c.require(testsupport::reachable_ids({term}).size() == 15, "traversal oracle mismatch");

    std::vector<Term> roots{term};
    std::vector<Term> params{a, b, cc, d};
    StraightLineProgram dag = emit_dag(roots, params);
    StraightLineProgram tree = emit_tree(roots, params);
    c.require(dag.instructions.size() == 11, "dag instructions != 11");
    c.require(tree.instructions.size() == 15, "tree instructions != 15");
    RunResult r = run(prepare(dag), std::vector<double>{1, 2, 3, 4});
    c.require(r.values.size() == 1 && r.values[0] == 5.5, "value != 5.5");
  });

  criterion(3, "duplicate-subterm quartic derivative", [](Check& c) {
    Session s;
    auto q = testsupport::build_quartic(s);
    Term df = derivative(q.f, q.x, s);
    for (double pt : {0.1, 0.3, 0.7}) {
      std::unordered_map<std::string, double> env{{"x", pt}};
      double got = eval_tree(df, env);
      double want = central_diff(q.f, "x", env, 1e-6);
      c.require(rel_err(got, want) <= 1e-6, "finite-difference mismatch");
    }
    c.require(testsupport::count_struct_equal(df, q.one_minus_2x) == 1,
              "(1-2x) not shared as a single node");
    c.require(testsupport::count_struct_equal(df, q.poly) == 1,
              "(1-8x+8x^2) not shared as a single node");
  });

  criterion(4, "differentiation corpus vs finite differences (500 expressions)", [](Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    Session s;
    std::mt19937_64 point_rng(4242);
    int accepted = 0;
    std::uint64_t seed = 50000;
    while (accepted < 500) {
      Term t = build_recipe(s, seed++, 8);
      Term dx = derivative(t, s.variable("x0"), s);
      int points = 0;
      int tries = 0;
      while (points < 5 && tries < 40) {
        ++tries;
        std::unordered_map<std::string, double> env;
        for (const auto& name : testsupport::recipe_var_names())
          env[name] = testsupport::uniform(point_rng, 0.25, 1.75);
        double value = eval_tree(t, env);
        if (!std::isfinite(value)) continue;
        double want = central_diff(t, "x0", env, 1e-6);
        if (!std::isfinite(want) || std::abs(want) > 1e6) continue;
        // cancellation in the difference quotient grows with |f|; keep only
        // points where roundoff stays well below the comparison tolerance
        if (std::abs(value) > 1e3 * std::max(1.0, std::abs(want))) continue;
        double check = central_diff(t, "x0", env, 4e-6);
        if (rel_err(want, check) > 1e-8) continue;
        double got = eval_tree(dx, env);
        c.require(rel_err(got, want) <= 1e-6, "derivative off at seed " + std::to_string(seed - 1));
        ++points;
      }
      if (points == 5) ++accepted;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(secs < 60.0, "runtime exceeded 60 s");
  });

  criterion(5, "pipeline equivalence over 1000 (expression, input) pairs", [](Check& c) {
    Session s;
    std::vector<Term> params{s.variable("x0"), s.variable("x1"), s.variable("x2")};
    std::mt19937_64 rng(777);
    for (std::uint64_t seed = 60000; seed < 61000; ++seed) {
      Term t = build_recipe(s, seed);
      std::vector<Term> roots{t};
      PreparedProgram dag = prepare(emit_dag(roots, params));
      PreparedProgram tree = prepare(emit_tree(roots, params));
      std::vector<double> inputs;
      std::unordered_map<std::string, double> env;
      for (const Term& v : params) {
        double val = testsupport::uniform(rng, 0.2, 1.8);
        inputs.push_back(val);
        env[v.name()] = val;
      }
      double a = run(dag, inputs).values[0];
      double b = run(tree, inputs).values[0];
      double e = eval_tree(t, env);
      c.require(a == b && a == e, "pipeline results differ bitwise");
    }
  });

  criterion(6, "interner reclamation matches a reachability traversal", [](Check& c) {
    Session s;
    Term a = s.variable("a");
    Term b = s.variable("b");
    std::vector<Term> kept;
    {
      std::vector<Term> all;
      for (int i = 0; i < 100; ++i)
        all.push_back(s.add({a, s.mul({s.constant(double(i + 2)), b})}));
      for (int i = 0; i < 10; ++i) kept.push_back(all[std::size_t(i * 9)]);
    }
    kept.push_back(a);
    kept.push_back(b);
    std::uint64_t live_before = s.intern_stats().live;
    auto reachable = testsupport::reachable_ids(kept);
    TermId sample_dead_key;  // re-intern one purged structure afterwards
    std::size_t purged = s.purge();
    c.require(purged == live_before - reachable.size(),
              "purge count != unreachable count by traversal");
    c.require(s.intern_stats().live == reachable.size(), "live count mismatch");
    for (const Term& k : kept) {
      // nothing reachable from held handles was removed
      std::vector<Term> stack{k};
      while (!stack.empty()) {
        Term t = std::move(stack.back());
        stack.pop_back();
        c.require(t.valid(), "reachable node lost");
        for (const Term& op : t.operands()) stack.push_back(op);
      }
    }
    Term fresh = s.add({a, s.mul({s.constant(3.0), b})});  // i=1 was not kept
    c.require(!reachable.contains(fresh.id().value), "re-intern of purged key reused an id");
    (void)sample_dead_key;
  });

  criterion(7, "sharing benchmark orderings", [](Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int n : {10, 40}) {
      ProblemSpec consing{Family::Reaction, n, 1234, Mode::Consing, 1};
      ProblemSpec naive{Family::Reaction, n, 1234, Mode::Naive, 1};
      auto cr = run_bench(consing);
      auto nr = run_bench(naive);
      c.require(cr[0].distinct_nodes < nr[0].allocated_nodes,
                "consing distinct_nodes !< naive allocated_nodes (reaction)");
      c.require(cr[1].instructions < nr[1].instructions,
                "consing instructions !< naive instructions (reaction)");
    }
    double prev_ratio = 0.0;
    for (int n : {1, 5, 10, 20}) {
      ProblemSpec consing{Family::Region, n, 1234, Mode::Consing, 1};
      ProblemSpec naive{Family::Region, n, 1234, Mode::Naive, 1};
      auto cr = run_bench(consing);
      auto nr = run_bench(naive);
      double ratio = double(nr[0].allocated_nodes) / double(cr[0].distinct_nodes);
      c.require(ratio >= prev_ratio, "region sharing ratio decreased at N=" + std::to_string(n));
      prev_ratio = ratio;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(secs < 120.0, "runtime exceeded 2 min");
  });

  criterion(8, "memoized jacobian of duplicated equations", [](Check& c) {
    Session s1;
    Term g1 = build_recipe(s1, 321);
    std::vector<Term> vars1{s1.variable("x0"), s1.variable("x1"), s1.variable("x2")};
    std::vector<Term> one{g1};
    JacobianResult single = jacobian(one, vars1, s1);

    Session s2;
    Term g2 = build_recipe(s2, 321);
    std::vector<Term> vars2{s2.variable("x0"), s2.variable("x1"), s2.variable("x2")};
    std::uint64_t hits_before = s2.diff_memo().hits;
    std::vector<Term> two{g2, g2};
    JacobianResult doubled = jacobian(two, vars2, s2);

    c.require(doubled.allocated_nodes == single.allocated_nodes,
              "second row performed new constructions");
    c.require(s2.diff_memo().hits >= hits_before + vars2.size(),
              "cache hits did not increase per duplicated entry");
  });

  criterion(9, "deterministic CSV and rendered source", [](Check& c) {
    ProblemSpec spec{Family::Region, 5, 77, Mode::Consing, 2};
    auto first = csv_lines_without_time(run_bench(spec));
    auto second = csv_lines_without_time(run_bench(spec));
    c.require(first == second, "CSV differs beyond the time column");

    auto render_once = []() {
      Session s;
      GeneratedSystem sys = gen_region(4, 9, s);
      JacobianResult jac = jacobian(sys.equations, sys.variables, s);
      std::vector<Term> flat;
      for (const auto& row : jac.entries)
        for (const Term& e : row) flat.push_back(e);
      return render_source(emit_dag(flat, sys.variables), "region_jacobian");
    };
    c.require(render_once() == render_once(), "rendered source not byte-identical");
  });

  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: " + std::to_string(failures))
            << std::endl;
  return failures;
}
