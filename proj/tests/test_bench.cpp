#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "support/oracles.hpp"
#include "symcons/bench.hpp"
#include "symcons/calculus.hpp"
#include "symcons/codegen.hpp"
#include "symcons/vm.hpp"

using namespace symcons;

TEST_CASE("reaction generator is deterministic per seed") {
  Session s;
  GeneratedSystem first = gen_reaction(5, 42, s);
  GeneratedSystem second = gen_reaction(5, 42, s);
  REQUIRE(first.equations.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(first.equations[i].id() == second.equations[i].id());
  CHECK_THROWS_AS(gen_reaction(1, 42, s), std::invalid_argument);
}

TEST_CASE("reaction rates are duplicated across production and decay slots") {
  Session consing;
  GeneratedSystem cs = gen_reaction(2, 7, consing);
  JacobianResult cj = jacobian(cs.equations, cs.variables, consing);

  Session naive(Mode::Naive);
  GeneratedSystem ns = gen_reaction(2, 7, naive);
  JacobianResult nj = jacobian(ns.equations, ns.variables, naive);

  CHECK(cj.distinct_nodes < nj.allocated_nodes);
  for (std::size_t i = 0; i < cs.equations.size(); ++i)
    CHECK(testsupport::oracle_deep_equal(cs.equations[i], ns.equations[i]));
}

TEST_CASE("reaction jacobian matches finite differences of the right-hand side") {
  Session s;
  GeneratedSystem sys = gen_reaction(2, 31, s);
  JacobianResult jac = jacobian(sys.equations, sys.variables, s);
  std::unordered_map<std::string, double> env{{"s1", 0.9}, {"s2", 1.3}};
  for (std::size_t i = 0; i < sys.equations.size(); ++i) {
    for (std::size_t j = 0; j < sys.variables.size(); ++j) {
      double got = eval_tree(jac.entries[i][j], env);
      double want = testsupport::central_diff(sys.equations[i], sys.variables[j].name(),
                                              env, 1e-6);
      CHECK(testsupport::rel_err(got, want) <= 1e-6);
    }
  }
}

TEST_CASE("region family shares the scaled-pressure base maximally") {
  Session s;
  GeneratedSystem sys = gen_region(1, 12, s);
  REQUIRE(sys.equations.size() == 1);
  Term base = s.div(s.variable("p"), s.constant(16.53));
  CHECK(testsupport::count_struct_equal(sys.equations[0], base) <= 1);
  // at least one of the twelve summands uses a positive power of the base
  CHECK(distinct_count(sys.equations) < count_nodes(sys.equations[0]).occurrences);
}

TEST_CASE("region jacobian matches finite differences at (3, 300)") {
  Session s;
  GeneratedSystem sys = gen_region(3, 5, s);
  JacobianResult jac = jacobian(sys.equations, sys.variables, s);
  std::unordered_map<std::string, double> env{{"p", 3.0}, {"T", 300.0}};
  for (std::size_t i = 0; i < sys.equations.size(); ++i) {
    for (std::size_t j = 0; j < sys.variables.size(); ++j) {
      double got = eval_tree(jac.entries[i][j], env);
      double want = testsupport::central_diff(sys.equations[i], sys.variables[j].name(),
                                              env, 1e-6);
      CHECK(testsupport::rel_err(got, want) <= 1e-6);
    }
  }
}

TEST_CASE("region sharing ratio grows with model size") {
  std::vector<double> ratios;
  for (int n : {1, 5, 10, 20}) {
    Session consing;
    GeneratedSystem cs = gen_region(n, 99, consing);
    JacobianResult cj = jacobian(cs.equations, cs.variables, consing);
    Session naive(Mode::Naive);
    GeneratedSystem ns = gen_region(n, 99, naive);
    JacobianResult nj = jacobian(ns.equations, ns.variables, naive);
    ratios.push_back(double(nj.allocated_nodes) / double(cj.distinct_nodes));
  }
  for (std::size_t i = 1; i < ratios.size(); ++i) CHECK(ratios[i] >= ratios[i - 1]);
}

TEST_CASE("run_bench emits one record per stage per repeat") {
  ProblemSpec spec{Family::Reaction, 10, 7, Mode::Consing, 1};
  auto records = run_bench(spec);
  REQUIRE(records.size() == 4);
  CHECK(records[0].stage == "jacobian");
  CHECK(records[1].stage == "codegen");
  CHECK(records[2].stage == "prepare");
  CHECK(records[3].stage == "evaluate");
  CHECK(records[0].distinct_nodes > 0);
  CHECK(records[0].intern_hit_rate > 0.0);
  CHECK(records[1].instructions > 0);

  spec.repeats = 3;
  CHECK(run_bench(spec).size() == 12);
}

TEST_CASE("csv schema is stable") {
  ProblemSpec spec{Family::Region, 2, 7, Mode::Naive, 1};
  auto records = run_bench(spec);
  std::ostringstream out;
  write_csv(out, records);
  std::string text = out.str();
  CHECK(text.rfind("family,size,mode,stage,repeat,time_ns,allocated_nodes,distinct_nodes,"
                   "instructions,intern_hit_rate\n",
                   0) == 0);
  CHECK(text.find("region,2,naive,jacobian,0,") != std::string::npos);
}

TEST_CASE("consing and naive modes evaluate jacobians identically") {
  for (Family family : {Family::Reaction, Family::Region}) {
    Session consing;
    Session naive(Mode::Naive);
    GeneratedSystem cs = family == Family::Reaction ? gen_reaction(4, 3, consing)
                                                    : gen_region(4, 3, consing);
    GeneratedSystem ns = family == Family::Reaction ? gen_reaction(4, 3, naive)
                                                    : gen_region(4, 3, naive);
    JacobianResult cj = jacobian(cs.equations, cs.variables, consing);
    JacobianResult nj = jacobian(ns.equations, ns.variables, naive);
    std::unordered_map<std::string, double> env;
    for (const Term& v : cs.variables) env[v.name()] = 0.5 + 0.25 * double(env.size());
    for (std::size_t i = 0; i < cj.rows(); ++i)
      for (std::size_t j = 0; j < cj.cols(); ++j)
        CHECK(eval_tree(cj.entries[i][j], env) == eval_tree(nj.entries[i][j], env));
  }
}

TEST_CASE("fig1 demo report") {
  std::string report = demo_fig1();
  CHECK(report.find("distinct=15 occurrences=31") != std::string::npos);
  CHECK(report.find("dag_instructions=11 tree_instructions=15") != std::string::npos);
  CHECK(report.find("value=5.5") != std::string::npos);
}
