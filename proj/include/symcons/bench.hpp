#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "symcons/term.hpp"

namespace symcons {

enum class Family : std::uint8_t { Reaction, Region };

struct ProblemSpec {
  Family family = Family::Reaction;
  int size = 2;
  std::uint64_t seed = 0;
  Mode mode = Mode::Consing;
  int repeats = 1;
};

/// One CSV row. Stage-appropriate fields are populated, the rest stay zero.
struct BenchRecord {
  std::string family;
  int size = 0;
  std::string mode;
  std::string stage;  // jacobian | codegen | prepare | evaluate
  int repeat = 0;
  std::uint64_t time_ns = 0;
  std::uint64_t allocated_nodes = 0;
  std::uint64_t distinct_nodes = 0;
  std::uint64_t instructions = 0;
  double intern_hit_rate = 0.0;
};

inline constexpr const char* kCsvHeader =
    "family,size,mode,stage,repeat,time_ns,allocated_nodes,distinct_nodes,instructions,"
    "intern_hit_rate";

struct GeneratedSystem {
  std::vector<Term> equations;
  std::vector<Term> variables;
};

/// Seeded reaction-network family: N species, 4N reactions drawn from
/// mass-action binding, unary conversion, Michaelis-Menten V*s/(K+s), and
/// Hill s^2/(K^2+s^2). Each reaction's rate expression is built twice, once
/// for the production slot and once for the decay slot, so there are genuine
/// duplicates to collapse. Identical (N, seed) yields structurally identical
/// systems across runs and modes. Requires N >= 2.
GeneratedSystem gen_reaction(int n, std::uint64_t seed, Session& session);

/// Seeded property-polynomial family: variables (p, T); N functions, each a
/// sum of 12 terms c*(p/16.53)^I*(T/1386 - 0.5)^J with I in [0,5], J in [0,8]
/// and c drawn from a small seeded pool. The shared bases and repeated powers
/// are where consing collapses duplicates across functions. Requires N >= 1.
GeneratedSystem gen_region(int n, std::uint64_t seed, Session& session);

/// Runs the four benchmark stages (jacobian, codegen, prepare, evaluate) for
/// each repeat in a fresh session, returning one record per stage per repeat.
/// Naive mode lowers with the tree emitter, Consing mode with the DAG emitter.
std::vector<BenchRecord> run_bench(const ProblemSpec& spec);

/// Builds the shared-products demo expression (a+b)(c+d)+(a-b)(c-d) over
/// (a+b)(c-d)-(a-b)(c+d) and reports its node counts, both emitters'
/// instruction counts, and its value at (1,2,3,4).
std::string demo_fig1();

void write_csv(std::ostream& out, std::span<const BenchRecord> records);

}  // namespace symcons
