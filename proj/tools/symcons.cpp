#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "symcons/bench.hpp"
#include "symcons/calculus.hpp"
#include "symcons/codegen.hpp"
#include "symcons/term.hpp"

namespace {

constexpr int kExitArgError = 2;
constexpr int kExitValidationError = 3;

symcons::Family parse_family(const std::string& s) {
  return s == "reaction" ? symcons::Family::Reaction : symcons::Family::Region;
}

symcons::Mode parse_mode(const std::string& s) {
  return s == "consing" ? symcons::Mode::Consing : symcons::Mode::Naive;
}

void check_size(symcons::Family family, int size) {
  const int min = family == symcons::Family::Reaction ? 2 : 1;
  if (size < min) throw std::invalid_argument("size must be >= " + std::to_string(min));
}

int run_bench_cmd(const std::string& family_s, int size, std::uint64_t seed,
                  const std::string& mode_s, int repeats, const std::string& out_path) {
  symcons::ProblemSpec spec;
  spec.family = parse_family(family_s);
  spec.size = size;
  spec.seed = seed;
  spec.mode = parse_mode(mode_s);
  spec.repeats = repeats;
  check_size(spec.family, size);
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");

  auto records = symcons::run_bench(spec);
  if (out_path.empty()) {
    symcons::write_csv(std::cout, records);
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot open " << out_path << "\n";
      return kExitValidationError;
    }
    symcons::write_csv(out, records);
  }

  // best-of-repeats summary, desk-scale timings are noisy
  for (const char* stage : {"jacobian", "codegen", "prepare", "evaluate"}) {
    std::uint64_t best = UINT64_MAX;
    for (const auto& r : records)
      if (r.stage == stage && r.time_ns < best) best = r.time_ns;
    std::cerr << stage << " best_ns=" << best << "\n";
  }
  return 0;
}

int run_codegen_cmd(const std::string& family_s, int size, std::uint64_t seed,
                    const std::string& mode_s, const std::string& out_path) {
  symcons::Family family = parse_family(family_s);
  symcons::Mode mode = parse_mode(mode_s);
  check_size(family, size);

  symcons::Session session(mode);
  symcons::GeneratedSystem sys = family == symcons::Family::Reaction
                                     ? symcons::gen_reaction(size, seed, session)
                                     : symcons::gen_region(size, seed, session);
  symcons::JacobianResult jac = symcons::jacobian(sys.equations, sys.variables, session);
  std::vector<symcons::Term> flat;
  for (const auto& row : jac.entries)
    for (const auto& e : row) flat.push_back(e);
  symcons::StraightLineProgram slp = mode == symcons::Mode::Consing
                                         ? symcons::emit_dag(flat, sys.variables)
                                         : symcons::emit_tree(flat, sys.variables);
  std::string source = symcons::render_source(slp, family_s + "_jacobian");

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot open " << out_path << "\n";
    return kExitValidationError;
  }
  out << source;
  std::cerr << "instructions=" << slp.instructions.size()
            << " outputs=" << slp.outputs.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symcons: hash-consed symbolic kernel benchmark harness"};
  app.require_subcommand(1);

  std::string family = "reaction";
  int size = 10;
  std::uint64_t seed = 0;
  std::string mode = "consing";
  int repeats = 1;
  std::string out_path;

  auto* bench = app.add_subcommand("bench", "run the four-stage benchmark, emit CSV");
  bench->add_option("--family", family, "reaction|region")
      ->check(CLI::IsMember({"reaction", "region"}));
  bench->add_option("--size", size, "problem size N");
  bench->add_option("--seed", seed, "generator seed");
  bench->add_option("--mode", mode, "consing|naive")
      ->check(CLI::IsMember({"consing", "naive"}));
  bench->add_option("--repeats", repeats, "repeat count");
  bench->add_option("--out", out_path, "CSV output file (default: stdout)");

  auto* demo = app.add_subcommand("demo", "built-in demos");
  auto* fig1 = demo->add_subcommand("fig1", "shared-products expression walkthrough");

  std::string emit_path;
  auto* codegen = app.add_subcommand("codegen", "render Jacobian source for a problem");
  codegen->add_option("--family", family, "reaction|region")
      ->check(CLI::IsMember({"reaction", "region"}));
  codegen->add_option("--size", size, "problem size N");
  codegen->add_option("--seed", seed, "generator seed");
  codegen->add_option("--mode", mode, "consing|naive")
      ->check(CLI::IsMember({"consing", "naive"}));
  codegen->add_option("--emit-source", emit_path, "output source file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitArgError;
  }

  try {
    if (bench->parsed()) return run_bench_cmd(family, size, seed, mode, repeats, out_path);
    if (demo->parsed()) {
      if (fig1->parsed()) {
        std::cout << symcons::demo_fig1();
        return 0;
      }
      std::cerr << "unknown demo\n";
      return kExitArgError;
    }
    if (codegen->parsed()) return run_codegen_cmd(family, size, seed, mode, emit_path);
  } catch (const symcons::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidationError;
  }
  return 0;
}
