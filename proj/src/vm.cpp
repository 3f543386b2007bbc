#include "symcons/vm.hpp"

#include <cmath>

namespace symcons {

namespace {

void check_ref(const ValueRef& r, std::size_t instr_index, std::size_t param_count) {
  switch (r.tag) {
    case ValueRef::Tag::Reg:
      if (r.index >= instr_index)
        throw ValidationError(instr_index, "register t" + std::to_string(r.index) +
                                              " used before definition");
      break;
    case ValueRef::Tag::Param:
      if (r.index >= param_count)
        throw ValidationError(instr_index, "parameter slot out of range");
      break;
    case ValueRef::Tag::Imm:
      break;
  }
}

double fetch(const ValueRef& r, const std::vector<double>& regs,
             std::span<const double> inputs) {
  switch (r.tag) {
    case ValueRef::Tag::Reg: return regs[r.index];
    case ValueRef::Tag::Param: return inputs[r.index];
    case ValueRef::Tag::Imm: return r.imm;
  }
  return 0.0;
}

double apply_op(OpCode op, double a, double b) {
  switch (op) {
    case OpCode::Add: return a + b;
    case OpCode::Sub: return a - b;
    case OpCode::Mul: return a * b;
    case OpCode::Div: return a / b;
    case OpCode::Pow: return std::pow(a, b);
    case OpCode::Sin: return std::sin(a);
    case OpCode::Cos: return std::cos(a);
    case OpCode::Exp: return std::exp(a);
    case OpCode::Log: return std::log(a);
    case OpCode::Sqrt: return std::sqrt(a);
  }
  return 0.0;
}

}  // namespace

PreparedProgram prepare(StraightLineProgram p) {
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < p.instructions.size(); ++i) {
    const Instruction& ins = p.instructions[i];
    if (ins.dest != i)
      throw ValidationError(i, "dest register must equal instruction index");
    check_ref(ins.lhs, i, p.params.size());
    if (!op_is_unary(ins.op)) check_ref(ins.rhs, i, p.params.size());
  }
  for (const ValueRef& out : p.outputs)
    check_ref(out, p.instructions.size(), p.params.size());

  PreparedProgram pp;
  pp.register_count = p.instructions.size();
  pp.program = std::move(p);
  pp.prep_time = std::chrono::steady_clock::now() - t0;
  return pp;
}

RunResult run(const PreparedProgram& pp, std::span<const double> inputs) {
  const StraightLineProgram& p = pp.program;
  if (inputs.size() != p.params.size()) throw ArityMismatch(p.params.size(), inputs.size());

  RunResult result;
  std::vector<double> regs(pp.register_count);
  for (const Instruction& ins : p.instructions) {
    double a = fetch(ins.lhs, regs, inputs);
    double b = op_is_unary(ins.op) ? 0.0 : fetch(ins.rhs, regs, inputs);
    double v = apply_op(ins.op, a, b);
    if (!std::isfinite(v)) result.non_finite = true;
    regs[ins.dest] = v;
  }
  result.values.reserve(p.outputs.size());
  for (const ValueRef& out : p.outputs) {
    double v = fetch(out, regs, inputs);
    if (!std::isfinite(v)) result.non_finite = true;
    result.values.push_back(v);
  }
  return result;
}

namespace {

double eval_rec(const Term& t, const std::unordered_map<std::string, double>& env,
                std::unordered_map<std::uint64_t, double>& memo) {
  if (auto it = memo.find(t.id().value); it != memo.end()) return it->second;
  double v = 0.0;
  auto ops = t.operands();
  switch (t.kind()) {
    case Kind::Const:
      v = t.value();
      break;
    case Kind::Var: {
      auto it = env.find(t.name());
      if (it == env.end()) throw UnboundVariable(t.name());
      v = it->second;
      break;
    }
    case Kind::Add:
    case Kind::Mul: {
      // Same left fold as the lowering, for bitwise agreement.
      v = eval_rec(ops[0], env, memo);
      for (std::size_t i = 1; i < ops.size(); ++i) {
        double o = eval_rec(ops[i], env, memo);
        v = (t.kind() == Kind::Add) ? v + o : v * o;
      }
      break;
    }
    case Kind::Sub: v = eval_rec(ops[0], env, memo) - eval_rec(ops[1], env, memo); break;
    case Kind::Div: v = eval_rec(ops[0], env, memo) / eval_rec(ops[1], env, memo); break;
    case Kind::Pow:
      v = std::pow(eval_rec(ops[0], env, memo), eval_rec(ops[1], env, memo));
      break;
    case Kind::Call: {
      double a = eval_rec(ops[0], env, memo);
      switch (t.func()) {
        case Func::Sin: v = std::sin(a); break;
        case Func::Cos: v = std::cos(a); break;
        case Func::Exp: v = std::exp(a); break;
        case Func::Log: v = std::log(a); break;
        case Func::Sqrt: v = std::sqrt(a); break;
      }
      break;
    }
  }
  memo.emplace(t.id().value, v);
  return v;
}

}  // namespace

double eval_tree(const Term& root, const std::unordered_map<std::string, double>& env) {
  std::unordered_map<std::uint64_t, double> memo;
  return eval_rec(root, env, memo);
}

}  // namespace symcons
