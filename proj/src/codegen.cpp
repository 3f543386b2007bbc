#include "symcons/codegen.hpp"

#include <algorithm>
#include <unordered_map>

namespace symcons {

bool op_is_unary(OpCode op) { return op >= OpCode::Sin; }

std::string_view op_name(OpCode op) {
  switch (op) {
    case OpCode::Add: return "add";
    case OpCode::Sub: return "sub";
    case OpCode::Mul: return "mul";
    case OpCode::Div: return "div";
    case OpCode::Pow: return "pow";
    case OpCode::Sin: return "sin";
    case OpCode::Cos: return "cos";
    case OpCode::Exp: return "exp";
    case OpCode::Log: return "log";
    case OpCode::Sqrt: return "sqrt";
  }
  return "?";
}

namespace {

OpCode op_for(const Term& t) {
  switch (t.kind()) {
    case Kind::Add: return OpCode::Add;
    case Kind::Sub: return OpCode::Sub;
    case Kind::Mul: return OpCode::Mul;
    case Kind::Div: return OpCode::Div;
    case Kind::Pow: return OpCode::Pow;
    case Kind::Call:
      switch (t.func()) {
        case Func::Sin: return OpCode::Sin;
        case Func::Cos: return OpCode::Cos;
        case Func::Exp: return OpCode::Exp;
        case Func::Log: return OpCode::Log;
        case Func::Sqrt: return OpCode::Sqrt;
      }
      break;
    default:
      break;
  }
  throw std::invalid_argument("not an operator node");
}

struct Emitter {
  StraightLineProgram prog;
  std::unordered_map<std::string, std::uint32_t> param_slot;

  explicit Emitter(std::span<const Term> params) {
    for (const Term& p : params) {
      if (!p.valid() || p.kind() != Kind::Var)
        throw std::invalid_argument("params must be Var nodes");
      param_slot.emplace(p.name(), std::uint32_t(prog.params.size()));
      prog.params.push_back(p.name());
    }
  }

  ValueRef leaf(const Term& t) {
    if (t.kind() == Kind::Const) return ValueRef::immediate(t.value());
    auto it = param_slot.find(t.name());
    if (it == param_slot.end()) throw UnboundVariable(t.name());
    return ValueRef::param(it->second);
  }

  ValueRef push(OpCode op, ValueRef lhs, ValueRef rhs) {
    std::uint32_t dest = std::uint32_t(prog.instructions.size());
    prog.instructions.push_back({dest, op, lhs, rhs});
    return ValueRef::reg(dest);
  }

  /// Lowers one operator node given its operand refs; n-ary Add/Mul become a
  /// left-folded chain of binary instructions.
  ValueRef lower(const Term& t, std::span<const ValueRef> args) {
    ++prog.source_term_count;
    OpCode op = op_for(t);
    if (op_is_unary(op)) return push(op, args[0], ValueRef{});
    ValueRef acc = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) acc = push(op, acc, args[i]);
    return acc;
  }
};

}  // namespace

StraightLineProgram emit_dag(std::span<const Term> roots, std::span<const Term> params) {
  Emitter em(params);

  // Reachable set, then ascending-id order.
  std::unordered_map<std::uint64_t, Term> reachable;
  std::vector<Term> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    Term t = std::move(stack.back());
    stack.pop_back();
    if (!reachable.emplace(t.id().value, t).second) continue;
    for (const Term& op : t.operands()) stack.push_back(op);
  }
  std::vector<Term> order;
  order.reserve(reachable.size());
  for (auto& [id, t] : reachable) order.push_back(std::move(t));
  std::sort(order.begin(), order.end(),
            [](const Term& a, const Term& b) { return a.id() < b.id(); });

  std::unordered_map<std::uint64_t, ValueRef> refs;
  std::vector<ValueRef> args;
  for (const Term& t : order) {
    if (t.kind() == Kind::Const || t.kind() == Kind::Var) {
      refs.emplace(t.id().value, em.leaf(t));
      continue;
    }
    args.clear();
    for (const Term& op : t.operands()) args.push_back(refs.at(op.id().value));
    refs.emplace(t.id().value, em.lower(t, args));
  }

  for (const Term& r : roots) em.prog.outputs.push_back(refs.at(r.id().value));
  return std::move(em.prog);
}

namespace {

ValueRef emit_tree_rec(const Term& t, Emitter& em) {
  if (t.kind() == Kind::Const || t.kind() == Kind::Var) return em.leaf(t);
  std::vector<ValueRef> args;
  args.reserve(t.operands().size());
  for (const Term& op : t.operands()) args.push_back(emit_tree_rec(op, em));
  return em.lower(t, args);
}

}  // namespace

StraightLineProgram emit_tree(std::span<const Term> roots, std::span<const Term> params) {
  Emitter em(params);
  for (const Term& r : roots) em.prog.outputs.push_back(emit_tree_rec(r, em));
  return std::move(em.prog);
}

namespace {

std::string ref_str(const ValueRef& r) {
  switch (r.tag) {
    case ValueRef::Tag::Reg: return "t" + std::to_string(r.index);
    case ValueRef::Tag::Param: return "p" + std::to_string(r.index);
    case ValueRef::Tag::Imm: return format_double(r.imm);
  }
  return "?";
}

const char* infix_op(OpCode op) {
  switch (op) {
    case OpCode::Add: return " + ";
    case OpCode::Sub: return " - ";
    case OpCode::Mul: return " * ";
    case OpCode::Div: return " / ";
    default: return nullptr;
  }
}

}  // namespace

std::string render_source(const StraightLineProgram& p, std::string_view name) {
  std::string out = "// params:";
  for (const auto& pn : p.params) out += " " + pn;
  out += "\nvoid " + std::string(name) + "(";
  for (std::size_t i = 0; i < p.params.size(); ++i)
    out += "double p" + std::to_string(i) + ", ";
  out += "double* out) {\n";
  for (const Instruction& ins : p.instructions) {
    out += "    double t" + std::to_string(ins.dest) + " = ";
    if (op_is_unary(ins.op)) {
      out += std::string(op_name(ins.op)) + "(" + ref_str(ins.lhs) + ")";
    } else if (const char* sym = infix_op(ins.op)) {
      out += ref_str(ins.lhs) + sym + ref_str(ins.rhs);
    } else {  // Pow
      out += "pow(" + ref_str(ins.lhs) + ", " + ref_str(ins.rhs) + ")";
    }
    out += ";\n";
  }
  for (std::size_t i = 0; i < p.outputs.size(); ++i)
    out += "    out[" + std::to_string(i) + "] = " + ref_str(p.outputs[i]) + ";\n";
  out += "}\n";
  return out;
}

std::string program_text(const StraightLineProgram& p) {
  std::string out = "params";
  for (const auto& pn : p.params) out += " " + pn;
  out += "\n";
  for (const Instruction& ins : p.instructions) {
    out += "t" + std::to_string(ins.dest) + " = " + std::string(op_name(ins.op)) + " " +
           ref_str(ins.lhs);
    if (!op_is_unary(ins.op)) out += " " + ref_str(ins.rhs);
    out += "\n";
  }
  for (std::size_t i = 0; i < p.outputs.size(); ++i)
    out += "out " + std::to_string(i) + " = " + ref_str(p.outputs[i]) + "\n";
  return out;
}

}  // namespace symcons
