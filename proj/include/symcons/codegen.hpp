#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symcons/term.hpp"

namespace symcons {

enum class OpCode : std::uint8_t { Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log, Sqrt };

bool op_is_unary(OpCode op);
std::string_view op_name(OpCode op);

/// Reference to a virtual register, an input parameter slot, or an immediate.
struct ValueRef {
  enum class Tag : std::uint8_t { Reg, Param, Imm };
  Tag tag = Tag::Imm;
  std::uint32_t index = 0;
  double imm = 0.0;

  static ValueRef reg(std::uint32_t i) { return {Tag::Reg, i, 0.0}; }
  static ValueRef param(std::uint32_t i) { return {Tag::Param, i, 0.0}; }
  static ValueRef immediate(double v) { return {Tag::Imm, 0, v}; }
};

/// Single-assignment instruction; dest equals the instruction's position.
/// rhs is ignored for unary opcodes.
struct Instruction {
  std::uint32_t dest = 0;
  OpCode op = OpCode::Add;
  ValueRef lhs;
  ValueRef rhs;
};

struct StraightLineProgram {
  std::vector<std::string> params;  // ordered Var names
  std::vector<Instruction> instructions;
  std::vector<ValueRef> outputs;       // supports multi-output (Jacobians row-major)
  std::size_t source_term_count = 0;   // non-leaf nodes lowered
};

/// Dedup emitter: visits reachable nodes once in ascending id order (a valid
/// topological order, since operand ids precede their users) and emits one
/// instruction per distinct non-leaf node. n-ary Add/Mul lower to left-folded
/// chains of binary instructions in canonical operand order.
/// Throws UnboundVariable if a reachable Var is missing from params.
StraightLineProgram emit_dag(std::span<const Term> roots, std::span<const Term> params);

/// Baseline emitter: one instruction per non-leaf tree occurrence, re-emitting
/// shared nodes on every encounter.
StraightLineProgram emit_tree(std::span<const Term> roots, std::span<const Term> params);

/// Deterministic C-like source: double parameters p0..pN-1 in order, one
/// `double tN = ...;` line per instruction, outputs written to an out-array.
std::string render_source(const StraightLineProgram& p, std::string_view name);

/// Line-based textual serialization, for golden and determinism tests.
std::string program_text(const StraightLineProgram& p);

}  // namespace symcons
