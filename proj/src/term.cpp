#include "symcons/term.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <unordered_set>

namespace symcons {

namespace {

constexpr std::uint64_t kHashSeed = 0xa24baed4963ee407ULL;  // fixed seed

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ (v * 0xff51afd7ed558ccdULL + 0x2545f4914f6cdd1dULL));
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t double_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

int kind_rank(Kind k) {
  // Canonical total order of commutative operands: Const < Var < Call < Pow
  // < Mul < Div < Sub < Add, then payload, then hash, then id.
  switch (k) {
    case Kind::Const: return 0;
    case Kind::Var: return 1;
    case Kind::Call: return 2;
    case Kind::Pow: return 3;
    case Kind::Mul: return 4;
    case Kind::Div: return 5;
    case Kind::Sub: return 6;
    case Kind::Add: return 7;
  }
  return 8;
}

bool canonical_less(const Term& a, const Term& b) {
  int ra = kind_rank(a.kind());
  int rb = kind_rank(b.kind());
  if (ra != rb) return ra < rb;
  switch (a.kind()) {
    case Kind::Const:
      if (a.value() != b.value()) return a.value() < b.value();
      break;
    case Kind::Var:
      if (a.name() != b.name()) return a.name() < b.name();
      break;
    case Kind::Call:
      if (a.func() != b.func()) return static_cast<int>(a.func()) < static_cast<int>(b.func());
      break;
    default:
      break;
  }
  if (a.hash() != b.hash()) return a.hash() < b.hash();
  return a.id() < b.id();
}

bool payload_equal(const Payload& a, const Payload& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<double>(a)) {
    // Bit equality so that +0.0 and -0.0 stay distinct nodes.
    return double_bits(std::get<double>(a)) == double_bits(std::get<double>(b));
  }
  return a == b;
}

bool node_matches(const TermNode& n, Kind kind, const Payload& payload,
                  std::span<const Term> operands) {
  if (n.kind != kind || n.operands.size() != operands.size()) return false;
  if (!payload_equal(n.payload, payload)) return false;
  for (std::size_t i = 0; i < operands.size(); ++i) {
    if (n.operands[i].id() != operands[i].id()) return false;
  }
  return true;
}

bool is_const(const Term& t, double v) { return t.kind() == Kind::Const && t.value() == v; }

double fold_call(Func f, double v) {
  switch (f) {
    case Func::Sin: return std::sin(v);
    case Func::Cos: return std::cos(v);
    case Func::Exp: return std::exp(v);
    case Func::Log: return std::log(v);
    case Func::Sqrt: return std::sqrt(v);
  }
  return 0;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

std::size_t expected_arity(Kind k) {
  switch (k) {
    case Kind::Const:
    case Kind::Var: return 0;
    case Kind::Call: return 1;
    case Kind::Sub:
    case Kind::Div:
    case Kind::Pow: return 2;
    default: return 0;  // Add/Mul checked separately
  }
}

}  // namespace

std::uint64_t structural_hash(Kind kind, const Payload& payload,
                              std::span<const Term> operands) {
  std::uint64_t h = mix(kHashSeed, static_cast<std::uint64_t>(kind));
  switch (kind) {
    case Kind::Const: h = mix(h, double_bits(std::get<double>(payload))); break;
    case Kind::Var: h = mix(h, fnv1a(std::get<std::string>(payload))); break;
    case Kind::Call: h = mix(h, static_cast<std::uint64_t>(std::get<Func>(payload))); break;
    default: break;
  }
  for (const Term& op : operands) h = mix(h, op.hash());
  return h;
}

Term Session::constant(double value) { return make(Kind::Const, value, {}); }

Term Session::variable(std::string_view name) {
  return make(Kind::Var, std::string(name), {});
}

Term Session::add(std::vector<Term> operands) {
  return make(Kind::Add, std::monostate{}, std::move(operands));
}

Term Session::mul(std::vector<Term> operands) {
  return make(Kind::Mul, std::monostate{}, std::move(operands));
}

Term Session::sub(Term lhs, Term rhs) {
  return make(Kind::Sub, std::monostate{}, {std::move(lhs), std::move(rhs)});
}

Term Session::div(Term num, Term den) {
  return make(Kind::Div, std::monostate{}, {std::move(num), std::move(den)});
}

Term Session::pow(Term base, Term exponent) {
  return make(Kind::Pow, std::monostate{}, {std::move(base), std::move(exponent)});
}

Term Session::apply(Func f, Term arg) { return make(Kind::Call, f, {std::move(arg)}); }

Term Session::make(Kind kind, Payload payload, std::vector<Term> operands) {
  return make_impl(kind, std::move(payload), std::move(operands), std::nullopt);
}

Term Session::make_with_hash(Kind kind, Payload payload, std::vector<Term> operands,
                             std::uint64_t forced_hash) {
  return make_impl(kind, std::move(payload), std::move(operands), forced_hash);
}

Term Session::make_impl(Kind kind, Payload payload, std::vector<Term> operands,
                        std::optional<std::uint64_t> forced_hash) {
  ++constructions_;
  for (const Term& op : operands) {
    if (!op.valid()) throw std::invalid_argument("invalid operand handle");
  }

  switch (kind) {
    case Kind::Const: {
      double v = std::get<double>(payload);
      if (!std::isfinite(v)) throw DomainError("non-finite constant");
      if (!operands.empty()) throw std::invalid_argument("Const takes no operands");
      return intern_node(kind, v, {}, forced_hash);
    }
    case Kind::Var: {
      if (!operands.empty()) throw std::invalid_argument("Var takes no operands");
      return intern_node(kind, std::move(payload), {}, forced_hash);
    }
    case Kind::Add:
    case Kind::Mul:
      return make_nary(kind, std::move(operands), forced_hash);
    case Kind::Sub: {
      if (operands.size() != expected_arity(kind)) throw std::invalid_argument("Sub is binary");
      if (operands[0].kind() == Kind::Const && operands[1].kind() == Kind::Const)
        return constant(operands[0].value() - operands[1].value());
      return intern_node(kind, std::monostate{}, std::move(operands), forced_hash);
    }
    case Kind::Div: {
      if (operands.size() != 2) throw std::invalid_argument("Div is binary");
      if (is_const(operands[1], 0.0)) throw DomainError("division by constant zero");
      if (operands[0].kind() == Kind::Const && operands[1].kind() == Kind::Const)
        return constant(operands[0].value() / operands[1].value());
      return intern_node(kind, std::monostate{}, std::move(operands), forced_hash);
    }
    case Kind::Pow: {
      if (operands.size() != 2) throw std::invalid_argument("Pow is binary");
      const Term& base = operands[0];
      const Term& exp = operands[1];
      if (exp.kind() == Kind::Const) {
        double e = exp.value();
        if (e == 1.0) return base;
        if (e == 0.0) return constant(1.0);
        if (base.kind() == Kind::Const) {
          if (base.value() == 0.0 && e < 0.0)
            throw DomainError("zero base with negative constant exponent");
          return constant(std::pow(base.value(), e));
        }
      }
      return intern_node(kind, std::monostate{}, std::move(operands), forced_hash);
    }
    case Kind::Call: {
      if (operands.size() != 1) throw std::invalid_argument("Call is unary");
      Func f = std::get<Func>(payload);
      if (operands[0].kind() == Kind::Const) {
        double v = operands[0].value();
        if ((f == Func::Log || f == Func::Sqrt) && v < 0.0)
          throw DomainError(std::string(func_name(f)) + " of negative constant");
        return constant(fold_call(f, v));
      }
      return intern_node(kind, f, std::move(operands), forced_hash);
    }
  }
  throw std::invalid_argument("unknown kind");
}

Term Session::make_nary(Kind kind, std::vector<Term> operands,
                        std::optional<std::uint64_t> forced_hash) {
  if (operands.size() < 2)
    throw std::invalid_argument("Add/Mul need at least two operands");

  const bool is_add = (kind == Kind::Add);
  const double identity = is_add ? 0.0 : 1.0;

  // (1) flatten one level; operands are already canonical, so their own
  // operands contain no nested Add-in-Add / Mul-in-Mul.
  std::vector<Term> flat;
  flat.reserve(operands.size());
  for (Term& op : operands) {
    if (op.kind() == kind) {
      for (const Term& inner : op.operands()) flat.push_back(inner);
    } else {
      flat.push_back(std::move(op));
    }
  }

  // (2) fold constants, accumulating in canonical value order so the folded
  // result does not depend on the order operands were supplied.
  std::vector<Term> consts;
  std::vector<Term> rest;
  for (Term& op : flat) {
    (op.kind() == Kind::Const ? consts : rest).push_back(std::move(op));
  }
  std::sort(consts.begin(), consts.end(), canonical_less);
  double acc = identity;
  for (const Term& c : consts) acc = is_add ? acc + c.value() : acc * c.value();
  if (!std::isfinite(acc)) throw DomainError("constant folding overflow");
  if (!is_add && acc == 0.0) return constant(acc);  // Mul with Const 0 absorbs

  // (3) identity elimination.
  if (rest.empty()) return constant(acc);
  if (acc != identity) rest.push_back(constant(acc));
  if (rest.size() == 1) return rest[0];

  // (4) canonical operand order.
  std::sort(rest.begin(), rest.end(), canonical_less);

  // (5) intern or allocate.
  return intern_node(kind, std::monostate{}, std::move(rest), forced_hash);
}

Term Session::intern_node(Kind kind, Payload payload, std::vector<Term> operands,
                          std::optional<std::uint64_t> forced_hash) {
  std::uint64_t h = forced_hash ? *forced_hash : structural_hash(kind, payload, operands);
  if (mode_ == Mode::Consing) {
    auto existing = table_.find(
        h, [&](const TermNode& n) { return node_matches(n, kind, payload, operands); });
    if (existing) return Term(std::move(existing));
    auto node = std::make_shared<const TermNode>(TermId{next_id_++}, kind,
                                                 std::move(payload), std::move(operands), h);
    ++nodes_allocated_;
    table_.insert(h, node);
    return Term(std::move(node));
  }
  auto node = std::make_shared<const TermNode>(TermId{next_id_++}, kind, std::move(payload),
                                               std::move(operands), h);
  ++nodes_allocated_;
  return Term(std::move(node));
}

namespace {

struct IdPairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const noexcept {
    return std::size_t(p.first * 0x9e3779b97f4a7c15ULL ^ p.second);
  }
};

bool deep_equal_rec(const Term& a, const Term& b,
                    std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, IdPairHash>& seen) {
  if (a == b) return true;
  if (a.kind() != b.kind()) return false;
  if (!payload_equal(a.node().payload, b.node().payload)) return false;
  auto ao = a.operands();
  auto bo = b.operands();
  if (ao.size() != bo.size()) return false;
  auto key = std::make_pair(a.id().value, b.id().value);
  if (seen.contains(key)) return true;  // already proven (or in progress on a DAG path)
  seen.insert(key);
  for (std::size_t i = 0; i < ao.size(); ++i) {
    if (!deep_equal_rec(ao[i], bo[i], seen)) return false;
  }
  return true;
}

}  // namespace

bool deep_equal(const Term& a, const Term& b) {
  std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, IdPairHash> seen;
  return deep_equal_rec(a, b, seen);
}

bool struct_eq(const Term& a, const Term& b, const Session& session) {
  if (session.mode() == Mode::Consing) return a.id() == b.id();
  return deep_equal(a, b);
}

NodeCounts count_nodes(const Term& root) {
  NodeCounts counts;
  std::unordered_map<std::uint64_t, std::uint64_t> tree_size;  // id -> subtree occurrences

  // Post-order without materializing the tree: occurrences(n) = 1 + sum(children).
  std::vector<std::pair<Term, bool>> stack{{root, false}};
  while (!stack.empty()) {
    auto [t, expanded] = stack.back();
    stack.pop_back();
    if (tree_size.contains(t.id().value)) continue;
    if (expanded) {
      std::uint64_t size = 1;
      for (const Term& op : t.operands()) size += tree_size.at(op.id().value);
      tree_size.emplace(t.id().value, size);
      continue;
    }
    stack.emplace_back(t, true);
    for (const Term& op : t.operands()) {
      if (!tree_size.contains(op.id().value)) stack.emplace_back(op, false);
    }
  }
  counts.distinct = tree_size.size();
  counts.occurrences = tree_size.at(root.id().value);
  return counts;
}

std::uint64_t distinct_count(std::span<const Term> roots) {
  std::unordered_set<std::uint64_t> seen;
  std::vector<Term> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    Term t = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(t.id().value).second) continue;
    for (const Term& op : t.operands()) stack.push_back(op);
  }
  return seen.size();
}

namespace {

Term substitute_rec(const Term& t, const std::unordered_map<std::uint64_t, Term>& repl,
                    std::unordered_map<std::uint64_t, Term>& memo, Session& session) {
  if (auto it = memo.find(t.id().value); it != memo.end()) return it->second;
  Term result;
  switch (t.kind()) {
    case Kind::Var: {
      auto it = repl.find(t.id().value);
      result = (it != repl.end()) ? it->second : t;
      break;
    }
    case Kind::Const:
      result = t;
      break;
    default: {
      std::vector<Term> mapped;
      mapped.reserve(t.operands().size());
      bool changed = false;
      for (const Term& op : t.operands()) {
        Term m = substitute_rec(op, repl, memo, session);
        changed = changed || !(m == op);
        mapped.push_back(std::move(m));
      }
      result = changed ? session.make(t.kind(), t.node().payload, std::move(mapped)) : t;
      break;
    }
  }
  memo.emplace(t.id().value, result);
  return result;
}

}  // namespace

Term substitute(const Term& root, const std::vector<std::pair<Term, Term>>& bindings,
                Session& session) {
  std::unordered_map<std::uint64_t, Term> repl;
  for (const auto& [var, replacement] : bindings) {
    if (var.kind() != Kind::Var) throw std::invalid_argument("binding key must be a Var");
    repl.emplace(var.id().value, replacement);
  }
  std::unordered_map<std::uint64_t, Term> memo;
  return substitute_rec(root, repl, memo, session);
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

const std::string& render(const Term& t, std::unordered_map<std::uint64_t, std::string>& memo) {
  auto it = memo.find(t.id().value);
  if (it != memo.end()) return it->second;
  std::string s;
  auto ops = t.operands();
  auto join = [&](const char* sep) {
    s = "(";
    for (std::size_t i = 0; i < ops.size(); ++i) {
      if (i) s += sep;
      s += render(ops[i], memo);
    }
    s += ")";
  };
  switch (t.kind()) {
    case Kind::Const: s = format_double(t.value()); break;
    case Kind::Var: s = t.name(); break;
    case Kind::Add: join(" + "); break;
    case Kind::Mul: join(" * "); break;
    case Kind::Sub: join(" - "); break;
    case Kind::Div: join(" / "); break;
    case Kind::Pow: join(" ^ "); break;
    case Kind::Call:
      s = std::string(func_name(t.func())) + "(" + render(ops[0], memo) + ")";
      break;
  }
  return memo.emplace(t.id().value, std::move(s)).first->second;
}

}  // namespace

std::string to_string(const Term& t) {
  std::unordered_map<std::uint64_t, std::string> memo;
  return render(t, memo);
}

}  // namespace symcons
