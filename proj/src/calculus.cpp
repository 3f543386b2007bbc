#include "symcons/calculus.hpp"

#include <stdexcept>
#include <unordered_set>

namespace symcons {

namespace {

Term diff(const Term& t, const Term& var, Session& s) {
  auto& memo = s.diff_memo();
  Session::DiffKey key{t.id().value, var.id().value};
  if (memo.enabled) {
    if (auto it = memo.entries.find(key); it != memo.entries.end()) {
      ++memo.hits;
      return it->second;
    }
    ++memo.misses;
  }

  Term result;
  switch (t.kind()) {
    case Kind::Const:
      result = s.constant(0.0);
      break;
    case Kind::Var:
      // Variable identity is by name, so Naive-mode rebuilds of the same
      // symbol still differentiate correctly.
      result = s.constant(t.name() == var.name() ? 1.0 : 0.0);
      break;
    case Kind::Add: {
      std::vector<Term> parts;
      parts.reserve(t.operands().size());
      for (const Term& op : t.operands()) parts.push_back(diff(op, var, s));
      result = s.add(std::move(parts));
      break;
    }
    case Kind::Sub:
      result = s.sub(diff(t.operands()[0], var, s), diff(t.operands()[1], var, s));
      break;
    case Kind::Mul: {
      // n-ary product rule on the flattened form: sum of n products, each
      // with exactly one operand differentiated.
      auto ops = t.operands();
      std::vector<Term> summands;
      summands.reserve(ops.size());
      for (std::size_t i = 0; i < ops.size(); ++i) {
        std::vector<Term> factors(ops.begin(), ops.end());
        factors[i] = diff(ops[i], var, s);
        summands.push_back(s.mul(std::move(factors)));
      }
      result = s.add(std::move(summands));
      break;
    }
    case Kind::Div: {
      const Term& u = t.operands()[0];
      const Term& w = t.operands()[1];
      Term du = diff(u, var, s);
      Term dw = diff(w, var, s);
      result = s.div(s.sub(s.mul({du, w}), s.mul({u, dw})), s.pow(w, s.constant(2.0)));
      break;
    }
    case Kind::Pow: {
      const Term& u = t.operands()[0];
      const Term& e = t.operands()[1];
      Term du = diff(u, var, s);
      if (e.kind() == Kind::Const) {
        double c = e.value();
        result = s.mul({s.constant(c), s.pow(u, s.constant(c - 1.0)), du});
      } else {
        // u^w -> u^w * (w' log u + w u'/u); introduces log u, domain caveat
        // documented with the constructor errors.
        Term dw = diff(e, var, s);
        result = s.mul(
            {t, s.add({s.mul({dw, s.apply(Func::Log, u)}), s.mul({e, s.div(du, u)})})});
      }
      break;
    }
    case Kind::Call: {
      const Term& u = t.operands()[0];
      Term du = diff(u, var, s);
      switch (t.func()) {
        case Func::Sin: result = s.mul({s.apply(Func::Cos, u), du}); break;
        case Func::Cos: result = s.mul({s.constant(-1.0), s.apply(Func::Sin, u), du}); break;
        case Func::Exp: result = s.mul({t, du}); break;
        case Func::Log: result = s.div(du, u); break;
        case Func::Sqrt: result = s.div(du, s.mul({s.constant(2.0), t})); break;
      }
      break;
    }
  }

  if (memo.enabled) memo.entries.emplace(key, result);
  return result;
}

}  // namespace

Term derivative(const Term& t, const Term& var, Session& session) {
  if (!var.valid() || var.kind() != Kind::Var)
    throw std::invalid_argument("derivative: var must be a Var node");
  return diff(t, var, session);
}

JacobianResult jacobian(std::span<const Term> eqs, std::span<const Term> vars,
                        Session& session) {
  std::unordered_set<std::string> names;
  for (const Term& v : vars) {
    if (!v.valid() || v.kind() != Kind::Var)
      throw std::invalid_argument("jacobian: vars must be Var nodes");
    if (!names.insert(v.name()).second)
      throw std::invalid_argument("jacobian: vars must be distinct");
  }

  JacobianResult result;
  const std::uint64_t before = session.constructions();
  const auto t0 = std::chrono::steady_clock::now();

  result.entries.reserve(eqs.size());
  for (const Term& eq : eqs) {
    std::vector<Term> row;
    row.reserve(vars.size());
    for (const Term& v : vars) row.push_back(derivative(eq, v, session));
    result.entries.push_back(std::move(row));
  }

  result.build_time = std::chrono::steady_clock::now() - t0;
  result.allocated_nodes = session.constructions() - before;

  std::vector<Term> all;
  all.reserve(eqs.size() * vars.size());
  for (const auto& row : result.entries)
    for (const Term& e : row) all.push_back(e);
  result.distinct_nodes = distinct_count(all);
  return result;
}

std::pair<std::uint64_t, std::uint64_t> cache_stats(const Session& session) {
  return {session.diff_memo().hits, session.diff_memo().misses};
}

}  // namespace symcons
