#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "symcons/errors.hpp"
#include "symcons/interner.hpp"

namespace symcons {

enum class Kind : std::uint8_t { Const, Var, Add, Mul, Sub, Div, Pow, Call };
enum class Func : std::uint8_t { Sin, Cos, Exp, Log, Sqrt };

/// Consing sessions intern every constructed node; Naive sessions allocate a
/// fresh node per construction. Normalization is identical in both modes.
enum class Mode : std::uint8_t { Consing, Naive };

/// Stable per-session node identity. Ids increase monotonically with creation
/// order, so operand ids are always smaller than the ids of their users.
struct TermId {
  std::uint64_t value = 0;
  friend constexpr auto operator<=>(const TermId&, const TermId&) = default;
};

/// Node payload: empty for operators, double for Const, name for Var,
/// function tag for Call.
using Payload = std::variant<std::monostate, double, std::string, Func>;

class TermNode;

/// Strong handle to an immutable expression node. Holding a Term keeps the
/// node (and, through operand handles, its whole subgraph) alive; the intern
/// table itself holds only weak entries.
class Term {
 public:
  Term() = default;
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}

  bool valid() const noexcept { return node_ != nullptr; }
  TermId id() const;
  Kind kind() const;
  std::uint64_t hash() const;
  double value() const;             // Const only
  const std::string& name() const;  // Var only
  Func func() const;                // Call only
  std::span<const Term> operands() const;

  const TermNode& node() const { return *node_; }
  std::shared_ptr<const TermNode> share() const { return node_; }

  /// Handle identity (same node object).
  friend bool operator==(const Term& a, const Term& b) noexcept { return a.node_ == b.node_; }

 private:
  std::shared_ptr<const TermNode> node_;
};

class TermNode {
 public:
  TermNode(TermId id, Kind kind, Payload payload, std::vector<Term> operands,
           std::uint64_t hash)
      : id(id), kind(kind), payload(std::move(payload)), operands(std::move(operands)),
        hash(hash) {}

  TermId id;
  Kind kind;
  Payload payload;
  std::vector<Term> operands;  // strong handles: parents keep children alive
  std::uint64_t hash;          // cached structural hash
};

inline TermId Term::id() const { return node_->id; }
inline Kind Term::kind() const { return node_->kind; }
inline std::uint64_t Term::hash() const { return node_->hash; }
inline double Term::value() const { return std::get<double>(node_->payload); }
inline const std::string& Term::name() const { return std::get<std::string>(node_->payload); }
inline Func Term::func() const { return std::get<Func>(node_->payload); }
inline std::span<const Term> Term::operands() const { return node_->operands; }

/// Structural hash over (kind, payload bits, operand ids). Fixed mixing
/// function with a fixed seed, so hashes are reproducible across runs.
std::uint64_t structural_hash(Kind kind, const Payload& payload, std::span<const Term> operands);

/// Owns the intern table, the id counter, and the differentiation memo.
/// Terms from different sessions must not be mixed.
class Session {
 public:
  explicit Session(Mode mode = Mode::Consing) : mode_(mode) {}
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  // Canonicalizing constructors. Every route funnels through make().
  Term constant(double value);
  Term variable(std::string_view name);
  Term add(std::vector<Term> operands);
  Term mul(std::vector<Term> operands);
  Term sub(Term lhs, Term rhs);
  Term div(Term num, Term den);
  Term pow(Term base, Term exponent);
  Term apply(Func f, Term arg);

  /// General constructor: flattens nested Add/Mul, folds constants, eliminates
  /// identities, sorts commutative operands, then interns (Consing) or
  /// allocates fresh (Naive).
  Term make(Kind kind, Payload payload, std::vector<Term> operands);

  /// Test seam: interns the normalized node under `forced_hash` instead of its
  /// structural hash, to exercise the bucket-collision fallback.
  Term make_with_hash(Kind kind, Payload payload, std::vector<Term> operands,
                      std::uint64_t forced_hash);

  Mode mode() const noexcept { return mode_; }
  const InternStats& intern_stats() const noexcept { return table_.stats(); }
  std::size_t purge() { return table_.purge(); }

  /// Number of constructor invocations (make calls) so far.
  std::uint64_t constructions() const noexcept { return constructions_; }
  /// Number of nodes physically allocated so far.
  std::uint64_t nodes_allocated() const noexcept { return nodes_allocated_; }

  struct DiffKey {
    std::uint64_t term = 0;
    std::uint64_t var = 0;
    bool operator==(const DiffKey&) const = default;
  };
  struct DiffKeyHash {
    std::size_t operator()(const DiffKey& k) const noexcept {
      return std::size_t(k.term * 0x9e3779b97f4a7c15ULL ^ (k.var + 0x7f4a7c15ULL));
    }
  };
  struct DiffMemo {
    std::unordered_map<DiffKey, Term, DiffKeyHash> entries;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    bool enabled = true;  // test seam: disabling must not change results
  };
  DiffMemo& diff_memo() noexcept { return diff_memo_; }
  const DiffMemo& diff_memo() const noexcept { return diff_memo_; }

 private:
  Term make_impl(Kind kind, Payload payload, std::vector<Term> operands,
                 std::optional<std::uint64_t> forced_hash);
  Term make_nary(Kind kind, std::vector<Term> operands,
                 std::optional<std::uint64_t> forced_hash);
  Term intern_node(Kind kind, Payload payload, std::vector<Term> operands,
                   std::optional<std::uint64_t> forced_hash);

  Mode mode_;
  InternTable table_;
  std::uint64_t next_id_ = 0;
  std::uint64_t constructions_ = 0;
  std::uint64_t nodes_allocated_ = 0;
  DiffMemo diff_memo_;
};

/// Full recursive structural comparison (memoized over node-id pairs).
bool deep_equal(const Term& a, const Term& b);

/// Structural equality; in Consing mode this is id equality.
bool struct_eq(const Term& a, const Term& b, const Session& session);

struct NodeCounts {
  std::uint64_t distinct = 0;     // reachable DAG nodes
  std::uint64_t occurrences = 0;  // tree-expansion node count
};
NodeCounts count_nodes(const Term& root);

/// Distinct reachable nodes over a set of roots combined.
std::uint64_t distinct_count(std::span<const Term> roots);

/// Replaces variables per `bindings` (keys must be Var nodes), rebuilding
/// through make so results are re-normalized. Memoized per node id.
Term substitute(const Term& root, const std::vector<std::pair<Term, Term>>& bindings,
                Session& session);

/// Deterministic, fully parenthesized infix rendering (debug/CLI output only;
/// there is no parser).
std::string to_string(const Term& t);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);

}  // namespace symcons
