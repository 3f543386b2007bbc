#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

namespace symcons {

class TermNode;

/// Counters describing the lifetime of one intern table.
/// Invariants: lookups == hits + inserts, live <= inserts - purged.
struct InternStats {
  std::uint64_t lookups = 0;
  std::uint64_t hits = 0;
  std::uint64_t inserts = 0;
  std::uint64_t collisions = 0;  // structural-inequality events within one hash bucket
  std::uint64_t purged = 0;
  std::uint64_t live = 0;
};

/// Weak-entry hash table from structural hash to live nodes. Entries do not
/// keep nodes alive; dead entries are removed by purge() and opportunistically
/// while scanning a bucket. Structural comparison runs only within a bucket,
/// so distinct keys that share a hash fall back to a full structural check.
class InternTable {
 public:
  using NodePtr = std::shared_ptr<const TermNode>;

  /// Looks up a live node matching `equals` in the `hash` bucket.
  /// Counts one lookup; a successful match counts as a hit. The caller must
  /// follow a miss with insert() so the stats invariants hold.
  NodePtr find(std::uint64_t hash, const std::function<bool(const TermNode&)>& equals);

  /// Registers a freshly allocated node under `hash`.
  void insert(std::uint64_t hash, const NodePtr& node);

  /// Drops every entry whose node has died; returns how many were removed.
  std::size_t purge();

  const InternStats& stats() const noexcept { return stats_; }

 private:
  std::unordered_map<std::uint64_t, std::vector<std::weak_ptr<const TermNode>>> buckets_;
  InternStats stats_;
};

}  // namespace symcons
