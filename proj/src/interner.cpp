#include "symcons/interner.hpp"

#include "symcons/term.hpp"

namespace symcons {

InternTable::NodePtr InternTable::find(std::uint64_t hash,
                                       const std::function<bool(const TermNode&)>& equals) {
  ++stats_.lookups;
  auto it = buckets_.find(hash);
  if (it == buckets_.end()) return nullptr;

  auto& bucket = it->second;
  NodePtr found;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < bucket.size(); ++i) {
    NodePtr node = bucket[i].lock();
    if (!node) {
      // Dead entry: drop it while we are here.
      ++stats_.purged;
      --stats_.live;
      continue;
    }
    if (!found) {
      if (equals(*node)) {
        found = std::move(node);
      } else {
        ++stats_.collisions;
      }
    }
    if (kept != i) bucket[kept] = std::move(bucket[i]);
    ++kept;
  }
  bucket.resize(kept);
  if (bucket.empty()) buckets_.erase(it);

  if (found) ++stats_.hits;
  return found;
}

void InternTable::insert(std::uint64_t hash, const NodePtr& node) {
  buckets_[hash].emplace_back(node);
  ++stats_.inserts;
  ++stats_.live;
}

std::size_t InternTable::purge() {
  std::size_t removed = 0;
  for (auto it = buckets_.begin(); it != buckets_.end();) {
    auto& bucket = it->second;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      if (bucket[i].expired()) {
        ++removed;
        continue;
      }
      if (kept != i) bucket[kept] = std::move(bucket[i]);
      ++kept;
    }
    bucket.resize(kept);
    it = bucket.empty() ? buckets_.erase(it) : std::next(it);
  }
  stats_.purged += removed;
  stats_.live -= removed;
  return removed;
}

}  // namespace symcons
