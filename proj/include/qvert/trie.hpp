#ifndef QVERT_TRIE_HPP
#define QVERT_TRIE_HPP

/*
 * Set of complete type vectors stored as a 4-ary trie, supporting the one
 * query the enumeration needs: "does the set contain some vector dominated
 * by tau?".  A query walks from the root and, at depth i, descends into the
 * child labelled tau_i and into the child labelled 0; it succeeds as soon as
 * it reaches depth n.  Visited-node count is therefore at most
 * min(n * |V| + 1, (n + 1) * 2^k) with k the number of non-zero symbols of
 * tau.  Insertions never remove or move nodes.
 *
 * Thread contract: insertions are serialized and exclude readers; queries
 * may run concurrently with one another.
 */

#include <array>
#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <vector>

#include "qvert/typevec.hpp"

namespace qvert {

class SolutionTrie {
 public:
  explicit SolutionTrie(std::size_t length) : length_(length) {
    nodes_.push_back(Node{});
  }

  std::size_t length() const { return length_; }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return size_;
  }

  std::size_t node_count() const {
    std::shared_lock lock(mutex_);
    return nodes_.size();
  }

  /// Inserts a complete type vector; idempotent.  Returns true when the
  /// vector was new.
  bool insert(const TypeVector& t) {
    require_length(t.size());
    std::unique_lock lock(mutex_);
    std::int32_t node = 0;
    bool created = false;
    for (std::size_t depth = 0; depth < length_; ++depth) {
      const Symbol s = t[depth];
      std::int32_t next = nodes_[static_cast<std::size_t>(node)].child[s];
      if (next < 0) {
        next = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(Node{});
        nodes_[static_cast<std::size_t>(node)].child[s] = next;
        created = true;
      }
      node = next;
    }
    if (created) ++size_;
    return created;
  }

  /// True iff the set contains some sigma with tau >= sigma, i.e. sigma
  /// agrees with tau wherever sigma is non-zero.  `visited` (optional)
  /// receives the number of trie nodes touched by the walk.
  bool dominates_any(const TypeVector& tau, std::uint64_t* visited = nullptr) const {
    require_length(tau.size());
    std::shared_lock lock(mutex_);
    std::uint64_t count = 0;
    const bool hit = walk(0, 0, tau, count);
    if (visited) *visited = count;
    return hit;
  }

 private:
  struct Node {
    std::array<std::int32_t, 4> child{-1, -1, -1, -1};
  };

  void require_length(std::size_t got) const {
    if (got != length_) {
      throw std::invalid_argument("type vector length does not match the trie");
    }
  }

  bool walk(std::int32_t node, std::size_t depth, const TypeVector& tau,
            std::uint64_t& count) const {
    ++count;
    if (depth == length_) return true;
    const Node& n = nodes_[static_cast<std::size_t>(node)];
    if (n.child[0] >= 0 && walk(n.child[0], depth + 1, tau, count)) return true;
    const Symbol s = tau[depth];
    if (s != 0 && n.child[s] >= 0 && walk(n.child[s], depth + 1, tau, count)) {
      return true;
    }
    return false;
  }

  std::size_t length_;
  std::vector<Node> nodes_;
  std::size_t size_ = 0;
  mutable std::shared_mutex mutex_;
};

}  // namespace qvert

#endif  // QVERT_TRIE_HPP
