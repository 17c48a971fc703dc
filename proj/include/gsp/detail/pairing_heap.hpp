#pragma once

#include <cstddef>
#include <vector>

namespace gsp::detail {

/// Pool of pairing heaps sharing one node arena.
///
/// A heap is identified by the index of its root (-1 for empty). Supports
/// insert, meld, delete-min and a lazy "add delta to every key". A node's key
/// is its stored value plus the child_offset of every strict ancestor.
/// Ties on key are broken by the smaller payload.
class PairingHeapPool {
 public:
  struct Node {
    double value;
    double child_offset;
    int child;
    int sibling;
    int payload;
    int stamp;
  };

  void clear() {
    nodes_.clear();
    scratch_.clear();
  }
  void reserve(std::size_t n) { nodes_.reserve(n); }

  int insert(int root, double value, int payload, int stamp) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{value, 0.0, -1, -1, payload, stamp});
    return meld(root, id);
  }

  int meld(int a, int b) {
    if (a < 0) return b;
    if (b < 0) return a;
    if (less(b, a)) std::swap(a, b);
    Node& na = nodes_[static_cast<std::size_t>(a)];
    Node& nb = nodes_[static_cast<std::size_t>(b)];
    nb.value -= na.child_offset;
    nb.child_offset -= na.child_offset;
    nb.sibling = na.child;
    na.child = b;
    return a;
  }

  void add_to_all(int root, double delta) {
    if (root < 0) return;
    Node& r = nodes_[static_cast<std::size_t>(root)];
    r.value += delta;
    r.child_offset += delta;
  }

  const Node& top(int root) const { return nodes_[static_cast<std::size_t>(root)]; }

  /// Removes the root and returns the new root.
  int delete_min(int root) {
    Node& r = nodes_[static_cast<std::size_t>(root)];
    scratch_.clear();
    for (int c = r.child; c >= 0;) {
      Node& nc = nodes_[static_cast<std::size_t>(c)];
      int next = nc.sibling;
      nc.value += r.child_offset;
      nc.child_offset += r.child_offset;
      nc.sibling = -1;
      scratch_.push_back(c);
      c = next;
    }
    r.child = -1;
    if (scratch_.empty()) return -1;
    // Two-pass pairing: left-to-right pairs, then right-to-left accumulation.
    std::size_t paired = 0;
    for (std::size_t i = 0; i + 1 < scratch_.size(); i += 2)
      scratch_[paired++] = meld(scratch_[i], scratch_[i + 1]);
    if (scratch_.size() % 2 == 1) scratch_[paired++] = scratch_.back();
    int acc = scratch_[paired - 1];
    for (std::size_t i = paired - 1; i-- > 0;) acc = meld(scratch_[i], acc);
    return acc;
  }

 private:
  bool less(int a, int b) const {
    const Node& na = nodes_[static_cast<std::size_t>(a)];
    const Node& nb = nodes_[static_cast<std::size_t>(b)];
    if (na.value != nb.value) return na.value < nb.value;
    return na.payload < nb.payload;
  }

  std::vector<Node> nodes_;
  std::vector<int> scratch_;
};

}  // namespace gsp::detail
