#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace gsp::detail {

/// Binary min-heap over ids 0..capacity-1 with one key per id; supports
/// set (insert or re-key) and erase in O(log n). Ties go to the smaller id.
class IndexedMinHeap {
 public:
  void reset(std::size_t capacity) {
    heap_.clear();
    pos_.assign(capacity, -1);
    key_.assign(capacity, 0.0);
  }
  void grow(std::size_t capacity) {
    if (capacity > pos_.size()) {
      pos_.resize(capacity, -1);
      key_.resize(capacity, 0.0);
    }
  }

  bool empty() const { return heap_.empty(); }
  bool contains(int id) const { return pos_[static_cast<std::size_t>(id)] >= 0; }
  int top() const { return heap_.front(); }
  double top_key() const { return key_[static_cast<std::size_t>(heap_.front())]; }

  void set(int id, double key) {
    const auto sid = static_cast<std::size_t>(id);
    if (pos_[sid] < 0) {
      key_[sid] = key;
      pos_[sid] = static_cast<long>(heap_.size());
      heap_.push_back(id);
      up(heap_.size() - 1);
      return;
    }
    const double old = key_[sid];
    key_[sid] = key;
    if (key < old)
      up(static_cast<std::size_t>(pos_[sid]));
    else
      down(static_cast<std::size_t>(pos_[sid]));
  }

  void erase(int id) {
    const auto sid = static_cast<std::size_t>(id);
    if (pos_[sid] < 0) return;
    const auto at = static_cast<std::size_t>(pos_[sid]);
    pos_[sid] = -1;
    const int last = heap_.back();
    heap_.pop_back();
    if (at == heap_.size()) return;
    heap_[at] = last;
    pos_[static_cast<std::size_t>(last)] = static_cast<long>(at);
    up(at);
    down(static_cast<std::size_t>(pos_[static_cast<std::size_t>(last)]));
  }

 private:
  bool less(int a, int b) const {
    const double ka = key_[static_cast<std::size_t>(a)], kb = key_[static_cast<std::size_t>(b)];
    return ka < kb || (ka == kb && a < b);
  }
  void place(std::size_t i, int id) {
    heap_[i] = id;
    pos_[static_cast<std::size_t>(id)] = static_cast<long>(i);
  }
  void up(std::size_t i) {
    const int id = heap_[i];
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!less(id, heap_[parent])) break;
      place(i, heap_[parent]);
      i = parent;
    }
    place(i, id);
  }
  void down(std::size_t i) {
    const int id = heap_[i];
    const std::size_t n = heap_.size();
    while (true) {
      std::size_t child = 2 * i + 1;
      if (child >= n) break;
      if (child + 1 < n && less(heap_[child + 1], heap_[child])) ++child;
      if (!less(heap_[child], id)) break;
      place(i, heap_[child]);
      i = child;
    }
    place(i, id);
  }

  std::vector<int> heap_;
  std::vector<long> pos_;
  std::vector<double> key_;
};

}  // namespace gsp::detail
