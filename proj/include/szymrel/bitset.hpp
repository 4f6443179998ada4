#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace szymrel {

// Fixed-width dynamic bitset used for vertex sets and adjacency rows.
// Bits outside [0, size) are always zero.
class Bitset {
 public:
  Bitset() = default;

  explicit Bitset(int size) : size_(size), words_((size + 63) / 64, 0) {}

  static Bitset full(int size) {
    Bitset b(size);
    for (auto& w : b.words_) w = ~uint64_t{0};
    b.trim();
    return b;
  }

  int size() const { return size_; }

  bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  void set(int i) { words_[i >> 6] |= uint64_t{1} << (i & 63); }

  void reset(int i) { words_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }

  void assign(int i, bool v) {
    if (v) {
      set(i);
    } else {
      reset(i);
    }
  }

  void clear() {
    for (auto& w : words_) w = 0;
  }

  bool any() const {
    for (auto w : words_) {
      if (w) return true;
    }
    return false;
  }

  bool none() const { return !any(); }

  int count() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  // First set bit, or -1 when empty.
  int find_first() const { return find_from(0); }

  // Next set bit strictly after prev, or -1.
  int find_next(int prev) const { return find_from(prev + 1); }

  Bitset& operator&=(const Bitset& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }

  Bitset& operator|=(const Bitset& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  // this := this \ o
  Bitset& and_not(const Bitset& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  bool intersects(const Bitset& o) const {
    for (size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & o.words_[i]) return true;
    }
    return false;
  }

  bool is_subset_of(const Bitset& o) const {
    for (size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & ~o.words_[i]) return false;
    }
    return true;
  }

  friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
  friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }

  bool operator==(const Bitset&) const = default;

  const std::vector<uint64_t>& words() const { return words_; }

  std::vector<int> to_vector() const {
    std::vector<int> out;
    for (int v = find_first(); v != -1; v = find_next(v)) out.push_back(v);
    return out;
  }

 private:
  int find_from(int i) const {
    if (i >= size_) return -1;
    size_t w = static_cast<size_t>(i) >> 6;
    uint64_t cur = words_[w] & (~uint64_t{0} << (i & 63));
    while (true) {
      if (cur) return static_cast<int>((w << 6) + std::countr_zero(cur));
      if (++w == words_.size()) return -1;
      cur = words_[w];
    }
  }

  void trim() {
    if (size_ & 63) words_.back() &= (uint64_t{1} << (size_ & 63)) - 1;
  }

  int size_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace szymrel
