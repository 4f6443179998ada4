#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "szymrel/bitset.hpp"
#include "szymrel/errors.hpp"

namespace szymrel {

namespace detail {
struct PowerMemo;
struct MemoAccess;
}

// Relation between two finite sets {0..n_src-1} and {0..n_dst-1}, stored as a
// bit matrix with one Bitset per source vertex. Values are cheap to copy;
// all operations below are pure functions.
class Hom {
 public:
  Hom() = default;

  Hom(int n_src, int n_dst);

  static Hom identity(int n);
  static Hom full(int n_src, int n_dst);

  int n_src() const { return n_src_; }
  int n_dst() const { return n_dst_; }

  bool at(int i, int j) const { return rows_[i].test(j); }
  void set(int i, int j, bool v = true) { rows_[i].assign(j, v); }
  void set_row(int i, Bitset row);

  const Bitset& row(int i) const { return rows_[i]; }
  Bitset column(int j) const;

  bool operator==(const Hom&) const = default;

 private:
  int n_src_ = 0;
  int n_dst_ = 0;
  std::vector<Bitset> rows_;
};

// Binary relation on a single finite set {0..n-1}. Carries a lazily filled,
// shared memo of its power sequence; the memo is internally synchronized, so
// const access from multiple threads is safe. set() detaches the memo.
class Rel {
 public:
  Rel() : Rel(0) {}

  explicit Rel(int n);
  explicit Rel(Hom m);

  static Rel identity(int n);
  static Rel full(int n);
  static Rel from_pairs(int n, std::initializer_list<std::pair<int, int>> pairs);

  int size() const { return m_.n_src(); }

  bool at(int i, int j) const { return m_.at(i, j); }
  void set(int i, int j, bool v = true);

  const Bitset& row(int i) const { return m_.row(i); }
  const Hom& hom() const { return m_; }

  bool operator==(const Rel& o) const { return m_ == o.m_; }

 private:
  Hom m_;
  mutable std::shared_ptr<detail::PowerMemo> memo_;

  friend Rel power(const Rel&, uint64_t);
  friend struct detail::MemoAccess;
};

struct RelHash {
  size_t operator()(const Rel& r) const;
};

// compose(f, g): first f, then g. Defined when f.n_dst() == g.n_src().
Hom compose(const Hom& f, const Hom& g);
Rel compose(const Rel& a, const Rel& b);

Hom inverse(const Hom& f);
Rel inverse(const Rel& r);

// power(r, 0) is the identity. Powers are memoized per relation value and the
// memo detects the eventual cycle, so large exponents cost a reduction only.
Rel power(const Rel& r, uint64_t k);

Bitset dom(const Hom& f);
Bitset im(const Hom& f);

// Grand domain / grand image / invariant part, with the exponent at which the
// dom/im chains stabilize (always >= 1).
struct GrandParts {
  Bitset gdom;
  Bitset gim;
  Bitset inv;
  uint64_t stabilization;
};
GrandParts gparts(const Rel& r);

struct HomFlags {
  bool is_partial_map;
  bool is_map;
  bool is_injective;
  bool is_surjective;
  bool is_bijection;
};
struct RelFlags : HomFlags {
  bool is_wide;  // invariant part equals the whole set
};
HomFlags classify_relation(const Hom& f);
RelFlags classify_relation(const Rel& r);

// Restriction to a vertex subset, reindexed to {0..|A|-1}.
// vertices[new_index] = old_index.
struct Restriction {
  Rel rel;
  std::vector<int> vertices;
};
Restriction restrict_to(const Rel& r, const Bitset& subset);
Restriction restrict_to(const Rel& r, const std::vector<int>& subset);

// Partition of the ground set into blocks mapped bijectively onto blocks;
// present exactly when the relation has that shape (a bijection "by blocks").
// image[b] is the index of the block that block b is sent to.
struct BlockStructure {
  std::vector<std::vector<int>> blocks;  // ordered by smallest member
  std::vector<int> image;
};
std::optional<BlockStructure> block_bijection(const Rel& r);

// Union of blocks[b] x blocks[image[b]]; inverse of block_bijection.
Rel block_relation(const BlockStructure& bs, int n);

// Push r through the vertex bijection f: edge (i, j) becomes (f[i], f[j]).
Rel relabel(const Rel& r, const std::vector<int>& f);

// Text format: first line "n" (square) or "n_src n_dst", then one row of
// '0'/'1' characters per source vertex. The parsers tolerate extra blanks and
// report 1-based line/column positions on error.
Rel parse_rel(std::string_view text);
Hom parse_hom(std::string_view text);
std::string to_text(const Rel& r);
std::string to_text(const Hom& f);

}  // namespace szymrel
