#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "szymrel/relation.hpp"

namespace szymrel {

// Recurrent structure of a relation viewed as a digraph: strongly connected
// components over the recurrent vertices (those lying on a cycle), their
// periods, and the reachability order between components.
struct Decomposition {
  std::vector<std::vector<int>> components;  // ordered by smallest vertex
  std::vector<uint64_t> periods;
  std::vector<int> non_recurrent;
  std::vector<Bitset> order;       // order[u].test(v): component u below v,
                                   // i.e. reachable from v (reflexive)
  std::vector<int> component_of;   // -1 for non-recurrent vertices
  Bitset recurrent;

  int count() const { return static_cast<int>(components.size()); }
  bool below(int u, int v) const { return order[u].test(v); }
};

Decomposition decompose(const Rel& r);

// gcd of the cycle lengths through the given strongly connected vertex set.
// Throws std::invalid_argument when the set is empty or not strongly
// connected under positive-length walks.
uint64_t component_period(const Rel& r, const std::vector<int>& component);

// Walk-length residue mod the period from component[0] to component[i];
// well defined on a strongly connected set. Same errors as component_period.
std::vector<uint64_t> component_levels(const Rel& r,
                                       const std::vector<int>& component);

// Minimal eventual period p_min together with the shape of the power
// sequence: index is the first exponent inside the cycle, cycle_len its
// length. Invariants: cycle_len | p_min and p_min >= max(index, 1).
struct EventualPeriod {
  uint64_t p_min;
  uint64_t index;
  uint64_t cycle_len;
};
EventualPeriod eventual_period(const Rel& r);

bool is_eventual_period(const Rel& r, uint64_t p);

// Smallest positive solution pattern for ax + by = ab/q + q + nq with
// q = gcd(a, b); a solution with x, y >= 1 always exists.
std::pair<uint64_t, uint64_t> positive_diophantine(uint64_t a, uint64_t b,
                                                   uint64_t n);

std::string to_text(const Decomposition& d);

}  // namespace szymrel
