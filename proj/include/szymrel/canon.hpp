#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "szymrel/graphdyn.hpp"
#include "szymrel/relation.hpp"

namespace szymrel {

// Partition of the recurrent set by equal p-step reach within a component.
struct SimPartition {
  std::vector<std::vector<int>> classes;
  std::vector<int> class_of;  // -1 for vertices outside the recurrent set
};

// Requires is_eventual_period(r, p); the result does not depend on which
// valid p is supplied.
SimPartition sim_partition(const Rel& r, uint64_t p);

struct CanonicalObject {
  Rel rel;
  Decomposition decomposition;
  uint64_t p_min;  // minimal eventual period of rel itself
  // canonical vertex -> source vertices of its originating class
  std::optional<std::vector<std::vector<int>>> vertex_origin;
};

// Morphism pair connecting a relation to its canonical quotient:
// to_quotient goes from the source set to the quotient, from_quotient back.
struct CanonWitness {
  Hom to_quotient;
  Hom from_quotient;
  uint64_t shift;
};

struct CanonizeResult {
  CanonicalObject object;
  CanonWitness witness;
};

CanonizeResult canonize(const Rel& r);

// Same construction with an explicit valid eventual period (affects only the
// witness shift; the quotient is identical for every valid p).
CanonizeResult canonize_at(const Rel& r, uint64_t p);

// Verifies the four defining identities of the witness pair plus
// canonicity of the quotient. Used by tests; not run inside canonize.
bool check_canon_witness(const Rel& source, const CanonizeResult& cr);

// failed_condition: 0 = canonical, 1 = non-recurrent vertex exists,
// 2 = some component restriction is not a bijection, 3 = power sequence
// does not satisfy r^(1+p) = r.
struct CanonicalCheck {
  bool ok;
  int failed_condition;
  std::string detail;
};
CanonicalCheck is_canonical(const Rel& r);

// Wraps an already-canonical relation; throws std::invalid_argument otherwise.
CanonicalObject as_canonical_object(const Rel& r);

// Restriction to the invariant part together with the connecting morphism
// pair (power is the stabilization exponent of gparts).
struct InvRestriction {
  std::vector<int> inv_vertices;
  Rel restricted;
  Hom to_invariant;
  Hom from_invariant;
  uint64_t power;
};
InvRestriction inv_restriction_witnesses(const Rel& r);

// For a total single-valued relation: the periodic vertices and the
// restriction to them (a permutation). Throws unless classify says is_map.
struct FunctionalCore {
  std::vector<int> periodic_vertices;
  Rel restricted;
};
FunctionalCore per_functional(const Rel& r);

}  // namespace szymrel
