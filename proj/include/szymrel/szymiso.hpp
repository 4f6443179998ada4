#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "szymrel/canon.hpp"
#include "szymrel/relation.hpp"

namespace szymrel {

// A morphism class representative between the dynamical systems (source) and
// (target): a relation hom together with a shift exponent.
struct SzymMorphism {
  Hom hom;
  uint64_t shift;
  Rel source;
  Rel target;
};

// hom commutes with the two dynamics: compose(hom, target) == compose(source, hom).
bool is_morphism(const SzymMorphism& m);

// Same-endpoint representatives denote the same morphism class; the witness
// exponent search is bounded by the source power-sequence shape.
// Throws std::invalid_argument when endpoints differ.
bool szym_equivalent(const SzymMorphism& a, const SzymMorphism& b);

// True when s and t compose to the identity class in both orders.
// Requires s: X -> Y and t: Y -> X over equal endpoint relations.
bool verify_szym_inverse(const SzymMorphism& s, const SzymMorphism& t);

// Vertex bijection g with b = g . a . g^-1, when one exists.
std::optional<std::vector<int>> conjugate(const Rel& a, const Rel& b);

struct IsoWitness {
  CanonizeResult canon_a;
  CanonizeResult canon_b;
  std::vector<int> bijection;  // canonical(a) vertex -> canonical(b) vertex
  SzymMorphism forward;
  SzymMorphism backward;
};

struct IsoResult {
  bool isomorphic;
  std::optional<IsoWitness> witness;
};

// Decides isomorphism of the systems (a), (b) in the category of finite
// relations up to shift; with want_witness the mutually inverse morphism
// pair is materialized.
IsoResult szym_isomorphic(const Rel& a, const Rel& b, bool want_witness = false);

// Component digraph with period-labelled vertices; an edge carries the
// number of distinct connection residues mod gcd of the two periods and is
// present only when that number is nonzero.
struct ClassifyingGraph {
  struct Edge {
    int from;
    int to;
    uint64_t label;
    bool operator==(const Edge&) const = default;
  };
  std::vector<uint64_t> vertex_periods;
  std::vector<Edge> edges;  // sorted by (from, to)

  bool operator==(const ClassifyingGraph&) const = default;
};

ClassifyingGraph classifying_graph(const CanonicalObject& c);

// Label-preserving digraph isomorphism (exact backtracking; inputs are small).
bool classifying_graphs_isomorphic(const ClassifyingGraph& a,
                                   const ClassifyingGraph& b);

std::string to_text(const ClassifyingGraph& g);

// Complete conjugacy key of a canonical relation: the lexicographically
// smallest adjacency bitstring over relabelings that respect the invariant
// vertex grouping. Equal certificates <=> conjugate canonical objects.
struct Certificate {
  uint32_t n = 0;
  std::vector<uint8_t> bytes;  // row-major bits, most significant bit first

  auto operator<=>(const Certificate&) const = default;
};

Certificate certificate(const CanonicalObject& c);
Rel certificate_matrix(const Certificate& c);
std::string to_hex(const Certificate& c);

// Reference decision procedure by exhaustive morphism search; restricted to
// ground sets of size <= 3 on both sides.
bool brute_force_szym_iso(const Rel& a, const Rel& b);

}  // namespace szymrel
