#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "doctest.h"
#include "szymrel/canon.hpp"
#include "szymrel/graphdyn.hpp"
#include "szymrel/relation.hpp"
#include "szymrel/szymiso.hpp"
#include "testutil.hpp"

using namespace szymrel;
using testutil::nth_rel;
using testutil::random_rel;

namespace {

const char* kSource5 =
    "5\n"
    "01010\n"
    "10100\n"
    "01000\n"
    "00001\n"
    "00010\n";

const char* kQuotient4 =
    "4\n"
    "0110\n"
    "1001\n"
    "0001\n"
    "0010\n";

// Same component skeleton as kQuotient4 but with both connection residues.
const char* kWide4 =
    "4\n"
    "0111\n"
    "1011\n"
    "0001\n"
    "0010\n";

Hom random_hom(std::mt19937_64& rng, int n_src, int n_dst) {
  Hom h(n_src, n_dst);
  for (int i = 0; i < n_src; ++i) {
    for (int j = 0; j < n_dst; ++j) {
      if (rng() % 3 == 0) h.set(i, j);
    }
  }
  return h;
}

std::vector<int> random_perm(std::mt19937_64& rng, int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    std::swap(p[i], p[static_cast<int>(rng() % (i + 1))]);
  }
  return p;
}

// All strict partial orders on k labelled points, each given as its list of
// comparable ordered pairs.
const std::vector<std::vector<std::pair<int, int>>>& strict_orders(int k) {
  static std::map<int, std::vector<std::vector<std::pair<int, int>>>> cache;
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i != j) slots.emplace_back(i, j);
    }
  }
  const int m = static_cast<int>(slots.size());
  std::vector<std::vector<std::pair<int, int>>> orders;
  for (uint64_t mask = 0; mask < (1ull << m); ++mask) {
    bool adj[5][5] = {};
    for (int t = 0; t < m; ++t) {
      if (mask >> t & 1) adj[slots[t].first][slots[t].second] = true;
    }
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) {
      for (int j = 0; j < k && ok; ++j) {
        if (i == j) continue;
        if (adj[i][j] && adj[j][i]) ok = false;
        for (int l = 0; l < k && ok; ++l) {
          if (l != i && l != j && adj[i][j] && adj[j][l] && !adj[i][l]) {
            ok = false;
          }
        }
      }
    }
    if (!ok) continue;
    std::vector<std::pair<int, int>> pairs;
    for (int t = 0; t < m; ++t) {
      if (mask >> t & 1) pairs.push_back(slots[t]);
    }
    orders.push_back(std::move(pairs));
  }
  return cache.emplace(k, std::move(orders)).first->second;
}

// Every canonical relation is, up to conjugacy, a disjoint union of directed
// cycles (one per component) plus cross blocks that are unions of full level
// residue classes on a transitive, antisymmetric connection pattern. This
// enumerates all such candidates for the given cycle sizes and keeps the ones
// that pass is_canonical, so together with certificate dedup it visits every
// conjugacy class built from these component sizes.
std::vector<Rel> canonical_family(const std::vector<int>& sizes) {
  const int k = static_cast<int>(sizes.size());
  std::vector<int> off(k);
  int n = 0;
  for (int i = 0; i < k; ++i) {
    off[i] = n;
    n += sizes[i];
  }
  std::vector<Rel> out;
  for (const auto& pairs : strict_orders(k)) {
    std::vector<std::vector<std::vector<int>>> choices;
    for (auto [i, j] : pairs) {
      int g = static_cast<int>(std::gcd(sizes[i], sizes[j]));
      std::vector<std::vector<int>> subs;
      for (int s = 1; s < (1 << g); ++s) {
        std::vector<int> residues;
        for (int b = 0; b < g; ++b) {
          if (s >> b & 1) residues.push_back(b);
        }
        subs.push_back(std::move(residues));
      }
      choices.push_back(std::move(subs));
    }
    std::vector<size_t> idx(pairs.size(), 0);
    while (true) {
      Rel r(n);
      for (int i = 0; i < k; ++i) {
        for (int t = 0; t < sizes[i]; ++t) {
          r.set(off[i] + t, off[i] + (t + 1) % sizes[i]);
        }
      }
      for (size_t e = 0; e < pairs.size(); ++e) {
        auto [i, j] = pairs[e];
        int g = static_cast<int>(std::gcd(sizes[i], sizes[j]));
        for (int a = 0; a < sizes[i]; ++a) {
          for (int b = 0; b < sizes[j]; ++b) {
            for (int rho : choices[e][idx[e]]) {
              if (((b - a - rho) % g + g) % g == 0) {
                r.set(off[i] + a, off[j] + b);
              }
            }
          }
        }
      }
      if (is_canonical(r).ok) out.push_back(std::move(r));
      size_t e = 0;
      while (e < idx.size() && ++idx[e] == choices[e].size()) idx[e++] = 0;
      if (e == idx.size()) break;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("morphism predicate") {
  Rel c2 = Rel::from_pairs(2, {{0, 1}, {1, 0}});
  CHECK(is_morphism({Hom::identity(2), 0, c2, c2}));
  CHECK(is_morphism({c2.hom(), 1, c2, c2}));
  CHECK_FALSE(is_morphism({Hom::identity(2), 0, c2, Rel::identity(2)}));
  CHECK_THROWS_AS(is_morphism({Hom::identity(3), 0, c2, c2}),
                  std::invalid_argument);
}

TEST_CASE("shift equivalence on a 2-cycle") {
  Rel c2 = Rel::from_pairs(2, {{0, 1}, {1, 0}});
  SzymMorphism id0{Hom::identity(2), 0, c2, c2};
  SzymMorphism id1{Hom::identity(2), 1, c2, c2};
  SzymMorphism id2{Hom::identity(2), 2, c2, c2};
  CHECK(szym_equivalent(id0, id2));
  CHECK_FALSE(szym_equivalent(id0, id1));
  CHECK(szym_equivalent(id1, id1));

  Rel c3 = Rel::from_pairs(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK_THROWS_AS(szym_equivalent(id0, SzymMorphism{Hom(2, 3), 0, c2, c3}),
                  std::invalid_argument);
}

TEST_CASE("a one-step shift of the dynamics is the identity class") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 120; ++rep) {
    Rel r = random_rel(rng, 0, 5);
    SzymMorphism step{r.hom(), 1, r, r};
    SzymMorphism ident{Hom::identity(r.size()), 0, r, r};
    CHECK(szym_equivalent(step, ident));
  }
}

TEST_CASE("shift equivalence matches an unbounded witness search") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 250; ++rep) {
    Rel src = random_rel(rng, 0, 4);
    Rel dst = random_rel(rng, 0, 4);
    SzymMorphism a{random_hom(rng, src.size(), dst.size()), rng() % 5, src, dst};
    SzymMorphism b{random_hom(rng, src.size(), dst.size()), rng() % 5, src, dst};
    bool oracle = false;
    for (uint64_t k = 0; k <= 60 && !oracle; ++k) {
      oracle = compose(power(src, b.shift + k).hom(), a.hom) ==
               compose(power(src, a.shift + k).hom(), b.hom);
    }
    CHECK(szym_equivalent(a, b) == oracle);
  }
}

TEST_CASE("mutually inverse morphism pair of the worked example") {
  Rel r1 = parse_rel(kSource5);
  Rel r3 = parse_rel(kQuotient4);
  Hom s = parse_hom("5 4\n1001\n0110\n1001\n0010\n0001\n");
  Hom t = parse_hom("4 5\n10101\n01010\n00010\n00001\n");
  SzymMorphism fwd{s, 4, r1, r3};
  SzymMorphism bwd{t, 4, r3, r1};
  CHECK(is_morphism(fwd));
  CHECK(is_morphism(bwd));
  CHECK(verify_szym_inverse(fwd, bwd));

  // The class is shift-insensitive as long as both sides move together.
  CHECK(verify_szym_inverse(SzymMorphism{s, 6, r1, r3},
                            SzymMorphism{t, 6, r3, r1}));

  // A morphism that is not an inverse.
  Rel c2 = Rel::from_pairs(2, {{0, 1}, {1, 0}});
  CHECK_FALSE(verify_szym_inverse(SzymMorphism{c2.hom(), 1, c2, c2},
                                  SzymMorphism{c2.hom(), 0, c2, c2}));
  CHECK_THROWS_AS(verify_szym_inverse(fwd, fwd), std::invalid_argument);
}

TEST_CASE("conjugacy search") {
  Rel c3a = Rel::from_pairs(3, {{0, 1}, {1, 2}, {2, 0}});
  Rel c3b = Rel::from_pairs(3, {{0, 2}, {2, 1}, {1, 0}});
  auto g = conjugate(c3a, c3b);
  REQUIRE(g.has_value());
  CHECK(relabel(c3a, *g) == c3b);

  CHECK_FALSE(conjugate(Rel::from_pairs(2, {{0, 1}, {1, 0}}),
                        Rel::identity(2))
                  .has_value());
  CHECK_FALSE(conjugate(Rel(2), Rel(3)).has_value());

  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 200; ++rep) {
    Rel r = random_rel(rng, 0, 6);
    Rel b = relabel(r, random_perm(rng, r.size()));
    auto f = conjugate(r, b);
    REQUIRE(f.has_value());
    CHECK(relabel(r, *f) == b);
  }
}

TEST_CASE("isomorphism of the worked pair with a full witness") {
  Rel r1 = parse_rel(kSource5);
  Rel r3 = parse_rel(kQuotient4);
  IsoResult res = szym_isomorphic(r1, r3, true);
  REQUIRE(res.isomorphic);
  REQUIRE(res.witness.has_value());
  const IsoWitness& w = *res.witness;
  CHECK(w.canon_a.object.rel == r3);
  CHECK(w.canon_b.object.rel == r3);
  CHECK(relabel(w.canon_a.object.rel, w.bijection) == w.canon_b.object.rel);
  // Combined shift: the source canonization used 4, the target's own 2.
  CHECK(w.forward.shift == 6);
  CHECK(w.forward.source == r1);
  CHECK(w.forward.target == r3);
  CHECK(is_morphism(w.forward));
  CHECK(is_morphism(w.backward));
  CHECK(verify_szym_inverse(w.forward, w.backward));

  CHECK_FALSE(szym_isomorphic(r1, parse_rel(kWide4)).isomorphic);
}

TEST_CASE("classifying graphs separate the connection-count example") {
  CanonicalObject narrow = as_canonical_object(parse_rel(kQuotient4));
  CanonicalObject wide = as_canonical_object(parse_rel(kWide4));
  ClassifyingGraph gn = classifying_graph(narrow);
  ClassifyingGraph gw = classifying_graph(wide);

  CHECK(gn.vertex_periods == std::vector<uint64_t>{2, 2});
  REQUIRE(gn.edges.size() == 1);
  CHECK(gn.edges[0] == ClassifyingGraph::Edge{0, 1, 1});
  CHECK(gw.edges[0] == ClassifyingGraph::Edge{0, 1, 2});

  CHECK(to_text(gn) == "v 0 period=2\nv 1 period=2\ne 0 1 l=1\n");
  CHECK(to_text(gw) == "v 0 period=2\nv 1 period=2\ne 0 1 l=2\n");

  CHECK_FALSE(classifying_graphs_isomorphic(gn, gw));
  CHECK(classifying_graphs_isomorphic(gn, gn));
  CHECK_FALSE(szym_isomorphic(parse_rel(kQuotient4), parse_rel(kWide4))
                  .isomorphic);
}

TEST_CASE("isomorphic systems have isomorphic classifying graphs") {
  std::mt19937_64 rng(44);
  for (int rep = 0; rep < 150; ++rep) {
    Rel a = random_rel(rng, 0, 6);
    Rel b = relabel(a, random_perm(rng, a.size()));
    CHECK(szym_isomorphic(a, b).isomorphic);
    CHECK(classifying_graphs_isomorphic(
        classifying_graph(canonize(a).object),
        classifying_graph(canonize(b).object)));

    Rel c = random_rel(rng, 0, 6);
    if (szym_isomorphic(a, c).isomorphic) {
      CHECK(classifying_graphs_isomorphic(
          classifying_graph(canonize(a).object),
          classifying_graph(canonize(c).object)));
    }
  }
}

TEST_CASE("certificates are a complete conjugacy key, exhaustively") {
  for (int n = 0; n <= 4; ++n) {
    std::map<Certificate, std::vector<Rel>> groups;
    for (uint64_t code = 0; code < (1ull << (n * n)); ++code) {
      Rel r = nth_rel(n, code);
      if (!is_canonical(r).ok) continue;
      groups[certificate(as_canonical_object(r))].push_back(r);
    }
    // Equal certificate: conjugate. Distinct certificates: never conjugate.
    std::vector<const Rel*> reps;
    for (const auto& [cert, members] : groups) {
      CHECK(cert.n == static_cast<uint32_t>(n));
      for (const Rel& m : members) {
        auto g = conjugate(members.front(), m);
        REQUIRE(g.has_value());
        CHECK(relabel(members.front(), *g) == m);
      }
      Rel cm = certificate_matrix(cert);
      CHECK(is_canonical(cm).ok);
      CHECK(certificate(as_canonical_object(cm)) == cert);
      CHECK(conjugate(cm, members.front()).has_value());
      reps.push_back(&members.front());
    }
    for (size_t i = 0; i < reps.size(); ++i) {
      for (size_t j = i + 1; j < reps.size(); ++j) {
        CHECK_FALSE(conjugate(*reps[i], *reps[j]).has_value());
      }
    }
  }
}

TEST_CASE("exhaustive cross-check against the brute-force decision") {
  std::vector<Rel> small;
  for (int n = 0; n <= 2; ++n) {
    for (uint64_t code = 0; code < (1ull << (n * n)); ++code) {
      small.push_back(nth_rel(n, code));
    }
  }
  for (const Rel& a : small) {
    for (const Rel& b : small) {
      CHECK(szym_isomorphic(a, b).isomorphic == brute_force_szym_iso(a, b));
    }
  }

  std::mt19937_64 rng(45);
  for (int rep = 0; rep < 40; ++rep) {
    Rel a = nth_rel(3, rng() & 511);
    Rel b = nth_rel(3, rng() & 511);
    CHECK(szym_isomorphic(a, b).isomorphic == brute_force_szym_iso(a, b));
  }

  Rel loop = Rel::from_pairs(1, {{0, 0}});
  Rel c2 = Rel::from_pairs(2, {{0, 1}, {1, 0}});
  CHECK_FALSE(brute_force_szym_iso(c2, loop));
  CHECK(brute_force_szym_iso(c2, c2));
  CHECK_THROWS_AS(brute_force_szym_iso(Rel(4), Rel(1)), std::invalid_argument);
}

TEST_CASE("classifying graphs are a complete invariant up to seven vertices") {
  // Components with pairwise coprime periods are reconstructible from the
  // classifying graph (every block is the unique full residue class), so
  // only cycle-size multisets with a shared factor can produce two
  // non-conjugate objects with isomorphic graphs. Enumerate those families
  // exhaustively for n <= 7.
  const std::vector<std::vector<std::vector<int>>> families_by_n = {
      {{2, 2}},
      {{2, 2, 1}},
      {{4, 2}, {3, 3}, {2, 2, 2}, {2, 2, 1, 1}},
      {{4, 2, 1}, {3, 3, 1}, {3, 2, 2}, {2, 2, 2, 1}, {2, 2, 1, 1, 1}},
  };
  for (const auto& families : families_by_n) {
    for (const auto& sizes : families) {
      std::map<Certificate, Rel> classes;
      for (Rel& r : canonical_family(sizes)) {
        classes.emplace(certificate(as_canonical_object(r)), std::move(r));
      }
      CHECK(classes.size() >= 3);
      std::vector<ClassifyingGraph> graphs;
      graphs.reserve(classes.size());
      for (const auto& [cert, rel] : classes) {
        graphs.push_back(classifying_graph(as_canonical_object(rel)));
      }
      for (size_t i = 0; i < graphs.size(); ++i) {
        for (size_t j = i + 1; j < graphs.size(); ++j) {
          CHECK_FALSE(classifying_graphs_isomorphic(graphs[i], graphs[j]));
        }
      }
    }
  }
}

TEST_CASE("the invariant stops being complete at eight vertices") {
  // Four 2-cycles in a diamond pattern: the two relations differ in the
  // residue of one block, every classifying-graph label is 1 either way.
  Rel da = parse_rel(
      "8\n"
      "01101011\n"
      "10010111\n"
      "00010010\n"
      "00100001\n"
      "00000110\n"
      "00001001\n"
      "00000001\n"
      "00000010\n");
  Rel db = parse_rel(
      "8\n"
      "01101011\n"
      "10010111\n"
      "00010010\n"
      "00100001\n"
      "00000101\n"
      "00001010\n"
      "00000001\n"
      "00000010\n");
  // Two 4-cycles whose connection residue sets {0,1} and {0,2} cannot be
  // rotated into each other although both have two residues.
  Rel qa = parse_rel(
      "8\n"
      "01001100\n"
      "00100110\n"
      "00010011\n"
      "10001001\n"
      "00000100\n"
      "00000010\n"
      "00000001\n"
      "00001000\n");
  Rel qb = parse_rel(
      "8\n"
      "01001010\n"
      "00100101\n"
      "00011010\n"
      "10000101\n"
      "00000100\n"
      "00000010\n"
      "00000001\n"
      "00001000\n");
  for (auto [a, b] : {std::pair<Rel, Rel>{da, db}, {qa, qb}}) {
    REQUIRE(is_canonical(a).ok);
    REQUIRE(is_canonical(b).ok);
    CanonicalObject oa = as_canonical_object(a);
    CanonicalObject ob = as_canonical_object(b);
    CHECK(certificate(oa) != certificate(ob));
    CHECK(classifying_graphs_isomorphic(classifying_graph(oa),
                                        classifying_graph(ob)));
    CHECK_FALSE(conjugate(a, b).has_value());
    CHECK_FALSE(szym_isomorphic(a, b).isomorphic);
  }
}

TEST_CASE("certificate text encodings") {
  Certificate c = certificate(as_canonical_object(parse_rel(kQuotient4)));
  CHECK(c.n == 4);
  CHECK(c.bytes.size() == 2);
  CHECK(to_hex(c).size() == 4);
  Certificate empty = certificate(as_canonical_object(Rel(0)));
  CHECK(empty.n == 0);
  CHECK(empty.bytes.empty());
}
