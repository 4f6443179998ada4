#include "szymrel/canon.hpp"

#include <algorithm>
#include <stdexcept>

namespace szymrel {

namespace {

std::vector<Bitset> component_masks(const Rel& r, const Decomposition& d) {
  std::vector<Bitset> masks(d.count(), Bitset(r.size()));
  for (int i = 0; i < d.count(); ++i) {
    for (int v : d.components[i]) masks[i].set(v);
  }
  return masks;
}

// Longest strict chain above each component (0 for maximal components).
std::vector<int> component_ranks(const Decomposition& d) {
  const int k = d.count();
  std::vector<int> rank(k, -1);
  auto rec = [&](auto&& self, int u) -> int {
    if (rank[u] != -1) return rank[u];
    rank[u] = 0;  // antisymmetry of the order makes the recursion well-founded
    int best = 0;
    for (int v = 0; v < k; ++v) {
      if (v != u && d.below(u, v)) best = std::max(best, self(self, v) + 1);
    }
    return rank[u] = best;
  };
  for (int u = 0; u < k; ++u) rec(rec, u);
  return rank;
}

void require_valid_period(const Rel& r, uint64_t p) {
  if (!is_eventual_period(r, p)) {
    throw std::invalid_argument("p = " + std::to_string(p) +
                                " is not an eventual period of the relation");
  }
}

}  // namespace

SimPartition sim_partition(const Rel& r, uint64_t p) {
  require_valid_period(r, p);
  Decomposition d = decompose(r);
  auto masks = component_masks(r, d);
  Rel rp = power(r, p);
  SimPartition sp;
  sp.class_of.assign(r.size(), -1);
  std::vector<Bitset> class_mask;
  for (int v = d.recurrent.find_first(); v != -1; v = d.recurrent.find_next(v)) {
    Bitset m = rp.row(v) & masks[d.component_of[v]];
    size_t c = 0;
    while (c < class_mask.size() && !(class_mask[c] == m)) ++c;
    if (c == class_mask.size()) {
      class_mask.push_back(m);
      sp.classes.emplace_back();
    }
    sp.class_of[v] = static_cast<int>(c);
    sp.classes[c].push_back(v);
  }
  return sp;
}

CanonizeResult canonize_at(const Rel& r, uint64_t p) {
  require_valid_period(r, p);
  Decomposition d = decompose(r);
  SimPartition sp = sim_partition(r, p);
  const int m = static_cast<int>(sp.classes.size());

  // Canonical class order: component topological rank, then component
  // smallest vertex, then smallest vertex inside the class.
  std::vector<int> rank = component_ranks(d);
  std::vector<int> order(m);
  for (int c = 0; c < m; ++c) order[c] = c;
  auto key = [&](int c) {
    int comp = d.component_of[sp.classes[c][0]];
    return std::tuple(rank[comp], d.components[comp][0], sp.classes[c][0]);
  };
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return key(a) < key(b); });

  Rel rp = power(r, p);
  Rel rp1 = power(r, p + 1);
  Rel quotient(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (rp1.at(sp.classes[order[i]][0], sp.classes[order[j]][0])) {
        quotient.set(i, j);
      }
    }
  }

  std::vector<int> new_class(m);
  for (int i = 0; i < m; ++i) new_class[order[i]] = i;

  CanonWitness w{Hom(r.size(), m), Hom(m, r.size()), p};
  for (int x = 0; x < r.size(); ++x) {
    const Bitset& row = rp.row(x);
    for (int y = row.find_first(); y != -1; y = row.find_next(y)) {
      if (sp.class_of[y] != -1) w.to_quotient.set(x, new_class[sp.class_of[y]]);
    }
  }
  for (int i = 0; i < m; ++i) {
    w.from_quotient.set_row(i, rp.row(sp.classes[order[i]][0]));
  }

  CanonicalObject obj{quotient, decompose(quotient),
                      eventual_period(quotient).p_min, std::nullopt};
  std::vector<std::vector<int>> origin(m);
  for (int i = 0; i < m; ++i) origin[i] = sp.classes[order[i]];
  obj.vertex_origin = std::move(origin);
  return CanonizeResult{std::move(obj), std::move(w)};
}

CanonizeResult canonize(const Rel& r) {
  return canonize_at(r, eventual_period(r).p_min);
}

bool check_canon_witness(const Rel& source, const CanonizeResult& cr) {
  const Rel& q = cr.object.rel;
  const Hom& s = cr.witness.to_quotient;
  const Hom& t = cr.witness.from_quotient;
  const uint64_t p = cr.witness.shift;
  if (!is_eventual_period(source, p)) return false;
  if (!is_canonical(q).ok) return false;
  return compose(source.hom(), s) == compose(s, q.hom()) &&
         compose(t, source.hom()) == compose(q.hom(), t) &&
         compose(s, t) == power(source, p).hom() &&
         compose(t, s) == power(q, p).hom();
}

CanonicalCheck is_canonical(const Rel& r) {
  Decomposition d = decompose(r);
  if (!d.non_recurrent.empty()) {
    return {false, 1,
            "vertex " + std::to_string(d.non_recurrent.front()) +
                " is not recurrent"};
  }
  for (int i = 0; i < d.count(); ++i) {
    if (!classify_relation(restrict_to(r, d.components[i]).rel).is_bijection) {
      return {false, 2,
              "restriction to component " + std::to_string(i) +
                  " is not a bijection"};
    }
  }
  EventualPeriod ep = eventual_period(r);
  if (!(power(r, 1 + ep.p_min) == r)) {
    return {false, 3,
            "power sequence is not periodic from exponent 1 (index " +
                std::to_string(ep.index) + ")"};
  }
  return {true, 0, ""};
}

CanonicalObject as_canonical_object(const Rel& r) {
  CanonicalCheck c = is_canonical(r);
  if (!c.ok) {
    throw std::invalid_argument("relation is not canonical: " + c.detail);
  }
  return CanonicalObject{r, decompose(r), eventual_period(r).p_min,
                         std::nullopt};
}

InvRestriction inv_restriction_witnesses(const Rel& r) {
  GrandParts g = gparts(r);
  Restriction rst = restrict_to(r, g.inv);
  const uint64_t k = g.stabilization;
  Rel rk = power(r, k);
  const int n = r.size();
  const int a = static_cast<int>(rst.vertices.size());
  Hom s(n, a);
  Hom t(a, n);
  for (int i = 0; i < a; ++i) {
    for (int x = 0; x < n; ++x) {
      if (rk.at(x, rst.vertices[i])) s.set(x, i);
    }
    t.set_row(i, rk.row(rst.vertices[i]));
  }
  return InvRestriction{rst.vertices, rst.rel, std::move(s), std::move(t), k};
}

FunctionalCore per_functional(const Rel& r) {
  if (!classify_relation(r).is_map) {
    throw std::invalid_argument("per_functional: relation is not a map");
  }
  Decomposition d = decompose(r);
  Restriction rst = restrict_to(r, d.recurrent);
  return FunctionalCore{rst.vertices, rst.rel};
}

}  // namespace szymrel
