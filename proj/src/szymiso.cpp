#include "szymrel/szymiso.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace szymrel {

namespace {

void check_morphism_dims(const SzymMorphism& m) {
  if (m.hom.n_src() != m.source.size() || m.hom.n_dst() != m.target.size()) {
    throw std::invalid_argument("morphism dimensions do not match its endpoints");
  }
}

}  // namespace

bool is_morphism(const SzymMorphism& m) {
  check_morphism_dims(m);
  return compose(m.hom, m.target.hom()) == compose(m.source.hom(), m.hom);
}

bool szym_equivalent(const SzymMorphism& a, const SzymMorphism& b) {
  check_morphism_dims(a);
  check_morphism_dims(b);
  if (!(a.source == b.source) || !(a.target == b.target)) {
    throw std::invalid_argument("szym_equivalent: endpoints differ");
  }
  // Witness exponents beyond index + cycle of the source power sequence
  // reduce into that range, so the search below is exhaustive.
  EventualPeriod ep = eventual_period(a.source);
  for (uint64_t k = 0; k <= ep.index + ep.cycle_len; ++k) {
    if (compose(power(a.source, b.shift + k).hom(), a.hom) ==
        compose(power(a.source, a.shift + k).hom(), b.hom)) {
      return true;
    }
  }
  return false;
}

bool verify_szym_inverse(const SzymMorphism& s, const SzymMorphism& t) {
  if (!(s.source == t.target) || !(s.target == t.source)) {
    throw std::invalid_argument("verify_szym_inverse: endpoints do not match");
  }
  if (!is_morphism(s) || !is_morphism(t)) {
    throw std::invalid_argument("verify_szym_inverse: argument is not a morphism");
  }
  const uint64_t shift = s.shift + t.shift;
  SzymMorphism fwd{compose(s.hom, t.hom), shift, s.source, s.source};
  SzymMorphism bwd{compose(t.hom, s.hom), shift, s.target, s.target};
  SzymMorphism id_src{Hom::identity(s.source.size()), 0, s.source, s.source};
  SzymMorphism id_tgt{Hom::identity(s.target.size()), 0, s.target, s.target};
  return szym_equivalent(fwd, id_src) && szym_equivalent(bwd, id_tgt);
}

namespace {

// Joint color refinement over the disjoint union of two digraphs; equal
// colors are a necessary condition for vertices to correspond under any
// conjugacy. Colors start from per-vertex structural invariants.
std::pair<std::vector<int>, std::vector<int>> refine_colors(const Rel& a,
                                                            const Rel& b) {
  const int na = a.size(), nb = b.size(), n = na + nb;
  auto edge = [&](int u, int v) {
    if (u < na) return v < na && a.at(u, v);
    return v >= na && b.at(u - na, v - na);
  };
  std::vector<std::vector<uint64_t>> sig(n);
  auto initial = [&](const Rel& r, int base) {
    Decomposition d = decompose(r);
    for (int v = 0; v < r.size(); ++v) {
      int c = d.component_of[v];
      sig[base + v] = {c == -1 ? 0 : 1,
                       c == -1 ? 0 : d.periods[c],
                       c == -1 ? 0 : d.components[c].size(),
                       static_cast<uint64_t>(r.row(v).count()),
                       static_cast<uint64_t>(inverse(r.hom()).row(v).count()),
                       static_cast<uint64_t>(r.at(v, v))};
    }
  };
  initial(a, 0);
  initial(b, na);
  std::vector<int> color(n, 0);
  int classes = 0;
  while (true) {
    std::map<std::vector<uint64_t>, int> dense;
    std::vector<int> next(n);
    for (int v = 0; v < n; ++v) {
      auto [it, fresh] = dense.emplace(sig[v], static_cast<int>(dense.size()));
      next[v] = it->second;
      (void)fresh;
    }
    int next_classes = static_cast<int>(dense.size());
    color = next;
    if (next_classes == classes) break;
    classes = next_classes;
    for (int v = 0; v < n; ++v) {
      std::vector<uint64_t> out, in;
      for (int u = 0; u < n; ++u) {
        if (edge(v, u)) out.push_back(color[u]);
        if (edge(u, v)) in.push_back(color[u]);
      }
      std::sort(out.begin(), out.end());
      std::sort(in.begin(), in.end());
      sig[v] = {static_cast<uint64_t>(color[v])};
      sig[v].push_back(out.size());
      sig[v].insert(sig[v].end(), out.begin(), out.end());
      sig[v].insert(sig[v].end(), in.begin(), in.end());
    }
  }
  return {std::vector<int>(color.begin(), color.begin() + na),
          std::vector<int>(color.begin() + na, color.end())};
}

}  // namespace

std::optional<std::vector<int>> conjugate(const Rel& a, const Rel& b) {
  const int n = a.size();
  if (n != b.size()) return std::nullopt;
  if (n == 0) return std::vector<int>{};
  auto [ca, cb] = refine_colors(a, b);
  {
    auto ma = ca, mb = cb;
    std::sort(ma.begin(), ma.end());
    std::sort(mb.begin(), mb.end());
    if (ma != mb) return std::nullopt;
  }
  std::vector<std::vector<int>> cand(n);
  for (int v = 0; v < n; ++v) {
    for (int w = 0; w < n; ++w) {
      if (ca[v] == cb[w]) cand[v].push_back(w);
    }
  }
  std::vector<int> vorder(n);
  std::iota(vorder.begin(), vorder.end(), 0);
  std::sort(vorder.begin(), vorder.end(), [&](int x, int y) {
    return std::pair(cand[x].size(), x) < std::pair(cand[y].size(), y);
  });
  std::vector<int> f(n, -1);
  std::vector<char> used(n, 0);
  auto rec = [&](auto&& self, int depth) -> bool {
    if (depth == n) return true;
    int v = vorder[depth];
    for (int w : cand[v]) {
      if (used[w]) continue;
      bool ok = b.at(w, w) == a.at(v, v);
      for (int d = 0; ok && d < depth; ++d) {
        int u = vorder[d];
        ok = a.at(v, u) == b.at(w, f[u]) && a.at(u, v) == b.at(f[u], w);
      }
      if (!ok) continue;
      f[v] = w;
      used[w] = 1;
      if (self(self, depth + 1)) return true;
      used[w] = 0;
      f[v] = -1;
    }
    return false;
  };
  if (!rec(rec, 0)) return std::nullopt;
  return f;
}

IsoResult szym_isomorphic(const Rel& a, const Rel& b, bool want_witness) {
  CanonizeResult ca = canonize(a);
  CanonizeResult cb = canonize(b);
  auto f = conjugate(ca.object.rel, cb.object.rel);
  if (!f) return IsoResult{false, std::nullopt};
  if (!want_witness) return IsoResult{true, std::nullopt};
  const int m = ca.object.rel.size();
  Hom fw(m, m), bw(m, m);
  for (int i = 0; i < m; ++i) {
    fw.set(i, (*f)[i]);
    bw.set((*f)[i], i);
  }
  SzymMorphism forward{
      compose(ca.witness.to_quotient, compose(fw, cb.witness.from_quotient)),
      ca.witness.shift + cb.witness.shift, a, b};
  SzymMorphism backward{
      compose(cb.witness.to_quotient, compose(bw, ca.witness.from_quotient)),
      ca.witness.shift + cb.witness.shift, b, a};
  return IsoResult{
      true, IsoWitness{std::move(ca), std::move(cb), std::move(*f),
                       std::move(forward), std::move(backward)}};
}

ClassifyingGraph classifying_graph(const CanonicalObject& c) {
  const Decomposition& d = c.decomposition;
  ClassifyingGraph g;
  g.vertex_periods = d.periods;
  std::vector<uint64_t> level(c.rel.size(), 0);
  for (int i = 0; i < d.count(); ++i) {
    auto lv = component_levels(c.rel, d.components[i]);
    for (size_t t = 0; t < lv.size(); ++t) level[d.components[i][t]] = lv[t];
  }
  for (int i = 0; i < d.count(); ++i) {
    for (int j = 0; j < d.count(); ++j) {
      if (i == j) continue;
      uint64_t gq = std::gcd(d.periods[i], d.periods[j]);
      std::vector<char> res(gq, 0);
      uint64_t distinct = 0;
      for (int x : d.components[i]) {
        const Bitset& row = c.rel.row(x);
        for (int y : d.components[j]) {
          if (!row.test(y)) continue;
          uint64_t r = (level[y] % gq + gq - level[x] % gq) % gq;
          if (!res[r]) {
            res[r] = 1;
            ++distinct;
          }
        }
      }
      if (distinct > 0) g.edges.push_back({i, j, distinct});
    }
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const auto& a, const auto& b) {
    return std::pair(a.from, a.to) < std::pair(b.from, b.to);
  });
  return g;
}

bool classifying_graphs_isomorphic(const ClassifyingGraph& a,
                                   const ClassifyingGraph& b) {
  const int n = static_cast<int>(a.vertex_periods.size());
  if (n != static_cast<int>(b.vertex_periods.size())) return false;
  if (a.edges.size() != b.edges.size()) return false;
  auto label_matrix = [](const ClassifyingGraph& g, int n) {
    std::vector<std::vector<uint64_t>> m(n, std::vector<uint64_t>(n, 0));
    for (const auto& e : g.edges) m[e.from][e.to] = e.label;
    return m;
  };
  auto la = label_matrix(a, n), lb = label_matrix(b, n);
  // Vertex signature: period plus sorted incident (label, other period) lists.
  auto signature = [&](const ClassifyingGraph& g, const auto& lm, int v) {
    std::vector<uint64_t> out, in;
    for (int u = 0; u < n; ++u) {
      if (lm[v][u]) {
        out.push_back(lm[v][u] << 32 | g.vertex_periods[u]);
      }
      if (lm[u][v]) {
        in.push_back(lm[u][v] << 32 | g.vertex_periods[u]);
      }
    }
    std::sort(out.begin(), out.end());
    std::sort(in.begin(), in.end());
    std::vector<uint64_t> sig{g.vertex_periods[v], out.size()};
    sig.insert(sig.end(), out.begin(), out.end());
    sig.insert(sig.end(), in.begin(), in.end());
    return sig;
  };
  std::vector<std::vector<int>> cand(n);
  for (int v = 0; v < n; ++v) {
    auto sv = signature(a, la, v);
    for (int w = 0; w < n; ++w) {
      if (sv == signature(b, lb, w)) cand[v].push_back(w);
    }
    if (cand[v].empty()) return false;
  }
  std::vector<int> f(n, -1);
  std::vector<char> used(n, 0);
  auto rec = [&](auto&& self, int v) -> bool {
    if (v == n) return true;
    for (int w : cand[v]) {
      if (used[w]) continue;
      bool ok = true;
      for (int u = 0; ok && u < v; ++u) {
        ok = la[v][u] == lb[w][f[u]] && la[u][v] == lb[f[u]][w];
      }
      if (!ok) continue;
      f[v] = w;
      used[w] = 1;
      if (self(self, v + 1)) return true;
      used[w] = 0;
      f[v] = -1;
    }
    return false;
  };
  return rec(rec, 0);
}

std::string to_text(const ClassifyingGraph& g) {
  std::ostringstream os;
  for (size_t v = 0; v < g.vertex_periods.size(); ++v) {
    os << "v " << v << " period=" << g.vertex_periods[v] << '\n';
  }
  for (const auto& e : g.edges) {
    os << "e " << e.from << ' ' << e.to << " l=" << e.label << '\n';
  }
  return os.str();
}

Certificate certificate(const CanonicalObject& c) {
  const Rel& r = c.rel;
  const int n = r.size();
  const Decomposition& d = c.decomposition;
  // Conjugacy-invariant vertex keys; minimizing only over key-preserving
  // relabelings keeps the search tiny without losing completeness.
  std::vector<std::tuple<uint64_t, uint64_t, int, int>> key(n);
  Hom inv = inverse(r.hom());
  for (int v = 0; v < n; ++v) {
    int comp = d.component_of[v];
    key[v] = {d.periods[comp], d.components[comp].size(), r.row(v).count(),
              inv.row(v).count()};
  }
  std::vector<int> current(n);
  std::iota(current.begin(), current.end(), 0);
  std::sort(current.begin(), current.end(), [&](int x, int y) {
    return std::pair(key[x], x) < std::pair(key[y], y);
  });
  std::vector<std::pair<int, int>> groups;
  for (int b = 0; b < n;) {
    int e = b;
    while (e < n && key[current[e]] == key[current[b]]) ++e;
    groups.emplace_back(b, e);
    b = e;
  }
  const size_t nbytes = (static_cast<size_t>(n) * n + 7) / 8;
  std::vector<uint8_t> best;
  std::vector<uint8_t> cand(nbytes);
  bool first = true;
  while (true) {
    std::fill(cand.begin(), cand.end(), 0);
    for (int i = 0; i < n; ++i) {
      const Bitset& row = r.row(current[i]);
      for (int j = 0; j < n; ++j) {
        if (row.test(current[j])) {
          size_t t = static_cast<size_t>(i) * n + j;
          cand[t >> 3] |= static_cast<uint8_t>(0x80u >> (t & 7));
        }
      }
    }
    if (first || cand < best) {
      best = cand;
      first = false;
    }
    bool advanced = false;
    for (auto [b, e] : groups) {
      if (std::next_permutation(current.begin() + b, current.begin() + e)) {
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return Certificate{static_cast<uint32_t>(n), best};
}

Rel certificate_matrix(const Certificate& c) {
  Rel r(static_cast<int>(c.n));
  for (uint32_t i = 0; i < c.n; ++i) {
    for (uint32_t j = 0; j < c.n; ++j) {
      size_t t = static_cast<size_t>(i) * c.n + j;
      if (c.bytes[t >> 3] & (0x80u >> (t & 7))) r.set(i, j);
    }
  }
  return r;
}

std::string to_hex(const Certificate& c) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(c.bytes.size() * 2);
  for (uint8_t b : c.bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

bool brute_force_szym_iso(const Rel& a, const Rel& b) {
  const int na = a.size(), nb = b.size();
  if (na > 3 || nb > 3) {
    throw std::invalid_argument("brute_force_szym_iso: sizes must be <= 3");
  }
  auto morphisms = [](const Rel& from, const Rel& to) {
    std::vector<Hom> out;
    const int bits = from.size() * to.size();
    for (uint32_t mask = 0; mask < (1u << bits); ++mask) {
      Hom h(from.size(), to.size());
      for (int t = 0; t < bits; ++t) {
        if (mask >> t & 1) h.set(t / to.size(), t % to.size());
      }
      if (compose(h, to.hom()) == compose(from.hom(), h)) out.push_back(std::move(h));
    }
    return out;
  };
  auto ss = morphisms(a, b);
  auto ts = morphisms(b, a);
  EventualPeriod ea = eventual_period(a), eb = eventual_period(b);
  const uint64_t ka = ea.index + ea.cycle_len;
  const uint64_t kb = eb.index + eb.cycle_len;
  const uint64_t sigma_max =
      std::max(4 * std::max(ea.p_min, eb.p_min),
               std::max(ea.index, eb.index) + std::lcm(ea.cycle_len, eb.cycle_len));
  std::vector<Hom> apow, bpow;
  for (uint64_t e = 0; e <= sigma_max + ka; ++e) apow.push_back(power(a, e).hom());
  for (uint64_t e = 0; e <= sigma_max + kb; ++e) bpow.push_back(power(b, e).hom());
  std::vector<Hom> pa(ka + 1), qb(kb + 1);
  for (const Hom& s : ss) {
    for (const Hom& t : ts) {
      Hom p = compose(s, t);
      Hom q = compose(t, s);
      for (uint64_t k = 0; k <= ka; ++k) pa[k] = compose(apow[k], p);
      for (uint64_t k = 0; k <= kb; ++k) qb[k] = compose(bpow[k], q);
      for (uint64_t sigma = 0; sigma <= sigma_max; ++sigma) {
        bool fwd = false;
        for (uint64_t k = 0; !fwd && k <= ka; ++k) fwd = pa[k] == apow[sigma + k];
        if (!fwd) continue;
        bool bwd = false;
        for (uint64_t k = 0; !bwd && k <= kb; ++k) bwd = qb[k] == bpow[sigma + k];
        if (bwd) return true;
      }
    }
  }
  return false;
}

}  // namespace szymrel
