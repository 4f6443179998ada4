#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>

// Packed engine for relations on n <= 5 vertices: the whole adjacency matrix
// lives in one uint32_t with bit i*n+j for the pair (i, j). This is the
// census hot path; the general engine computes the same values and the test
// suite pins the two against each other.

namespace szymrel::detail {

struct SmallCanon {
  uint32_t bits;
  int n;

  uint64_t key() const { return static_cast<uint64_t>(n) << 32 | bits; }
};

inline uint32_t small_compose(int n, uint32_t a, uint32_t b) {
  const uint32_t rmask = (1u << n) - 1;
  uint32_t out = 0;
  for (int i = 0; i < n; ++i) {
    uint32_t ra = (a >> (i * n)) & rmask;
    uint32_t acc = 0;
    while (ra) {
      int j = std::countr_zero(ra);
      ra &= ra - 1;
      acc |= (b >> (j * n)) & rmask;
    }
    out |= acc << (i * n);
  }
  return out;
}

// Row-major bitstring order: position 0 is the most significant.
inline bool small_lex_less(uint32_t a, uint32_t b) {
  uint32_t diff = a ^ b;
  if (diff == 0) return false;
  return !(a >> std::countr_zero(diff) & 1);
}

// Certificate-canonical quotient of the class of (n, rel): the same value
// the general pipeline reaches via canonize + certificate.
inline SmallCanon small_class_rep(int n, uint32_t rel) {
  if (n == 0) return {0, 0};
  const uint32_t rmask = (1u << n) - 1;

  // Power sequence up to its first repeated value.
  uint32_t seq[40];
  int len = 1;
  seq[0] = rel;
  int i0 = 0, cyc = 0;
  while (true) {
    uint32_t nxt = small_compose(n, seq[len - 1], rel);
    int j = 0;
    while (j < len && seq[j] != nxt) ++j;
    if (j < len) {
      i0 = j + 1;
      cyc = len - j;
      break;
    }
    seq[len++] = nxt;
  }
  const int p = (std::max(i0, 1) + cyc - 1) / cyc * cyc;
  auto pow_at = [&](int e) {
    return e <= len ? seq[e - 1] : seq[i0 - 1 + (e - i0) % cyc];
  };
  const uint32_t rp = pow_at(p);
  const uint32_t rp1 = pow_at(p + 1);

  // Positive-length reachability, then recurrent vertices and components.
  uint32_t cl = rel;
  for (int k = 0; k < n; ++k) {
    const uint32_t krow = (cl >> (k * n)) & rmask;
    for (int i = 0; i < n; ++i) {
      if (cl >> (i * n + k) & 1) cl |= krow << (i * n);
    }
  }
  int comp_of[5] = {-1, -1, -1, -1, -1};
  uint32_t rec = 0;
  for (int v = 0; v < n; ++v) {
    if (cl >> (v * n + v) & 1) rec |= 1u << v;
  }
  int ncomp = 0;
  uint32_t comp_mask[5] = {0, 0, 0, 0, 0};
  for (int v = 0; v < n; ++v) {
    if (!(rec >> v & 1) || comp_of[v] != -1) continue;
    for (int u = v; u < n; ++u) {
      if ((rec >> u & 1) && (cl >> (v * n + u) & 1) && (cl >> (u * n + v) & 1)) {
        comp_of[u] = ncomp;
        comp_mask[ncomp] |= 1u << u;
      }
    }
    ++ncomp;
  }

  // Reach-partition classes over the recurrent set.
  uint32_t class_mask[5];
  int class_rep[5], class_comp[5];
  int m = 0;
  for (int v = 0; v < n; ++v) {
    if (!(rec >> v & 1)) continue;
    uint32_t msk = ((rp >> (v * n)) & rmask) & comp_mask[comp_of[v]];
    int c = 0;
    while (c < m && class_mask[c] != msk) ++c;
    if (c == m) {
      class_mask[m] = msk;
      class_rep[m] = v;
      class_comp[m] = comp_of[v];
      ++m;
    }
  }

  // Quotient adjacency between class representatives.
  uint32_t q = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (rp1 >> (class_rep[i] * n + class_rep[j]) & 1) q |= 1u << (i * m + j);
    }
  }

  // Vertex keys (component period == component class count on a canonical
  // object, out-degree, in-degree), matching the general certificate.
  int csize[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < m; ++i) ++csize[class_comp[i]];
  const uint32_t qmask = (1u << m) - 1;
  int key[5];
  for (int i = 0; i < m; ++i) {
    int od = std::popcount((q >> (i * m)) & qmask);
    int id = 0;
    for (int j = 0; j < m; ++j) id += q >> (j * m + i) & 1;
    key[i] = csize[class_comp[i]] << 8 | od << 4 | id;
  }

  int order[5];
  for (int i = 0; i < m; ++i) order[i] = i;
  std::sort(order, order + m, [&](int x, int y) {
    return key[x] != key[y] ? key[x] < key[y] : x < y;
  });
  int group_b[5], group_e[5];
  int ngroups = 0;
  for (int b = 0; b < m;) {
    int e = b;
    while (e < m && key[order[e]] == key[order[b]]) ++e;
    group_b[ngroups] = b;
    group_e[ngroups] = e;
    ++ngroups;
    b = e;
  }

  uint32_t best = 0;
  bool have = false;
  while (true) {
    uint32_t cand = 0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (q >> (order[i] * m + order[j]) & 1) cand |= 1u << (i * m + j);
      }
    }
    if (!have || small_lex_less(cand, best)) {
      best = cand;
      have = true;
    }
    bool advanced = false;
    for (int g = 0; g < ngroups && !advanced; ++g) {
      advanced = std::next_permutation(order + group_b[g], order + group_e[g]);
    }
    if (!advanced) break;
  }
  return {best, m};
}

// True when rel is the lexicographically smallest relabeling of itself.
// perms must hold every permutation of {0..n-1} as n consecutive images.
inline bool small_orbit_min(int n, uint32_t rel, const int* perms, int nperms) {
  for (int pi = 1; pi < nperms; ++pi) {  // perms[0] is the identity
    const int* f = perms + pi * n;
    uint32_t mapped = 0;
    uint32_t rest = rel;
    while (rest) {
      int t = std::countr_zero(rest);
      rest &= rest - 1;
      mapped |= 1u << (f[t / n] * n + f[t % n]);
    }
    if (small_lex_less(mapped, rel)) return false;
  }
  return true;
}

}  // namespace szymrel::detail
