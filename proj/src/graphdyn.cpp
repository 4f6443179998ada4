#include "szymrel/graphdyn.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace szymrel {

namespace {

// Positive-length reachability closure, one row per vertex.
std::vector<Bitset> reach_closure(const Rel& r) {
  const int n = r.size();
  std::vector<Bitset> reach(n);
  for (int i = 0; i < n; ++i) reach[i] = r.row(i);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (reach[i].test(k)) reach[i] |= reach[k];
    }
  }
  return reach;
}

// Walk-length residues from component[0], computed on the restriction.
// Returns the period; levels[i] (mod period) corresponds to component[i]
// when levels != nullptr.
uint64_t scc_period(const Rel& r, const std::vector<int>& component,
                    std::vector<uint64_t>* levels) {
  if (component.empty()) {
    throw std::invalid_argument("component_period: empty vertex set");
  }
  Restriction rst = restrict_to(r, component);
  const int m = rst.rel.size();
  std::vector<int64_t> level(m, -1);
  std::vector<int> order;
  order.reserve(m);
  level[0] = 0;
  order.push_back(0);
  for (size_t head = 0; head < order.size(); ++head) {
    int u = order[head];
    const Bitset& row = rst.rel.row(u);
    for (int v = row.find_first(); v != -1; v = row.find_next(v)) {
      if (level[v] == -1) {
        level[v] = level[u] + 1;
        order.push_back(v);
      }
    }
  }
  if (static_cast<int>(order.size()) != m) {
    throw std::invalid_argument("component_period: set is not strongly connected");
  }
  uint64_t q = 0;
  for (int u = 0; u < m; ++u) {
    const Bitset& row = rst.rel.row(u);
    for (int v = row.find_first(); v != -1; v = row.find_next(v)) {
      int64_t diff = level[u] + 1 - level[v];
      q = std::gcd(q, static_cast<uint64_t>(diff < 0 ? -diff : diff));
    }
  }
  if (q == 0) {
    // A strongly connected set under positive-length walks always closes a
    // cycle, so some edge must produce a nonzero level difference.
    throw std::invalid_argument("component_period: set is not strongly connected");
  }
  // Mutual reachability check: BFS covered everything forward; confirm the
  // reverse direction too, otherwise a DAG-shaped set could slip through.
  auto reach = reach_closure(rst.rel);
  for (int u = 0; u < m; ++u) {
    if (!reach[u].test(0)) {
      throw std::invalid_argument("component_period: set is not strongly connected");
    }
  }
  if (levels != nullptr) {
    levels->assign(m, 0);
    for (int u = 0; u < m; ++u) {
      (*levels)[u] = static_cast<uint64_t>(level[u]) % q;
    }
  }
  return q;
}

}  // namespace

Decomposition decompose(const Rel& r) {
  const int n = r.size();
  auto reach = reach_closure(r);
  Decomposition d;
  d.recurrent = Bitset(n);
  d.component_of.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    if (reach[v].test(v)) d.recurrent.set(v);
  }
  for (int v = 0; v < n; ++v) {
    if (!d.recurrent.test(v)) {
      d.non_recurrent.push_back(v);
      continue;
    }
    if (d.component_of[v] != -1) continue;
    std::vector<int> comp;
    for (int u = v; u != -1; u = d.recurrent.find_next(u)) {
      if (reach[v].test(u) && reach[u].test(v)) comp.push_back(u);
    }
    int id = static_cast<int>(d.components.size());
    for (int u : comp) d.component_of[u] = id;
    d.components.push_back(std::move(comp));
  }
  for (const auto& comp : d.components) {
    d.periods.push_back(scc_period(r, comp, nullptr));
  }
  const int k = d.count();
  d.order.assign(k, Bitset(k));
  for (int u = 0; u < k; ++u) {
    for (int v = 0; v < k; ++v) {
      // u below v: a positive-length walk leads from v into u (or u == v).
      if (u == v || reach[d.components[v][0]].test(d.components[u][0])) {
        d.order[u].set(v);
      }
    }
  }
  return d;
}

uint64_t component_period(const Rel& r, const std::vector<int>& component) {
  for (int v : component) {
    if (v < 0 || v >= r.size()) {
      throw std::invalid_argument("component_period: vertex out of range");
    }
  }
  return scc_period(r, component, nullptr);
}

std::vector<uint64_t> component_levels(const Rel& r,
                                       const std::vector<int>& component) {
  for (int v : component) {
    if (v < 0 || v >= r.size()) {
      throw std::invalid_argument("component_period: vertex out of range");
    }
  }
  std::vector<uint64_t> levels;
  scc_period(r, component, &levels);
  return levels;
}

EventualPeriod eventual_period(const Rel& r) {
  const int n = r.size();
  const uint64_t wielandt = n == 0 ? 1 : static_cast<uint64_t>(n - 1) * (n - 1) + 1;
  // Walk the power sequence until it revisits a value. The memo inside r
  // performs the detection; powers after the repeat come back reduced, so the
  // first k with power(r, k) == power(r, j) for some j < k is found by
  // scanning forward.
  std::vector<Rel> seen;
  seen.push_back(power(r, 1));
  for (uint64_t k = 2;; ++k) {
    Rel cur = power(r, k);
    for (uint64_t j = 0; j < seen.size(); ++j) {
      if (seen[j] == cur) {
        uint64_t index = j + 1;
        uint64_t cycle = k - index;
        if (index > wielandt) {
          throw std::logic_error("power sequence index exceeds its theoretical bound");
        }
        uint64_t base = std::max<uint64_t>(index, 1);
        uint64_t p = (base + cycle - 1) / cycle * cycle;
        return EventualPeriod{p, index, cycle};
      }
    }
    seen.push_back(std::move(cur));
  }
}

bool is_eventual_period(const Rel& r, uint64_t p) {
  if (p == 0) return false;
  EventualPeriod ep = eventual_period(r);
  return p % ep.cycle_len == 0 && p >= ep.index;
}

std::pair<uint64_t, uint64_t> positive_diophantine(uint64_t a, uint64_t b,
                                                   uint64_t n) {
  if (a == 0 || b == 0) {
    throw std::invalid_argument("positive_diophantine: a and b must be positive");
  }
  uint64_t q = std::gcd(a, b);
  uint64_t target = 0, t1 = 0;
  if (__builtin_mul_overflow(a / q, b, &t1) ||
      __builtin_add_overflow(t1, q, &target) ||
      __builtin_mul_overflow(n, q, &t1) ||
      __builtin_add_overflow(target, t1, &target)) {
    throw std::overflow_error("positive_diophantine: target overflows");
  }
  for (uint64_t y = 1; y <= a / q; ++y) {
    uint64_t by = b * y;
    if (by < target && (target - by) % a == 0) {
      uint64_t x = (target - by) / a;
      if (x >= 1) return {x, y};
    }
  }
  throw std::logic_error("positive_diophantine: no solution found in range");
}

std::string to_text(const Decomposition& d) {
  std::ostringstream os;
  os << "components " << d.count() << '\n';
  for (int i = 0; i < d.count(); ++i) {
    os << "component " << i << " period=" << d.periods[i] << " vertices";
    for (int v : d.components[i]) os << ' ' << v;
    os << '\n';
  }
  os << "non-recurrent";
  for (int v : d.non_recurrent) os << ' ' << v;
  os << '\n';
  for (int u = 0; u < d.count(); ++u) {
    for (int v = 0; v < d.count(); ++v) {
      if (u != v && d.below(u, v)) os << "order " << u << " <= " << v << '\n';
    }
  }
  return os.str();
}

}  // namespace szymrel
