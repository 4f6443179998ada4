#include "szymrel/census.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "szymrel/detail/smallrel.hpp"

namespace szymrel {

namespace {

Certificate small_to_certificate(detail::SmallCanon sc) {
  Certificate c{static_cast<uint32_t>(sc.n),
                std::vector<uint8_t>((static_cast<size_t>(sc.n) * sc.n + 7) / 8, 0)};
  for (int t = 0; t < sc.n * sc.n; ++t) {
    if (sc.bits >> t & 1) c.bytes[t >> 3] |= static_cast<uint8_t>(0x80u >> (t & 7));
  }
  return c;
}

std::string bits_string(uint32_t code, int n) {
  std::string s(static_cast<size_t>(n) * n, '0');
  for (int t = 0; t < n * n; ++t) {
    if (code >> t & 1) s[t] = '1';
  }
  return s;
}

std::string single_line(std::string text) {
  while (!text.empty() && text.back() == '\n') text.pop_back();
  std::replace(text.begin(), text.end(), '\n', ';');
  return text;
}

struct LocalAgg {
  uint64_t count = 0;
  uint32_t min_src = 0;
};

struct GlobalAgg {
  uint32_t src_n = 0;
  uint32_t src_bits = 0;
  std::vector<uint64_t> counts;  // indexed by exact n
};

void scan_range(int n, uint64_t lo, uint64_t hi, bool prune,
                const std::vector<int>& perms, uint64_t* scanned,
                std::unordered_map<uint64_t, LocalAgg>& local) {
  const int nperms = n == 0 ? 1 : static_cast<int>(perms.size()) / std::max(n, 1);
  for (uint64_t code = lo; code < hi; ++code) {
    uint32_t bits = static_cast<uint32_t>(code);
    if (prune && n > 0 &&
        !detail::small_orbit_min(n, bits, perms.data(), nperms)) {
      continue;
    }
    ++*scanned;
    detail::SmallCanon sc = detail::small_class_rep(n, bits);
    auto [it, fresh] = local.try_emplace(sc.key());
    LocalAgg& agg = it->second;
    if (fresh || detail::small_lex_less(bits, agg.min_src)) agg.min_src = bits;
    ++agg.count;
  }
}

std::vector<int> permutations_of(int n) {
  std::vector<int> base(n);
  std::iota(base.begin(), base.end(), 0);
  std::vector<int> out;
  do {
    out.insert(out.end(), base.begin(), base.end());
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

}  // namespace

CensusReport run_census(const CensusOptions& opts, const std::string& catalog_out) {
  if (opts.n_max > 5) {
    throw std::invalid_argument("run_census: n_max must be <= 5");
  }
  if (opts.workers == 0) {
    throw std::invalid_argument("run_census: workers must be >= 1");
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::unordered_map<uint64_t, GlobalAgg> classes;
  CensusReport report;
  report.workers = opts.workers;

  for (uint32_t n = 0; n <= opts.n_max; ++n) {
    const uint64_t total = uint64_t{1} << (n * n);
    const std::vector<int> perms =
        opts.prune_symmetry && n > 0 ? permutations_of(static_cast<int>(n))
                                     : std::vector<int>{};
    const uint32_t nw =
        static_cast<uint32_t>(std::min<uint64_t>(opts.workers, total));
    std::vector<std::unordered_map<uint64_t, LocalAgg>> locals(nw);
    std::vector<uint64_t> scanned(nw, 0);
    std::vector<std::thread> threads;
    for (uint32_t w = 0; w < nw; ++w) {
      const uint64_t lo = total / nw * w + std::min<uint64_t>(w, total % nw);
      const uint64_t hi =
          total / nw * (w + 1) + std::min<uint64_t>(w + 1, total % nw);
      threads.emplace_back(scan_range, static_cast<int>(n), lo, hi,
                           opts.prune_symmetry, std::cref(perms), &scanned[w],
                           std::ref(locals[w]));
    }
    for (auto& t : threads) t.join();

    // Min/sum merging commutes, so the result is worker-count independent.
    for (uint32_t w = 0; w < nw; ++w) {
      for (const auto& [key, agg] : locals[w]) {
        auto [it, fresh] = classes.try_emplace(key);
        GlobalAgg& g = it->second;
        if (fresh) {
          g.src_n = n;
          g.src_bits = agg.min_src;
          g.counts.assign(opts.n_max + 1, 0);
        } else if (g.src_n == n &&
                   detail::small_lex_less(agg.min_src, g.src_bits)) {
          g.src_bits = agg.min_src;
        }
        g.counts[n] += agg.count;
      }
    }

    const uint64_t processed =
        std::accumulate(scanned.begin(), scanned.end(), uint64_t{0});
    report.rows.push_back({n, processed, 0, classes.size()});
    if (opts.progress != nullptr) {
      *opts.progress << "n=" << n << " scanned=" << processed
                     << " classes=" << classes.size() << std::endl;
    }
  }

  Catalog cat{opts.n_max, opts.prune_symmetry, {}};
  cat.records.reserve(classes.size());
  for (const auto& [key, agg] : classes) {
    detail::SmallCanon sc{static_cast<uint32_t>(key & 0xffffffffu),
                          static_cast<int>(key >> 32)};
    CatalogRecord rec;
    rec.n_canonical = static_cast<uint32_t>(sc.n);
    rec.cert = small_to_certificate(sc);
    rec.canonical_matrix = certificate_matrix(rec.cert);
    CanonicalObject obj = as_canonical_object(rec.canonical_matrix);
    rec.component_periods = obj.decomposition.periods;
    std::sort(rec.component_periods.begin(), rec.component_periods.end());
    rec.classifying_graph_text = single_line(to_text(classifying_graph(obj)));
    rec.source_n = agg.src_n;
    rec.source_bits = bits_string(agg.src_bits, static_cast<int>(agg.src_n));
    for (uint32_t k = 0; k <= opts.n_max; ++k) {
      if (agg.counts[k] > 0) rec.preimage_counts.emplace_back(k, agg.counts[k]);
    }
    cat.records.push_back(std::move(rec));
  }
  std::sort(cat.records.begin(), cat.records.end(),
            [](const CatalogRecord& a, const CatalogRecord& b) {
              return a.cert < b.cert;
            });
  for (size_t i = 0; i < cat.records.size(); ++i) {
    cat.records[i].class_id = i;
    ++report.rows[cat.records[i].n_canonical].new_classes;
  }
  save_catalog(cat, catalog_out);
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

namespace {

std::string periods_field(const std::vector<uint64_t>& ps) {
  if (ps.empty()) return "-";
  std::string out;
  for (size_t i = 0; i < ps.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(ps[i]);
  }
  return out;
}

std::string preimage_field(const std::vector<std::pair<uint32_t, uint64_t>>& ps) {
  std::string out;
  for (size_t i = 0; i < ps.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(ps[i].first) + ":" + std::to_string(ps[i].second);
  }
  return out;
}

}  // namespace

void save_catalog(const Catalog& c, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open catalog for writing: " + path);
  os << "szymrel-catalog 1\n";
  os << "n_max " << c.n_max << '\n';
  os << "pruned " << (c.pruned ? 1 : 0) << '\n';
  os << "records " << c.records.size() << '\n';
  for (const auto& r : c.records) {
    std::string matrix;
    for (int i = 0; i < r.canonical_matrix.size(); ++i) {
      for (int j = 0; j < r.canonical_matrix.size(); ++j) {
        matrix += r.canonical_matrix.at(i, j) ? '1' : '0';
      }
    }
    os << r.class_id << '\t' << r.n_canonical << '\t'
       << (r.cert.bytes.empty() ? "-" : to_hex(r.cert)) << '\t'
       << (matrix.empty() ? "-" : matrix) << '\t'
       << periods_field(r.component_periods) << '\t'
       << (r.classifying_graph_text.empty() ? "-" : r.classifying_graph_text)
       << '\t' << r.source_n << ':'
       << (r.source_bits.empty() ? "-" : r.source_bits) << '\t'
       << preimage_field(r.preimage_counts) << '\n';
  }
  if (!os.flush()) throw std::runtime_error("catalog write failed: " + path);
}

namespace {

[[noreturn]] void corrupt(const std::string& what) { throw CatalogCorrupt(what); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t b = 0;
  while (true) {
    size_t e = s.find(sep, b);
    out.push_back(s.substr(b, e - b));
    if (e == std::string::npos) break;
    b = e + 1;
  }
  return out;
}

uint64_t parse_u64(const std::string& s, const std::string& ctx) {
  if (s.empty() || s.size() > 19 ||
      s.find_first_not_of("0123456789") != std::string::npos) {
    corrupt("bad number in " + ctx + ": '" + s + "'");
  }
  return std::stoull(s);
}

Certificate cert_from_hex(uint32_t n, const std::string& hex) {
  Certificate c{n, {}};
  if (hex == "-") {
    if (n != 0) corrupt("empty certificate for nonzero size");
    return c;
  }
  if (hex.size() != (static_cast<size_t>(n) * n + 7) / 8 * 2) {
    corrupt("certificate length mismatch");
  }
  auto nib = [](char ch) -> int {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    corrupt(std::string("bad hex digit '") + ch + "'");
  };
  for (size_t i = 0; i < hex.size(); i += 2) {
    c.bytes.push_back(static_cast<uint8_t>(nib(hex[i]) << 4 | nib(hex[i + 1])));
  }
  return c;
}

Rel rel_from_bits(uint32_t n, const std::string& bits, const std::string& ctx) {
  if (bits.size() != static_cast<size_t>(n) * n) {
    corrupt("matrix length mismatch in " + ctx);
  }
  Rel r(static_cast<int>(n));
  for (uint32_t t = 0; t < n * n; ++t) {
    if (bits[t] == '1') {
      r.set(static_cast<int>(t / n), static_cast<int>(t % n));
    } else if (bits[t] != '0') {
      corrupt("bad matrix character in " + ctx);
    }
  }
  return r;
}

}  // namespace

Catalog load_catalog(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open catalog: " + path);
  std::string line;
  auto expect_kv = [&](const std::string& k) -> std::string {
    if (!std::getline(is, line)) corrupt("truncated header");
    if (line.rfind(k + " ", 0) != 0) corrupt("expected '" + k + "' header line");
    return line.substr(k.size() + 1);
  };
  if (!std::getline(is, line) || line != "szymrel-catalog 1") {
    corrupt("bad magic line");
  }
  Catalog cat;
  cat.n_max = static_cast<uint32_t>(parse_u64(expect_kv("n_max"), "n_max"));
  cat.pruned = parse_u64(expect_kv("pruned"), "pruned") != 0;
  uint64_t nrec = parse_u64(expect_kv("records"), "records");
  for (uint64_t i = 0; i < nrec; ++i) {
    if (!std::getline(is, line)) corrupt("truncated record section");
    auto f = split(line, '\t');
    if (f.size() != 8) corrupt("record " + std::to_string(i) + ": field count");
    CatalogRecord rec;
    rec.class_id = parse_u64(f[0], "class_id");
    if (rec.class_id != i) corrupt("record " + std::to_string(i) + ": id out of order");
    rec.n_canonical = static_cast<uint32_t>(parse_u64(f[1], "n"));
    if (rec.n_canonical > cat.n_max) {
      corrupt("record " + std::to_string(i) + ": size exceeds n_max");
    }
    rec.cert = cert_from_hex(rec.n_canonical, f[2]);
    rec.canonical_matrix = rel_from_bits(
        rec.n_canonical, f[3] == "-" ? "" : f[3], "record " + std::to_string(i));
    if (f[4] != "-") {
      for (const auto& p : split(f[4], ',')) {
        rec.component_periods.push_back(parse_u64(p, "periods"));
      }
    }
    rec.classifying_graph_text = f[5] == "-" ? "" : f[5];
    auto src = split(f[6], ':');
    if (src.size() != 2) corrupt("record " + std::to_string(i) + ": source field");
    rec.source_n = static_cast<uint32_t>(parse_u64(src[0], "source n"));
    rec.source_bits = src[1] == "-" ? "" : src[1];
    if (rec.source_bits.size() != static_cast<size_t>(rec.source_n) * rec.source_n) {
      corrupt("record " + std::to_string(i) + ": source length");
    }
    for (const auto& p : split(f[7], ',')) {
      auto kv = split(p, ':');
      if (kv.size() != 2) corrupt("record " + std::to_string(i) + ": preimage field");
      rec.preimage_counts.emplace_back(
          static_cast<uint32_t>(parse_u64(kv[0], "preimage n")),
          parse_u64(kv[1], "preimage count"));
    }
    cat.records.push_back(std::move(rec));
  }
  if (std::getline(is, line) && !line.empty()) corrupt("trailing data after records");
  return cat;
}

const CatalogRecord& catalog_lookup(const Catalog& c, const Rel& r) {
  Certificate cert = certificate(canonize(r).object);
  if (cert.n > c.n_max) {
    throw CatalogNotCovered("canonical size " + std::to_string(cert.n) +
                            " exceeds catalog range n_max=" +
                            std::to_string(c.n_max));
  }
  auto it = std::lower_bound(
      c.records.begin(), c.records.end(), cert,
      [](const CatalogRecord& rec, const Certificate& key) { return rec.cert < key; });
  if (it == c.records.end() || !(it->cert == cert)) {
    throw CatalogCorrupt("class of a covered relation is missing from the catalog");
  }
  return *it;
}

VerifyReport verify_catalog(const Catalog& c, uint64_t sample) {
  auto name = [](const CatalogRecord& r) {
    return "record " + std::to_string(r.class_id);
  };
  // Certificates must be strictly increasing (sorted, unique).
  for (size_t i = 0; i + 1 < c.records.size(); ++i) {
    if (!(c.records[i].cert < c.records[i + 1].cert)) {
      corrupt(name(c.records[i + 1]) + ": certificate order violated");
    }
  }
  // Preimage counts of an unpruned census cover every relation exactly once.
  if (!c.pruned) {
    std::vector<uint64_t> sums(c.n_max + 1, 0);
    for (const auto& r : c.records) {
      for (auto [n, cnt] : r.preimage_counts) {
        if (n > c.n_max) corrupt(name(r) + ": preimage size out of range");
        sums[n] += cnt;
      }
    }
    for (uint32_t n = 0; n <= c.n_max; ++n) {
      if (sums[n] != uint64_t{1} << (n * n)) {
        corrupt("preimage counts at n=" + std::to_string(n) +
                " do not cover all relations");
      }
    }
  }

  std::vector<size_t> chosen(c.records.size());
  std::iota(chosen.begin(), chosen.end(), 0);
  if (sample != 0 && sample < c.records.size()) {
    std::mt19937_64 rng(0x5eed5eed);
    std::shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(sample);
    std::sort(chosen.begin(), chosen.end());
  }

  VerifyReport report{0, {}};
  for (size_t idx : chosen) {
    const CatalogRecord& r = c.records[idx];
    CanonicalCheck cc = is_canonical(r.canonical_matrix);
    if (!cc.ok) corrupt(name(r) + ": matrix is not canonical (" + cc.detail + ")");
    CanonicalObject obj = as_canonical_object(r.canonical_matrix);
    if (!(certificate(obj) == r.cert)) {
      corrupt(name(r) + ": certificate does not match its matrix");
    }
    auto periods = obj.decomposition.periods;
    std::sort(periods.begin(), periods.end());
    if (periods != r.component_periods) corrupt(name(r) + ": period multiset");
    if (single_line(to_text(classifying_graph(obj))) != r.classifying_graph_text) {
      corrupt(name(r) + ": classifying graph");
    }
    if (r.source_n < r.n_canonical) corrupt(name(r) + ": source smaller than class");
    Rel src = rel_from_bits(r.source_n, r.source_bits, name(r));
    if (!(certificate(canonize(src).object) == r.cert)) {
      corrupt(name(r) + ": recorded source does not map to the class");
    }
    bool has_base = false;
    for (auto [n, cnt] : r.preimage_counts) {
      if (n == r.n_canonical && cnt > 0) has_base = true;
    }
    if (!has_base) corrupt(name(r) + ": no preimages at the canonical size");
    ++report.records_checked;
  }

  // Exhaustive cross-check of distinctness where the reference procedure
  // applies.
  for (size_t i = 0; i < c.records.size(); ++i) {
    if (c.records[i].n_canonical > 2) continue;
    for (size_t j = i + 1; j < c.records.size(); ++j) {
      if (c.records[j].n_canonical > 2) continue;
      if (brute_force_szym_iso(c.records[i].canonical_matrix,
                               c.records[j].canonical_matrix)) {
        corrupt(name(c.records[i]) + " and " + name(c.records[j]) +
                ": distinct records share a class");
      }
    }
  }

  // Classifying-graph collisions between distinct classes are reported, not
  // errors: they witness that the graph is an incomplete invariant.
  std::vector<ClassifyingGraph> graphs;
  graphs.reserve(c.records.size());
  for (const auto& r : c.records) {
    graphs.push_back(classifying_graph(as_canonical_object(r.canonical_matrix)));
  }
  for (size_t i = 0; i < graphs.size(); ++i) {
    for (size_t j = i + 1; j < graphs.size(); ++j) {
      if (classifying_graphs_isomorphic(graphs[i], graphs[j])) {
        report.invariant_collisions.emplace_back(c.records[i].class_id,
                                                 c.records[j].class_id);
      }
    }
  }
  return report;
}

std::string to_text(const CensusReport& r) {
  std::ostringstream os;
  for (const auto& row : r.rows) {
    os << "n=" << row.n << " objects=" << row.objects
       << " new-classes=" << row.new_classes
       << " cumulative-classes=" << row.cumulative_classes << '\n';
  }
  if (!r.rows.empty()) {
    os << "cumulative classes: " << r.rows.back().cumulative_classes << '\n';
  }
  os << "workers: " << r.workers << '\n';
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", r.seconds);
  os << "seconds: " << buf << '\n';
  return os.str();
}

}  // namespace szymrel
