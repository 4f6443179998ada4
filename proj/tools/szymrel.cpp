// Command-line front door: every pipeline stage runnable from the shell.
// Exit status 0 = success (or "true" for decision commands), 1 = "false",
// 2 = usage or input errors.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "szymrel/canon.hpp"
#include "szymrel/census.hpp"
#include "szymrel/errors.hpp"
#include "szymrel/graphdyn.hpp"
#include "szymrel/relation.hpp"
#include "szymrel/szymiso.hpp"

namespace {

using namespace szymrel;

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Rel load_rel(const std::string& path) {
  try {
    return parse_rel(read_file(path));
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

// Prefixes every line with "# " so the block reads back as matrix comments.
void print_commented(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) std::cout << "# " << line << '\n';
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string cert_field(const Certificate& c) {
  return c.bytes.empty() ? "-" : to_hex(c);
}

std::string bits_field(const Rel& r) {
  if (r.size() == 0) return "-";
  std::string s;
  for (int i = 0; i < r.size(); ++i) {
    for (int j = 0; j < r.size(); ++j) s += r.at(i, j) ? '1' : '0';
  }
  return s;
}

int cmd_canonize(const std::string& path, bool has_p, uint64_t p,
                 bool with_witness) {
  Rel r = load_rel(path);
  CanonizeResult cr = has_p ? canonize_at(r, p) : canonize(r);
  const CanonicalObject& obj = cr.object;
  std::cout << to_text(obj.rel);
  std::cout << "# p-min " << obj.p_min << '\n';
  std::cout << "# shift " << cr.witness.shift << '\n';
  const Decomposition& d = obj.decomposition;
  for (int i = 0; i < d.count(); ++i) {
    std::cout << "# component " << i << " period=" << d.periods[i]
              << " vertices=" << join_ints(d.components[i]) << '\n';
  }
  if (obj.vertex_origin) {
    for (size_t c = 0; c < obj.vertex_origin->size(); ++c) {
      std::cout << "# class " << c << " <- " << join_ints((*obj.vertex_origin)[c])
                << '\n';
    }
  }
  if (with_witness) {
    std::cout << "# to-quotient\n";
    print_commented(to_text(cr.witness.to_quotient));
    std::cout << "# from-quotient\n";
    print_commented(to_text(cr.witness.from_quotient));
  }
  return 0;
}

int cmd_iso(const std::string& pa, const std::string& pb, bool witness,
            bool oracle) {
  Rel a = load_rel(pa);
  Rel b = load_rel(pb);
  IsoResult res{false, std::nullopt};
  bool iso;
  if (oracle) {
    iso = brute_force_szym_iso(a, b);
  } else {
    res = szym_isomorphic(a, b, witness);
    iso = res.isomorphic;
  }
  std::cout << (iso ? "ISOMORPHIC" : "NOT-ISOMORPHIC") << '\n';
  if (witness && res.witness) {
    const IsoWitness& w = *res.witness;
    std::cout << "# bijection " << join_ints(w.bijection) << '\n';
    std::cout << "# forward shift=" << w.forward.shift << '\n';
    print_commented(to_text(w.forward.hom));
    std::cout << "# backward shift=" << w.backward.shift << '\n';
    print_commented(to_text(w.backward.hom));
  }
  if (witness && !iso) {
    // Negative verdicts are certified by the distinguishing certificates.
    Certificate ca = certificate(canonize(a).object);
    Certificate cb = certificate(canonize(b).object);
    std::cout << "# cert-a " << ca.n << ' ' << cert_field(ca) << '\n';
    std::cout << "# cert-b " << cb.n << ' ' << cert_field(cb) << '\n';
  }
  return iso ? 0 : 1;
}

int cmd_cert(const std::string& path) {
  Certificate c = certificate(canonize(load_rel(path)).object);
  std::cout << c.n << ' ' << cert_field(c) << '\n';
  return 0;
}

int cmd_classify(const std::string& path) {
  std::cout << to_text(classifying_graph(canonize(load_rel(path)).object));
  return 0;
}

int cmd_decompose(const std::string& path) {
  Rel r = load_rel(path);
  std::cout << to_text(decompose(r));
  EventualPeriod ep = eventual_period(r);
  std::cout << "p-min " << ep.p_min << " index " << ep.index << " cycle "
            << ep.cycle_len << '\n';
  return 0;
}

int cmd_census(uint32_t max_n, const std::string& out, uint32_t workers,
               bool prune) {
  CensusOptions opts;
  opts.n_max = max_n;
  opts.workers = workers;
  opts.prune_symmetry = prune;
  opts.progress = &std::cerr;
  std::cout << to_text(run_census(opts, out));
  return 0;
}

int cmd_lookup(const std::string& catalog_path, const std::string& rel_path) {
  Catalog cat = load_catalog(catalog_path);
  const CatalogRecord& rec = catalog_lookup(cat, load_rel(rel_path));
  std::cout << "class " << rec.class_id << '\n';
  std::cout << "n " << rec.n_canonical << '\n';
  std::cout << "cert " << cert_field(rec.cert) << '\n';
  std::cout << "matrix " << bits_field(rec.canonical_matrix) << '\n';
  std::cout << "periods " << [&] {
    std::string s;
    for (size_t i = 0; i < rec.component_periods.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(rec.component_periods[i]);
    }
    return s.empty() ? "-" : s;
  }() << '\n';
  std::cout << "graph "
            << (rec.classifying_graph_text.empty() ? "-"
                                                   : rec.classifying_graph_text)
            << '\n';
  std::cout << "source " << rec.source_n << ':'
            << (rec.source_bits.empty() ? "-" : rec.source_bits) << '\n';
  std::cout << "preimages";
  for (auto [n, cnt] : rec.preimage_counts) {
    std::cout << ' ' << n << ':' << cnt;
  }
  std::cout << '\n';
  return 0;
}

int cmd_verify(const std::string& catalog_path, uint64_t sample) {
  VerifyReport rep = verify_catalog(load_catalog(catalog_path), sample);
  std::cout << "records-checked " << rep.records_checked << '\n';
  std::cout << "invariant-collisions " << rep.invariant_collisions.size()
            << '\n';
  for (auto [a, b] : rep.invariant_collisions) {
    std::cout << "collision " << a << ' ' << b << '\n';
  }
  return 0;
}

int cmd_export_dot(const std::string& path, bool classifying,
                   const std::string& out) {
  Rel r = load_rel(path);
  std::ostringstream os;
  if (classifying) {
    ClassifyingGraph g = classifying_graph(canonize(r).object);
    os << "digraph classifying {\n";
    for (size_t v = 0; v < g.vertex_periods.size(); ++v) {
      os << "  n" << v << " [label=\"period " << g.vertex_periods[v] << "\"];\n";
    }
    for (const auto& e : g.edges) {
      os << "  n" << e.from << " -> n" << e.to << " [label=\"" << e.label
         << "\"];\n";
    }
    os << "}\n";
  } else {
    os << "digraph rel {\n";
    for (int v = 0; v < r.size(); ++v) os << "  n" << v << ";\n";
    for (int i = 0; i < r.size(); ++i) {
      const Bitset& row = r.row(i);
      for (int j = row.find_first(); j >= 0; j = row.find_next(j)) {
        os << "  n" << i << " -> n" << j << ";\n";
      }
    }
    os << "}\n";
  }
  if (out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + out);
    f << os.str();
    if (!f.flush()) throw std::runtime_error("write failed: " + out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "canonical forms, isomorphism decisions, and class catalogs for finite "
      "relations"};
  app.require_subcommand(1);

  std::string in_a, in_b, catalog, out;
  uint64_t p = 0;
  uint64_t sample = 0;
  bool witness = false, oracle = false, classifying = false, prune = false;
  uint32_t max_n = 5, workers = 1;

  auto* canonize_cmd = app.add_subcommand(
      "canonize", "print the canonical form plus a sidecar comment block");
  canonize_cmd->add_option("input", in_a, "matrix file")->required();
  auto* p_opt =
      canonize_cmd->add_option("--p", p, "eventual period to use (validated)");
  canonize_cmd->add_flag("--witness", witness,
                         "also print the connecting morphism pair");

  auto* iso_cmd =
      app.add_subcommand("iso", "decide whether two systems are isomorphic");
  iso_cmd->add_option("a", in_a, "first matrix file")->required();
  iso_cmd->add_option("b", in_b, "second matrix file")->required();
  iso_cmd->add_flag("--witness", witness,
                    "print the inverse pair or the distinguishing certificates");
  iso_cmd->add_flag("--oracle", oracle,
                    "decide by exhaustive morphism search (sizes <= 3)");

  auto* cert_cmd = app.add_subcommand(
      "cert", "print the conjugacy certificate of the canonical form");
  cert_cmd->add_option("input", in_a, "matrix file")->required();

  auto* classify_cmd = app.add_subcommand(
      "classify", "print the classifying graph of the canonical form");
  classify_cmd->add_option("input", in_a, "matrix file")->required();

  auto* decompose_cmd = app.add_subcommand(
      "decompose", "print recurrent components, periods, and their order");
  decompose_cmd->add_option("input", in_a, "matrix file")->required();

  auto* census_cmd = app.add_subcommand(
      "census", "enumerate isomorphism classes up to a maximal cardinality");
  census_cmd->add_option("--max-n", max_n, "largest ground-set size")
      ->capture_default_str();
  census_cmd->add_option("--out", out, "catalog output path")->required();
  census_cmd->add_option("--workers", workers, "worker thread count")
      ->capture_default_str();
  census_cmd->add_flag("--prune-symmetry", prune,
                       "enumerate permutation-orbit minima only");

  auto* lookup_cmd = app.add_subcommand(
      "lookup", "find the class record of a relation in a catalog");
  lookup_cmd->add_option("catalog", catalog, "catalog file")->required();
  lookup_cmd->add_option("input", in_a, "matrix file")->required();

  auto* verify_cmd = app.add_subcommand(
      "verify-catalog", "re-derive and cross-check catalog records");
  verify_cmd->add_option("catalog", catalog, "catalog file")->required();
  verify_cmd->add_option("--sample", sample, "records to check (0 = all)")
      ->capture_default_str();

  auto* dot_cmd = app.add_subcommand(
      "export-dot", "emit a dot description of a relation or classifying graph");
  dot_cmd->add_option("input", in_a, "matrix file")->required();
  dot_cmd->add_flag("--classifying", classifying,
                    "export the classifying graph of the canonical form");
  dot_cmd->add_option("--out", out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(canonize_cmd)) {
      return cmd_canonize(in_a, p_opt->count() > 0, p, witness);
    }
    if (app.got_subcommand(iso_cmd)) return cmd_iso(in_a, in_b, witness, oracle);
    if (app.got_subcommand(cert_cmd)) return cmd_cert(in_a);
    if (app.got_subcommand(classify_cmd)) return cmd_classify(in_a);
    if (app.got_subcommand(decompose_cmd)) return cmd_decompose(in_a);
    if (app.got_subcommand(census_cmd)) {
      return cmd_census(max_n, out, workers, prune);
    }
    if (app.got_subcommand(lookup_cmd)) return cmd_lookup(catalog, in_a);
    if (app.got_subcommand(verify_cmd)) return cmd_verify(catalog, sample);
    if (app.got_subcommand(dot_cmd)) {
      return cmd_export_dot(in_a, classifying, out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
