#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "szymrel/canon.hpp"
#include "szymrel/census.hpp"
#include "szymrel/errors.hpp"
#include "szymrel/relation.hpp"
#include "szymrel/szymiso.hpp"
#include "testutil.hpp"

using namespace szymrel;
using testutil::nth_rel;
using testutil::random_rel;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  REQUIRE(out.good());
}

CensusReport census_to(uint32_t n_max, const std::string& path,
                       uint32_t workers = 1, bool prune = false) {
  CensusOptions opts;
  opts.n_max = n_max;
  opts.workers = workers;
  opts.prune_symmetry = prune;
  return run_census(opts, path);
}

}  // namespace

TEST_CASE("census class counts on the small range") {
  CensusReport rep = census_to(3, "census_c3.tsv");
  REQUIRE(rep.rows.size() == 4);
  uint64_t expect_objects[] = {1, 2, 16, 512};
  uint64_t expect_cumulative[] = {1, 2, 5, 14};
  for (size_t i = 0; i < 4; ++i) {
    CHECK(rep.rows[i].n == i);
    CHECK(rep.rows[i].objects == expect_objects[i]);
    CHECK(rep.rows[i].cumulative_classes == expect_cumulative[i]);
  }
  CHECK(rep.workers == 1);

  std::string text = to_text(rep);
  CHECK(text.find("n=2 objects=16 new-classes=3 cumulative-classes=5\n") !=
        std::string::npos);
  CHECK(text.find("cumulative classes: 14\n") != std::string::npos);
  CHECK(text.find("workers: 1\n") != std::string::npos);
}

TEST_CASE("catalog records are internally consistent") {
  census_to(3, "census_c3.tsv");
  Catalog cat = load_catalog("census_c3.tsv");
  CHECK(cat.n_max == 3);
  CHECK_FALSE(cat.pruned);
  REQUIRE(cat.records.size() == 14);

  uint64_t preimages_by_n[4] = {0, 0, 0, 0};
  for (size_t i = 0; i < cat.records.size(); ++i) {
    const CatalogRecord& rec = cat.records[i];
    CHECK(rec.class_id == i);
    CHECK(rec.n_canonical == rec.cert.n);
    CHECK(rec.canonical_matrix.size() == static_cast<int>(rec.cert.n));
    CanonicalObject obj = as_canonical_object(rec.canonical_matrix);
    CHECK(certificate(obj) == rec.cert);
    CHECK((rec.source_n <= rec.n_canonical || rec.n_canonical == 0));
    // The recorded smallest source really lands in this class.
    std::string src = std::to_string(rec.source_n) + "\n";
    for (uint32_t row = 0; row < rec.source_n; ++row) {
      src += rec.source_bits.substr(row * rec.source_n, rec.source_n) + "\n";
    }
    CHECK(certificate(canonize(parse_rel(src)).object) == rec.cert);
    for (auto [n, count] : rec.preimage_counts) {
      CHECK(count >= 1);
      REQUIRE(n <= 3);
      preimages_by_n[n] += count;
    }
  }
  // Every object of each exact size is accounted for.
  CHECK(preimages_by_n[0] == 1);
  CHECK(preimages_by_n[1] == 2);
  CHECK(preimages_by_n[2] == 16);
  CHECK(preimages_by_n[3] == 512);
}

TEST_CASE("catalog save and load round trip") {
  census_to(3, "census_c3.tsv");
  Catalog cat = load_catalog("census_c3.tsv");
  save_catalog(cat, "census_c3_copy.tsv");
  CHECK(slurp("census_c3.tsv") == slurp("census_c3_copy.tsv"));
}

TEST_CASE("packed small-size engine agrees with the general path") {
  census_to(3, "census_c3.tsv");
  Catalog cat = load_catalog("census_c3.tsv");
  for (int n = 0; n <= 3; ++n) {
    for (uint64_t code = 0; code < (1ull << (n * n)); ++code) {
      Rel r = nth_rel(n, code);
      const CatalogRecord& rec = catalog_lookup(cat, r);
      CHECK(rec.cert == certificate(canonize(r).object));
    }
  }
}

TEST_CASE("catalog lookup identifies the worked pair and its class") {
  census_to(4, "census_c4.tsv");
  Catalog cat = load_catalog("census_c4.tsv");
  REQUIRE(cat.records.size() == 48);

  Rel r1 = parse_rel("5\n01010\n10100\n01000\n00001\n00010\n");
  Rel r3 = parse_rel("4\n0110\n1001\n0001\n0010\n");
  const CatalogRecord& a = catalog_lookup(cat, r1);
  const CatalogRecord& b = catalog_lookup(cat, r3);
  CHECK(a.class_id == b.class_id);
  CHECK(a.n_canonical == 4);
  // The stored matrix is the class representative: conjugate to the
  // canonical form, not necessarily equal to it.
  CHECK(a.canonical_matrix == certificate_matrix(a.cert));
  CHECK(conjugate(a.canonical_matrix, r3).has_value());

  // A 5-cycle's canonical form has five vertices: outside this catalog.
  Rel c5 = Rel::from_pairs(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  CHECK_THROWS_AS(catalog_lookup(cat, c5), CatalogNotCovered);

  // Sources larger than n_max are fine when the class is covered.
  Rel big(7);
  big.set(1, 2);
  big.set(2, 1);
  CHECK(catalog_lookup(cat, big).n_canonical == 2);
}

TEST_CASE("worker count does not change the output bytes") {
  CensusReport r1 = census_to(3, "census_w1.tsv", 1);
  CensusReport r3 = census_to(3, "census_w3.tsv", 3);
  CHECK(r3.workers == 3);
  CHECK(slurp("census_w1.tsv") == slurp("census_w3.tsv"));
  REQUIRE(r1.rows.size() == r3.rows.size());
  for (size_t i = 0; i < r1.rows.size(); ++i) {
    CHECK(r1.rows[i].new_classes == r3.rows[i].new_classes);
  }
}

TEST_CASE("symmetry pruning keeps the classes and shrinks the counts") {
  census_to(3, "census_full.tsv", 1, false);
  census_to(3, "census_pruned.tsv", 1, true);
  Catalog full = load_catalog("census_full.tsv");
  Catalog pruned = load_catalog("census_pruned.tsv");
  CHECK_FALSE(full.pruned);
  CHECK(pruned.pruned);
  REQUIRE(full.records.size() == pruned.records.size());
  for (size_t i = 0; i < full.records.size(); ++i) {
    const CatalogRecord& f = full.records[i];
    const CatalogRecord& p = pruned.records[i];
    CHECK(f.class_id == p.class_id);
    CHECK(f.cert == p.cert);
    CHECK(f.canonical_matrix == p.canonical_matrix);
    CHECK(f.component_periods == p.component_periods);
    CHECK(f.classifying_graph_text == p.classifying_graph_text);
    CHECK(f.source_n == p.source_n);
    CHECK(f.source_bits == p.source_bits);
    uint64_t f_total = 0, p_total = 0;
    for (auto [n, c] : f.preimage_counts) f_total += c;
    for (auto [n, c] : p.preimage_counts) p_total += c;
    CHECK(p_total <= f_total);
    CHECK(p_total >= 1);
  }
}

TEST_CASE("verify_catalog accepts its own output") {
  census_to(4, "census_c4.tsv");
  Catalog cat = load_catalog("census_c4.tsv");
  VerifyReport full = verify_catalog(cat);
  CHECK(full.records_checked == cat.records.size());
  CHECK(full.invariant_collisions.empty());
  VerifyReport sampled = verify_catalog(cat, 5);
  CHECK(sampled.records_checked == 5);
}

TEST_CASE("verify_catalog rejects doctored records") {
  census_to(2, "census_c2.tsv");
  Catalog cat = load_catalog("census_c2.tsv");

  Catalog bad = cat;
  bad.records[3].component_periods = {7};
  CHECK_THROWS_AS(verify_catalog(bad), CatalogCorrupt);

  Catalog dup = cat;
  dup.records[2] = dup.records[1];
  CHECK_THROWS_AS(verify_catalog(dup), CatalogCorrupt);

  // An edgeless source canonizes to the empty class, never to record 1.
  Catalog wrong_source = cat;
  wrong_source.records[1].source_bits = "0";
  wrong_source.records[1].source_n = 1;
  CHECK_THROWS_AS(verify_catalog(wrong_source), CatalogCorrupt);
}

TEST_CASE("corrupted catalog files fail to load") {
  census_to(2, "census_c2.tsv");
  std::string good = slurp("census_c2.tsv");

  spit("census_bad.tsv", "not-a-catalog 1\n" + good.substr(good.find('\n') + 1));
  CHECK_THROWS_AS(load_catalog("census_bad.tsv"), CatalogCorrupt);

  std::string truncated = good.substr(0, good.size() - 10);
  spit("census_bad.tsv", truncated);
  CHECK_THROWS_AS(load_catalog("census_bad.tsv"), CatalogCorrupt);

  std::string garbled = good;
  garbled.replace(garbled.find("records"), 7, "recordz");
  spit("census_bad.tsv", garbled);
  CHECK_THROWS_AS(load_catalog("census_bad.tsv"), CatalogCorrupt);

  // A missing file is an I/O error, not a corruption report.
  CHECK_THROWS_AS(load_catalog("census_missing_file.tsv"), std::runtime_error);
}

TEST_CASE("option validation") {
  CensusOptions bad_n;
  bad_n.n_max = 6;
  CHECK_THROWS_AS(run_census(bad_n, "census_unused.tsv"),
                  std::invalid_argument);
  CensusOptions bad_w;
  bad_w.workers = 0;
  CHECK_THROWS_AS(run_census(bad_w, "census_unused.tsv"),
                  std::invalid_argument);
}

TEST_CASE("lookup agrees with pairwise isomorphism on random pairs") {
  census_to(4, "census_c4.tsv");
  Catalog cat = load_catalog("census_c4.tsv");
  std::mt19937_64 rng(51);
  for (int rep = 0; rep < 150; ++rep) {
    Rel a = random_rel(rng, 0, 4);
    Rel b = random_rel(rng, 0, 4);
    bool same_class =
        catalog_lookup(cat, a).class_id == catalog_lookup(cat, b).class_id;
    CHECK(same_class == szym_isomorphic(a, b).isomorphic);
  }
}
