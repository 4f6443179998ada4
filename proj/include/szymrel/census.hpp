#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "szymrel/szymiso.hpp"

namespace szymrel {

struct CatalogRecord {
  uint64_t class_id;
  uint32_t n_canonical;
  Certificate cert;
  Rel canonical_matrix;
  std::vector<uint64_t> component_periods;  // sorted multiset
  std::string classifying_graph_text;       // single-line form, ';' separated
  uint32_t source_n;                        // smallest source: first by n,
  std::string source_bits;                  // then by row-major bitstring
  std::vector<std::pair<uint32_t, uint64_t>> preimage_counts;  // (exact n, count)
};

struct Catalog {
  uint32_t n_max;
  bool pruned;                         // built from orbit minima only
  std::vector<CatalogRecord> records;  // sorted by class_id
};

struct CensusReport {
  struct PerN {
    uint32_t n;
    uint64_t objects;
    uint64_t new_classes;
    uint64_t cumulative_classes;
  };
  std::vector<PerN> rows;
  double seconds;
  uint32_t workers;
};

struct CensusOptions {
  uint32_t n_max = 5;
  uint32_t workers = 1;
  bool prune_symmetry = false;      // enumerate orbit minima only; preimage
                                    // counts then count orbit representatives
  std::ostream* progress = nullptr; // per-n checkpoint lines
};

// Enumerates every relation on 0..n_max vertices, maps each to its class,
// and writes the class catalog to catalog_out. The file contents depend only
// on n_max and prune_symmetry, never on the worker count.
CensusReport run_census(const CensusOptions& opts, const std::string& catalog_out);

Catalog load_catalog(const std::string& path);
void save_catalog(const Catalog& c, const std::string& path);

// Class record of r's canonical form. Throws CatalogNotCovered when the
// canonical size exceeds the catalog range, CatalogCorrupt when the catalog
// should contain the class but does not.
const CatalogRecord& catalog_lookup(const Catalog& c, const Rel& r);

struct VerifyReport {
  uint64_t records_checked;
  // Pairs of distinct classes whose classifying graphs are isomorphic:
  // witnesses that the classifying graph is not a complete invariant.
  std::vector<std::pair<uint64_t, uint64_t>> invariant_collisions;
};

// Re-derives stored fields for `sample` records (0 = all) and cross-checks
// class distinctness; throws CatalogCorrupt naming the offending record.
VerifyReport verify_catalog(const Catalog& c, uint64_t sample = 0);

std::string to_text(const CensusReport& r);

}  // namespace szymrel
