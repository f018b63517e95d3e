#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lacogsea/correlation.hpp"
#include "lacogsea/gene_sets.hpp"

namespace lacogsea {

struct GseaParams {
  double weight_exponent = 1.0;
  int n_permutations = 1000;
  std::uint64_t seed = 0;
  int min_size = kDefaultMinSetSize;
  int max_size = kDefaultMaxSetSize;

  void validate() const;
};

struct EnrichmentScore {
  double es = 0.0;
  std::vector<std::size_t> hit_indices;  // ascending list positions
  std::size_t extremum_index = 0;        // position of the running-sum extremum
};

/// Running-sum enrichment score over sorted hit positions.
///
/// `weights[i]` is |score_i|^exponent for list position i. At position i the
/// running sum is hit_weight(<= i) / total_hit_weight - misses(<= i) / n_miss
/// and ES is the value of largest magnitude (positive on ties). If every hit
/// has zero weight the hits are weighted equally. Only hit positions and the
/// misses immediately before them are visited, which finds the same extremum
/// as a full walk since the sum is monotone between hits.
EnrichmentScore running_sum_es(std::span<const double> weights, std::span<const std::size_t> sorted_hits);

/// ES only; no allocation. Used by the permutation null.
double running_sum_es_value(std::span<const double> weights, std::span<const std::size_t> sorted_hits);

std::vector<double> list_weights(const RankedGeneList& l, double exponent);

/// ES of a gene set against a ranked list. Members missing from the list are
/// ignored. Throws when no member is in the list or the set covers the list.
EnrichmentScore enrichment_score(const RankedGeneList& l, const std::vector<std::string>& members,
                                 double weight_exponent);

/// ES of uniformly random gene subsets of `set_size` against `l`. The stream
/// is keyed by (params.seed, l.dimension, set_size); `n_draws` = 0 means
/// params.n_permutations.
std::vector<double> permutation_null(const RankedGeneList& l, int set_size, const GseaParams& params,
                                     std::size_t n_draws = 0);
std::vector<double> permutation_null(std::span<const double> weights, int set_size, std::uint64_t stream_seed,
                                     std::size_t n_draws);

struct NesP {
  double nes = 0.0;
  double p_nominal = 1.0;
};

/// NES against the same-sign null mean and add-one nominal p. Returns
/// nullopt when the same-sign null subsample is empty or has zero mean.
/// ES >= 0 is compared against null values >= 0, ES < 0 against values < 0.
std::optional<NesP> nes_and_p(double es, std::span<const double> null);

/// Null ES values divided by their same-sign null mean. Values of a sign
/// with an empty subsample are dropped.
std::vector<double> normalize_null(std::span<const double> null);

/// GSEA-style q: tail fraction of pooled same-sign null NES divided by the
/// tail fraction of observed same-sign NES, clamped to [0, 1], then made
/// non-increasing in |NES| within each sign class.
std::vector<double> fdr_qvalues(std::span<const double> observed_nes, std::span<const double> pooled_null_nes);

struct EnrichmentRecord {
  std::string set_id;
  double es = 0.0;
  double nes = 0.0;
  double p_nominal = 1.0;
  double fdr_q = 1.0;
  int rank_in_dimension = 0;
  std::vector<std::string> leading_edge;
  int set_size_used = 0;
};

struct SkippedSet {
  std::string set_id;
  std::string reason;
};

struct EnrichmentTable {
  int dimension = 0;
  GseaParams params;
  std::vector<EnrichmentRecord> records;  // sorted by rank_in_dimension
  std::vector<SkippedSet> skipped;
  std::vector<std::string> warnings;

  const EnrichmentRecord* find(const std::string& set_id) const;
  bool tested(const std::string& set_id) const;  // recorded or skipped
};

/// Pre-ranked GSEA of one list against a collection already filtered to the
/// list's genes. Null distributions are drawn once per distinct set size with
/// n_permutations draws per set of that size, so the pooled null used for q
/// has the same size as per-set permutation.
EnrichmentTable run_preranked_gsea(const RankedGeneList& l, const GeneSetCollection& c, const GseaParams& params);

/// Columns: set_id size es nes p_nominal fdr_q rank leading_edge.
std::string format_enrichment_table(const EnrichmentTable& t);
std::string format_skipped_sets(const EnrichmentTable& t);
EnrichmentTable load_enrichment_table(const std::filesystem::path& table_path, int dimension);

}  // namespace lacogsea
