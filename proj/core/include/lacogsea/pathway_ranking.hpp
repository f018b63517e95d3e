#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lacogsea/autoencoder.hpp"
#include "lacogsea/expression.hpp"
#include "lacogsea/gene_sets.hpp"
#include "lacogsea/gsea.hpp"

namespace lacogsea {

/// Per-dimension enrichment tables of one model; table k is dimension k.
struct ModelEnrichment {
  int dimensions = 0;
  std::vector<EnrichmentTable> tables;
  std::string provenance;
};

inline constexpr int kDefaultPenaltyRank = 100;
inline constexpr double kDefaultAlpha = 0.05;

/// Best (smallest) rank_in_dimension over dimensions where fdr_q < alpha;
/// nullopt when no dimension qualifies. Throws for a set never tested.
std::optional<int> model_level_rank(const ModelEnrichment& me, const std::string& set_id, double alpha = kDefaultAlpha);

struct TargetRank {
  std::string set_id;
  std::optional<int> rank;  // nullopt = not detected
  int achieved = 0;         // rank, or the penalty when not detected
};

struct BenchmarkResult {
  std::string method;
  std::vector<TargetRank> targets;
  int penalty = kDefaultPenaltyRank;
  double alpha = kDefaultAlpha;
  int coverage_n = 10;
  double mean_rank = 0.0;
  double coverage = 0.0;
};

BenchmarkResult benchmark_targets(const ModelEnrichment& me, const std::vector<std::string>& targets,
                                  int penalty = kDefaultPenaltyRank, double alpha = kDefaultAlpha, int coverage_n = 10,
                                  std::string method = "LaCoGSEA");

std::string format_benchmark_tsv(const BenchmarkResult& r);
std::string format_benchmark_json(const BenchmarkResult& r);

/// Plain text, one set id per line; '#' starts a comment.
std::vector<std::string> load_target_list(const std::filesystem::path& path);

enum class SignificanceGate { NominalP, FdrQ };
const char* to_string(SignificanceGate g) noexcept;
SignificanceGate parse_gate(const std::string& name);

enum class RankingMethod { Autoencoder, PcaCorr, PcaWeights };
const char* to_string(RankingMethod m) noexcept;
RankingMethod parse_ranking_method(const std::string& name);

struct PipelineConfig {
  AutoencoderConfig autoencoder;
  GseaParams gsea;
  bool zscore_inputs = true;
  RankingMethod method = RankingMethod::Autoencoder;
  bool signed_pca_weights = false;
};

struct SaturationConfig {
  PipelineConfig pipeline;  // latent_dim and seeds are overridden per D
  SignificanceGate gate = SignificanceGate::FdrQ;
  double alpha = kDefaultAlpha;
  std::uint64_t base_seed = 0;
};

struct SaturationPoint {
  int dimensions = 0;
  int n_significant = 0;
  int n_tested = 0;
  double threshold = 0.0;  // alpha / D
  std::vector<std::string> significant_sets;
};

struct SaturationTable {
  std::string collection;
  SignificanceGate gate = SignificanceGate::FdrQ;
  double alpha = kDefaultAlpha;
  std::vector<SaturationPoint> points;
};

/// Unique sets whose best statistic across dimensions satisfies stat * D < alpha.
SaturationPoint count_significant(const ModelEnrichment& me, SignificanceGate gate, double alpha);

/// Trains a fresh model per D (seed derived from base_seed and D) on a
/// log-scale matrix and counts Bonferroni-significant sets.
SaturationTable saturation_curve(const ExpressionMatrix& m, const std::vector<int>& dims, const GeneSetCollection& c,
                                 const SaturationConfig& cfg);

/// i.i.d. standard normal G x N matrix with ids gene_0.., sample_0..
ExpressionMatrix gaussian_noise_matrix(int genes, int samples, std::uint64_t seed);

/// `count` sets of `size` distinct genes drawn uniformly from `universe`,
/// named random_0, random_1, ...
GeneSetCollection random_gene_sets(const std::vector<std::string>& universe, int count, int size,
                                   std::uint64_t seed);

SaturationTable negative_control(int genes, int samples, const GeneSetCollection& c, const std::vector<int>& dims,
                                 std::uint64_t seed, const SaturationConfig& cfg);

std::string format_saturation_table(const SaturationTable& t);

}  // namespace lacogsea
