#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lacogsea/autoencoder.hpp"
#include "lacogsea/expression.hpp"

namespace lacogsea {

struct ExcludedGene {
  std::string gene_id;
  std::string reason;
};

/// Pearson coefficients between every retained gene and every latent
/// dimension, using population moments.
struct CorrelationMap {
  std::vector<std::string> gene_ids;  // retained genes, input order
  Eigen::MatrixXd values;             // genes x D, entries in [-1, 1]
  std::vector<ExcludedGene> excluded_genes;
  std::vector<int> dead_dimensions;   // zero-variance latent columns (all-zero column)

  Eigen::Index dimensions() const noexcept { return values.cols(); }
  bool is_dead(int k) const;
};

/// Genes are processed in fixed-size blocks so the per-entry summation order
/// does not depend on the worker count.
CorrelationMap gene_dimension_correlation(const ExpressionMatrix& m, const LatentMatrix& z);

struct RankedGene {
  std::string gene_id;
  double score = 0.0;
};

/// Genes in descending score order, ties broken by gene id ascending.
struct RankedGeneList {
  int dimension = 0;
  std::vector<RankedGene> genes;

  std::size_t size() const noexcept { return genes.size(); }
};

/// Sorts (gene, score) pairs into the canonical (score desc, id asc) order.
RankedGeneList make_ranked_list(int dimension, std::vector<RankedGene> genes);

RankedGeneList ranked_gene_list(const CorrelationMap& p, int k);

/// Tab-separated, genes as rows, columns dim_0 .. dim_{D-1}, %.17g values.
std::string format_correlation_map(const CorrelationMap& p);

/// Two-column (gene_id, score) TSV with a header line, descending.
std::string format_ranked_list(const RankedGeneList& l);
RankedGeneList load_ranked_list(const std::filesystem::path& path, int dimension);

}  // namespace lacogsea
