#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lacogsea {

/// Dense genes x samples expression values with identifiers.
///
/// Shape consistency, id uniqueness and finiteness are checked by
/// validate(); the analysis entry points additionally require G >= 2 and
/// N >= 3 through require_analysis_shape().
struct ExpressionMatrix {
  std::vector<std::string> gene_ids;
  std::vector<std::string> sample_ids;
  Eigen::MatrixXd values;  // G x N
  bool transformed = false;

  Eigen::Index genes() const noexcept { return values.rows(); }
  Eigen::Index samples() const noexcept { return values.cols(); }

  void validate() const;
  void require_analysis_shape(const char* context) const;
};

enum class Orientation { GenesInRows, SamplesInRows };

/// Loads a TSV/CSV with a header row and identifiers in the first column.
/// The delimiter is taken from the header line (tab if present, else comma).
ExpressionMatrix load_expression_matrix(const std::filesystem::path& path,
                                        Orientation orientation = Orientation::GenesInRows);

/// Canonical format: tab separated, header cell "gene_id", shortest
/// round-trip decimal values, '\n' line endings.
std::string format_expression_matrix(const ExpressionMatrix& m);
void write_expression_matrix(const ExpressionMatrix& m, const std::filesystem::path& path);

/// log2(v + 1) on every cell. Rejects negative values and a second application.
ExpressionMatrix log_transform(const ExpressionMatrix& m);

/// Marks a matrix as already on log scale (the skip-transform path).
ExpressionMatrix assume_log_scale(ExpressionMatrix m);

struct GeneMoments {
  std::string gene_id;
  double mean = 0.0;
  double sd = 0.0;
};

struct StandardizeResult {
  ExpressionMatrix matrix;
  std::vector<GeneMoments> moments;   // retained genes
  std::vector<std::string> removed;   // zero-variance genes
};

/// Per-gene z-score with population (1/N) standard deviation.
StandardizeResult standardize_genes(const ExpressionMatrix& m);

std::string format_standardize_report(const StandardizeResult& r);

/// Restricts a matrix to the given genes, in the given order.
ExpressionMatrix select_genes(const ExpressionMatrix& m, const std::vector<std::string>& gene_ids);

/// Genes present in every matrix, in the order of the first one.
std::vector<std::string> intersect_universes(const std::vector<const ExpressionMatrix*>& matrices);

}  // namespace lacogsea
