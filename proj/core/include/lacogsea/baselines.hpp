#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lacogsea/autoencoder.hpp"
#include "lacogsea/correlation.hpp"
#include "lacogsea/expression.hpp"

namespace lacogsea {

struct PcaOptions {
  double tolerance = 1e-10;  // Ritz residual relative to the leading eigenvalue
  int max_iterations = 20000;
  int oversampling = 8;
};

struct PcaModel {
  Eigen::MatrixXd components;           // D x G, orthonormal rows
  Eigen::VectorXd explained_variance;   // population covariance eigenvalues, non-increasing
  Eigen::VectorXd gene_means;
  std::vector<std::string> gene_ids;
  int iterations = 0;
};

/// Top-D principal axes by subspace iteration with Rayleigh-Ritz on the
/// operator v -> Xc (Xc^T v) / N; the G x G covariance is never formed.
/// Each component's largest-magnitude loading is made positive.
PcaModel pca_fit(const ExpressionMatrix& m, int dimensions, std::uint64_t seed, const PcaOptions& options = {});

/// Sample scores on every component (N x D).
LatentMatrix pca_project(const PcaModel& p, const ExpressionMatrix& m);

/// Genes by |loading| descending (or signed loading when `signed_scores`).
RankedGeneList pca_weights_ranking(const PcaModel& p, int k, bool signed_scores = false);

/// Pearson correlation of each gene with the component-k sample scores.
RankedGeneList pca_corr_ranking(const ExpressionMatrix& m, const PcaModel& p, int k);

struct TTestResult {
  RankedGeneList list;
  std::vector<ExcludedGene> excluded;
};

/// Welch t (group 1 minus group 2) per gene. `in_group1[i]` is 1 for group 1,
/// 0 for group 2 and -1 for samples left out.
TTestResult standard_de_ttest(const ExpressionMatrix& m, std::span<const int> in_group1);

/// Welch t-statistic from raw samples (unbiased variances).
double welch_t(std::span<const double> a, std::span<const double> b);

std::string format_pca_model(const PcaModel& p);

}  // namespace lacogsea
