#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lacogsea/autoencoder.hpp"
#include "lacogsea/pathway_ranking.hpp"

namespace lacogsea {

/// D x M matrix of NES values; column p belongs to set_ids[p].
struct WeightMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> set_ids;
  std::string fill_rule = "zero_untested";
  int filled = 0;  // (dimension, set) cells without a record
  std::vector<std::string> warnings;
};

/// W(k, p) = NES of set p in dimension k; cells without a record are 0.
/// Columns follow sorted set id order over every set seen in any table.
WeightMatrix nes_weight_matrix(const ModelEnrichment& me);

struct ActivityMatrix {
  std::vector<std::string> sample_ids;
  std::vector<std::string> set_ids;
  Eigen::MatrixXd values;  // N x M
  bool standardized = false;
};

/// A = Z W, optionally followed by per-pathway z-scoring.
ActivityMatrix activity_scores(const LatentMatrix& z, const WeightMatrix& w, bool standardize = false);

/// Per-pathway (column) z-score with population sd; constant columns become 0.
ActivityMatrix standardize_activity(const ActivityMatrix& a);

/// Dimensions as rows.
std::string format_weight_matrix(const WeightMatrix& w);
WeightMatrix load_weight_matrix(const std::filesystem::path& path);

/// Samples as rows.
std::string format_activity_matrix(const ActivityMatrix& a);
ActivityMatrix load_activity_matrix(const std::filesystem::path& path, bool standardized);

}  // namespace lacogsea
