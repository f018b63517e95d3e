#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lacogsea/activity.hpp"

namespace lacogsea {

struct KMeansOptions {
  int n_restarts = 20;
  int max_iterations = 300;
};

struct KMeansResult {
  std::vector<int> labels;
  double inertia = 0.0;
  int best_restart = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> inertia_trace;  // best restart, one entry per assignment step
};

/// Lloyd's algorithm on the rows of a standardized activity matrix.
///
/// Each restart seeds its first centroid uniformly at random and every other
/// centroid at the row farthest from those already chosen. Nearest-centroid
/// ties go to the lowest centroid index; an emptied cluster is re-seeded at
/// the row farthest from its current centroid. The lowest-inertia restart
/// wins (ties: earliest restart).
KMeansResult kmeans(const ActivityMatrix& a, int k, std::uint64_t seed, const KMeansOptions& options = {});

/// Same algorithm on a raw N x M matrix (no standardization check).
KMeansResult kmeans_rows(const Eigen::MatrixXd& x, int k, std::uint64_t seed, const KMeansOptions& options = {});

/// Pair-counting adjusted Rand index. Returns 1 when both partitions are
/// trivial in the same way (zero denominator).
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// Dense integer codes for string labels, in order of first appearance.
std::vector<int> encode_labels(const std::vector<std::string>& labels);

}  // namespace lacogsea
