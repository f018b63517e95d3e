#include "lacogsea/clustering.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "lacogsea/error.hpp"
#include "lacogsea/parallel.hpp"
#include "lacogsea/random.hpp"

namespace lacogsea {

namespace {

double sq_dist(const Eigen::MatrixXd& x, Eigen::Index i, const Eigen::MatrixXd& c, Eigen::Index j) {
  return (x.row(i) - c.row(j)).squaredNorm();
}

KMeansResult run_once(const Eigen::MatrixXd& x, int k, Rng& rng, int max_iterations) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centroids(k, x.cols());

  // Farthest-point seeding from a random first row.
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  Eigen::Index pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  for (int c = 0; c < k; ++c) {
    centroids.row(c) = x.row(pick);
    double far = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest[static_cast<std::size_t>(i)] = std::min(nearest[static_cast<std::size_t>(i)], sq_dist(x, i, centroids, c));
      if (nearest[static_cast<std::size_t>(i)] > far) {
        far = nearest[static_cast<std::size_t>(i)];
        pick = i;
      }
    }
  }

  KMeansResult r;
  r.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(x, i, centroids, 0);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(x, i, centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (r.labels[static_cast<std::size_t>(i)] != best) changed = true;
      r.labels[static_cast<std::size_t>(i)] = best;
      dist[static_cast<std::size_t>(i)] = best_d;
      inertia += best_d;
    }
    r.inertia_trace.push_back(inertia);
    r.inertia = inertia;
    r.iterations = it + 1;
    if (!changed && it > 0) {
      r.converged = true;
      break;
    }

    // Update step; emptied clusters move to the worst-fit rows.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(r.labels[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])];
    }
    std::set<Eigen::Index> used;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        continue;
      }
      Eigen::Index worst = -1;
      for (Eigen::Index i = 0; i < n; ++i)
        if (!used.contains(i) && (worst < 0 || dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(worst)]))
          worst = i;
      used.insert(worst);
      centroids.row(c) = x.row(worst);
    }
  }
  return r;
}

}  // namespace

KMeansResult kmeans_rows(const Eigen::MatrixXd& x, int k, std::uint64_t seed, const KMeansOptions& options) {
  const Eigen::Index n = x.rows();
  if (k < 2 || k > n) throw Error(ErrorKind::InvalidArgument, "kmeans: k must be in [2, N]");
  if (options.n_restarts < 1 || options.max_iterations < 1)
    throw Error(ErrorKind::InvalidArgument, "kmeans: restarts and iteration cap must be >= 1");
  if (!x.allFinite()) throw Error(ErrorKind::Numeric, "kmeans: non-finite input");
  std::set<std::vector<double>> distinct;
  for (Eigen::Index i = 0; i < n && static_cast<int>(distinct.size()) < k; ++i) {
    const Eigen::RowVectorXd row = x.row(i);
    distinct.emplace(row.data(), row.data() + row.size());
  }
  if (static_cast<int>(distinct.size()) < k)
    throw Error(ErrorKind::InvalidArgument, "kmeans: k = " + std::to_string(k) + " exceeds the number of distinct rows");

  std::vector<KMeansResult> runs(static_cast<std::size_t>(options.n_restarts));
  parallel_for(runs.size(), [&](std::size_t r) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    runs[r] = run_once(x, k, rng, options.max_iterations);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;
  KMeansResult out = std::move(runs[best]);
  out.best_restart = static_cast<int>(best);
  return out;
}

KMeansResult kmeans(const ActivityMatrix& a, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (!a.standardized) throw Error(ErrorKind::InvalidArgument, "kmeans: activity matrix must be standardized");
  return kmeans_rows(a.values, k, seed, options);
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::Shape, "adjusted_rand_index: label vectors differ in length");
  if (a.size() < 2) throw Error(ErrorKind::InvalidArgument, "adjusted_rand_index: need at least 2 samples");
  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cells[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto c2 = [](double v) { return v * (v - 1.0) / 2.0; };
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, v] : cells) index += c2(v);
  for (const auto& [key, v] : rows) sum_a += c2(v);
  for (const auto& [key, v] : cols) sum_b += c2(v);
  const double expected = sum_a * sum_b / c2(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

std::vector<int> encode_labels(const std::vector<std::string>& labels) {
  std::unordered_map<std::string, int> codes;
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(codes.emplace(l, static_cast<int>(codes.size())).first->second);
  return out;
}

}  // namespace lacogsea
