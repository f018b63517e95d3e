#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Each one is written the slow, obvious way.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Two-pass population Pearson correlation.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Full O(n) running-sum walk over every list position.
inline double running_sum_es(std::span<const double> weights, const std::vector<bool>& in_set) {
  const std::size_t n = weights.size();
  double total = 0.0;
  std::size_t n_hits = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (in_set[i]) {
      total += weights[i];
      ++n_hits;
    }
  const bool unit = !(total > 0.0);
  if (unit) total = static_cast<double>(n_hits);
  const double n_miss = static_cast<double>(n - n_hits);
  double cum = 0.0;
  std::size_t misses = 0;
  double best_max = -INFINITY, best_min = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_set[i])
      cum += unit ? 1.0 : weights[i];
    else
      ++misses;
    const double v = (cum * n_miss - static_cast<double>(misses) * total) / (total * n_miss);
    best_max = std::max(best_max, v);
    best_min = std::min(best_min, v);
  }
  return best_max >= -best_min ? best_max : best_min;
}

/// Rand-index style agreement counted over every unordered pair, then
/// adjusted with the expected index under the permutation model.
inline double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  const std::size_t n = a.size();
  double both = 0.0, only_a = 0.0, only_b = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      if (sa && sb) both += 1.0;
      if (sa) only_a += 1.0;
      if (sb) only_b += 1.0;
    }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double expected = only_a * only_b / pairs;
  const double max_index = 0.5 * (only_a + only_b);
  if (max_index == expected) return 1.0;
  return (both - expected) / (max_index - expected);
}

/// Midranks of the pooled sample (x first, then y).
inline std::vector<double> pooled_midranks(std::span<const double> x, std::span<const double> y) {
  std::vector<double> all(x.begin(), x.end());
  all.insert(all.end(), y.begin(), y.end());
  std::vector<double> ranks(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    double below = 0.0, equal = 0.0;
    for (double v : all) {
      if (v < all[i]) below += 1.0;
      if (v == all[i]) equal += 1.0;
    }
    ranks[i] = below + (equal + 1.0) / 2.0;
  }
  return ranks;
}

struct RankSum {
  double statistic;
  double p_value;
};

/// Exact two-sided rank-sum p by enumerating every assignment of |x| of the
/// pooled midranks to the first group.
inline RankSum wilcoxon_enumerate(std::span<const double> x, std::span<const double> y) {
  const auto ranks = pooled_midranks(x, y);
  const std::size_t n = ranks.size(), k = x.size();
  double w = 0.0;
  for (std::size_t i = 0; i < k; ++i) w += ranks[i];
  const double center = static_cast<double>(k) * static_cast<double>(n + 1) / 2.0;
  const double observed = std::abs(w - center);
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  double tail = 0.0, total = 0.0;
  while (true) {
    double s = 0.0;
    for (auto i : pick) s += ranks[i];
    total += 1.0;
    // Ranks are multiples of 1/2, so the comparison is exact after doubling.
    if (std::abs(2.0 * s - 2.0 * center) >= 2.0 * observed) tail += 1.0;
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return {w, tail / total};
}

inline Eigen::MatrixXd triple_loop_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

struct DensePca {
  Eigen::MatrixXd components;  // rows, descending eigenvalue
  Eigen::VectorXd eigenvalues;
};

/// Full eigendecomposition of the explicit population covariance of the
/// sample-centred G x N data.
inline DensePca dense_pca(const Eigen::MatrixXd& genes_by_samples, int d) {
  const Eigen::VectorXd mean = genes_by_samples.rowwise().mean();
  const Eigen::MatrixXd xc = genes_by_samples.colwise() - mean;
  const Eigen::MatrixXd cov = xc * xc.transpose() / static_cast<double>(genes_by_samples.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  DensePca r;
  const Eigen::Index g = cov.rows();
  r.components.resize(d, g);
  r.eigenvalues.resize(d);
  for (int k = 0; k < d; ++k) {
    r.components.row(k) = es.eigenvectors().col(g - 1 - k).transpose();
    r.eigenvalues(k) = es.eigenvalues()(g - 1 - k);
  }
  return r;
}

/// Welch t from the textbook formula with unbiased variances.
inline double welch_t(std::span<const double> a, std::span<const double> b) {
  auto mean = [](std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  auto var = [&](std::span<const double> v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
  };
  return (mean(a) - mean(b)) / std::sqrt(var(a) / a.size() + var(b) / b.size());
}

/// Pooled-variance Student t.
inline double pooled_t(std::span<const double> a, std::span<const double> b) {
  auto mean = [](std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  const double ma = mean(a), mb = mean(b);
  double ss = 0.0;
  for (double x : a) ss += (x - ma) * (x - ma);
  for (double x : b) ss += (x - mb) * (x - mb);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double sp2 = ss / (na + nb - 2.0);
  return (ma - mb) / std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
}

/// One-sample Kolmogorov-Smirnov statistic against Uniform(0, 1) and its
/// asymptotic p-value (Kolmogorov distribution with the Stephens correction).
inline double ks_uniform_p(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - u[i]);
    d = std::max(d, u[i] - static_cast<double>(i) / n);
  }
  const double t = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int j = 1; j <= 200; ++j) p += 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * t * t);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace oracle
