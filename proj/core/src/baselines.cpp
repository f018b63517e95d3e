#include "lacogsea/baselines.hpp"

#include <cmath>

#include "lacogsea/error.hpp"
#include "lacogsea/random.hpp"
#include "lacogsea/tsv.hpp"

namespace lacogsea {

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

PcaModel pca_fit(const ExpressionMatrix& m, int dimensions, std::uint64_t seed, const PcaOptions& options) {
  m.validate();
  const Eigen::Index g = m.genes();
  const Eigen::Index n = m.samples();
  if (dimensions < 1 || dimensions > std::min(g, n))
    throw Error(ErrorKind::InvalidArgument, "pca_fit: dimensions must be in [1, min(G, N)] = [1, " +
                                                std::to_string(std::min(g, n)) + "]");

  PcaModel p;
  p.gene_ids = m.gene_ids;
  p.gene_means = m.values.rowwise().mean();
  const Eigen::MatrixXd xc = m.values.colwise() - p.gene_means;
  const double inv_n = 1.0 / static_cast<double>(n);
  auto apply = [&](const Eigen::MatrixXd& v) -> Eigen::MatrixXd {
    Eigen::MatrixXd t = xc.transpose() * v;
    return (xc * t) * inv_n;
  };

  const Eigen::Index block = std::min<Eigen::Index>(g, dimensions + options.oversampling);
  Rng rng(derive_seed(seed, {0x9ca}));
  Eigen::MatrixXd start(g, block);
  for (Eigen::Index c = 0; c < block; ++c)
    for (Eigen::Index r = 0; r < g; ++r) start(r, c) = rng.normal();
  Eigen::MatrixXd q = orthonormalize(start);

  Eigen::MatrixXd ritz_vectors;
  Eigen::VectorXd ritz_values;
  double worst = 0.0;
  int worst_index = 0;
  bool converged = false;
  Eigen::MatrixXd cq = apply(q);
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::MatrixXd t = q.transpose() * cq;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (t + t.transpose()));
    // Eigen returns ascending order.
    const Eigen::MatrixXd v = eig.eigenvectors().rowwise().reverse();
    ritz_values = eig.eigenvalues().reverse();
    ritz_vectors = q * v;
    const Eigen::MatrixXd c_ritz = cq * v;

    const double scale = std::max(std::abs(ritz_values(0)), 1e-300);
    worst = 0.0;
    for (int k = 0; k < dimensions; ++k) {
      const double r = (c_ritz.col(k) - ritz_values(k) * ritz_vectors.col(k)).norm() / scale;
      if (r > worst) {
        worst = r;
        worst_index = k;
      }
    }
    p.iterations = it;
    if (worst <= options.tolerance) {
      converged = true;
      break;
    }
    q = orthonormalize(c_ritz);
    cq = apply(q);
  }
  if (!converged)
    throw Error(ErrorKind::Numeric, "pca_fit: no convergence after " + std::to_string(options.max_iterations) +
                                        " iterations; component " + std::to_string(worst_index) +
                                        " residual " + tsv::format_double(worst));

  p.components.resize(dimensions, g);
  p.explained_variance.resize(dimensions);
  for (int k = 0; k < dimensions; ++k) {
    Eigen::VectorXd v = ritz_vectors.col(k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    p.components.row(k) = v.transpose();
    p.explained_variance(k) = std::max(0.0, ritz_values(k));
  }
  return p;
}

LatentMatrix pca_project(const PcaModel& p, const ExpressionMatrix& m) {
  if (m.gene_ids != p.gene_ids) throw Error(ErrorKind::UniverseMismatch, "pca_project: gene order differs from the fitted model");
  LatentMatrix z;
  z.sample_ids = m.sample_ids;
  z.values = ((m.values.colwise() - p.gene_means).transpose() * p.components.transpose());
  return z;
}

RankedGeneList pca_weights_ranking(const PcaModel& p, int k, bool signed_scores) {
  if (k < 0 || k >= p.components.rows())
    throw Error(ErrorKind::InvalidArgument, "pca_weights_ranking: component " + std::to_string(k) + " out of range");
  std::vector<RankedGene> genes;
  genes.reserve(p.gene_ids.size());
  for (std::size_t j = 0; j < p.gene_ids.size(); ++j) {
    const double w = p.components(k, static_cast<Eigen::Index>(j));
    genes.push_back({p.gene_ids[j], signed_scores ? w : std::abs(w)});
  }
  return make_ranked_list(k, std::move(genes));
}

RankedGeneList pca_corr_ranking(const ExpressionMatrix& m, const PcaModel& p, int k) {
  if (k < 0 || k >= p.components.rows())
    throw Error(ErrorKind::InvalidArgument, "pca_corr_ranking: component " + std::to_string(k) + " out of range");
  return ranked_gene_list(gene_dimension_correlation(m, pca_project(p, m)), k);
}

double welch_t(std::span<const double> a, std::span<const double> b) {
  auto moments = [](std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::pair{mean, ss / static_cast<double>(x.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  return (ma - mb) / std::sqrt(va / static_cast<double>(a.size()) + vb / static_cast<double>(b.size()));
}

TTestResult standard_de_ttest(const ExpressionMatrix& m, std::span<const int> in_group1) {
  if (static_cast<Eigen::Index>(in_group1.size()) != m.samples())
    throw Error(ErrorKind::Shape, "standard_de_ttest: label count differs from sample count");
  std::vector<Eigen::Index> g1, g2;
  for (std::size_t i = 0; i < in_group1.size(); ++i) {
    if (in_group1[i] == 1) g1.push_back(static_cast<Eigen::Index>(i));
    else if (in_group1[i] == 0) g2.push_back(static_cast<Eigen::Index>(i));
  }
  if (g1.empty() || g2.empty()) throw Error(ErrorKind::InvalidArgument, "standard_de_ttest: need two label groups");
  if (g1.size() < 2 || g2.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "standard_de_ttest: each group needs at least 2 samples");

  TTestResult r;
  std::vector<RankedGene> genes;
  std::vector<double> a(g1.size()), b(g2.size());
  for (Eigen::Index g = 0; g < m.genes(); ++g) {
    for (std::size_t i = 0; i < g1.size(); ++i) a[i] = m.values(g, g1[i]);
    for (std::size_t i = 0; i < g2.size(); ++i) b[i] = m.values(g, g2[i]);
    const bool flat_a = std::all_of(a.begin(), a.end(), [&](double v) { return v == a.front(); });
    const bool flat_b = std::all_of(b.begin(), b.end(), [&](double v) { return v == b.front(); });
    if (flat_a && flat_b) {
      r.excluded.push_back({m.gene_ids[static_cast<std::size_t>(g)], "zero_variance_both_groups"});
      continue;
    }
    genes.push_back({m.gene_ids[static_cast<std::size_t>(g)], welch_t(a, b)});
  }
  r.list = make_ranked_list(0, std::move(genes));
  return r;
}

std::string format_pca_model(const PcaModel& p) {
  std::string out = "gene_id";
  for (Eigen::Index k = 0; k < p.components.rows(); ++k) out += "\tpc_" + std::to_string(k);
  out += "\n#explained_variance";
  for (Eigen::Index k = 0; k < p.components.rows(); ++k) out += '\t' + tsv::format_double17(p.explained_variance(k));
  out += '\n';
  for (std::size_t j = 0; j < p.gene_ids.size(); ++j) {
    out += p.gene_ids[j];
    for (Eigen::Index k = 0; k < p.components.rows(); ++k)
      out += '\t' + tsv::format_double17(p.components(k, static_cast<Eigen::Index>(j)));
    out += '\n';
  }
  return out;
}

}  // namespace lacogsea
