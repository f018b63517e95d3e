#include "lacogsea/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "lacogsea/error.hpp"
#include "lacogsea/parallel.hpp"
#include "lacogsea/tsv.hpp"

namespace lacogsea {

namespace {
constexpr Eigen::Index kGeneBlock = 256;
}

bool CorrelationMap::is_dead(int k) const {
  return std::find(dead_dimensions.begin(), dead_dimensions.end(), k) != dead_dimensions.end();
}

CorrelationMap gene_dimension_correlation(const ExpressionMatrix& m, const LatentMatrix& z) {
  m.require_analysis_shape("gene_dimension_correlation");
  if (z.sample_ids != m.sample_ids)
    throw Error(ErrorKind::Shape, "gene_dimension_correlation: latent and expression sample order differ");
  if (z.values.rows() != m.samples())
    throw Error(ErrorKind::Shape, "gene_dimension_correlation: latent row count differs from sample count");

  const Eigen::Index n = m.samples();
  const Eigen::Index d = z.values.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  CorrelationMap p;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index g = 0; g < m.genes(); ++g) {
    const auto row = m.values.row(g);
    const double mean = row.mean();
    const double var = (row.array() - mean).square().sum() * inv_n;
    if (!(var > 0.0)) {
      p.excluded_genes.push_back({m.gene_ids[static_cast<std::size_t>(g)], "zero_variance"});
      continue;
    }
    keep.push_back(g);
    p.gene_ids.push_back(m.gene_ids[static_cast<std::size_t>(g)]);
  }
  if (keep.empty()) throw Error(ErrorKind::Numeric, "gene_dimension_correlation: every gene has zero variance");

  // Centered latent columns scaled to unit population sd; dead columns stay zero.
  Eigen::MatrixXd zs(n, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const auto col = z.values.col(k);
    const double mean = col.mean();
    const Eigen::VectorXd centered = col.array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() * inv_n);
    if (!(sd > 0.0)) {
      zs.col(k).setZero();
      p.dead_dimensions.push_back(static_cast<int>(k));
    } else {
      zs.col(k) = centered / sd;
    }
  }

  const auto g_keep = static_cast<Eigen::Index>(keep.size());
  p.values.resize(g_keep, d);
  const Eigen::Index blocks = (g_keep + kGeneBlock - 1) / kGeneBlock;
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
    const Eigen::Index begin = static_cast<Eigen::Index>(b) * kGeneBlock;
    const Eigen::Index rows = std::min(kGeneBlock, g_keep - begin);
    Eigen::MatrixXd xs(rows, n);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto row = m.values.row(keep[static_cast<std::size_t>(begin + r)]);
      const double mean = row.mean();
      const Eigen::RowVectorXd centered = row.array() - mean;
      const double sd = std::sqrt(centered.squaredNorm() * inv_n);
      xs.row(r) = centered / sd;
    }
    Eigen::MatrixXd block = (xs * zs) * inv_n;
    p.values.middleRows(begin, rows) = block.cwiseMax(-1.0).cwiseMin(1.0);
  });
  return p;
}

RankedGeneList make_ranked_list(int dimension, std::vector<RankedGene> genes) {
  std::sort(genes.begin(), genes.end(), [](const RankedGene& a, const RankedGene& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.gene_id < b.gene_id;
  });
  return {dimension, std::move(genes)};
}

RankedGeneList ranked_gene_list(const CorrelationMap& p, int k) {
  if (k < 0 || k >= p.dimensions())
    throw Error(ErrorKind::InvalidArgument, "ranked_gene_list: dimension " + std::to_string(k) + " out of range [0, " +
                                                std::to_string(p.dimensions()) + ")");
  std::vector<RankedGene> genes;
  genes.reserve(p.gene_ids.size());
  for (std::size_t g = 0; g < p.gene_ids.size(); ++g)
    genes.push_back({p.gene_ids[g], p.values(static_cast<Eigen::Index>(g), k)});
  return make_ranked_list(k, std::move(genes));
}

std::string format_correlation_map(const CorrelationMap& p) {
  std::string out = "gene_id";
  for (Eigen::Index k = 0; k < p.dimensions(); ++k) out += "\tdim_" + std::to_string(k);
  out += '\n';
  for (std::size_t g = 0; g < p.gene_ids.size(); ++g) {
    out += p.gene_ids[g];
    for (Eigen::Index k = 0; k < p.dimensions(); ++k)
      out += '\t' + tsv::format_double17(p.values(static_cast<Eigen::Index>(g), k));
    out += '\n';
  }
  return out;
}

std::string format_ranked_list(const RankedGeneList& l) {
  std::string out = "gene_id\tscore\n";
  for (const auto& g : l.genes) out += g.gene_id + '\t' + tsv::format_double(g.score) + '\n';
  return out;
}

RankedGeneList load_ranked_list(const std::filesystem::path& path, int dimension) {
  const auto lines = tsv::read_lines(path);
  std::vector<RankedGene> genes;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = tsv::split(lines[i], '\t');
    if (f.size() != 2) throw Error(ErrorKind::Format, path.string() + ": line " + std::to_string(i + 1) + " must have 2 fields");
    double v;
    if (!tsv::parse_double(f[1], v)) {
      if (i == 0) continue;  // header
      throw Error(ErrorKind::Format, path.string() + ": non-numeric score at line " + std::to_string(i + 1));
    }
    std::string id(f[0]);
    if (!seen.insert(id).second) throw Error(ErrorKind::DuplicateId, path.string() + ": duplicate gene id: " + id);
    genes.push_back({std::move(id), v});
  }
  return make_ranked_list(dimension, std::move(genes));
}

}  // namespace lacogsea
