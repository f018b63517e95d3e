#include "lacogsea/activity.hpp"

#include <cmath>
#include <map>

#include "lacogsea/error.hpp"
#include "lacogsea/tsv.hpp"

namespace lacogsea {

WeightMatrix nes_weight_matrix(const ModelEnrichment& me) {
  WeightMatrix w;
  std::map<std::string, Eigen::Index> columns;
  for (const auto& t : me.tables) {
    for (const auto& r : t.records) columns.emplace(r.set_id, 0);
    for (const auto& s : t.skipped) columns.emplace(s.set_id, 0);
  }
  Eigen::Index next = 0;
  for (auto& [id, col] : columns) {
    col = next++;
    w.set_ids.push_back(id);
  }
  const auto d = static_cast<Eigen::Index>(me.tables.size());
  w.values = Eigen::MatrixXd::Zero(d, next);
  Eigen::Index recorded = 0;
  for (Eigen::Index k = 0; k < d; ++k)
    for (const auto& r : me.tables[static_cast<std::size_t>(k)].records) {
      w.values(k, columns.at(r.set_id)) = r.nes;
      ++recorded;
    }
  w.filled = static_cast<int>(d * next - recorded);
  if (w.values.size() == 0 || w.values.isZero(0.0)) w.warnings.push_back("weight matrix is entirely zero");
  return w;
}

ActivityMatrix activity_scores(const LatentMatrix& z, const WeightMatrix& w, bool standardize) {
  if (z.values.cols() != w.values.rows())
    throw Error(ErrorKind::Shape, "activity_scores: latent width " + std::to_string(z.values.cols()) +
                                      " differs from weight rows " + std::to_string(w.values.rows()));
  ActivityMatrix a;
  a.sample_ids = z.sample_ids;
  a.set_ids = w.set_ids;
  a.values = z.values * w.values;
  return standardize ? standardize_activity(a) : a;
}

ActivityMatrix standardize_activity(const ActivityMatrix& a) {
  ActivityMatrix out = a;
  const double inv_n = 1.0 / static_cast<double>(a.values.rows());
  for (Eigen::Index p = 0; p < a.values.cols(); ++p) {
    const double mean = a.values.col(p).mean();
    const Eigen::VectorXd centered = a.values.col(p).array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() * inv_n);
    out.values.col(p) = sd > 0.0 ? Eigen::VectorXd(centered / sd) : Eigen::VectorXd::Zero(centered.size());
  }
  out.standardized = true;
  return out;
}

std::string format_weight_matrix(const WeightMatrix& w) {
  std::string out = "dimension";
  for (const auto& id : w.set_ids) out += '\t' + id;
  out += '\n';
  for (Eigen::Index k = 0; k < w.values.rows(); ++k) {
    out += "dim_" + std::to_string(k);
    for (Eigen::Index p = 0; p < w.values.cols(); ++p) out += '\t' + tsv::format_double(w.values(k, p));
    out += '\n';
  }
  return out;
}

WeightMatrix load_weight_matrix(const std::filesystem::path& path) {
  const ExpressionMatrix m = load_expression_matrix(path, Orientation::SamplesInRows);
  WeightMatrix w;
  w.set_ids = m.gene_ids;
  w.values = m.values.transpose();
  return w;
}

std::string format_activity_matrix(const ActivityMatrix& a) {
  std::string out = "sample_id";
  for (const auto& id : a.set_ids) out += '\t' + id;
  out += '\n';
  for (Eigen::Index i = 0; i < a.values.rows(); ++i) {
    out += a.sample_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index p = 0; p < a.values.cols(); ++p) out += '\t' + tsv::format_double(a.values(i, p));
    out += '\n';
  }
  return out;
}

ActivityMatrix load_activity_matrix(const std::filesystem::path& path, bool standardized) {
  const ExpressionMatrix m = load_expression_matrix(path, Orientation::SamplesInRows);
  ActivityMatrix a;
  a.sample_ids = m.sample_ids;
  a.set_ids = m.gene_ids;
  a.values = m.values.transpose();
  a.standardized = standardized;
  return a;
}

}  // namespace lacogsea
