#include "lacogsea/expression.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "lacogsea/error.hpp"
#include "lacogsea/tsv.hpp"

namespace lacogsea {

namespace {

void check_unique(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (!seen.insert(id).second)
      throw Error(ErrorKind::DuplicateId, std::string("duplicate ") + what + " id: " + id);
  }
}

}  // namespace

void ExpressionMatrix::validate() const {
  if (values.rows() != static_cast<Eigen::Index>(gene_ids.size()) ||
      values.cols() != static_cast<Eigen::Index>(sample_ids.size()))
    throw Error(ErrorKind::Shape, "expression matrix shape does not match its identifiers");
  check_unique(gene_ids, "gene");
  check_unique(sample_ids, "sample");
  if (!values.allFinite()) throw Error(ErrorKind::Numeric, "expression matrix contains non-finite values");
}

void ExpressionMatrix::require_analysis_shape(const char* context) const {
  if (genes() < 2 || samples() < 3)
    throw Error(ErrorKind::Shape, std::string(context) + ": need at least 2 genes and 3 samples, got " +
                                      std::to_string(genes()) + " x " + std::to_string(samples()));
}

ExpressionMatrix load_expression_matrix(const std::filesystem::path& path, Orientation orientation) {
  auto lines = tsv::read_lines(path);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorKind::Format, path.string() + ": empty file");

  const char delim = lines.front().find('\t') != std::string::npos ? '\t' : ',';
  const auto header = tsv::split(lines.front(), delim);
  if (header.size() < 2) throw Error(ErrorKind::Format, path.string() + ": header has no data columns");

  const std::size_t cols = header.size() - 1;
  const std::size_t rows = lines.size() - 1;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  row_ids.reserve(rows);
  for (std::size_t c = 1; c < header.size(); ++c) col_ids.emplace_back(header[c]);

  Eigen::MatrixXd raw(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto fields = tsv::split(lines[r + 1], delim);
    if (fields.size() != header.size())
      throw Error(ErrorKind::Format, path.string() + ": line " + std::to_string(r + 2) + " has " +
                                         std::to_string(fields.size()) + " fields, expected " +
                                         std::to_string(header.size()));
    row_ids.emplace_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      double v;
      if (!tsv::parse_double(fields[c], v))
        throw Error(ErrorKind::Format, path.string() + ": non-numeric value '" + std::string(fields[c]) +
                                           "' at line " + std::to_string(r + 2) + ", column " +
                                           std::to_string(c + 1));
      raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) = v;
    }
  }

  ExpressionMatrix m;
  if (orientation == Orientation::GenesInRows) {
    check_unique(row_ids, "gene");
    check_unique(col_ids, "sample");
    m.gene_ids = std::move(row_ids);
    m.sample_ids = std::move(col_ids);
    m.values = std::move(raw);
  } else {
    check_unique(row_ids, "sample");
    check_unique(col_ids, "gene");
    m.gene_ids = std::move(col_ids);
    m.sample_ids = std::move(row_ids);
    m.values = raw.transpose();
  }
  m.validate();
  return m;
}

std::string format_expression_matrix(const ExpressionMatrix& m) {
  std::string out = "gene_id";
  for (const auto& s : m.sample_ids) {
    out += '\t';
    out += s;
  }
  out += '\n';
  for (Eigen::Index g = 0; g < m.genes(); ++g) {
    out += m.gene_ids[static_cast<std::size_t>(g)];
    for (Eigen::Index s = 0; s < m.samples(); ++s) {
      out += '\t';
      out += tsv::format_double(m.values(g, s));
    }
    out += '\n';
  }
  return out;
}

void write_expression_matrix(const ExpressionMatrix& m, const std::filesystem::path& path) {
  tsv::write_file(path, format_expression_matrix(m));
}

ExpressionMatrix log_transform(const ExpressionMatrix& m) {
  if (m.transformed) throw Error(ErrorKind::InvalidArgument, "log_transform: matrix is already log-transformed");
  for (Eigen::Index g = 0; g < m.genes(); ++g)
    for (Eigen::Index s = 0; s < m.samples(); ++s)
      if (m.values(g, s) < 0.0)
        throw Error(ErrorKind::Numeric, "log_transform: negative value for gene " +
                                            m.gene_ids[static_cast<std::size_t>(g)] + ", sample " +
                                            m.sample_ids[static_cast<std::size_t>(s)] +
                                            " (load already-normalized data with the skip-transform option)");
  ExpressionMatrix out = m;
  out.values = m.values.unaryExpr([](double v) { return std::log2(v + 1.0); });
  out.transformed = true;
  return out;
}

ExpressionMatrix assume_log_scale(ExpressionMatrix m) {
  m.transformed = true;
  return m;
}

StandardizeResult standardize_genes(const ExpressionMatrix& m) {
  if (!m.transformed)
    throw Error(ErrorKind::InvalidArgument, "standardize_genes: matrix must be log-transformed first");
  const Eigen::Index n = m.samples();
  if (n < 1) throw Error(ErrorKind::Shape, "standardize_genes: no samples");

  StandardizeResult result;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index g = 0; g < m.genes(); ++g) {
    const auto row = m.values.row(g);
    const double mean = row.mean();
    const double var = (row.array() - mean).square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(var);
    if (!(sd > 0.0)) {
      result.removed.push_back(m.gene_ids[static_cast<std::size_t>(g)]);
      continue;
    }
    keep.push_back(g);
    result.moments.push_back({m.gene_ids[static_cast<std::size_t>(g)], mean, sd});
  }
  if (keep.empty()) throw Error(ErrorKind::Numeric, "standardize_genes: every gene has zero variance");

  ExpressionMatrix& out = result.matrix;
  out.sample_ids = m.sample_ids;
  out.transformed = true;
  out.values.resize(static_cast<Eigen::Index>(keep.size()), n);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const auto& mom = result.moments[i];
    out.gene_ids.push_back(mom.gene_id);
    out.values.row(static_cast<Eigen::Index>(i)) = (m.values.row(keep[i]).array() - mom.mean) / mom.sd;
  }
  return result;
}

std::string format_standardize_report(const StandardizeResult& r) {
  std::string out = "id\tmean\tsd\n";
  for (const auto& mom : r.moments)
    out += mom.gene_id + '\t' + tsv::format_double(mom.mean) + '\t' + tsv::format_double(mom.sd) + '\n';
  for (const auto& id : r.removed) out += id + "\tremoved\tzero_variance\n";
  return out;
}

ExpressionMatrix select_genes(const ExpressionMatrix& m, const std::vector<std::string>& gene_ids) {
  std::unordered_map<std::string, Eigen::Index> index;
  for (std::size_t i = 0; i < m.gene_ids.size(); ++i) index.emplace(m.gene_ids[i], static_cast<Eigen::Index>(i));
  ExpressionMatrix out;
  out.sample_ids = m.sample_ids;
  out.transformed = m.transformed;
  out.gene_ids = gene_ids;
  out.values.resize(static_cast<Eigen::Index>(gene_ids.size()), m.samples());
  for (std::size_t i = 0; i < gene_ids.size(); ++i) {
    auto it = index.find(gene_ids[i]);
    if (it == index.end()) throw Error(ErrorKind::NotFound, "gene not in matrix: " + gene_ids[i]);
    out.values.row(static_cast<Eigen::Index>(i)) = m.values.row(it->second);
  }
  return out;
}

std::vector<std::string> intersect_universes(const std::vector<const ExpressionMatrix*>& matrices) {
  if (matrices.empty()) return {};
  std::vector<std::string> out;
  std::vector<std::unordered_set<std::string>> others;
  for (std::size_t i = 1; i < matrices.size(); ++i)
    others.emplace_back(matrices[i]->gene_ids.begin(), matrices[i]->gene_ids.end());
  for (const auto& g : matrices.front()->gene_ids) {
    bool everywhere = true;
    for (const auto& o : others) everywhere = everywhere && o.contains(g);
    if (everywhere) out.push_back(g);
  }
  return out;
}

}  // namespace lacogsea
