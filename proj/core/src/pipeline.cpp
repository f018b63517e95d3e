#include "lacogsea/pipeline.hpp"

#include <unordered_set>

#include "lacogsea/error.hpp"
#include "lacogsea/parallel.hpp"

namespace lacogsea {

PipelineResult rank_stage(const ExpressionMatrix& m, const PipelineConfig& cfg) {
  m.validate();
  m.require_analysis_shape("pipeline");
  PipelineResult r;
  r.standardized = standardize_genes(m);
  // Training input and correlation input share the retained genes; correlations
  // always use the log-scale values.
  std::vector<std::string> retained;
  for (const auto& mom : r.standardized.moments) retained.push_back(mom.gene_id);
  const ExpressionMatrix log_scale = select_genes(m, retained);

  const int d = cfg.autoencoder.latent_dim;
  switch (cfg.method) {
    case RankingMethod::Autoencoder: {
      const ExpressionMatrix& train_input = cfg.zscore_inputs ? r.standardized.matrix : log_scale;
      r.model = train_autoencoder(train_input, cfg.autoencoder);
      r.latent = encode(*r.model, train_input);
      r.correlation = gene_dimension_correlation(log_scale, r.latent);
      for (int k = 0; k < d; ++k) r.lists.push_back(ranked_gene_list(r.correlation, k));
      break;
    }
    case RankingMethod::PcaCorr:
    case RankingMethod::PcaWeights: {
      r.pca = pca_fit(log_scale, d, cfg.autoencoder.seed);
      r.latent = pca_project(*r.pca, log_scale);
      if (cfg.method == RankingMethod::PcaCorr) {
        r.correlation = gene_dimension_correlation(log_scale, r.latent);
        for (int k = 0; k < d; ++k) r.lists.push_back(ranked_gene_list(r.correlation, k));
      } else {
        for (int k = 0; k < d; ++k) r.lists.push_back(pca_weights_ranking(*r.pca, k, cfg.signed_pca_weights));
      }
      break;
    }
  }
  return r;
}

PipelineResult rank_with_model(const ExpressionMatrix& m, const AutoencoderModel& model, bool zscore_inputs) {
  m.validate();
  m.require_analysis_shape("rank");
  PipelineResult r;
  const ExpressionMatrix log_scale = select_genes(m, model.gene_ids);
  r.standardized = standardize_genes(log_scale);
  if (!r.standardized.removed.empty())
    throw Error(ErrorKind::Numeric, "rank: gene " + r.standardized.removed.front() +
                                        " has zero variance but was part of the training input");
  r.latent = encode(model, zscore_inputs ? r.standardized.matrix : log_scale);
  r.correlation = gene_dimension_correlation(log_scale, r.latent);
  for (int k = 0; k < static_cast<int>(model.latent_dim()); ++k) r.lists.push_back(ranked_gene_list(r.correlation, k));
  r.model = model;
  return r;
}

ModelEnrichment gsea_stage(const std::vector<RankedGeneList>& lists, const GeneSetCollection& c,
                           const GseaParams& params, FilterResult* filtered) {
  if (lists.empty()) throw Error(ErrorKind::InvalidArgument, "gsea: no ranked lists");
  std::unordered_set<std::string> universe;
  for (const auto& g : lists.front().genes) universe.insert(g.gene_id);
  for (const auto& l : lists) {
    if (l.size() != universe.size())
      throw Error(ErrorKind::UniverseMismatch, "gsea: ranked list of dimension " + std::to_string(l.dimension) +
                                                   " has a different gene universe");
    for (const auto& g : l.genes)
      if (!universe.contains(g.gene_id))
        throw Error(ErrorKind::UniverseMismatch, "gsea: gene " + g.gene_id + " of dimension " +
                                                     std::to_string(l.dimension) + " is not in the shared universe");
  }
  FilterResult f = filter_gene_sets(c, universe, params.min_size, params.max_size);

  ModelEnrichment me;
  me.dimensions = static_cast<int>(lists.size());
  me.tables.resize(lists.size());
  for (std::size_t k = 0; k < lists.size(); ++k) me.tables[k] = run_preranked_gsea(lists[k], f.collection, params);
  if (filtered) *filtered = std::move(f);
  return me;
}

PipelineResult run_pipeline(const ExpressionMatrix& m, const GeneSetCollection& c, const PipelineConfig& cfg) {
  PipelineResult r = rank_stage(m, cfg);
  r.enrichment = gsea_stage(r.lists, c, cfg.gsea, &r.filtered);
  r.enrichment.provenance = to_string(cfg.method);
  return r;
}

}  // namespace lacogsea
