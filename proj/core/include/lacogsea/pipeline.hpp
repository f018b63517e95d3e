#pragma once

#include <optional>

#include "lacogsea/baselines.hpp"
#include "lacogsea/correlation.hpp"
#include "lacogsea/expression.hpp"
#include "lacogsea/pathway_ranking.hpp"

namespace lacogsea {

/// Everything one ranking run produces, from log-scale input to per-dimension
/// enrichment tables.
struct PipelineResult {
  StandardizeResult standardized;         // genes used for training
  std::optional<AutoencoderModel> model;  // autoencoder runs
  std::optional<PcaModel> pca;            // PCA runs
  LatentMatrix latent;
  CorrelationMap correlation;             // unset for PCA_Weights
  std::vector<RankedGeneList> lists;
  FilterResult filtered;
  ModelEnrichment enrichment;
};

/// Ranked lists only (no GSEA). `m` must be on log scale.
PipelineResult rank_stage(const ExpressionMatrix& m, const PipelineConfig& cfg);

/// Ranked lists from an already trained model. `m` must be on log scale and
/// contain every gene the model was trained on; the training input is rebuilt
/// the same way rank_stage builds it.
PipelineResult rank_with_model(const ExpressionMatrix& m, const AutoencoderModel& model, bool zscore_inputs = true);

/// Filters `c` against the lists' shared universe and runs GSEA per list.
ModelEnrichment gsea_stage(const std::vector<RankedGeneList>& lists, const GeneSetCollection& c,
                           const GseaParams& params, FilterResult* filtered = nullptr);

PipelineResult run_pipeline(const ExpressionMatrix& m, const GeneSetCollection& c, const PipelineConfig& cfg);

}  // namespace lacogsea
