#include "lacogsea/pathway_ranking.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "lacogsea/error.hpp"
#include "lacogsea/pipeline.hpp"
#include "lacogsea/random.hpp"
#include "lacogsea/tsv.hpp"

namespace lacogsea {

std::optional<int> model_level_rank(const ModelEnrichment& me, const std::string& set_id, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "model_level_rank: alpha must be in (0, 1)");
  bool known = false;
  std::optional<int> best;
  for (const auto& t : me.tables) {
    known = known || t.tested(set_id);
    const auto* r = t.find(set_id);
    if (r && r->fdr_q < alpha && (!best || r->rank_in_dimension < *best)) best = r->rank_in_dimension;
  }
  if (!known) throw Error(ErrorKind::NotFound, "model_level_rank: gene set " + set_id + " was not tested");
  return best;
}

BenchmarkResult benchmark_targets(const ModelEnrichment& me, const std::vector<std::string>& targets, int penalty,
                                  double alpha, int coverage_n, std::string method) {
  if (targets.empty()) throw Error(ErrorKind::InvalidArgument, "benchmark_targets: empty target list");
  if (penalty < 1) throw Error(ErrorKind::InvalidArgument, "benchmark_targets: penalty must be >= 1");
  BenchmarkResult r;
  r.method = std::move(method);
  r.penalty = penalty;
  r.alpha = alpha;
  r.coverage_n = coverage_n;
  double sum = 0.0;
  int covered = 0;
  for (const auto& id : targets) {
    TargetRank t{id, model_level_rank(me, id, alpha), penalty};
    if (t.rank) t.achieved = *t.rank;
    sum += t.achieved;
    if (t.rank && *t.rank <= coverage_n) ++covered;
    r.targets.push_back(std::move(t));
  }
  r.mean_rank = sum / static_cast<double>(targets.size());
  r.coverage = static_cast<double>(covered) / static_cast<double>(targets.size());
  return r;
}

std::string format_benchmark_tsv(const BenchmarkResult& r) {
  std::string out = "target\trank_or_penalty\tdetected\n";
  for (const auto& t : r.targets)
    out += t.set_id + '\t' + std::to_string(t.achieved) + '\t' + (t.rank ? "true" : "false") + '\n';
  return out;
}

std::string format_benchmark_json(const BenchmarkResult& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["mean_rank"] = r.mean_rank;
  j["coverage"] = r.coverage;
  j["coverage_n"] = r.coverage_n;
  j["penalty"] = r.penalty;
  j["alpha"] = r.alpha;
  j["targets"] = r.targets.size();
  return j.dump(2) + "\n";
}

std::vector<std::string> load_target_list(const std::filesystem::path& path) {
  std::vector<std::string> out;
  for (auto line : tsv::read_lines(path)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

const char* to_string(SignificanceGate g) noexcept { return g == SignificanceGate::NominalP ? "nominal_p" : "fdr_q"; }

SignificanceGate parse_gate(const std::string& name) {
  if (name == "nominal_p" || name == "p") return SignificanceGate::NominalP;
  if (name == "fdr_q" || name == "q") return SignificanceGate::FdrQ;
  throw Error(ErrorKind::InvalidArgument, "unknown significance gate: " + name);
}

const char* to_string(RankingMethod m) noexcept {
  switch (m) {
    case RankingMethod::Autoencoder: return "autoencoder";
    case RankingMethod::PcaCorr: return "pca_corr";
    case RankingMethod::PcaWeights: return "pca_weights";
  }
  return "unknown";
}

RankingMethod parse_ranking_method(const std::string& name) {
  if (name == "autoencoder" || name == "ae") return RankingMethod::Autoencoder;
  if (name == "pca_corr" || name == "pca-corr") return RankingMethod::PcaCorr;
  if (name == "pca_weights" || name == "pca-weights") return RankingMethod::PcaWeights;
  throw Error(ErrorKind::InvalidArgument, "unknown ranking method: " + name);
}

SaturationPoint count_significant(const ModelEnrichment& me, SignificanceGate gate, double alpha) {
  SaturationPoint pt;
  pt.dimensions = me.dimensions;
  pt.threshold = alpha / static_cast<double>(me.dimensions);
  std::set<std::string> tested;
  std::set<std::string> significant;
  for (const auto& t : me.tables) {
    for (const auto& r : t.records) {
      tested.insert(r.set_id);
      const double stat = gate == SignificanceGate::NominalP ? r.p_nominal : r.fdr_q;
      if (stat * static_cast<double>(me.dimensions) < alpha) significant.insert(r.set_id);
    }
    for (const auto& s : t.skipped) tested.insert(s.set_id);
  }
  pt.n_tested = static_cast<int>(tested.size());
  pt.n_significant = static_cast<int>(significant.size());
  pt.significant_sets.assign(significant.begin(), significant.end());
  return pt;
}

SaturationTable saturation_curve(const ExpressionMatrix& m, const std::vector<int>& dims, const GeneSetCollection& c,
                                 const SaturationConfig& cfg) {
  if (dims.empty()) throw Error(ErrorKind::InvalidArgument, "saturation_curve: empty dimension list");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1) throw Error(ErrorKind::InvalidArgument, "saturation_curve: dimensions must be >= 1");
    if (i > 0 && dims[i] <= dims[i - 1])
      throw Error(ErrorKind::InvalidArgument, "saturation_curve: dimensions must be strictly increasing");
  }
  SaturationTable table;
  table.collection = c.name;
  table.gate = cfg.gate;
  table.alpha = cfg.alpha;
  for (int d : dims) {
    PipelineConfig pc = cfg.pipeline;
    const std::uint64_t seed = derive_seed(cfg.base_seed, {static_cast<std::uint64_t>(d)});
    pc.autoencoder.latent_dim = d;
    pc.autoencoder.seed = seed;
    pc.gsea.seed = seed;
    try {
      const PipelineResult r = run_pipeline(m, c, pc);
      table.points.push_back(count_significant(r.enrichment, cfg.gate, cfg.alpha));
    } catch (const Error& e) {
      throw Error(e.kind(), "saturation at D=" + std::to_string(d) + ": " + e.what());
    }
  }
  return table;
}

ExpressionMatrix gaussian_noise_matrix(int genes, int samples, std::uint64_t seed) {
  if (genes < 2 || samples < 3) throw Error(ErrorKind::InvalidArgument, "noise matrix needs G >= 2 and N >= 3");
  ExpressionMatrix m;
  for (int g = 0; g < genes; ++g) m.gene_ids.push_back("gene_" + std::to_string(g));
  for (int s = 0; s < samples; ++s) m.sample_ids.push_back("sample_" + std::to_string(s));
  m.values.resize(genes, samples);
  Rng rng(derive_seed(seed, {0x401e}));
  for (int g = 0; g < genes; ++g)
    for (int s = 0; s < samples; ++s) m.values(g, s) = rng.normal();
  m.transformed = true;
  return m;
}

GeneSetCollection random_gene_sets(const std::vector<std::string>& universe, int count, int size,
                                   std::uint64_t seed) {
  if (count < 0 || size < 1 || static_cast<std::size_t>(size) > universe.size())
    throw Error(ErrorKind::InvalidArgument, "random_gene_sets: need 0 <= count and 1 <= size <= universe size");
  GeneSetCollection c;
  c.name = "random";
  Rng rng(derive_seed(seed, {0x5e75}));
  std::vector<std::size_t> picks;
  std::vector<unsigned char> marks;
  for (int s = 0; s < count; ++s) {
    rng.sample_distinct(universe.size(), static_cast<std::size_t>(size), picks, marks);
    GeneSet g;
    g.id = "random_" + std::to_string(s);
    g.description = "uniform random genes";
    for (auto i : picks) g.members.push_back(universe[i]);
    std::sort(g.members.begin(), g.members.end());
    c.sets.push_back(std::move(g));
  }
  return c;
}

SaturationTable negative_control(int genes, int samples, const GeneSetCollection& c, const std::vector<int>& dims,
                                 std::uint64_t seed, const SaturationConfig& cfg) {
  if (dims.empty()) throw Error(ErrorKind::InvalidArgument, "negative_control: empty dimension list");
  SaturationConfig run = cfg;
  run.base_seed = seed;
  return saturation_curve(gaussian_noise_matrix(genes, samples, seed), dims, c, run);
}

std::string format_saturation_table(const SaturationTable& t) {
  std::string out = "D\tn_significant\tcollection\tthreshold_rule\n";
  for (const auto& p : t.points)
    out += std::to_string(p.dimensions) + '\t' + std::to_string(p.n_significant) + '\t' + t.collection + '\t' +
           to_string(t.gate) + "<" + tsv::format_double(t.alpha) + "/" + std::to_string(p.dimensions) + '\n';
  return out;
}

}  // namespace lacogsea
