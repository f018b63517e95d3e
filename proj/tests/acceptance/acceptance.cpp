// One PASS/FAIL line per acceptance criterion. Pass criterion names as
// arguments to run a subset; exit status is non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "gradient_check.hpp"
#include "lacogsea/activity.hpp"
#include "lacogsea/baselines.hpp"
#include "lacogsea/checkpoint.hpp"
#include "lacogsea/clustering.hpp"
#include "lacogsea/correlation.hpp"
#include "lacogsea/gsea.hpp"
#include "lacogsea/parallel.hpp"
#include "lacogsea/pathway_ranking.hpp"
#include "lacogsea/pipeline.hpp"
#include "lacogsea/random.hpp"
#include "lacogsea/stats.hpp"
#include "oracles.hpp"

using namespace lacogsea;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Accumulates failures; the first few are kept for the report line.
class Tally {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    pass_ = false;
    if (++failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& s) { info_ += (info_.empty() ? "" : "; ") + s; }
  Outcome outcome() const {
    Outcome o;
    o.pass = pass_;
    o.detail = info_;
    if (!pass_) o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(failures_) + " failure(s): " + notes_;
    return o;
  }

 private:
  bool pass_ = true;
  int failures_ = 0;
  std::string notes_;
  std::string info_;
};

std::string fmt(double v, int digits = 3) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

std::vector<std::string> numbered(const char* prefix, int n) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Eigen::MatrixXd gaussian(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Eigen::MatrixXd x(r, c);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

RankedGeneList random_list(int n, Rng& rng, bool with_ties) {
  std::vector<RankedGene> genes;
  for (int i = 0; i < n; ++i) {
    double s = rng.normal();
    if (with_ties) s = std::round(s * 4.0) / 4.0;
    genes.push_back({"g" + std::to_string(i), s});
  }
  return make_ranked_list(0, std::move(genes));
}

// ---------------------------------------------------------------------------
// Synthetic module data

struct ModuleData {
  ExpressionMatrix matrix;
  GeneSetCollection sets;
};

/// G x N log-scale matrix with two 50-gene modules driven by independent
/// standard normal factors. Module genes carry unit signal plus noise of
/// sd 0.5; `shared` genes of module B are taken from module A and follow the
/// normalized sum of both factors. Background genes are unit noise. The
/// collection holds both modules and `decoys` random 50-gene sets.
ModuleData module_data(int genes, int samples, int shared, int decoys, std::uint64_t seed) {
  constexpr int kModuleSize = 50;
  constexpr double kNoise = 0.5;
  Rng rng(derive_seed(seed, {0x6d0d}));
  ModuleData d;
  ExpressionMatrix& m = d.matrix;
  for (int g = 0; g < genes; ++g) {
    std::string id = std::to_string(g);
    m.gene_ids.push_back("gene_" + std::string(4 - id.size(), '0') + id);
  }
  m.sample_ids = numbered("sample_", samples);
  m.transformed = true;

  std::vector<std::size_t> order(static_cast<std::size_t>(genes));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span(order));
  std::vector<std::size_t> a(order.begin(), order.begin() + kModuleSize);
  std::vector<std::size_t> b(a.begin(), a.begin() + shared);
  b.insert(b.end(), order.begin() + kModuleSize, order.begin() + 2 * kModuleSize - shared);

  Eigen::VectorXd f1(samples), f2(samples);
  for (int s = 0; s < samples; ++s) {
    f1(s) = rng.normal();
    f2(s) = rng.normal();
  }
  m.values.resize(genes, samples);
  std::vector<int> role(static_cast<std::size_t>(genes), 0);
  for (auto g : a) role[g] |= 1;
  for (auto g : b) role[g] |= 2;
  for (int g = 0; g < genes; ++g)
    for (int s = 0; s < samples; ++s) {
      const int r = role[static_cast<std::size_t>(g)];
      const double signal = r == 1 ? f1(s) : r == 2 ? f2(s) : r == 3 ? (f1(s) + f2(s)) / std::sqrt(2.0) : 0.0;
      m.values(g, s) = signal + (r ? kNoise : 1.0) * rng.normal();
    }

  auto make_set = [&](std::string id, const std::vector<std::size_t>& idx) {
    GeneSet s;
    s.id = std::move(id);
    s.description = "planted";
    for (auto g : idx) s.members.push_back(m.gene_ids[g]);
    std::sort(s.members.begin(), s.members.end());
    return s;
  };
  d.sets.name = "planted";
  d.sets.sets.push_back(make_set("MODULE_A", a));
  d.sets.sets.push_back(make_set("MODULE_B", b));
  const auto random = random_gene_sets(m.gene_ids, decoys, kModuleSize, derive_seed(seed, {0xdec0}));
  for (const auto& s : random.sets) d.sets.sets.push_back(s);
  return d;
}

PipelineConfig default_pipeline(int latent_dim, std::uint64_t seed) {
  PipelineConfig pc;
  pc.autoencoder.latent_dim = latent_dim;
  pc.autoencoder.seed = seed;
  pc.gsea.seed = seed;
  return pc;
}

// ---------------------------------------------------------------------------
// Criteria

Outcome oracle_equivalence() {
  Tally t;
  Rng rng(101);

  // Pearson: 1000 random pairs at varied length, offset and scale.
  double pearson_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(200));
    ExpressionMatrix m;
    m.gene_ids = {"x", "other"};
    m.sample_ids = numbered("s", n);
    m.values.resize(2, n);
    LatentMatrix z;
    z.sample_ids = m.sample_ids;
    z.values.resize(n, 1);
    const double offset = rng.uniform(-1e3, 1e3), scale = std::exp(rng.uniform(-5, 5));
    for (int s = 0; s < n; ++s) {
      const double base = rng.normal();
      m.values(0, s) = offset + scale * base;
      m.values(1, s) = rng.normal();
      z.values(s, 0) = rng.uniform() < 0.5 ? base + rng.normal() : rng.normal();
    }
    const auto c = gene_dimension_correlation(m, z);
    Eigen::VectorXd row = m.values.row(0).transpose();
    const double o = oracle::pearson(std::span<const double>(row.data(), static_cast<std::size_t>(n)),
                                     std::span<const double>(z.values.data(), static_cast<std::size_t>(n)));
    pearson_err = std::max(pearson_err, std::abs(c.values(0, 0) - o));
  }
  t.expect(pearson_err <= 1e-12, "pearson max err " + fmt(pearson_err));
  t.note("pearson 1000 pairs max err " + fmt(pearson_err));

  // ES: 1000 instances, list of 50, set of 5, exponents 0, 1, 2.
  int es_mismatch = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double exponent = static_cast<double>(trial % 3);
    const auto l = random_list(50, rng, trial % 2 == 0);
    std::vector<std::size_t> pos;
    std::vector<unsigned char> marks;
    rng.sample_distinct(50, 5, pos, marks);
    std::vector<std::string> members;
    std::vector<bool> in(50, false);
    for (auto p : pos) {
      members.push_back(l.genes[p].gene_id);
      in[p] = true;
    }
    const auto w = list_weights(l, exponent);
    if (enrichment_score(l, members, exponent).es != oracle::running_sum_es(w, in)) ++es_mismatch;
  }
  t.expect(es_mismatch == 0, std::to_string(es_mismatch) + " ES mismatches");
  t.note("ES 1000 instances, " + std::to_string(es_mismatch) + " inexact");

  // ARI: 200 random label pairs.
  double ari_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(80);
    const auto ka = 1 + rng.below(6), kb = 1 + rng.below(6);
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng.below(ka));
      b[i] = rng.uniform() < 0.5 ? a[i] : static_cast<int>(rng.below(kb));
    }
    ari_err = std::max(ari_err, std::abs(adjusted_rand_index(a, b) - oracle::adjusted_rand_index(a, b)));
  }
  t.expect(ari_err <= 1e-12, "ARI max err " + fmt(ari_err));
  t.note("ARI 200 pairs max err " + fmt(ari_err));

  // Wilcoxon exact path: 500 instances with n <= 8 per side.
  int wilcoxon_mismatch = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(1 + rng.below(8)), y(1 + rng.below(8));
    for (auto& v : x) v = static_cast<double>(rng.below(7));
    for (auto& v : y) v = static_cast<double>(rng.below(7)) + (trial % 4 == 0 ? 0.5 : 0.0);
    const auto r = wilcoxon_rank_sum(x, y);
    const auto o = oracle::wilcoxon_enumerate(x, y);
    if (!r.exact || r.statistic != o.statistic || r.p_value != o.p_value) ++wilcoxon_mismatch;
  }
  t.expect(wilcoxon_mismatch == 0, std::to_string(wilcoxon_mismatch) + " Wilcoxon mismatches");
  t.note("Wilcoxon 500 instances, " + std::to_string(wilcoxon_mismatch) + " inexact");

  // Activity product against a triple loop.
  double product_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(40)), d = 1 + static_cast<Eigen::Index>(rng.below(16)),
                       p = 1 + static_cast<Eigen::Index>(rng.below(60));
    LatentMatrix z;
    z.sample_ids = numbered("s", static_cast<int>(n));
    z.values = gaussian(n, d, rng);
    WeightMatrix w;
    w.values = gaussian(d, p, rng);
    w.set_ids = numbered("P", static_cast<int>(p));
    const auto a = activity_scores(z, w);
    product_err =
        std::max(product_err, (a.values - oracle::triple_loop_product(z.values, w.values)).cwiseAbs().maxCoeff());
  }
  t.expect(product_err <= 1e-12, "activity max err " + fmt(product_err));
  t.note("activity max err " + fmt(product_err));

  // PCA against the dense eigensolver, up to sign.
  double pca_err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int g = 20 + static_cast<int>(rng.below(60)), n = 10 + static_cast<int>(rng.below(40)), d = 5;
    Eigen::MatrixXd x = gaussian(g, n, rng);
    for (int i = 0; i < g; ++i) x.row(i) *= 0.5 + 0.1 * static_cast<double>(i % 17);
    ExpressionMatrix m;
    m.gene_ids = numbered("g", g);
    m.sample_ids = numbered("s", n);
    m.values = x;
    m.transformed = true;
    const auto p = pca_fit(m, d, static_cast<std::uint64_t>(trial));
    const auto o = oracle::dense_pca(x, d);
    for (int k = 0; k < d; ++k) {
      const double sign = p.components.row(k).dot(o.components.row(k)) < 0 ? -1.0 : 1.0;
      pca_err = std::max(pca_err, (p.components.row(k) - sign * o.components.row(k)).cwiseAbs().maxCoeff());
    }
  }
  t.expect(pca_err <= 1e-8, "PCA max err " + fmt(pca_err));
  t.note("PCA max err " + fmt(pca_err));
  return t.outcome();
}

Outcome gradient_check() {
  Tally t;
  Rng rng(202);
  int draws = 0;
  double worst = 0.0;
  for (int repeat = 0; repeat < 3; ++repeat)
    for (Activation act : {Activation::Tanh, Activation::Relu})
      for (double l1 : {0.0, 0.01})
        for (double l2 : {0.0, 0.01}) {
          AutoencoderConfig cfg;
          cfg.latent_dim = 3;
          cfg.hidden_dims = {7, 5};
          cfg.activation = act;
          cfg.l1 = l1;
          cfg.l2 = l2;
          cfg.penalize_biases = repeat == 2;
          cfg.seed = static_cast<std::uint64_t>(draws);
          const auto model = testing::randomized(initialize_autoencoder(numbered("g", 9), cfg), rng);
          const Eigen::MatrixXd batch = gaussian(9, 6, rng);
          const double err = testing::max_gradient_error(model, batch);
          worst = std::max(worst, err);
          t.expect(err < 1e-4, std::string(to_string(act)) + " l1=" + fmt(l1) + " l2=" + fmt(l2) + " err " + fmt(err));
          ++draws;
        }
  t.note(std::to_string(draws) + " draws, max rel err " + fmt(worst));
  t.expect(draws >= 20, "fewer than 20 draws");
  return t.outcome();
}

Outcome planted_signal() {
  Tally t;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto d = module_data(2000, 400, 0, 48, seed);
    const auto r = run_pipeline(d.matrix, d.sets, default_pipeline(8, seed));
    for (const char* id : {"MODULE_A", "MODULE_B"}) {
      const auto rank = model_level_rank(r.enrichment, id, kDefaultAlpha);
      double best_q = 1.0;
      for (const auto& table : r.enrichment.tables)
        if (const auto* rec = table.find(id)) best_q = std::min(best_q, rec->fdr_q);
      t.note("seed " + std::to_string(seed) + " " + id + " rank " + (rank ? std::to_string(*rank) : "none") +
             " q " + fmt(best_q));
      t.expect(rank && *rank == 1 && best_q < 0.05, std::string(id) + " seed " + std::to_string(seed));
    }
  }
  return t.outcome();
}

Outcome negative_control_criterion() {
  Tally t;
  std::vector<std::string> universe = numbered("gene_", 2000);
  SaturationConfig cfg;  // FDR q gate at 0.05 / D
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto sets = random_gene_sets(universe, 200, 30, seed);
    const auto table = negative_control(2000, 300, sets, {4, 16, 64}, seed, cfg);
    std::string counts;
    for (const auto& p : table.points) {
      counts += (counts.empty() ? "" : ",") + std::to_string(p.n_significant);
      t.expect(p.n_significant == 0, "seed " + std::to_string(seed) + " D=" + std::to_string(p.dimensions) + ": " +
                                         std::to_string(p.n_significant) + " significant");
    }
    t.note("seed " + std::to_string(seed) + " D{4,16,64} " + counts);
  }
  return t.outcome();
}

Outcome calibration() {
  Tally t;
  Rng rng(303);
  std::vector<double> p_values;
  int q_hits = 0, records = 0;
  for (int list = 0; list < 5; ++list) {
    const auto l = random_list(2000, rng, false);
    std::vector<std::string> universe;
    for (const auto& g : l.genes) universe.push_back(g.gene_id);
    GeneSetCollection c;
    c.name = "null";
    std::vector<std::size_t> pos;
    std::vector<unsigned char> marks;
    for (int s = 0; s < 100; ++s) {
      const auto size = static_cast<std::size_t>(15 + rng.below(186));
      rng.sample_distinct(universe.size(), size, pos, marks);
      GeneSet gs;
      gs.id = "null_" + std::to_string(list) + "_" + std::to_string(s);
      for (auto p : pos) gs.members.push_back(universe[p]);
      c.sets.push_back(std::move(gs));
    }
    GseaParams params;
    params.seed = static_cast<std::uint64_t>(list + 1);
    const auto table = run_preranked_gsea(l, c, params);
    for (const auto& r : table.records) {
      p_values.push_back(r.p_nominal);
      ++records;
      if (r.fdr_q < 0.05) ++q_hits;
    }
  }
  const double ks_p = oracle::ks_uniform_p(p_values);
  const double q_fraction = static_cast<double>(q_hits) / static_cast<double>(records);
  t.note(std::to_string(records) + " null sets, KS p " + fmt(ks_p) + ", q<0.05 fraction " + fmt(q_fraction));
  t.expect(records == 500, "expected 500 tested sets");
  t.expect(ks_p >= 0.01, "nominal p not uniform");
  t.expect(q_fraction <= 0.10, "q<0.05 fraction above 0.10");
  return t.outcome();
}

/// Every persisted artifact of one full run, concatenated.
std::string pipeline_fingerprint(unsigned threads) {
  set_thread_count(threads);
  const auto d = module_data(600, 80, 10, 30, 11);
  PipelineConfig pc = default_pipeline(6, 11);
  pc.autoencoder.hidden_dims = {64, 16};
  pc.autoencoder.epochs = 20;
  pc.autoencoder.batch_size = 16;
  pc.gsea.n_permutations = 200;
  const auto r = run_pipeline(d.matrix, d.sets, pc);
  std::string out = serialize_model(*r.model) + format_latent_matrix(r.latent) + format_correlation_map(r.correlation);
  for (const auto& l : r.lists) out += format_ranked_list(l);
  for (const auto& table : r.enrichment.tables) out += format_enrichment_table(table) + format_skipped_sets(table);
  const auto w = nes_weight_matrix(r.enrichment);
  out += format_weight_matrix(w) + format_activity_matrix(activity_scores(r.latent, w, true));
  set_thread_count(0);
  return out;
}

Outcome determinism() {
  Tally t;
  const auto first = pipeline_fingerprint(1);
  const auto second = pipeline_fingerprint(1);
  const auto threaded = pipeline_fingerprint(8);
  t.expect(first == second, "two single-thread runs differ");
  t.expect(first == threaded, "1 vs 8 threads differ");
  t.note("fingerprint " + std::to_string(first.size()) + " bytes, repeat " + (first == second ? "identical" : "differs") +
         ", 8 threads " + (first == threaded ? "identical" : "differs"));
  return t.outcome();
}

Outcome baseline_contrast() {
  Tally t;
  int favourable = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto d = module_data(2000, 400, 20, 48, seed);
    auto detected = [&](const ModelEnrichment& me) {
      int n = 0;
      for (const char* id : {"MODULE_A", "MODULE_B"})
        if (model_level_rank(me, id, kDefaultAlpha)) ++n;
      return n;
    };
    PipelineConfig ae = default_pipeline(8, seed);
    PipelineConfig pca = ae;
    pca.method = RankingMethod::PcaWeights;
    const int ae_hits = detected(run_pipeline(d.matrix, d.sets, ae).enrichment);
    const int pca_hits = detected(run_pipeline(d.matrix, d.sets, pca).enrichment);
    const bool ok = ae_hits == 2 && pca_hits < 2;
    favourable += ok ? 1 : 0;
    t.note("seed " + std::to_string(seed) + " AE " + std::to_string(ae_hits) + "/2 PCA_Weights " +
           std::to_string(pca_hits) + "/2");
  }
  t.note(std::to_string(favourable) + "/5 seeds favour AE");
  t.expect(favourable >= 3, "AE detects both while PCA_Weights misses one in fewer than 3 of 5 seeds");
  return t.outcome();
}

Outcome formula_anchors() {
  Tally t;
  auto record = [](std::string id, int rank, double q) {
    EnrichmentRecord r;
    r.set_id = std::move(id);
    r.rank_in_dimension = rank;
    r.fdr_q = q;
    r.p_nominal = q;
    return r;
  };

  // Model-level rank is the minimum rank over significant dimensions.
  ModelEnrichment me;
  me.dimensions = 8;
  me.tables.resize(8);
  me.tables[2].records = {record("P", 5, 0.01)};
  me.tables[7].records = {record("P", 3, 0.04)};
  me.tables[5].records = {record("P", 1, 0.06), record("MISS", 2, 0.5)};
  t.expect(model_level_rank(me, "P", 0.05) == 3, "min-rank over significant dimensions");

  // Penalty rank 100 by default for undetected targets.
  const auto bench = benchmark_targets(me, {"P", "MISS"});
  t.expect(kDefaultPenaltyRank == 100 && bench.penalty == 100, "default penalty");
  t.expect(bench.targets[1].achieved == 100 && bench.mean_rank == (3.0 + 100.0) / 2.0, "penalised mean rank");

  // Bonferroni gate 0.05 / D.
  ModelEnrichment gate;
  gate.dimensions = 4;
  gate.tables.resize(4);
  gate.tables[0].records = {record("AT", 1, 0.0125), record("BELOW", 2, 0.0124)};
  const auto pt = count_significant(gate, SignificanceGate::FdrQ, 0.05);
  t.expect(pt.threshold == 0.05 / 4 && pt.significant_sets == std::vector<std::string>{"BELOW"}, "0.05/D gate");

  // Activity linearity: A(z1 + z2) = A(z1) + A(z2), and a unit latent row selects a weight row.
  Rng rng(404);
  LatentMatrix z1, z2, z12, unit;
  z1.sample_ids = z2.sample_ids = z12.sample_ids = numbered("s", 10);
  z1.values = gaussian(10, 4, rng);
  z2.values = gaussian(10, 4, rng);
  z12.values = z1.values + z2.values;
  WeightMatrix w;
  w.values = gaussian(4, 7, rng);
  w.set_ids = numbered("P", 7);
  const double lin = (activity_scores(z12, w).values - activity_scores(z1, w).values - activity_scores(z2, w).values)
                         .cwiseAbs()
                         .maxCoeff();
  t.expect(lin <= 1e-12, "linearity err " + fmt(lin));
  unit.sample_ids = {"s"};
  unit.values = Eigen::MatrixXd::Zero(1, 4);
  unit.values(0, 0) = 1.0;
  t.expect(activity_scores(unit, w).values.row(0) == w.values.row(0), "unit latent selects a weight row");
  t.note("min-rank 3, penalty 100, gate 0.0125, linearity err " + fmt(lin));
  return t.outcome();
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"oracle_equivalence", 120, oracle_equivalence},
      {"gradient_check", 30, gradient_check},
      {"planted_signal", 300, planted_signal},
      {"negative_control", 600, negative_control_criterion},
      {"calibration", 0, calibration},
      {"determinism", 0, determinism},
      {"baseline_contrast", 0, baseline_contrast},
      {"formula_anchors", 0, formula_anchors},
  };
  std::vector<std::string> selected(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt(elapsed, 3) + " s";
    if (c.budget_seconds > 0) {
      timing += " of " + fmt(c.budget_seconds, 4) + " s budget";
      if (elapsed > c.budget_seconds) {
        o.pass = false;
        o.detail += "; over time budget";
      }
    }
    if (!o.pass) ++failed;
    std::printf("%s %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
