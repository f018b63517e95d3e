#include <cmath>
#include <iostream>
#include <numeric>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "lacogsea/activity.hpp"
#include "lacogsea/baselines.hpp"
#include "lacogsea/checkpoint.hpp"
#include "lacogsea/clustering.hpp"
#include "lacogsea/error.hpp"
#include "lacogsea/parallel.hpp"
#include "lacogsea/pipeline.hpp"
#include "lacogsea/random.hpp"
#include "lacogsea/stats.hpp"
#include "lacogsea/tsv.hpp"
#include "run_support.hpp"

namespace {

using namespace lacogsea;
using namespace lacogsea::cli;
using json = nlohmann::ordered_json;

struct Global {
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out = "lacogsea_out";
};

struct InputOptions {
  std::string expr;
  std::string orientation = "genes";
  bool log_scale = false;  // input already log2-transformed
};

struct TrainOptions {
  AutoencoderConfig ae;
  std::string activation = "relu";
  bool no_zscore = false;
};

struct ClusterOptions {
  std::string labels;
  int k = 0;
  int restarts = 20;
  int max_iterations = 300;
  int bootstrap = 20;
};

void add_input_options(CLI::App* sub, InputOptions& o) {
  sub->add_option("--expr", o.expr, "Expression matrix (TSV or CSV)")->required();
  sub->add_option("--orientation", o.orientation, "genes: genes in rows; samples: samples in rows")
      ->check(CLI::IsMember({"genes", "samples"}))
      ->capture_default_str();
  sub->add_flag("--log-scale", o.log_scale, "Input is already log2-transformed; skip log2(x+1)");
}

void add_train_options(CLI::App* sub, TrainOptions& o) {
  auto& a = o.ae;
  sub->add_option("--latent-dim", a.latent_dim, "Latent dimensions D")->capture_default_str();
  sub->add_option("--hidden", a.hidden_dims, "Encoder hidden widths, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--activation", o.activation, "relu or tanh")->capture_default_str();
  sub->add_option("--l1", a.l1, "L1 penalty weight")->capture_default_str();
  sub->add_option("--l2", a.l2, "L2 penalty weight")->capture_default_str();
  sub->add_option("--lr", a.learning_rate, "Adam learning rate")->capture_default_str();
  sub->add_option("--batch-size", a.batch_size, "Minibatch size; 0 = min(128, N)")->capture_default_str();
  sub->add_option("--epochs", a.epochs, "Training epochs")->capture_default_str();
  sub->add_option("--holdout", a.holdout_fraction, "Fraction of samples held out for monitoring")
      ->capture_default_str();
  sub->add_flag("--penalize-biases", a.penalize_biases, "Apply L1/L2 to biases too");
  sub->add_flag("--no-zscore", o.no_zscore, "Train on log-scale values instead of per-gene z-scores");
}

void add_gsea_options(CLI::App* sub, GseaParams& p) {
  sub->add_option("--permutations", p.n_permutations, "Null draws per set")->capture_default_str();
  sub->add_option("--weight-exponent", p.weight_exponent, "Running-sum weight exponent")->capture_default_str();
  sub->add_option("--min-size", p.min_size, "Minimum set size after universe intersection")->capture_default_str();
  sub->add_option("--max-size", p.max_size, "Maximum set size after universe intersection")->capture_default_str();
}

void add_cluster_options(CLI::App* sub, ClusterOptions& o, bool labels_required) {
  auto* lab = sub->add_option("--labels", o.labels, "Reference labels (sample_id<TAB>label)");
  if (labels_required) lab->required();
  sub->add_option("--k", o.k, "Clusters; 0 = number of reference categories")->capture_default_str();
  sub->add_option("--restarts", o.restarts, "K-means restarts")->capture_default_str();
  sub->add_option("--max-iterations", o.max_iterations, "K-means iteration cap")->capture_default_str();
  sub->add_option("--bootstrap", o.bootstrap, "Bootstrap repeats for the ARI spread (with labels)")
      ->capture_default_str();
}

ExpressionMatrix load_input(const InputOptions& o) {
  require_path(o.expr);
  auto m = load_expression_matrix(o.expr, o.orientation == "samples" ? Orientation::SamplesInRows
                                                                      : Orientation::GenesInRows);
  return o.log_scale ? assume_log_scale(std::move(m)) : log_transform(m);
}

GeneSetCollection load_gmt(const std::string& path) {
  require_path(path);
  return parse_gmt(path);
}

AutoencoderConfig resolve_train(TrainOptions o, std::uint64_t seed) {
  o.ae.activation = parse_activation(o.activation);
  o.ae.seed = seed;
  return o.ae;
}

json cluster_report(const ActivityMatrix& activity, const ClusterOptions& o, std::uint64_t seed,
                    const fs::path& out, Manifest& manifest) {
  const ActivityMatrix z = activity.standardized ? activity : standardize_activity(activity);
  std::vector<std::string> labels;
  std::vector<std::size_t> labeled;
  std::set<std::string> categories;
  if (!o.labels.empty()) {
    labels = align_labels(load_labels(o.labels), z.sample_ids);
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (!labels[i].empty()) {
        labeled.push_back(i);
        categories.insert(labels[i]);
      }
  }
  int k = o.k;
  if (k == 0) {
    if (categories.empty()) throw Error(ErrorKind::InvalidArgument, "cluster: --k is required without labels");
    k = static_cast<int>(categories.size());
  }
  KMeansOptions ko{o.restarts, o.max_iterations};
  const auto km = kmeans(z, k, seed, ko);

  std::string assignments = "sample_id\tcluster\n";
  for (std::size_t i = 0; i < z.sample_ids.size(); ++i)
    assignments += z.sample_ids[i] + '\t' + std::to_string(km.labels[i]) + '\n';
  emit(out, "clusters.tsv", assignments, manifest);

  json r;
  r["k"] = k;
  r["seed"] = seed;
  r["restarts"] = o.restarts;
  r["max_iterations"] = o.max_iterations;
  r["inertia"] = km.inertia;
  r["iterations"] = km.iterations;
  r["converged"] = km.converged;
  r["standardization"] = "per_pathway_zscore_population_sd";
  if (labeled.empty()) {
    r["ari"] = nullptr;
  } else {
    std::vector<std::string> ref_names, cluster_names;
    std::vector<int> clusters;
    for (auto i : labeled) {
      ref_names.push_back(labels[i]);
      clusters.push_back(km.labels[i]);
    }
    const auto ref = encode_labels(ref_names);
    r["ari"] = adjusted_rand_index(clusters, ref);
    r["n_labeled"] = labeled.size();
    r["n_unlabeled_excluded"] = z.sample_ids.size() - labeled.size();
    // Bootstrap spread: resample labeled samples with replacement and recluster.
    if (o.bootstrap > 0) {
      std::vector<double> aris(static_cast<std::size_t>(o.bootstrap));
      parallel_for(aris.size(), [&](std::size_t b) {
        Rng rng(derive_seed(seed, {0xb007, b}));
        Eigen::MatrixXd rows(static_cast<Eigen::Index>(labeled.size()), z.values.cols());
        std::vector<int> ref_b(labeled.size());
        for (std::size_t i = 0; i < labeled.size(); ++i) {
          const auto pick = static_cast<std::size_t>(rng.below(labeled.size()));
          rows.row(static_cast<Eigen::Index>(i)) = z.values.row(static_cast<Eigen::Index>(labeled[pick]));
          ref_b[i] = ref[pick];
        }
        try {
          const auto kb = kmeans_rows(rows, k, derive_seed(seed, {0xb008, b}), ko);
          aris[b] = adjusted_rand_index(kb.labels, ref_b);
        } catch (const Error&) {
          aris[b] = std::nan("");  // too few distinct rows in this resample
        }
      });
      double sum = 0.0, sq = 0.0;
      int used = 0;
      for (double a : aris)
        if (std::isfinite(a)) {
          sum += a;
          sq += a * a;
          ++used;
        }
      json bs;
      bs["repeats"] = o.bootstrap;
      bs["used"] = used;
      const double mean = used ? sum / used : 0.0;
      bs["mean_ari"] = mean;
      bs["sd_ari"] = used > 1 ? std::sqrt(std::max(0.0, (sq - used * mean * mean) / (used - 1))) : 0.0;
      r["bootstrap"] = bs;
    }
  }
  emit(out, "cluster_eval.json", r.dump(2) + "\n", manifest);
  return r;
}

BenchmarkResult bench_report(const ModelEnrichment& me, const std::string& targets_path, int penalty, double alpha,
                             int coverage_n, const std::string& method, const fs::path& out, Manifest& manifest) {
  require_path(targets_path);
  const auto targets = load_target_list(targets_path);
  const auto r = benchmark_targets(me, targets, penalty, alpha, coverage_n, method);
  emit(out, "benchmark.tsv", format_benchmark_tsv(r), manifest);
  emit(out, "benchmark.json", format_benchmark_json(r), manifest);
  return r;
}

struct ActivityOutputs {
  WeightMatrix weights;
  ActivityMatrix activity;
  ActivityMatrix standardized;
};

ActivityOutputs activity_report(const LatentMatrix& z, const ModelEnrichment& me, const fs::path& out,
                                Manifest& manifest) {
  ActivityOutputs a;
  a.weights = nes_weight_matrix(me);
  a.activity = activity_scores(z, a.weights, false);
  a.standardized = standardize_activity(a.activity);
  emit(out, "weights.tsv", format_weight_matrix(a.weights), manifest);
  emit(out, "activity.tsv", format_activity_matrix(a.activity), manifest);
  emit(out, "activity_standardized.tsv", format_activity_matrix(a.standardized), manifest);
  for (const auto& w : a.weights.warnings) std::cerr << "warning: " << w << '\n';
  json fill;
  fill["fill_rule"] = a.weights.fill_rule;
  fill["filled_cells"] = a.weights.filled;
  fill["dimensions"] = a.weights.values.rows();
  fill["sets"] = a.weights.values.cols();
  emit(out, "weights_fill.json", fill.dump(2) + "\n", manifest);
  return a;
}

void print_error(const std::string& stage, const std::string& kind, const std::string& message,
                 const std::string& path = {}) {
  json e;
  e["error"] = kind;
  e["stage"] = stage;
  e["message"] = message;
  if (!path.empty()) e["path"] = path;
  std::cerr << e.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LaCoGSEA: latent correlation GSEA on autoencoder representations", "lacogsea"};
  app.set_version_flag("--version", LACOGSEA_VERSION);
  app.set_config("--config", "", "TOML config file; command line flags win over file values");
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--seed", g.seed, "Global seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads; 0 = all cores")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  // train
  InputOptions train_in;
  TrainOptions train_opt;
  auto* train = app.add_subcommand("train", "Train the autoencoder and write a checkpoint");
  add_input_options(train, train_in);
  add_train_options(train, train_opt);

  // rank
  InputOptions rank_in;
  std::string rank_model;
  bool rank_no_zscore = false;
  auto* rank = app.add_subcommand("rank", "Per-dimension ranked gene lists from a trained model");
  add_input_options(rank, rank_in);
  rank->add_option("--model", rank_model, "Checkpoint written by train")->required();
  rank->add_flag("--no-zscore", rank_no_zscore, "Model was trained with --no-zscore");

  // gsea
  std::string gsea_ranked, gsea_gmt;
  GseaParams gsea_params;
  auto* gsea = app.add_subcommand("gsea", "Pre-ranked GSEA on every ranked list");
  gsea->add_option("--ranked", gsea_ranked, "Directory with dim_0.tsv, dim_1.tsv, ...")->required();
  gsea->add_option("--gmt", gsea_gmt, "Gene set collection (GMT)")->required();
  add_gsea_options(gsea, gsea_params);

  // activity
  std::string act_latent, act_gsea;
  auto* activity = app.add_subcommand("activity", "NES weight matrix and sample-level pathway activity");
  activity->add_option("--latent", act_latent, "Latent matrix TSV (samples as rows)")->required();
  activity->add_option("--gsea", act_gsea, "Directory of per-dimension enrichment tables")->required();

  // cluster
  std::string cl_activity;
  ClusterOptions cl_opt;
  auto* cluster = app.add_subcommand("cluster", "K-means on standardized activity, ARI against labels");
  cluster->add_option("--activity", cl_activity, "Activity matrix TSV (samples as rows)")->required();
  add_cluster_options(cluster, cl_opt, false);

  // diff
  std::string diff_activity, diff_labels, diff_g1, diff_g2;
  auto* diff = app.add_subcommand("diff", "Wilcoxon rank-sum differential pathway table");
  diff->add_option("--activity", diff_activity, "Activity matrix TSV (samples as rows)")->required();
  diff->add_option("--labels", diff_labels, "Group labels (sample_id<TAB>label)")->required();
  diff->add_option("--group1", diff_g1, "First group label")->required();
  diff->add_option("--group2", diff_g2, "Second group label")->required();

  // saturate
  InputOptions sat_in;
  TrainOptions sat_train;
  GseaParams sat_gsea;
  std::string sat_gmt, sat_gate = "fdr_q", sat_method = "autoencoder";
  std::vector<int> sat_dims, sat_noise, sat_random_sets;
  double sat_alpha = kDefaultAlpha;
  auto* saturate = app.add_subcommand("saturate", "Unique significant sets per latent dimensionality");
  saturate->add_option("--expr", sat_in.expr, "Expression matrix (TSV or CSV)");
  saturate->add_option("--orientation", sat_in.orientation, "genes or samples")
      ->check(CLI::IsMember({"genes", "samples"}));
  saturate->add_flag("--log-scale", sat_in.log_scale, "Input is already log2-transformed");
  saturate->add_option("--noise", sat_noise, "Gaussian noise control: G,N")->delimiter(',')->expected(2);
  saturate->add_option("--gmt", sat_gmt, "Gene set collection (GMT)");
  saturate->add_option("--random-sets", sat_random_sets, "Random collection: COUNT,SIZE")->delimiter(',')->expected(2);
  saturate->add_option("--dims", sat_dims, "Strictly increasing D values, comma separated")
      ->delimiter(',')
      ->required();
  saturate->add_option("--gate", sat_gate, "fdr_q or nominal_p, compared against alpha/D")->capture_default_str();
  saturate->add_option("--alpha", sat_alpha, "Family-wise level before division by D")->capture_default_str();
  saturate->add_option("--method", sat_method, "autoencoder, pca_corr or pca_weights")->capture_default_str();
  add_train_options(saturate, sat_train);
  add_gsea_options(saturate, sat_gsea);

  // bench
  std::string bench_gsea, bench_targets, bench_method = "LaCoGSEA";
  int bench_penalty = kDefaultPenaltyRank, bench_cov = 10;
  double bench_alpha = kDefaultAlpha;
  auto* bench = app.add_subcommand("bench", "Target-pathway benchmark (model-level rank with penalty)");
  bench->add_option("--gsea", bench_gsea, "Directory of per-dimension enrichment tables")->required();
  bench->add_option("--targets", bench_targets, "Target set ids, one per line")->required();
  bench->add_option("--penalty", bench_penalty, "Rank assigned to undetected targets")->capture_default_str();
  bench->add_option("--alpha", bench_alpha, "FDR threshold for detection")->capture_default_str();
  bench->add_option("--coverage-n", bench_cov, "Coverage counts ranks <= N")->capture_default_str();
  bench->add_option("--method", bench_method, "Method name for the report")->capture_default_str();

  // baseline
  InputOptions base_in;
  std::string base_method = "pca_corr", base_labels, base_g1, base_g2;
  int base_dim = 8;
  bool base_signed = false;
  auto* baseline = app.add_subcommand("baseline", "PCA_Corr, PCA_Weights or Welch t-test ranked lists");
  add_input_options(baseline, base_in);
  baseline->add_option("--method", base_method, "pca_corr, pca_weights or ttest")
      ->check(CLI::IsMember({"pca_corr", "pca_weights", "ttest"}))
      ->capture_default_str();
  baseline->add_option("--latent-dim", base_dim, "Number of principal components")->capture_default_str();
  baseline->add_flag("--signed", base_signed, "pca_weights: rank by signed loading");
  baseline->add_option("--labels", base_labels, "ttest: group labels (sample_id<TAB>label)");
  baseline->add_option("--group1", base_g1, "ttest: first group");
  baseline->add_option("--group2", base_g2, "ttest: second group");

  // pipeline
  InputOptions pipe_in;
  TrainOptions pipe_train;
  GseaParams pipe_gsea;
  ClusterOptions pipe_cluster;
  std::string pipe_gmt, pipe_targets, pipe_method = "autoencoder";
  bool pipe_signed = false;
  auto* pipeline = app.add_subcommand("pipeline", "All stages end to end");
  add_input_options(pipeline, pipe_in);
  pipeline->add_option("--gmt", pipe_gmt, "Gene set collection (GMT)")->required();
  pipeline->add_option("--method", pipe_method, "autoencoder, pca_corr or pca_weights")->capture_default_str();
  pipeline->add_flag("--signed", pipe_signed, "pca_weights: rank by signed loading");
  pipeline->add_option("--targets", pipe_targets, "Optional target list for the benchmark");
  add_train_options(pipeline, pipe_train);
  add_gsea_options(pipeline, pipe_gsea);
  add_cluster_options(pipeline, pipe_cluster, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string stage = cmd->get_name();
  try {
    set_thread_count(g.threads);
    const unsigned threads = thread_count();
    const fs::path out = g.out;
    // Globals plus the invoked subcommand's resolved options, in config-file form.
    const std::string snapshot = "seed=" + std::to_string(g.seed) + "\nthreads=" + std::to_string(g.threads) +
                                 "\nout=\"" + g.out + "\"\n\n[" + stage + "]\n" + cmd->config_to_str(true, false);
    Manifest manifest(stage, g.seed, threads, snapshot);

    if (cmd == train) {
      const auto m = load_input(train_in);
      manifest.add_input("expr", train_in.expr);
      const auto cfg = resolve_train(train_opt, g.seed);
      const auto st = standardize_genes(m);
      std::vector<std::string> retained;
      for (const auto& mom : st.moments) retained.push_back(mom.gene_id);
      const ExpressionMatrix input = train_opt.no_zscore ? select_genes(m, retained) : st.matrix;
      input.require_analysis_shape("train");
      const auto model = train_autoencoder(input, cfg);
      emit(out, "model.json", serialize_model(model), manifest);
      emit(out, "training.json", training_manifest(model, input.samples(), threads), manifest);
      emit(out, "training_log.tsv", format_training_log(model), manifest);
      emit(out, "standardize_report.tsv", format_standardize_report(st), manifest);
      emit(out, "latent.tsv", format_latent_matrix(encode(model, input)), manifest);
      manifest.set("zscore_inputs", !train_opt.no_zscore);
    } else if (cmd == rank) {
      const auto m = load_input(rank_in);
      require_path(rank_model);
      manifest.add_input("expr", rank_in.expr);
      manifest.add_input("model", rank_model);
      const auto r = rank_with_model(m, load_model(rank_model), !rank_no_zscore);
      emit_rank_outputs(out, r, manifest);
    } else if (cmd == gsea) {
      const auto lists = load_ranked_dir(gsea_ranked);
      const auto c = load_gmt(gsea_gmt);
      manifest.add_input("ranked", gsea_ranked);
      manifest.add_input("gmt", gsea_gmt);
      gsea_params.seed = g.seed;
      FilterResult filtered;
      const auto me = gsea_stage(lists, c, gsea_params, &filtered);
      emit_gsea_outputs(out, me, filtered, gsea_params, manifest);
    } else if (cmd == activity) {
      require_path(act_latent);
      manifest.add_input("latent", act_latent);
      manifest.add_input("gsea", act_gsea);
      const auto z = load_latent_matrix(act_latent);
      activity_report(z, load_gsea_dir(act_gsea), out, manifest);
    } else if (cmd == cluster) {
      require_path(cl_activity);
      manifest.add_input("activity", cl_activity);
      if (!cl_opt.labels.empty()) manifest.add_input("labels", cl_opt.labels);
      cluster_report(load_activity_matrix(cl_activity, false), cl_opt, g.seed, out, manifest);
    } else if (cmd == diff) {
      require_path(diff_activity);
      manifest.add_input("activity", diff_activity);
      manifest.add_input("labels", diff_labels);
      const auto a = load_activity_matrix(diff_activity, false);
      const auto labels = align_labels(load_labels(diff_labels), a.sample_ids);
      emit(out, "differential.tsv", format_differential_table(differential_pathway_table(a, labels, diff_g1, diff_g2)),
           manifest);
    } else if (cmd == saturate) {
      if (sat_in.expr.empty() == sat_noise.empty())
        throw Error(ErrorKind::InvalidArgument, "saturate: give exactly one of --expr and --noise");
      if (sat_gmt.empty() == sat_random_sets.empty())
        throw Error(ErrorKind::InvalidArgument, "saturate: give exactly one of --gmt and --random-sets");
      SaturationConfig sc;
      sc.pipeline.autoencoder = resolve_train(sat_train, g.seed);
      sc.pipeline.gsea = sat_gsea;
      sc.pipeline.zscore_inputs = !sat_train.no_zscore;
      sc.pipeline.method = parse_ranking_method(sat_method);
      sc.gate = parse_gate(sat_gate);
      sc.alpha = sat_alpha;
      sc.base_seed = g.seed;
      ExpressionMatrix m;
      if (!sat_noise.empty()) {
        m = gaussian_noise_matrix(sat_noise[0], sat_noise[1], g.seed);
      } else {
        m = load_input(sat_in);
        manifest.add_input("expr", sat_in.expr);
      }
      GeneSetCollection c;
      if (!sat_random_sets.empty()) {
        c = random_gene_sets(m.gene_ids, sat_random_sets[0], sat_random_sets[1], g.seed);
        emit(out, "random_sets.gmt", format_gmt(c), manifest);
      } else {
        c = load_gmt(sat_gmt);
        manifest.add_input("gmt", sat_gmt);
      }
      const auto table = saturation_curve(m, sat_dims, c, sc);
      emit(out, "saturation.tsv", format_saturation_table(table), manifest);
      json detail = json::array();
      for (const auto& p : table.points) {
        json d;
        d["D"] = p.dimensions;
        d["n_significant"] = p.n_significant;
        d["n_tested"] = p.n_tested;
        d["threshold"] = p.threshold;
        d["significant_sets"] = p.significant_sets;
        detail.push_back(d);
      }
      emit(out, "saturation.json", detail.dump(2) + "\n", manifest);
    } else if (cmd == bench) {
      manifest.add_input("gsea", bench_gsea);
      manifest.add_input("targets", bench_targets);
      bench_report(load_gsea_dir(bench_gsea), bench_targets, bench_penalty, bench_alpha, bench_cov, bench_method, out,
                   manifest);
    } else if (cmd == baseline) {
      const auto m = load_input(base_in);
      manifest.add_input("expr", base_in.expr);
      if (base_method == "ttest") {
        if (base_labels.empty() || base_g1.empty() || base_g2.empty())
          throw Error(ErrorKind::InvalidArgument, "baseline ttest needs --labels, --group1 and --group2");
        manifest.add_input("labels", base_labels);
        const auto labels = align_labels(load_labels(base_labels), m.sample_ids);
        std::vector<int> groups(labels.size(), -1);
        for (std::size_t i = 0; i < labels.size(); ++i)
          groups[i] = labels[i] == base_g1 ? 1 : labels[i] == base_g2 ? 0 : -1;
        const auto t = standard_de_ttest(m, groups);
        emit(out, "ranked/dim_0.tsv", format_ranked_list(t.list), manifest);
        std::string ex = "gene_id\treason\n";
        for (const auto& e : t.excluded) ex += e.gene_id + '\t' + e.reason + '\n';
        emit(out, "excluded_genes.tsv", ex, manifest);
      } else {
        PipelineConfig pc;
        pc.method = parse_ranking_method(base_method);
        pc.autoencoder.latent_dim = base_dim;
        pc.autoencoder.seed = g.seed;
        pc.signed_pca_weights = base_signed;
        const auto r = rank_stage(m, pc);
        emit_rank_outputs(out, r, manifest);
        emit(out, "pca_model.tsv", format_pca_model(*r.pca), manifest);
      }
    } else if (cmd == pipeline) {
      const auto m = load_input(pipe_in);
      const auto c = load_gmt(pipe_gmt);
      manifest.add_input("expr", pipe_in.expr);
      manifest.add_input("gmt", pipe_gmt);
      PipelineConfig pc;
      pc.autoencoder = resolve_train(pipe_train, g.seed);
      pc.gsea = pipe_gsea;
      pc.gsea.seed = g.seed;
      pc.zscore_inputs = !pipe_train.no_zscore;
      pc.method = parse_ranking_method(pipe_method);
      pc.signed_pca_weights = pipe_signed;
      const auto r = run_pipeline(m, c, pc);
      if (r.model) {
        emit(out, "model.json", serialize_model(*r.model), manifest);
        emit(out, "training.json", training_manifest(*r.model, m.samples(), threads), manifest);
        emit(out, "training_log.tsv", format_training_log(*r.model), manifest);
      }
      if (r.pca) emit(out, "pca_model.tsv", format_pca_model(*r.pca), manifest);
      emit_rank_outputs(out, r, manifest);
      emit_gsea_outputs(out, r.enrichment, r.filtered, pc.gsea, manifest);
      const auto act = activity_report(r.latent, r.enrichment, out, manifest);
      if (!pipe_cluster.labels.empty() || pipe_cluster.k > 0) {
        if (!pipe_cluster.labels.empty()) manifest.add_input("labels", pipe_cluster.labels);
        cluster_report(act.standardized, pipe_cluster, g.seed, out, manifest);
      }
      if (!pipe_targets.empty()) {
        manifest.add_input("targets", pipe_targets);
        bench_report(r.enrichment, pipe_targets, kDefaultPenaltyRank, kDefaultAlpha, 10, to_string(pc.method), out,
                     manifest);
      }
    }
    manifest.write(out);
    return 0;
  } catch (const MissingPath& e) {
    print_error(stage, "missing_path", e.what(), e.path);
    return 2;
  } catch (const Error& e) {
    print_error(stage, to_string(e.kind()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(stage, "internal", e.what());
    return 1;
  }
}
