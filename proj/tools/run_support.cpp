#include "run_support.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "lacogsea/checkpoint.hpp"
#include "lacogsea/error.hpp"
#include "lacogsea/tsv.hpp"

namespace lacogsea::cli {

void require_path(const std::string& path) {
  if (!fs::exists(path)) throw MissingPath(path);
}

std::uint64_t fnv1a64_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingPath(path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Manifest::Manifest(std::string command, std::uint64_t seed, unsigned threads, std::string config_snapshot) {
  doc_["tool"] = "lacogsea";
  doc_["version"] = LACOGSEA_VERSION;
  doc_["command"] = std::move(command);
  doc_["seed"] = seed;
  doc_["threads"] = threads;
  doc_["config"] = std::move(config_snapshot);
  doc_["inputs"] = nlohmann::ordered_json::array();
  doc_["outputs"] = nlohmann::ordered_json::array();
}

void Manifest::add_input(const std::string& role, const std::string& path) {
  nlohmann::ordered_json entry;
  entry["role"] = role;
  entry["path"] = path;
  if (fs::is_regular_file(path)) {
    entry["fnv1a64"] = hex64(fnv1a64_file(path));
  } else if (fs::is_directory(path)) {
    // Directory inputs: hash every regular file, in path order.
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(path))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    nlohmann::ordered_json hashes;
    for (const auto& f : files) hashes[fs::relative(f, path).generic_string()] = hex64(fnv1a64_file(f));
    entry["files"] = hashes;
  }
  doc_["inputs"].push_back(entry);
}

void Manifest::add_output(const std::string& relative_path) { doc_["outputs"].push_back(relative_path); }

void Manifest::set(const std::string& key, nlohmann::ordered_json value) { doc_[key] = std::move(value); }

void Manifest::write(const fs::path& out_dir) const {
  tsv::write_file(out_dir / "manifest.json", doc_.dump(2) + "\n");
}

void emit(const fs::path& out_dir, const std::string& relative, const std::string& content, Manifest& manifest) {
  tsv::write_file(out_dir / relative, content);
  manifest.add_output(relative);
}

std::map<std::string, std::string> load_labels(const fs::path& path) {
  require_path(path.string());
  const auto lines = tsv::read_lines(path);
  std::map<std::string, std::string> labels;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = tsv::split(lines[i], '\t');
    if (i == 0 && f[0] == "sample_id") continue;
    if (f.size() != 2)
      throw Error(ErrorKind::Format, path.string() + ":" + std::to_string(i + 1) + ": expected sample_id<TAB>label");
    std::string id(f[0]);
    if (labels.contains(id)) throw Error(ErrorKind::DuplicateId, "duplicate sample id in labels: " + id);
    std::string label(f[1]);
    if (label == "NA") label.clear();
    labels.emplace(std::move(id), std::move(label));
  }
  return labels;
}

std::vector<std::string> align_labels(const std::map<std::string, std::string>& labels,
                                      const std::vector<std::string>& sample_ids) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < sample_ids.size(); ++i) index.emplace(sample_ids[i], i);
  std::vector<std::string> out(sample_ids.size());
  for (const auto& [id, label] : labels) {
    const auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorKind::NotFound, "labels name an unknown sample: " + id);
    out[it->second] = label;
  }
  return out;
}

std::vector<RankedGeneList> load_ranked_dir(const fs::path& dir) {
  require_path(dir.string());
  std::vector<RankedGeneList> lists;
  for (int k = 0;; ++k) {
    const auto p = dir / ("dim_" + std::to_string(k) + ".tsv");
    if (!fs::exists(p)) break;
    lists.push_back(load_ranked_list(p, k));
  }
  if (lists.empty()) throw Error(ErrorKind::NotFound, "no ranked lists (dim_0.tsv, ...) in " + dir.string());
  return lists;
}

ModelEnrichment load_gsea_dir(const fs::path& dir) {
  require_path(dir.string());
  ModelEnrichment me;
  for (int k = 0;; ++k) {
    const auto p = dir / ("dim_" + std::to_string(k) + ".tsv");
    if (!fs::exists(p)) break;
    me.tables.push_back(load_enrichment_table(p, k));
  }
  if (me.tables.empty()) throw Error(ErrorKind::NotFound, "no enrichment tables (dim_0.tsv, ...) in " + dir.string());
  me.dimensions = static_cast<int>(me.tables.size());
  me.provenance = dir.string();
  return me;
}

std::string format_training_log(const AutoencoderModel& model) {
  std::string out = "epoch\tmse\tpenalty\ttotal\tholdout_mse\n";
  for (const auto& e : model.training_log)
    out += std::to_string(e.epoch) + '\t' + tsv::format_double(e.mse) + '\t' + tsv::format_double(e.penalty) + '\t' +
           tsv::format_double(e.total) + '\t' + tsv::format_double(e.holdout_mse) + '\n';
  return out;
}

void emit_rank_outputs(const fs::path& out, const PipelineResult& r, Manifest& manifest) {
  emit(out, "latent.tsv", format_latent_matrix(r.latent), manifest);
  emit(out, "standardize_report.tsv", format_standardize_report(r.standardized), manifest);
  if (r.correlation.values.size() > 0) emit(out, "correlation.tsv", format_correlation_map(r.correlation), manifest);
  for (const auto& l : r.lists)
    emit(out, "ranked/dim_" + std::to_string(l.dimension) + ".tsv", format_ranked_list(l), manifest);
}

void emit_gsea_outputs(const fs::path& out, const ModelEnrichment& me, const FilterResult& filtered,
                       const GseaParams& params, Manifest& manifest) {
  emit(out, "filter_report.tsv", format_filter_report(filtered), manifest);
  nlohmann::ordered_json summary;
  summary["weight_exponent"] = params.weight_exponent;
  summary["n_permutations"] = params.n_permutations;
  summary["seed"] = params.seed;
  summary["min_size"] = params.min_size;
  summary["max_size"] = params.max_size;
  summary["null_model"] = "gene_set_permutation";
  summary["collection"] = filtered.collection.name;
  summary["sets_retained"] = filtered.collection.sets.size();
  summary["sets_dropped"] = filtered.dropped.size();
  summary["dimensions"] = nlohmann::ordered_json::array();
  for (const auto& t : me.tables) {
    const std::string base = "gsea/dim_" + std::to_string(t.dimension);
    emit(out, base + ".tsv", format_enrichment_table(t), manifest);
    emit(out, base + ".skipped.tsv", format_skipped_sets(t), manifest);
    nlohmann::ordered_json d;
    d["dimension"] = t.dimension;
    d["tested"] = t.records.size();
    d["skipped"] = t.skipped.size();
    d["warnings"] = t.warnings;
    summary["dimensions"].push_back(d);
  }
  emit(out, "gsea_summary.json", summary.dump(2) + "\n", manifest);
}

}  // namespace lacogsea::cli
