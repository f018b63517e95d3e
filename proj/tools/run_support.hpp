#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lacogsea/activity.hpp"
#include "lacogsea/gsea.hpp"
#include "lacogsea/pipeline.hpp"

namespace lacogsea::cli {

namespace fs = std::filesystem;

/// An input path that does not exist. Reported with exit code 2.
struct MissingPath : std::runtime_error {
  std::string path;
  explicit MissingPath(std::string p) : std::runtime_error("input path does not exist: " + p), path(std::move(p)) {}
};

void require_path(const std::string& path);

std::uint64_t fnv1a64_file(const fs::path& path);
std::string hex64(std::uint64_t v);

/// Per output directory: config snapshot, seed, worker count, version and
/// content hashes of every input file. No timestamps, so identical runs give
/// identical manifests.
class Manifest {
 public:
  Manifest(std::string command, std::uint64_t seed, unsigned threads, std::string config_snapshot);
  void add_input(const std::string& role, const std::string& path);
  void add_output(const std::string& relative_path);
  void set(const std::string& key, nlohmann::ordered_json value);
  void write(const fs::path& out_dir) const;

 private:
  nlohmann::ordered_json doc_;
};

/// Writes `content` to out_dir/relative and records it in the manifest.
void emit(const fs::path& out_dir, const std::string& relative, const std::string& content, Manifest& manifest);

/// Two-column (sample_id, label) TSV. An optional header whose first cell is
/// "sample_id" is skipped. Empty and "NA" labels mean unlabeled.
std::map<std::string, std::string> load_labels(const fs::path& path);

/// Labels aligned to `sample_ids`; unlabeled samples get "". Throws for label
/// file entries naming unknown samples.
std::vector<std::string> align_labels(const std::map<std::string, std::string>& labels,
                                      const std::vector<std::string>& sample_ids);

/// Reads dir/dim_0.tsv, dir/dim_1.tsv, ... until the first missing index.
std::vector<RankedGeneList> load_ranked_dir(const fs::path& dir);
ModelEnrichment load_gsea_dir(const fs::path& dir);

void emit_rank_outputs(const fs::path& out, const PipelineResult& r, Manifest& manifest);
void emit_gsea_outputs(const fs::path& out, const ModelEnrichment& me, const FilterResult& filtered,
                       const GseaParams& params, Manifest& manifest);
std::string format_training_log(const AutoencoderModel& model);

}  // namespace lacogsea::cli
