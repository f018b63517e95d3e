#pragma once

#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

namespace lacogsea {

struct GeneSet {
  std::string id;
  std::string description;
  std::vector<std::string> members;  // sorted, unique
};

struct GeneSetCollection {
  std::string name;
  std::vector<GeneSet> sets;

  const GeneSet* find(const std::string& id) const;
};

/// GMT: id <TAB> description <TAB> member <TAB> member ...
/// Blank lines are ignored; empty member fields are dropped.
GeneSetCollection parse_gmt(const std::filesystem::path& path);
GeneSetCollection parse_gmt_lines(const std::vector<std::string>& lines, const std::string& name);

std::string format_gmt(const GeneSetCollection& c);

struct DroppedSet {
  std::string id;
  std::string reason;
};

struct FilterResult {
  GeneSetCollection collection;
  std::vector<DroppedSet> dropped;
};

inline constexpr int kDefaultMinSetSize = 15;
inline constexpr int kDefaultMaxSetSize = 500;

/// Intersects each set with the universe and keeps sets whose intersected
/// size lies in [min_size, max_size].
FilterResult filter_gene_sets(const GeneSetCollection& c, const std::unordered_set<std::string>& universe,
                              int min_size = kDefaultMinSetSize, int max_size = kDefaultMaxSetSize);

std::string format_filter_report(const FilterResult& r);

}  // namespace lacogsea
