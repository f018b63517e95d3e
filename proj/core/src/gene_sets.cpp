#include "lacogsea/gene_sets.hpp"

#include <algorithm>
#include <unordered_set>

#include "lacogsea/error.hpp"
#include "lacogsea/tsv.hpp"

namespace lacogsea {

const GeneSet* GeneSetCollection::find(const std::string& id) const {
  for (const auto& s : sets)
    if (s.id == id) return &s;
  return nullptr;
}

GeneSetCollection parse_gmt_lines(const std::vector<std::string>& lines, const std::string& name) {
  GeneSetCollection c;
  c.name = name;
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = tsv::split(lines[i], '\t');
    if (fields.size() < 3)
      throw Error(ErrorKind::Format, "GMT line " + std::to_string(i + 1) + " has fewer than 3 fields");
    GeneSet set;
    set.id = std::string(fields[0]);
    set.description = std::string(fields[1]);
    if (set.id.empty()) throw Error(ErrorKind::Format, "GMT line " + std::to_string(i + 1) + " has an empty set id");
    if (!ids.insert(set.id).second) throw Error(ErrorKind::DuplicateId, "duplicate gene set id: " + set.id);
    for (std::size_t f = 2; f < fields.size(); ++f)
      if (!fields[f].empty()) set.members.emplace_back(fields[f]);
    std::sort(set.members.begin(), set.members.end());
    set.members.erase(std::unique(set.members.begin(), set.members.end()), set.members.end());
    if (set.members.empty())
      throw Error(ErrorKind::Format, "GMT line " + std::to_string(i + 1) + " (" + set.id + ") has no members");
    c.sets.push_back(std::move(set));
  }
  return c;
}

GeneSetCollection parse_gmt(const std::filesystem::path& path) {
  return parse_gmt_lines(tsv::read_lines(path), path.stem().string());
}

std::string format_gmt(const GeneSetCollection& c) {
  std::string out;
  for (const auto& s : c.sets) {
    out += s.id + '\t' + s.description;
    for (const auto& m : s.members) out += '\t' + m;
    out += '\n';
  }
  return out;
}

FilterResult filter_gene_sets(const GeneSetCollection& c, const std::unordered_set<std::string>& universe,
                              int min_size, int max_size) {
  if (min_size < 2 || max_size < min_size)
    throw Error(ErrorKind::InvalidArgument, "filter_gene_sets: need 2 <= min_size <= max_size");
  if (universe.empty()) throw Error(ErrorKind::InvalidArgument, "filter_gene_sets: empty gene universe");

  FilterResult r;
  r.collection.name = c.name;
  for (const auto& s : c.sets) {
    GeneSet kept{s.id, s.description, {}};
    for (const auto& m : s.members)
      if (universe.contains(m)) kept.members.push_back(m);
    const auto n = static_cast<int>(kept.members.size());
    if (n < min_size) {
      r.dropped.push_back({s.id, "too_small:" + std::to_string(n)});
    } else if (n > max_size) {
      r.dropped.push_back({s.id, "too_large:" + std::to_string(n)});
    } else {
      r.collection.sets.push_back(std::move(kept));
    }
  }
  return r;
}

std::string format_filter_report(const FilterResult& r) {
  std::string out = "id\treason\n";
  for (const auto& d : r.dropped) out += d.id + '\t' + d.reason + '\n';
  return out;
}

}  // namespace lacogsea
