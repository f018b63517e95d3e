#include "lacogsea/gsea.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "lacogsea/error.hpp"
#include "lacogsea/parallel.hpp"
#include "lacogsea/random.hpp"
#include "lacogsea/tsv.hpp"

namespace lacogsea {

void GseaParams::validate() const {
  if (!(std::isfinite(weight_exponent) && weight_exponent >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "gsea: weight_exponent must be finite and >= 0");
  if (n_permutations < 100) throw Error(ErrorKind::InvalidArgument, "gsea: n_permutations must be >= 100");
  if (min_size < 1 || max_size < min_size) throw Error(ErrorKind::InvalidArgument, "gsea: invalid set size window");
}

namespace {

struct Extremes {
  double max_v = -std::numeric_limits<double>::infinity();
  double min_v = std::numeric_limits<double>::infinity();
  std::size_t max_i = 0;
  std::size_t min_i = 0;

  void consider(double v, std::size_t i) noexcept {
    if (v > max_v) {
      max_v = v;
      max_i = i;
    }
    if (v < min_v) {
      min_v = v;
      min_i = i;
    }
  }
};

Extremes scan_hits(std::span<const double> weights, std::span<const std::size_t> hits) {
  const std::size_t n = weights.size();
  const std::size_t nh = hits.size();
  double total = 0.0;
  for (auto p : hits) total += weights[p];
  const bool unit = !(total > 0.0);
  if (unit) total = static_cast<double>(nh);
  const double n_miss = static_cast<double>(n - nh);
  // Single fraction so that unit weights give exact integer numerators and
  // reversing the list negates every value bit for bit.
  const double denom = total * n_miss;
  auto value = [&](double cum, std::size_t misses) { return (cum * n_miss - static_cast<double>(misses) * total) / denom; };

  Extremes ex;
  double cum = 0.0;
  for (std::size_t j = 0; j < nh; ++j) {
    const std::size_t p = hits[j];
    if (p > 0 && (j == 0 || hits[j - 1] != p - 1))
      ex.consider(value(cum, p - j), p - 1);
    cum += unit ? 1.0 : weights[p];
    ex.consider(value(cum, p - j), p);
  }
  if (hits[nh - 1] != n - 1) ex.consider(value(cum, n - nh), n - 1);
  return ex;
}

void check_hits(std::size_t n, std::span<const std::size_t> hits) {
  if (hits.empty()) throw Error(ErrorKind::InvalidArgument, "enrichment score: gene set has no members in the list");
  if (hits.size() >= n)
    throw Error(ErrorKind::InvalidArgument, "enrichment score: degenerate set (covers the entire ranked list)");
}

}  // namespace

EnrichmentScore running_sum_es(std::span<const double> weights, std::span<const std::size_t> sorted_hits) {
  check_hits(weights.size(), sorted_hits);
  const Extremes ex = scan_hits(weights, sorted_hits);
  EnrichmentScore r;
  r.hit_indices.assign(sorted_hits.begin(), sorted_hits.end());
  if (ex.max_v >= -ex.min_v) {
    r.es = ex.max_v;
    r.extremum_index = ex.max_i;
  } else {
    r.es = ex.min_v;
    r.extremum_index = ex.min_i;
  }
  return r;
}

double running_sum_es_value(std::span<const double> weights, std::span<const std::size_t> sorted_hits) {
  const Extremes ex = scan_hits(weights, sorted_hits);
  return ex.max_v >= -ex.min_v ? ex.max_v : ex.min_v;
}

std::vector<double> list_weights(const RankedGeneList& l, double exponent) {
  std::vector<double> w(l.size());
  for (std::size_t i = 0; i < l.size(); ++i)
    w[i] = exponent == 0.0 ? 1.0 : std::pow(std::abs(l.genes[i].score), exponent);
  return w;
}

EnrichmentScore enrichment_score(const RankedGeneList& l, const std::vector<std::string>& members,
                                 double weight_exponent) {
  const std::unordered_set<std::string> set(members.begin(), members.end());
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < l.size(); ++i)
    if (set.contains(l.genes[i].gene_id)) hits.push_back(i);
  const auto w = list_weights(l, weight_exponent);
  return running_sum_es(w, hits);
}

std::vector<double> permutation_null(std::span<const double> weights, int set_size, std::uint64_t stream_seed,
                                     std::size_t n_draws) {
  const std::size_t n = weights.size();
  if (set_size < 1 || static_cast<std::size_t>(set_size) >= n)
    throw Error(ErrorKind::InvalidArgument, "permutation_null: set size " + std::to_string(set_size) +
                                                " must be in [1, " + std::to_string(n) + ")");
  Rng rng(stream_seed);
  std::vector<double> out(n_draws);
  std::vector<std::size_t> hits;
  std::vector<unsigned char> marks(n, 0);
  for (std::size_t d = 0; d < n_draws; ++d) {
    rng.sample_distinct(n, static_cast<std::size_t>(set_size), hits, marks);
    std::sort(hits.begin(), hits.end());
    out[d] = running_sum_es_value(weights, hits);
  }
  return out;
}

std::vector<double> permutation_null(const RankedGeneList& l, int set_size, const GseaParams& params,
                                     std::size_t n_draws) {
  params.validate();
  const auto w = list_weights(l, params.weight_exponent);
  const std::uint64_t stream =
      derive_seed(params.seed, {static_cast<std::uint64_t>(l.dimension), static_cast<std::uint64_t>(set_size)});
  return permutation_null(w, set_size, stream, n_draws == 0 ? static_cast<std::size_t>(params.n_permutations) : n_draws);
}

std::optional<NesP> nes_and_p(double es, std::span<const double> null) {
  const bool positive = es >= 0.0;
  double sum = 0.0;
  std::size_t count = 0;
  std::size_t extreme = 0;
  for (double v : null) {
    if ((v >= 0.0) != positive) continue;
    sum += std::abs(v);
    ++count;
    if (std::abs(v) >= std::abs(es)) ++extreme;
  }
  if (count == 0 || !(sum > 0.0)) return std::nullopt;
  const double mean = sum / static_cast<double>(count);
  return NesP{es / mean, static_cast<double>(1 + extreme) / static_cast<double>(1 + count)};
}

std::vector<double> normalize_null(std::span<const double> null) {
  double pos_sum = 0.0, neg_sum = 0.0;
  std::size_t pos_n = 0, neg_n = 0;
  for (double v : null) {
    if (v >= 0.0) {
      pos_sum += v;
      ++pos_n;
    } else {
      neg_sum -= v;
      ++neg_n;
    }
  }
  const double pos_mean = pos_n ? pos_sum / static_cast<double>(pos_n) : 0.0;
  const double neg_mean = neg_n ? neg_sum / static_cast<double>(neg_n) : 0.0;
  std::vector<double> out;
  out.reserve(null.size());
  for (double v : null) {
    if (v >= 0.0) {
      if (pos_mean > 0.0) out.push_back(v / pos_mean);
    } else if (neg_mean > 0.0) {
      out.push_back(v / neg_mean);
    }
  }
  return out;
}

std::vector<double> fdr_qvalues(std::span<const double> observed_nes, std::span<const double> pooled_null_nes) {
  // Magnitudes per sign class, sorted ascending for tail counts.
  std::vector<double> null_pos, null_neg, obs_pos, obs_neg;
  for (double v : pooled_null_nes) (v >= 0.0 ? null_pos : null_neg).push_back(std::abs(v));
  for (double v : observed_nes) (v >= 0.0 ? obs_pos : obs_neg).push_back(std::abs(v));
  for (auto* v : {&null_pos, &null_neg, &obs_pos, &obs_neg}) std::sort(v->begin(), v->end());

  auto tail_fraction = [](const std::vector<double>& sorted, double x) {
    if (sorted.empty()) return 1.0;
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
  };

  std::vector<double> q(observed_nes.size());
  for (std::size_t i = 0; i < observed_nes.size(); ++i) {
    const bool pos = observed_nes[i] >= 0.0;
    const double x = std::abs(observed_nes[i]);
    const auto& nul = pos ? null_pos : null_neg;
    const auto& obs = pos ? obs_pos : obs_neg;
    const double frac_null = nul.empty() ? 1.0 : tail_fraction(nul, x);
    const double frac_obs = tail_fraction(obs, x);
    q[i] = std::clamp(frac_null / frac_obs, 0.0, 1.0);
  }

  // Running minimum from the weakest |NES| upward within each sign class.
  for (int sign = 0; sign < 2; ++sign) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < observed_nes.size(); ++i)
      if ((observed_nes[i] >= 0.0) == (sign == 0)) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(observed_nes[a]) < std::abs(observed_nes[b]);
    });
    double running = 1.0;
    for (auto i : idx) {
      running = std::min(running, q[i]);
      q[i] = running;
    }
  }
  return q;
}

const EnrichmentRecord* EnrichmentTable::find(const std::string& set_id) const {
  for (const auto& r : records)
    if (r.set_id == set_id) return &r;
  return nullptr;
}

bool EnrichmentTable::tested(const std::string& set_id) const {
  if (find(set_id)) return true;
  for (const auto& s : skipped)
    if (s.set_id == set_id) return true;
  return false;
}

EnrichmentTable run_preranked_gsea(const RankedGeneList& l, const GeneSetCollection& c, const GseaParams& params) {
  params.validate();
  EnrichmentTable table;
  table.dimension = l.dimension;
  table.params = params;
  const std::size_t n = l.size();

  std::unordered_map<std::string, std::size_t> position;
  position.reserve(n);
  for (std::size_t i = 0; i < n; ++i) position.emplace(l.genes[i].gene_id, i);

  // Map members to positions; every member must be in the list's universe.
  struct Candidate {
    const GeneSet* set;
    std::vector<std::size_t> hits;
  };
  std::vector<Candidate> candidates;
  for (const auto& s : c.sets) {
    Candidate cand{&s, {}};
    for (const auto& m : s.members) {
      auto it = position.find(m);
      if (it == position.end())
        throw Error(ErrorKind::UniverseMismatch, "gene set " + s.id + " member " + m +
                                                     " is not in the ranked list of dimension " +
                                                     std::to_string(l.dimension) +
                                                     "; filter the collection against this list's genes");
      cand.hits.push_back(it->second);
    }
    std::sort(cand.hits.begin(), cand.hits.end());
    candidates.push_back(std::move(cand));
  }

  if (candidates.empty()) {
    table.warnings.push_back("no gene sets to test");
    return table;
  }

  const bool all_zero =
      std::all_of(l.genes.begin(), l.genes.end(), [](const RankedGene& g) { return g.score == 0.0; });
  if (all_zero) {
    table.warnings.push_back("degenerate ranked list: every score is zero");
    for (const auto& cand : candidates) table.skipped.push_back({cand.set->id, "degenerate_list"});
    return table;
  }

  std::vector<const Candidate*> testable;
  for (const auto& cand : candidates) {
    if (cand.hits.empty())
      table.skipped.push_back({cand.set->id, "empty_intersection"});
    else if (cand.hits.size() >= n)
      table.skipped.push_back({cand.set->id, "degenerate_set"});
    else
      testable.push_back(&cand);
  }

  const auto weights = list_weights(l, params.weight_exponent);

  // One null per distinct size, n_permutations draws per set of that size.
  std::map<std::size_t, std::size_t> size_counts;
  for (auto* cand : testable) ++size_counts[cand->hits.size()];
  std::vector<std::size_t> sizes;
  for (const auto& [size, count] : size_counts) sizes.push_back(size);
  std::vector<std::vector<double>> nulls(sizes.size());
  parallel_for(sizes.size(), [&](std::size_t i) {
    const std::uint64_t stream =
        derive_seed(params.seed, {static_cast<std::uint64_t>(l.dimension), static_cast<std::uint64_t>(sizes[i])});
    nulls[i] = permutation_null(weights, static_cast<int>(sizes[i]), stream,
                                static_cast<std::size_t>(params.n_permutations) * size_counts[sizes[i]]);
  });
  std::unordered_map<std::size_t, std::size_t> null_of_size;
  for (std::size_t i = 0; i < sizes.size(); ++i) null_of_size.emplace(sizes[i], i);

  std::vector<EnrichmentScore> scores(testable.size());
  std::vector<std::optional<NesP>> stats(testable.size());
  parallel_for(testable.size(), [&](std::size_t i) {
    scores[i] = running_sum_es(weights, testable[i]->hits);
    stats[i] = nes_and_p(scores[i].es, nulls[null_of_size.at(testable[i]->hits.size())]);
  });

  std::vector<double> pooled;
  std::unordered_set<std::size_t> pooled_sizes;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < testable.size(); ++i) {
    if (!stats[i]) {
      table.skipped.push_back({testable[i]->set->id, "nes_undefined"});
      continue;
    }
    kept.push_back(i);
    const std::size_t size = testable[i]->hits.size();
    if (pooled_sizes.insert(size).second) {
      const auto normalized = normalize_null(nulls[null_of_size.at(size)]);
      pooled.insert(pooled.end(), normalized.begin(), normalized.end());
    }
  }

  std::vector<double> observed;
  for (auto i : kept) observed.push_back(stats[i]->nes);
  const auto q = fdr_qvalues(observed, pooled);

  for (std::size_t j = 0; j < kept.size(); ++j) {
    const std::size_t i = kept[j];
    const auto& s = scores[i];
    EnrichmentRecord rec;
    rec.set_id = testable[i]->set->id;
    rec.es = s.es;
    rec.nes = stats[i]->nes;
    rec.p_nominal = stats[i]->p_nominal;
    rec.fdr_q = q[j];
    rec.set_size_used = static_cast<int>(s.hit_indices.size());
    for (auto h : s.hit_indices) {
      const bool in_edge = s.es >= 0.0 ? h <= s.extremum_index : h >= s.extremum_index;
      if (in_edge) rec.leading_edge.push_back(l.genes[h].gene_id);
    }
    table.records.push_back(std::move(rec));
  }

  std::sort(table.records.begin(), table.records.end(), [](const EnrichmentRecord& a, const EnrichmentRecord& b) {
    if (a.fdr_q != b.fdr_q) return a.fdr_q < b.fdr_q;
    if (std::abs(a.nes) != std::abs(b.nes)) return std::abs(a.nes) > std::abs(b.nes);
    return a.set_id < b.set_id;
  });
  for (std::size_t i = 0; i < table.records.size(); ++i) table.records[i].rank_in_dimension = static_cast<int>(i + 1);
  std::sort(table.skipped.begin(), table.skipped.end(),
            [](const SkippedSet& a, const SkippedSet& b) { return a.set_id < b.set_id; });
  return table;
}

std::string format_enrichment_table(const EnrichmentTable& t) {
  std::string out = "set_id\tsize\tes\tnes\tp_nominal\tfdr_q\trank\tleading_edge\n";
  for (const auto& r : t.records) {
    out += r.set_id + '\t' + std::to_string(r.set_size_used) + '\t' + tsv::format_double(r.es) + '\t' +
           tsv::format_double(r.nes) + '\t' + tsv::format_double(r.p_nominal) + '\t' + tsv::format_double(r.fdr_q) +
           '\t' + std::to_string(r.rank_in_dimension) + '\t' + tsv::join(r.leading_edge, ",") + '\n';
  }
  return out;
}

std::string format_skipped_sets(const EnrichmentTable& t) {
  std::string out = "set_id\treason\n";
  for (const auto& s : t.skipped) out += s.set_id + '\t' + s.reason + '\n';
  return out;
}

EnrichmentTable load_enrichment_table(const std::filesystem::path& table_path, int dimension) {
  EnrichmentTable t;
  t.dimension = dimension;
  const auto lines = tsv::read_lines(table_path);
  auto bad = [&](std::size_t i) {
    return Error(ErrorKind::Format, table_path.string() + ": malformed enrichment row at line " + std::to_string(i + 1));
  };
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = tsv::split(lines[i], '\t');
    if (f.size() != 8) throw bad(i);
    EnrichmentRecord r;
    r.set_id = std::string(f[0]);
    double size, rank;
    if (!tsv::parse_double(f[1], size) || !tsv::parse_double(f[2], r.es) || !tsv::parse_double(f[3], r.nes) ||
        !tsv::parse_double(f[4], r.p_nominal) || !tsv::parse_double(f[5], r.fdr_q) || !tsv::parse_double(f[6], rank))
      throw bad(i);
    r.set_size_used = static_cast<int>(size);
    r.rank_in_dimension = static_cast<int>(rank);
    if (!f[7].empty())
      for (auto g : tsv::split(f[7], ',')) r.leading_edge.emplace_back(g);
    t.records.push_back(std::move(r));
  }
  std::filesystem::path skipped = table_path;
  skipped.replace_extension(".skipped.tsv");
  if (std::filesystem::exists(skipped)) {
    const auto sl = tsv::read_lines(skipped);
    for (std::size_t i = 1; i < sl.size(); ++i) {
      if (sl[i].empty()) continue;
      const auto f = tsv::split(sl[i], '\t');
      if (f.size() != 2) throw Error(ErrorKind::Format, skipped.string() + ": malformed line " + std::to_string(i + 1));
      t.skipped.push_back({std::string(f[0]), std::string(f[1])});
    }
  }
  return t;
}

}  // namespace lacogsea
