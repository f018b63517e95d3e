#include "lacogsea/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lacogsea/error.hpp"
#include "lacogsea/parallel.hpp"
#include "lacogsea/tsv.hpp"

namespace lacogsea {

namespace {

struct Pooled {
  std::vector<long> doubled_ranks;  // 2 * midrank, index < nx belongs to x
  std::vector<double> tie_sizes;
};

Pooled pooled_ranks(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size() + y.size();
  std::vector<std::pair<double, std::size_t>> v;
  v.reserve(n);
  for (std::size_t i = 0; i < x.size(); ++i) v.emplace_back(x[i], i);
  for (std::size_t i = 0; i < y.size(); ++i) v.emplace_back(y[i], x.size() + i);
  std::sort(v.begin(), v.end());
  Pooled p;
  p.doubled_ranks.resize(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && v[j].first == v[i].first) ++j;
    // Ranks i+1 .. j share the midrank (i + 1 + j) / 2.
    const long doubled = static_cast<long>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) p.doubled_ranks[v[t].second] = doubled;
    p.tie_sizes.push_back(static_cast<double>(j - i));
    i = j;
  }
  return p;
}

void check_sizes(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw Error(ErrorKind::InvalidArgument, "wilcoxon_rank_sum: both samples must be non-empty");
}

bool all_equal(std::span<const double> x, std::span<const double> y) {
  const double v = x.front();
  return std::all_of(x.begin(), x.end(), [v](double a) { return a == v; }) &&
         std::all_of(y.begin(), y.end(), [v](double a) { return a == v; });
}

double rank_sum(const Pooled& p, std::size_t nx) {
  long s = 0;
  for (std::size_t i = 0; i < nx; ++i) s += p.doubled_ranks[i];
  return static_cast<double>(s) / 2.0;
}

}  // namespace

RankSumResult wilcoxon_rank_sum_exact(std::span<const double> x, std::span<const double> y) {
  check_sizes(x, y);
  const std::size_t nx = x.size();
  const std::size_t n = nx + y.size();
  const Pooled p = pooled_ranks(x, y);
  RankSumResult r;
  r.exact = true;
  r.statistic = rank_sum(p, nx);
  if (all_equal(x, y)) return r;

  // counts[j][s]: subsets of size j with doubled rank sum s.
  const long max_sum = std::accumulate(p.doubled_ranks.begin(), p.doubled_ranks.end(), 0L);
  std::vector<std::vector<double>> counts(nx + 1, std::vector<double>(static_cast<std::size_t>(max_sum + 1), 0.0));
  counts[0][0] = 1.0;
  for (std::size_t item = 0; item < n; ++item) {
    const long w = p.doubled_ranks[item];
    for (std::size_t j = std::min(nx, item + 1); j >= 1; --j) {
      auto& dst = counts[j];
      const auto& src = counts[j - 1];
      for (long s = max_sum; s >= w; --s) dst[static_cast<std::size_t>(s)] += src[static_cast<std::size_t>(s - w)];
    }
  }
  const long center = static_cast<long>(nx * (n + 1));  // doubled expected rank sum
  const long observed = std::labs(static_cast<long>(std::lround(2.0 * r.statistic)) - center);
  double tail = 0.0, total = 0.0;
  for (long s = 0; s <= max_sum; ++s) {
    const double c = counts[nx][static_cast<std::size_t>(s)];
    total += c;
    if (std::labs(s - center) >= observed) tail += c;
  }
  r.p_value = std::min(1.0, tail / total);
  return r;
}

RankSumResult wilcoxon_rank_sum_normal(std::span<const double> x, std::span<const double> y) {
  check_sizes(x, y);
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double n = nx + ny;
  const Pooled p = pooled_ranks(x, y);
  RankSumResult r;
  r.statistic = rank_sum(p, x.size());
  if (all_equal(x, y)) return r;
  double ties = 0.0;
  for (double t : p.tie_sizes) ties += t * t * t - t;
  const double var = nx * ny / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
  if (!(var > 0.0)) return r;
  const double dev = std::max(0.0, std::abs(r.statistic - nx * (n + 1.0) / 2.0) - 0.5);
  r.p_value = std::min(1.0, std::erfc(dev / std::sqrt(var) / std::sqrt(2.0)));
  return r;
}

RankSumResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y) {
  check_sizes(x, y);
  if (std::min(x.size(), y.size()) <= kExactMaxSmallGroup && x.size() + y.size() <= kExactMaxTotal)
    return wilcoxon_rank_sum_exact(x, y);
  return wilcoxon_rank_sum_normal(x, y);
}

std::vector<double> benjamini_hochberg(std::span<const double> p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> q(m);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double v = p[order[r]] * static_cast<double>(m) / static_cast<double>(r + 1);
    running = std::min(running, v);
    q[order[r]] = std::min(1.0, running);
  }
  return q;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::vector<DifferentialRow> differential_pathway_table(const ActivityMatrix& a, const std::vector<std::string>& groups,
                                                        const std::string& group1, const std::string& group2) {
  if (static_cast<Eigen::Index>(groups.size()) != a.values.rows())
    throw Error(ErrorKind::Shape, "differential_pathway_table: label count differs from sample count");
  std::vector<Eigen::Index> g1, g2;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i] == group1) g1.push_back(static_cast<Eigen::Index>(i));
    else if (groups[i] == group2) g2.push_back(static_cast<Eigen::Index>(i));
  }
  if (g1.empty()) throw Error(ErrorKind::NotFound, "differential_pathway_table: group label absent: " + group1);
  if (g2.empty()) throw Error(ErrorKind::NotFound, "differential_pathway_table: group label absent: " + group2);

  const auto m = static_cast<std::size_t>(a.values.cols());
  std::vector<DifferentialRow> rows(m);
  parallel_for(m, [&](std::size_t p) {
    std::vector<double> x, y;
    for (auto i : g1) x.push_back(a.values(i, static_cast<Eigen::Index>(p)));
    for (auto i : g2) y.push_back(a.values(i, static_cast<Eigen::Index>(p)));
    const auto test = wilcoxon_rank_sum(x, y);
    auto& row = rows[p];
    row.set_id = a.set_ids[p];
    row.effect = median(x) - median(y);
    row.direction = (row.effect > 0.0) - (row.effect < 0.0);
    row.statistic = test.statistic;
    row.p_value = test.p_value;
  });
  std::vector<double> pv;
  for (const auto& r : rows) pv.push_back(r.p_value);
  const auto q = benjamini_hochberg(pv);
  for (std::size_t i = 0; i < m; ++i) rows[i].q_value = q[i];
  std::sort(rows.begin(), rows.end(), [](const DifferentialRow& a, const DifferentialRow& b) {
    if (a.q_value != b.q_value) return a.q_value < b.q_value;
    if (a.p_value != b.p_value) return a.p_value < b.p_value;
    return a.set_id < b.set_id;
  });
  return rows;
}

std::string format_differential_table(const std::vector<DifferentialRow>& rows) {
  std::string out = "set_id\teffect\tdirection\tstatistic\tp_value\tq_value\n";
  for (const auto& r : rows)
    out += r.set_id + '\t' + tsv::format_double(r.effect) + '\t' + std::to_string(r.direction) + '\t' +
           tsv::format_double(r.statistic) + '\t' + tsv::format_double(r.p_value) + '\t' +
           tsv::format_double(r.q_value) + '\n';
  return out;
}

}  // namespace lacogsea
