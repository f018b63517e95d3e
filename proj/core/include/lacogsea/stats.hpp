#pragma once

#include <span>
#include <string>
#include <vector>

#include "lacogsea/activity.hpp"

namespace lacogsea {

struct RankSumResult {
  double statistic = 0.0;  // sum of midranks of x in the pooled sample
  double p_value = 1.0;    // two-sided
  bool exact = false;
};

/// Exact enumeration applies when min(|x|, |y|) <= kExactMaxSmallGroup and
/// |x| + |y| <= kExactMaxTotal; otherwise the normal approximation with
/// tie-corrected variance and continuity correction is used.
inline constexpr std::size_t kExactMaxSmallGroup = 20;
inline constexpr std::size_t kExactMaxTotal = 300;

/// Wilcoxon rank-sum test with midranks for ties. When every value is equal
/// the p-value is 1.
RankSumResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y);

/// Exact path regardless of size (test and diagnostics use).
RankSumResult wilcoxon_rank_sum_exact(std::span<const double> x, std::span<const double> y);
RankSumResult wilcoxon_rank_sum_normal(std::span<const double> x, std::span<const double> y);

/// Benjamini-Hochberg adjusted p-values, in input order.
std::vector<double> benjamini_hochberg(std::span<const double> p);

double median(std::vector<double> values);

struct DifferentialRow {
  std::string set_id;
  double effect = 0.0;  // median(group1) - median(group2)
  int direction = 0;    // sign of effect
  double statistic = 0.0;
  double p_value = 1.0;
  double q_value = 1.0;
};

/// Per-pathway rank-sum test between two label groups, BH-adjusted and
/// sorted by q (then p, then set id). Samples with other labels are ignored.
std::vector<DifferentialRow> differential_pathway_table(const ActivityMatrix& a, const std::vector<std::string>& groups,
                                                        const std::string& group1, const std::string& group2);

std::string format_differential_table(const std::vector<DifferentialRow>& rows);

}  // namespace lacogsea
