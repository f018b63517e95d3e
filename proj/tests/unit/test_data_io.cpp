#include <cmath>
#include <unordered_set>

#include <doctest.h>

#include "helpers.hpp"
#include "lacogsea/expression.hpp"
#include "lacogsea/gene_sets.hpp"

using namespace lacogsea;
using testing::TempDir;

namespace {

ExpressionMatrix log_matrix(std::vector<std::vector<double>> rows) {
  ExpressionMatrix m;
  m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t g = 0; g < rows.size(); ++g) {
    m.gene_ids.push_back("g" + std::to_string(g));
    for (std::size_t s = 0; s < rows[g].size(); ++s)
      m.values(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(s)) = rows[g][s];
  }
  for (std::size_t s = 0; s < rows[0].size(); ++s) m.sample_ids.push_back("s" + std::to_string(s));
  m.transformed = true;
  return m;
}

}  // namespace

TEST_CASE("load_expression_matrix reads a genes-in-rows TSV cell for cell") {
  TempDir dir;
  const auto p = dir.write("a.tsv", "gene_id\tS1\tS2\nA\t1\t2.5\nB\t3\t4\nC\t0\t-1e-3\n");
  const auto m = load_expression_matrix(p);
  CHECK(m.genes() == 3);
  CHECK(m.samples() == 2);
  CHECK(m.gene_ids == std::vector<std::string>{"A", "B", "C"});
  CHECK(m.sample_ids == std::vector<std::string>{"S1", "S2"});
  CHECK(m.values(0, 1) == 2.5);
  CHECK(m.values(1, 0) == 3.0);
  CHECK(m.values(2, 1) == -1e-3);
  CHECK_FALSE(m.transformed);
}

TEST_CASE("samples-in-rows loading equals the transpose of genes-in-rows loading") {
  TempDir dir;
  const auto a = dir.write("a.tsv", "id\tS1\tS2\tS3\nA\t1\t2\t3\nB\t4\t5\t6\n");
  const auto at = dir.write("at.csv", "id,A,B\nS1,1,4\nS2,2,5\nS3,3,6\n");
  const auto m = load_expression_matrix(a, Orientation::GenesInRows);
  const auto t = load_expression_matrix(at, Orientation::SamplesInRows);
  CHECK(m.gene_ids == t.gene_ids);
  CHECK(m.sample_ids == t.sample_ids);
  CHECK(m.values == t.values);

  const auto as_samples = load_expression_matrix(a, Orientation::SamplesInRows);
  CHECK(as_samples.values == m.values.transpose());
  CHECK(as_samples.gene_ids == m.sample_ids);
}

TEST_CASE("loader rejects duplicates, non-numeric cells and ragged rows") {
  TempDir dir;
  CHECK_LACOGSEA_ERROR(load_expression_matrix(dir.write("d.tsv", "id\tS1\nTP53\t1\nTP53\t2\n")),
                       ErrorKind::DuplicateId, "TP53");
  CHECK_LACOGSEA_ERROR(load_expression_matrix(dir.write("n.tsv", "id\tS1\tS2\nA\t1\t2\nB\t3\tabc\n")),
                       ErrorKind::Format, "line 3, column 3");
  CHECK_LACOGSEA_ERROR(load_expression_matrix(dir.write("r.tsv", "id\tS1\tS2\nA\t1\t2\nB\t3\n")), ErrorKind::Format,
                       "line 3");
  CHECK_LACOGSEA_ERROR(load_expression_matrix(dir.write("s.tsv", "id\tS1\tS1\nA\t1\t2\n")), ErrorKind::DuplicateId,
                       "S1");
  CHECK_LACOGSEA_ERROR(load_expression_matrix(dir.write("m.tsv", "id\tS1\tS2\nA\t1\t\n")), ErrorKind::Format,
                       "column 3");
  CHECK_LACOGSEA_ERROR(load_expression_matrix(dir.write("i.tsv", "id\tS1\nA\tnan\n")), ErrorKind::Format, "nan");
}

TEST_CASE("canonical matrices round-trip byte for byte") {
  TempDir dir;
  const std::string text = "gene_id\tS1\tS2\tS3\nA\t1\t2.5\t0.1\nB\t-3\t4e-07\t123456789\nC\t0\t0.3333333333333333\t7\n";
  const auto p = dir.write("c.tsv", text);
  const auto m = load_expression_matrix(p);
  CHECK(format_expression_matrix(m) == text);
  const auto out = dir.path() / "c2.tsv";
  write_expression_matrix(m, out);
  CHECK(tsv::read_lines(out) == tsv::read_lines(p));
}

TEST_CASE("log_transform maps v to log2(v + 1) exactly on powers of two") {
  ExpressionMatrix m = log_matrix({{0, 7, 1023}, {1, 3, 15}});
  m.transformed = false;
  const auto t = log_transform(m);
  CHECK(t.values(0, 0) == 0.0);
  CHECK(t.values(0, 1) == 3.0);
  CHECK(t.values(0, 2) == 10.0);
  CHECK(t.values(1, 0) == 1.0);
  CHECK(t.transformed);
  CHECK_LACOGSEA_ERROR(log_transform(t), ErrorKind::InvalidArgument, "already");
  m.values(1, 1) = -0.5;
  CHECK_LACOGSEA_ERROR(log_transform(m), ErrorKind::Numeric, "negative");
}

TEST_CASE("log_transform is strictly monotone") {
  ExpressionMatrix m = log_matrix({{0, 1e-9, 0.5, 1, 1 + 1e-9, 1e6, 1e12}, {0, 0, 0, 0, 0, 0, 0}});
  m.transformed = false;
  const auto t = log_transform(m);
  for (Eigen::Index j = 1; j < t.samples(); ++j) CHECK(t.values(0, j) > t.values(0, j - 1));
}

TEST_CASE("parse_gmt deduplicates members and validates lines") {
  const auto c = parse_gmt_lines({"S1\tdesc\tA\tB\tA"}, "x");
  REQUIRE(c.sets.size() == 1);
  CHECK(c.sets[0].id == "S1");
  CHECK(c.sets[0].members == std::vector<std::string>{"A", "B"});

  TempDir dir;
  CHECK(parse_gmt(dir.write("empty.gmt", "")).sets.empty());
  CHECK_LACOGSEA_ERROR(parse_gmt_lines({"S1\td\tA", "S1\td\tB"}, "x"), ErrorKind::DuplicateId, "S1");
  CHECK_LACOGSEA_ERROR(parse_gmt_lines({"S1\td\tA", "S2\tonly"}, "x"), ErrorKind::Format, "line 2");
}

TEST_CASE("parse_gmt ignores member order") {
  const auto a = parse_gmt_lines({"S\td\tC\tA\tB"}, "x");
  const auto b = parse_gmt_lines({"S\td\tB\tC\tA"}, "x");
  CHECK(a.sets[0].members == b.sets[0].members);
}

TEST_CASE("filter_gene_sets applies the size window after intersection") {
  std::vector<std::string> lines;
  auto members = [](int from, int to) {
    std::string s;
    for (int i = from; i < to; ++i) s += "\tG" + std::to_string(i);
    return s;
  };
  std::unordered_set<std::string> universe;
  for (int i = 0; i < 1000; ++i) universe.insert("G" + std::to_string(i));

  SUBCASE("set with 4 of 10 members in the universe and min 5 is dropped") {
    std::unordered_set<std::string> small{"G0", "G1", "G2", "G3"};
    const auto c = parse_gmt_lines({"S\td" + members(0, 10)}, "x");
    const auto f = filter_gene_sets(c, small, 5, 500);
    CHECK(f.collection.sets.empty());
    REQUIRE(f.dropped.size() == 1);
    CHECK(f.dropped[0].reason == "too_small:4");
  }
  SUBCASE("fully covered set inside the window is kept intact") {
    const auto c = parse_gmt_lines({"S\td" + members(0, 10)}, "x");
    const auto f = filter_gene_sets(c, universe, 5, 500);
    REQUIRE(f.collection.sets.size() == 1);
    CHECK(f.collection.sets[0].members == c.sets[0].members);
  }
  SUBCASE("sizes 10, 20, 600 against [15, 500] keep only the size-20 set") {
    const auto c = parse_gmt_lines({"A\td" + members(0, 10), "B\td" + members(0, 20), "C\td" + members(0, 600)}, "x");
    const auto f = filter_gene_sets(c, universe, 15, 500);
    REQUIRE(f.collection.sets.size() == 1);
    CHECK(f.collection.sets[0].id == "B");
    CHECK(f.dropped.size() == 2);
    CHECK(format_filter_report(f) == "id\treason\nA\ttoo_small:10\nC\ttoo_large:600\n");
  }
  SUBCASE("filtering is idempotent") {
    const auto c = parse_gmt_lines({"A\td" + members(990, 1010), "B\td" + members(0, 20)}, "x");
    const auto once = filter_gene_sets(c, universe, 5, 500);
    const auto twice = filter_gene_sets(once.collection, universe, 5, 500);
    CHECK(format_gmt(once.collection) == format_gmt(twice.collection));
  }
  SUBCASE("bad arguments") {
    const auto c = parse_gmt_lines({"A\td" + members(0, 10)}, "x");
    CHECK_LACOGSEA_ERROR(filter_gene_sets(c, {}, 5, 500), ErrorKind::InvalidArgument, "empty gene universe");
    CHECK_LACOGSEA_ERROR(filter_gene_sets(c, universe, 1, 500), ErrorKind::InvalidArgument, "min_size");
    CHECK_LACOGSEA_ERROR(filter_gene_sets(c, universe, 20, 10), ErrorKind::InvalidArgument, "min_size");
  }
}

TEST_CASE("standardize_genes uses the population standard deviation") {
  const auto r = standardize_genes(log_matrix({{1, 2, 3}, {5, 5, 5}, {0, 10, 2}}));
  REQUIRE(r.matrix.genes() == 2);
  CHECK(r.removed == std::vector<std::string>{"g1"});
  const double s = std::sqrt(1.5);
  CHECK(r.matrix.values(0, 0) == doctest::Approx(-s).epsilon(1e-15));
  CHECK(std::abs(r.matrix.values(0, 1)) < 1e-15);
  CHECK(r.matrix.values(0, 2) == doctest::Approx(s).epsilon(1e-15));
  CHECK(r.moments[0].mean == 2.0);
  CHECK(r.moments[0].sd == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  CHECK(format_standardize_report(r).find("g1\tremoved\tzero_variance") != std::string::npos);
}

TEST_CASE("standardize_genes output has zero mean and unit sd and is idempotent") {
  ExpressionMatrix m = log_matrix({{0.1, 4, 2.2, 9, 3}, {100, 101, 99, 100.5, 98}, {-3, 3, -3, 3, 0}});
  const auto once = standardize_genes(m);
  for (Eigen::Index g = 0; g < once.matrix.genes(); ++g) {
    const auto row = once.matrix.values.row(g);
    const double mean = row.mean();
    const double sd = std::sqrt((row.array() - mean).square().mean());
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(sd - 1.0) < 1e-10);
  }
  const auto twice = standardize_genes(once.matrix);
  CHECK((twice.matrix.values - once.matrix.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("standardize_genes rejects all-constant and untransformed input") {
  CHECK_LACOGSEA_ERROR(standardize_genes(log_matrix({{1, 1, 1}, {2, 2, 2}})), ErrorKind::Numeric, "zero variance");
  ExpressionMatrix raw = log_matrix({{1, 2, 3}});
  raw.transformed = false;
  CHECK_LACOGSEA_ERROR(standardize_genes(raw), ErrorKind::InvalidArgument, "log-transformed");
}

TEST_CASE("analysis entry points require G >= 2 and N >= 3") {
  CHECK_LACOGSEA_ERROR(log_matrix({{1, 2}, {3, 4}}).require_analysis_shape("x"), ErrorKind::Shape, "3 samples");
  CHECK_NOTHROW(log_matrix({{1, 2, 3}, {3, 4, 5}}).require_analysis_shape("x"));
}

TEST_CASE("intersect_universes keeps the first matrix's order") {
  auto a = log_matrix({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
  auto b = log_matrix({{1, 2, 3}, {1, 2, 3}});
  b.gene_ids = {"g2", "g0"};
  CHECK(intersect_universes({&a, &b}) == std::vector<std::string>{"g0", "g2"});
}
