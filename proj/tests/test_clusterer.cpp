#include <doctest.h>

#include <algorithm>
#include <random>

#include "opaque/clusterer.hpp"
#include "opaque/synthetic.hpp"

using namespace opaque;

namespace {

DistanceMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  std::vector<TransactionIndex> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = i;
  DistanceMatrix m(labels);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) m.set(i, j, rows[i][j]);
  return m;
}

std::vector<std::vector<TransactionIndex>> member_sets(const ClusterSet& cs) {
  std::vector<std::vector<TransactionIndex>> out;
  for (const auto& c : cs.clusters) out.push_back(c.members);
  return out;
}

// Naive average linkage: recompute every cluster pair's mean distance from
// the raw matrix at every step.
std::vector<std::vector<TransactionIndex>> naive_average_linkage(const DistanceMatrix& m, std::size_t k) {
  std::vector<std::vector<std::size_t>> groups(m.size());
  std::vector<std::size_t> node_id(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    groups[i] = {i};
    node_id[i] = i;
  }
  std::size_t next_id = m.size();
  while (groups.size() > k) {
    double best = 1e300;
    std::size_t bi = 0, bj = 0;
    std::pair<std::size_t, std::size_t> best_key{~std::size_t{0}, ~std::size_t{0}};
    for (std::size_t i = 0; i < groups.size(); ++i) {
      for (std::size_t j = i + 1; j < groups.size(); ++j) {
        double s = 0.0;
        for (auto x : groups[i])
          for (auto y : groups[j]) s += m(x, y);
        s /= static_cast<double>(groups[i].size() * groups[j].size());
        const std::pair<std::size_t, std::size_t> key{std::min(node_id[i], node_id[j]),
                                                      std::max(node_id[i], node_id[j])};
        if (s < best - 1e-12 || (std::abs(s - best) <= 1e-12 && key < best_key)) {
          best = s;
          best_key = key;
          bi = i;
          bj = j;
        }
      }
    }
    groups[bi].insert(groups[bi].end(), groups[bj].begin(), groups[bj].end());
    node_id[bi] = next_id++;
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bj));
    node_id.erase(node_id.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  std::vector<std::vector<TransactionIndex>> out;
  for (auto& g : groups) {
    std::vector<TransactionIndex> labels;
    for (auto x : g) labels.push_back(m.label(x));
    std::sort(labels.begin(), labels.end());
    out.push_back(labels);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("response distance matrix") {
  TransactionLibrary one;
  one.add({4, to_bytes("a"), to_bytes("xyz")});
  const auto m1 = response_distance_matrix(one);
  REQUIRE(m1.size() == 1);
  CHECK(m1(0, 0) == 0.0);

  TransactionLibrary two;
  two.add({1, to_bytes("a"), to_bytes("same")});
  two.add({2, to_bytes("b"), to_bytes("same")});
  CHECK(response_distance_matrix(two)(0, 1) == 0.0);

  CHECK_THROWS_AS(response_distance_matrix(TransactionLibrary{}), Error);
}

TEST_CASE("directory example matrix separates the operations") {
  const auto ex = directory_example_library();
  const auto m = response_distance_matrix(ex.library);
  double within = 0.0, across = 1.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      CHECK(m(i, j) == m(j, i));
      if (ex.labels[i] == ex.labels[j]) {
        within = std::max(within, m(i, j));
      } else {
        across = std::min(across, m(i, j));
      }
    }
  }
  CHECK(within < across);
}

TEST_CASE("cluster edge cases") {
  const auto m = from_rows({{0, 1, 2}, {1, 0, 3}, {2, 3, 0}});
  const auto one = cluster(m, 1);
  REQUIRE(one.clusters.size() == 1);
  CHECK(one.clusters[0].members == std::vector<TransactionIndex>{0, 1, 2});
  const auto all = cluster(m, 3);
  CHECK(member_sets(all) == std::vector<std::vector<TransactionIndex>>{{0}, {1}, {2}});
  CHECK_THROWS_AS(cluster(m, 0), Error);
  CHECK_THROWS_AS(cluster(m, 4), Error);
}

TEST_CASE("directory example with k = 2") {
  const auto lib = directory_example_library().library;
  const auto cs = cluster(response_distance_matrix(lib), 2);
  CHECK(member_sets(cs) ==
        std::vector<std::vector<TransactionIndex>>{{1, 13, 275, 490, 2273}, {24, 2487, 3106}});
  CHECK(cs.clusters[1].centroid == 24);
}

TEST_CASE("agglomeration agrees with a naive average-linkage oracle") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) rows[i][j] = rows[j][i] = static_cast<double>(rng() % 5) / 4.0;
    const auto m = from_rows(rows);
    for (std::size_t k = 1; k <= n; ++k) {
      auto got = member_sets(cluster(m, k));
      std::sort(got.begin(), got.end());
      CHECK(got == naive_average_linkage(m, k));
    }
  }
}

TEST_CASE("merge records") {
  const auto m = from_rows({{0, 0.1, 0.9}, {0.1, 0, 0.7}, {0.9, 0.7, 0}});
  const auto merges = agglomerate_average(m);
  REQUIRE(merges.size() == 2);
  CHECK(merges[0].left == 0);
  CHECK(merges[0].right == 1);
  CHECK(merges[0].distance == doctest::Approx(0.1));
  CHECK(merges[0].size == 2);
  CHECK(merges[1].distance == doctest::Approx(0.8));
  CHECK(merges[1].size == 3);
}

TEST_CASE("centroid") {
  const auto m = from_rows({{0, 0.5, 0.2, 0.9}, {0.5, 0, 0.4, 0.9}, {0.2, 0.4, 0, 0.9}, {0.9, 0.9, 0.9, 0}});
  const std::vector<TransactionIndex> single{3};
  CHECK(centroid(single, m) == 3);
  const std::vector<TransactionIndex> pair{1, 0};
  CHECK(centroid(pair, m) == 0);
  const std::vector<TransactionIndex> three{0, 1, 2};
  CHECK(centroid(three, m) == 2);
}

TEST_CASE("restrict_to keeps entries by label") {
  const auto m = from_rows({{0, 0.1, 0.2}, {0.1, 0, 0.3}, {0.2, 0.3, 0}});
  const std::vector<TransactionIndex> pick{2, 0};
  const auto r = m.restrict_to(pick);
  REQUIRE(r.size() == 2);
  CHECK(r.label(0) == 2);
  CHECK(r(0, 1) == doctest::Approx(0.2));
  CHECK(r.position_of(0) == 1);
}
