#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "gkm/error.hpp"
#include "gkm/graph.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace gkm;
using gkm::test::line_dataset;

namespace {

std::set<std::pair<std::uint32_t, std::uint32_t>> pairs_of(const EdgeSet& edges) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  edges.for_each([&](const Edge& e) { out.insert({e.u, e.v}); });
  return out;
}

void check_edge_invariants(const EdgeSet& edges, std::size_t labeled) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  edges.for_each([&](const Edge& e) {
    CHECK(e.u < e.v);
    CHECK_FALSE((e.u < labeled && e.v < labeled));
    CHECK(e.weight > 0.0);
    CHECK(e.weight <= 1.0);
    CHECK(seen.insert({e.u, e.v}).second);
  });
}

double chi_square(const EdgeSet& edges, std::uint64_t draws, std::uint64_t seed) {
  const double stat = gkm::test::edge_chi_square(edges, draws, seed);
  REQUIRE(stat >= 0.0);
  return stat;
}

}  // namespace

TEST_CASE("edge_weight examples and properties") {
  const auto a = gkm::test::point1d(0.0);
  const auto b = gkm::test::point1d(std::sqrt(2.0) * 1.5);
  CHECK(edge_weight(a, a, 0.3) == 1.0);
  CHECK(edge_weight(a, b, 1.5) == doctest::Approx(0.36787944117144233).epsilon(1e-14));
  CHECK(edge_weight(a, b, 1.5) == edge_weight(b, a, 1.5));

  Rng rng(5);
  for (int k = 0; k < 300; ++k) {
    const auto x = gkm::test::random_sparse(rng, 4);
    const auto y = gkm::test::random_sparse(rng, 4);
    const double s = rng.uniform(0.2, 4.0);
    const double w = edge_weight(x, y, s);
    CHECK(w > 0.0);
    CHECK(w <= 1.0);
    CHECK(w == edge_weight(y, x, s));
    CHECK((w == 1.0) == (squared_distance(x, y) == 0.0));
  }
}

TEST_CASE("fully connected examples") {
  const auto three = line_dataset({0, 1, 2}, {1, -1, 0});
  const auto e3 = build_fully_connected(three, GraphSpec{});
  CHECK(e3.size() == 2);
  CHECK(pairs_of(e3) == std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 2}, {1, 2}});

  const auto two = line_dataset({0, 1}, {1, -1});
  CHECK_THROWS_AS(build_fully_connected(two, GraphSpec{}), Error);
  try {
    build_fully_connected(two, GraphSpec{});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyEdgeSet);
  }

  const auto four = line_dataset({0, 1, 2, 3}, {0, 0, 0, 0});
  CHECK(build_fully_connected(four, GraphSpec{}).size() == 6);
}

TEST_CASE("implicit edge count matches enumeration") {
  std::vector<SparseVector> points;
  for (int k = 0; k < 30; ++k) points.push_back(gkm::test::point1d(k));
  for (std::size_t n = 2; n <= 30; ++n) {
    for (std::size_t l = 0; l <= n; ++l) {
      const auto edges = EdgeSet::implicit(std::span(points).first(n), l, 1.0);
      std::uint64_t brute = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) brute += (i < l && j < l) ? 0 : 1;
      CHECK(edges.size() == brute);
      std::uint64_t visited = 0;
      edges.for_each([&](const Edge&) { ++visited; });
      CHECK(visited == brute);
      for (std::uint64_t k = 0; k < brute; k += 7) {
        const Edge e = edges.at(k);
        CHECK(e.u < e.v);
        CHECK(e.v >= l);
      }
    }
  }
}

TEST_CASE("implicit at() follows for_each order") {
  const auto data = gkm::test::random_dataset(9, 9, 3, 2);
  const auto edges = build_fully_connected(data, GraphSpec{});
  std::uint64_t k = 0;
  edges.for_each([&](const Edge& e) { CHECK(edges.at(k++) == e); });
}

TEST_CASE("knn examples") {
  const auto data = line_dataset({0, 1, 10}, {0, 0, 0});
  GraphSpec spec{Knn{1}, 1.0};
  CHECK(pairs_of(build_knn(data, spec)) ==
        std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}, {1, 2}});

  spec.kind = Knn{2};
  const auto saturated = build_knn(data, spec);
  CHECK(pairs_of(saturated) == pairs_of(build_fully_connected(data, spec)));

  // Labeled mutual nearest neighbours.
  const auto labeled = line_dataset({0, 0.1, 5, 6}, {1, -1, 0, 0});
  spec.kind = Knn{1};
  const auto edges = build_knn(labeled, spec);
  CHECK(pairs_of(edges).count({0, 1}) == 0);
  check_edge_invariants(edges, 2);

  spec.kind = Knn{3};
  CHECK_THROWS_AS(build_knn(data, spec), Error);
}

TEST_CASE("knn ties go to the lower index") {
  // Point 1 is equidistant from 0 and 2.
  const auto data = line_dataset({0, 1, 2}, {0, 0, 0});
  const auto edges = build_knn(data, GraphSpec{Knn{1}, 1.0});
  // 0 → 1, 1 → 0 (tie with 2), 2 → 1.
  CHECK(pairs_of(edges) == std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}, {1, 2}});
}

TEST_CASE("eps graph examples") {
  const auto data = line_dataset({0, 1, 10}, {0, 0, 0});
  CHECK(pairs_of(build_eps(data, GraphSpec{EpsNn{1.5}, 1.0})) ==
        std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}});
  CHECK(build_eps(data, GraphSpec{EpsNn{100}, 1.0}).size() == 3);
  CHECK(build_eps(data, GraphSpec{EpsNn{0.5}, 1.0}).empty());
}

TEST_CASE("constructed graphs satisfy the edge invariants") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto data = gkm::test::random_dataset(seed, 15, 5, 3);
    check_edge_invariants(build_fully_connected(data, GraphSpec{}), 5);
    check_edge_invariants(build_knn(data, GraphSpec{Knn{3}, 0.7}), 5);
    check_edge_invariants(build_eps(data, GraphSpec{EpsNn{1.5}, 0.7}), 5);
  }
}

TEST_CASE("explicit edge validation") {
  CHECK_THROWS_AS(EdgeSet::explicit_edges(3, {{1, 1, 0.5}}), Error);
  CHECK_THROWS_AS(EdgeSet::explicit_edges(3, {{0, 1, 0.5}, {1, 0, 0.5}}), Error);
  CHECK_THROWS_AS(EdgeSet::explicit_edges(3, {{0, 1, 0.0}}), Error);
  CHECK_THROWS_AS(EdgeSet::explicit_edges(3, {{0, 3, 0.5}}), Error);
  const auto e = EdgeSet::explicit_edges(3, {{2, 0, 0.5}});
  CHECK(e.at(0) == Edge{0, 2, 0.5});
}

TEST_CASE("sampling a single explicit edge") {
  const auto e = EdgeSet::explicit_edges(4, {{1, 3, 0.25}});
  Rng rng(1);
  for (int k = 0; k < 100; ++k) CHECK(sample_edge(e, rng) == Edge{1, 3, 0.25});
  const auto empty = EdgeSet::explicit_edges(4, {});
  CHECK_THROWS_AS(sample_edge(empty, rng), Error);
}

TEST_CASE("two-edge sampling is balanced") {
  const auto data = line_dataset({0, 1, 2}, {1, -1, 0});
  const auto edges = build_fully_connected(data, GraphSpec{});
  Rng rng(11);
  int first = 0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) first += sample_edge(edges, rng).u == 0 ? 1 : 0;
  // 4 standard errors of a fair coin.
  CHECK(std::abs(first - draws / 2) <= 4 * std::sqrt(draws * 0.25));
}

TEST_CASE("implicit sampling passes chi-square at n = 12") {
  std::vector<SparseVector> points;
  for (int k = 0; k < 12; ++k) points.push_back(gkm::test::point1d(k));
  // l = 4: |E| = 66 − 6 = 60.
  CHECK(chi_square(EdgeSet::implicit(points, 4, 1.0), 1'000'000, 21) <= gkm::test::kChi2Crit59);
  CHECK(chi_square(EdgeSet::implicit(points, 0, 1.0), 1'000'000, 22) <= gkm::test::kChi2Crit65);
  CHECK(chi_square(EdgeSet::implicit(points, 1, 1.0), 1'000'000, 23) <= gkm::test::kChi2Crit65);
}

TEST_CASE("implicit sampling at n = 100, l = 20") {
  std::vector<SparseVector> points;
  for (int k = 0; k < 100; ++k) points.push_back(gkm::test::point1d(k));
  const auto edges = EdgeSet::implicit(points, 20, 1.0);
  REQUIRE(edges.size() == 4950 - 190);
  const double df = static_cast<double>(edges.size() - 1);
  const double stat = chi_square(edges, 1'000'000, 31);
  // Chi-square statistic within 3 standard deviations of its mean.
  CHECK(std::abs(stat - df) <= 3 * std::sqrt(2 * df));
}

TEST_CASE("edge text round trip") {
  const auto data = gkm::test::random_dataset(4, 10, 3, 2);
  const auto edges = build_knn(data, GraphSpec{Knn{2}, 0.9});
  std::stringstream buf;
  write_edges(buf, edges);
  const auto back = read_edges(buf, 10);
  REQUIRE(back.size() == edges.size());
  for (std::uint64_t k = 0; k < edges.size(); ++k) CHECK(back.at(k) == edges.at(k));
}

TEST_CASE("graph spec validation") {
  CHECK_THROWS_AS((GraphSpec{Knn{0}, 1.0}.validate()), Error);
  CHECK_THROWS_AS((GraphSpec{EpsNn{0.0}, 1.0}.validate()), Error);
  CHECK_THROWS_AS((GraphSpec{FullyConnected{}, -1.0}.validate()), Error);
}
