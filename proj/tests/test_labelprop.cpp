#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "gkm/error.hpp"
#include "gkm/labelprop.hpp"
#include "gkm/random.hpp"
#include "oracles.hpp"

using namespace gkm;

using gkm::test::brute_force_propagation;
using gkm::test::random_propagation_problem;
using gkm::test::unit_chain;

TEST_CASE("chain examples") {
  const auto f3 = solve_exact(unit_chain(3));
  CHECK(std::abs(f3[1]) <= 1e-15);
  const auto f4 = solve_exact(unit_chain(4));
  CHECK(std::abs(f4[1] - 1.0 / 3.0) <= 1e-10);
  CHECK(std::abs(f4[2] + 1.0 / 3.0) <= 1e-10);
  CHECK(f4[0] == 1.0);
  CHECK(f4[3] == -1.0);
  CHECK(threshold_labels(f4) == std::vector<int>{1, 1, -1, -1});
}

TEST_CASE("fully labeled problem") {
  PropagationProblem p;
  p.vertex_count = 3;
  p.labels = {1.0, -1.0, 1.0};
  const auto f = solve_exact(p);
  CHECK(f == std::vector<double>{1.0, -1.0, 1.0});
  CHECK(propagation_objective(p, f) == 0.0);
}

TEST_CASE("threshold examples") {
  CHECK(threshold_labels(std::vector<double>{0.2, 0.0, -0.1}) == std::vector<int>{1, 1, -1});
  CHECK(threshold_labels(std::vector<double>{0.5, 3.0}) == std::vector<int>{1, 1});
}

TEST_CASE("exact solve matches brute-force minimisation") {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_propagation_problem(rng);
    const auto exact = solve_exact(p);
    const auto brute = brute_force_propagation(p);
    double worst = 0;
    for (std::size_t i = 0; i < exact.size(); ++i)
      worst = std::max(worst, std::abs(exact[i] - brute[i]));
    CHECK(worst <= 1e-6);
    CHECK(propagation_objective(p, exact) <= propagation_objective(p, brute) + 1e-9);
  }
}

TEST_CASE("maximum principle and scale equivariance") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_propagation_problem(rng);
    const auto f = solve_exact(p);
    double lo = 1, hi = -1;
    for (const auto& y : p.labels)
      if (y) {
        lo = std::min(lo, *y);
        hi = std::max(hi, *y);
      }
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(f[i] >= lo - 1e-12);
      CHECK(f[i] <= hi + 1e-12);
    }
    const double c = rng.uniform(0.1, 10);
    for (Edge& e : p.edges) e.weight *= c;
    const auto g = solve_exact(p);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f[i] - g[i]) <= 1e-10);
  }
}

TEST_CASE("errors") {
  PropagationProblem p;
  p.vertex_count = 4;
  p.edges = {{0, 1, 1.0}, {2, 3, 1.0}};
  p.labels = {1.0, std::nullopt, std::nullopt, std::nullopt};
  try {
    solve_exact(p);
    FAIL("expected DisconnectedUnlabeled");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DisconnectedUnlabeled);
  }
  p.labels = {std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  CHECK_THROWS_AS(solve_exact(p), Error);
}

TEST_CASE("vertex label file") {
  std::istringstream in("+1\n?\n-1\n0\n1\n");
  const auto labels = read_vertex_labels(in);
  REQUIRE(labels.size() == 5);
  CHECK(*labels[0] == 1.0);
  CHECK_FALSE(labels[1].has_value());
  CHECK(*labels[2] == -1.0);
  CHECK_FALSE(labels[3].has_value());
  CHECK(*labels[4] == 1.0);
  std::istringstream bad("2\n");
  CHECK_THROWS_AS(read_vertex_labels(bad), Error);
}
