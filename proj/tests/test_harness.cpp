#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "gkm/error.hpp"
#include "gkm/graph.hpp"
#include "gkm/harness.hpp"
#include "test_support.hpp"

using namespace gkm;

TEST_CASE("report arithmetic") {
  const auto r = report_from_confusion({1, 1, 0, 0});
  CHECK(r.precision == 0.5);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(r.accuracy == 0.5);

  const auto none = report_from_confusion({0, 0, 0, 7});
  CHECK(none.accuracy == 0.0);
  CHECK(none.f1 == 0.0);

  Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    Confusion c{rng.uniform_index(50), rng.uniform_index(50), rng.uniform_index(50),
                rng.uniform_index(50)};
    if (c.total() == 0) continue;
    const auto rep = report_from_confusion(c);
    CHECK(rep.accuracy == static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total()));
    CHECK(rep.accuracy >= 0.0);
    CHECK(rep.f1 <= 1.0);
  }
}

TEST_CASE("evaluate on perfect and inverted models") {
  const auto truth = gkm::test::line_dataset({-1, 1}, {-1, 1});
  ModelState model;
  model.kernel = KernelSpec(1, 1);
  model.points = {gkm::test::point1d(-1), gkm::test::point1d(1)};
  model.averaged = {{-1.0, 1.0}, 1.0};
  model.current = model.averaged;
  const auto good = evaluate(model, truth);
  CHECK(good.accuracy == 1.0);
  CHECK(good.f1 == 1.0);
  model.averaged.scale = -1.0;
  const auto bad = evaluate(model, truth);
  CHECK(bad.accuracy == 0.0);
  CHECK(bad.f1 == 0.0);
}

TEST_CASE("reference optimum on a single labeled point") {
  const auto data = gkm::test::line_dataset({0.5}, {1});
  const auto edges = EdgeSet::explicit_edges(1, {});
  TrainConfig config;
  config.C = 1;
  const auto opt = solve_reference_optimum(data, edges, config, KernelSpec(1, 1));
  CHECK(opt.J_star == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(opt.coefficients.at(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("reference optimum with vanishing trade-offs") {
  const auto data = gkm::test::random_dataset(3, 10, 3, 2);
  const auto edges = build_fully_connected(data, GraphSpec{});
  TrainConfig config;
  config.C = 1e-8;
  config.C_prime = 1e-8;
  const auto opt = solve_reference_optimum(data, edges, config, KernelSpec(1, 1));
  CHECK(std::abs(opt.J_star - 1e-8) <= 1e-9);  // hinge at w ≈ 0 costs C
  for (double c : opt.coefficients.folded()) CHECK(std::abs(c) <= 1e-7);
}

TEST_CASE("reference optimum lower-bounds trained objectives") {
  const auto data = gkm::test::random_dataset(4, 14, 4, 2);
  const auto edges = build_fully_connected(data, GraphSpec{});
  const KernelSpec kernel(1, 1);
  const PointKernel pk(kernel, data.points);
  for (const LossSpec loss : {LossSpec{Hinge{}}, LossSpec{Logistic{}}, LossSpec{L1{}},
                              LossSpec{SmoothHinge{0.5}}, LossSpec{EpsInsensitive{0.2}}}) {
    for (const double p : {1.0, 2.0, 3.0}) {
      TrainConfig config;
      config.loss = loss;
      config.smoothness.p = p;
      config.C_prime = 0.01;
      config.iterations = 2000;
      const auto opt = solve_reference_optimum(data, edges, config, kernel);
      CHECK(opt.residual <= 1e-8);
      const double J_opt =
          objective(opt.coefficients, data, edges, config, pk, ObjectiveMode::exact());
      CHECK(J_opt - opt.J_star <= opt.residual + 1e-12);
      CHECK(J_opt >= opt.J_star - 1e-12);
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        config.seed = seed;
        const auto model = train(data, edges, config, pk).model;
        CHECK(objective(model.averaged, data, edges, config, pk, ObjectiveMode::exact()) >=
              opt.J_star - 1e-9);
      }
    }
  }
}

TEST_CASE("reference optimum rejects large problems") {
  const auto data = gkm::test::random_dataset(1, 201, 5, 2);
  const auto edges = build_fully_connected(data, GraphSpec{});
  CHECK_THROWS_AS(solve_reference_optimum(data, edges, TrainConfig{}, KernelSpec(1, 1)), Error);
}

TEST_CASE("convergence experiment is deterministic and sane") {
  auto data = hide_labels(synth_two_gaussians(20, 2, 3.0, 2), 0.7, 1);
  ConvergenceConfig cfg;
  cfg.name = "hinge-p2";
  cfg.train.C_prime = 0.05;
  const std::vector<ConvergenceConfig> configs{cfg};
  const std::vector<std::uint64_t> T_grid{50, 200};
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto a = run_convergence_experiment(data, GraphSpec{}, configs, T_grid, seeds);
  const auto b = run_convergence_experiment(data, GraphSpec{}, configs, T_grid, seeds);
  REQUIRE(a.series.size() == 1);
  const auto& s = a.series[0];
  CHECK(s.delta_jt == b.series[0].delta_jt);
  REQUIRE(s.G.has_value());
  for (std::size_t k = 0; k < T_grid.size(); ++k)
    for (double d : s.delta_jt[k])
      CHECK(d >= -10 * s.oracle_residual * static_cast<double>(T_grid[k]));
  std::stringstream csv;
  write_convergence_csv(csv, a);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "config,loss,p,T,seed,delta_jt,accuracy,J_star,G");
}

TEST_CASE("median") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
}
