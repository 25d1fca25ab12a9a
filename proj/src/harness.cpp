#include "gkm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>

#include "gkm/bounds.hpp"
#include "gkm/error.hpp"

namespace gkm {

EvalReport report_from_confusion(const Confusion& c) {
  EvalReport r;
  r.confusion = c;
  const double total = static_cast<double>(c.total());
  r.accuracy = total > 0 ? static_cast<double>(c.tp + c.tn) / total : 0.0;
  r.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  r.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  r.f1 = r.precision + r.recall > 0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

EvalReport evaluate(const ModelState& model, const Dataset& truth) {
  if (truth.unlabeled() != 0)
    throw Error(ErrorKind::InvalidArgument, "evaluation needs a fully labeled dataset");
  const auto start = std::chrono::steady_clock::now();
  Confusion c;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const bool predicted_positive = predict(model, truth.points[k]) > 0;
    const bool positive = truth.labels[k] > 0;
    if (predicted_positive) (positive ? c.tp : c.fp) += 1;
    else (positive ? c.fn : c.tn) += 1;
  }
  EvalReport r = report_from_confusion(c);
  r.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "median of nothing");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double ConvergenceSeries::median_delta_jt(std::size_t k) const { return median(delta_jt.at(k)); }

ConvergenceRun run_convergence_experiment(const Dataset& data, const GraphSpec& graph,
                                          std::span<const ConvergenceConfig> configs,
                                          std::span<const std::uint64_t> T_grid,
                                          std::span<const std::uint64_t> seeds) {
  if (data.size() > kReferenceOptimumMaxPoints)
    throw Error(ErrorKind::InvalidArgument, "convergence experiment needs a reference optimum");
  const EdgeSet edges = build_graph(data, graph);
  const Dataset test = revealed_unlabeled(data);

  ConvergenceRun run;
  run.T_grid.assign(T_grid.begin(), T_grid.end());
  run.seeds.assign(seeds.begin(), seeds.end());
  for (const ConvergenceConfig& cc : configs) {
    ConvergenceSeries series;
    series.config = cc;
    const PointKernel kernel = PointKernel::cached(cc.kernel, data.points);
    const ReferenceOptimum optimum = solve_reference_optimum(data, edges, cc.train, cc.kernel);
    series.J_star = optimum.J_star;
    series.oracle_residual = optimum.residual;
    const double R = cc.kernel.sigma_f();
    const BoundsReport bounds = compute_bounds(cc.train.C, cc.train.C_prime, cc.train.smoothness.p,
                                               R, gradient_bound_A(cc.train.loss, R));
    series.G = bounds.G;

    for (std::uint64_t T : T_grid) {
      std::vector<double> gaps;
      std::vector<double> accuracies;
      for (std::uint64_t seed : seeds) {
        TrainConfig config = cc.train;
        config.iterations = T;
        config.seed = seed;
        config.diagnostics_every = 0;
        const TrainResult result = train(data, edges, config, kernel);
        const double J = objective(result.model.averaged, data, edges, config, kernel,
                                   ObjectiveMode::exact());
        gaps.push_back((J - optimum.J_star) * static_cast<double>(T));
        accuracies.push_back(test.size() > 0 ? evaluate(result.model, test).accuracy : 0.0);
      }
      series.delta_jt.push_back(std::move(gaps));
      series.accuracy.push_back(std::move(accuracies));
    }
    run.series.push_back(std::move(series));
  }
  return run;
}

void write_convergence_csv(std::ostream& out, const ConvergenceRun& run) {
  out << "config,loss,p,T,seed,delta_jt,accuracy,J_star,G\n";
  char buf[256];
  for (const auto& s : run.series) {
    for (std::size_t k = 0; k < run.T_grid.size(); ++k) {
      for (std::size_t j = 0; j < run.seeds.size(); ++j) {
        std::snprintf(buf, sizeof buf, ",%s,%.17g,%llu,%llu,%.17g,%.17g,%.17g,%.17g\n",
                      loss_token(s.config.train.loss).c_str(), s.config.train.smoothness.p,
                      static_cast<unsigned long long>(run.T_grid[k]),
                      static_cast<unsigned long long>(run.seeds[j]), s.delta_jt[k][j],
                      s.accuracy[k][j], s.J_star, s.G.value_or(0.0));
        out << s.config.name << buf;
      }
    }
  }
}

}  // namespace gkm
