#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gkm/dataset.hpp"
#include "gkm/graph.hpp"
#include "gkm/kernel.hpp"
#include "gkm/optimizer.hpp"

namespace gkm {

struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
};

/// Positive class is +1.
struct EvalReport {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;  // 0 when precision + recall = 0
  Confusion confusion;
  double wall_time = 0;  // seconds spent predicting
};

EvalReport report_from_confusion(const Confusion& c);

/// Scores the model's averaged iterate on a fully labeled dataset.
EvalReport evaluate(const ModelState& model, const Dataset& truth);

inline constexpr std::size_t kReferenceOptimumMaxPoints = 200;

struct ReferenceOptimum {
  Expansion coefficients;
  double J_star = 0;
  /// Certified J(w) − J* upper bound for the returned point.
  double residual = 0;
  std::uint64_t newton_steps = 0;
};

/// Deterministic minimiser of J for small problems (n <= 200).
///
/// Works in an exact finite-dimensional embedding of span{Φ(x_i)} taken
/// from the eigendecomposition of the Gram matrix, so the ½‖w‖² term keeps
/// its identity Hessian. Differentiable objectives are minimised by damped
/// Newton to gradient norm 10⁻⁹. Kinks (hinge, l1, ε-insensitive losses
/// and p = 1) are smoothed by a parameter driven to 10⁻¹⁰; each smoothed
/// objective bounds J from below, which certifies the residual.
///
/// Errors: InvalidArgument (too many points), NotConverged.
ReferenceOptimum solve_reference_optimum(const Dataset& data, const EdgeSet& edges,
                                         const TrainConfig& config, const KernelSpec& kernel);

struct ConvergenceConfig {
  std::string name;
  TrainConfig train;  // iterations and seed are overridden per cell
  KernelSpec kernel{1.0, 1.0};
};

struct ConvergenceSeries {
  ConvergenceConfig config;
  double J_star = 0;
  double oracle_residual = 0;
  std::optional<double> G;  // set when the configuration is certified
  /// delta_jt[k][s] = (J(w̄_{T+1}) − J*)·T for T = T_grid[k], seed s.
  std::vector<std::vector<double>> delta_jt;
  /// Test accuracy on the unlabeled points with revealed truth.
  std::vector<std::vector<double>> accuracy;

  double median_delta_jt(std::size_t k) const;
};

struct ConvergenceRun {
  std::vector<std::uint64_t> T_grid;
  std::vector<std::uint64_t> seeds;
  std::vector<ConvergenceSeries> series;
};

/// Trains every (config, T, seed) cell and records ΔJT against the config's
/// reference optimum. `data` must be within the reference-optimum cap.
ConvergenceRun run_convergence_experiment(const Dataset& data, const GraphSpec& graph,
                                          std::span<const ConvergenceConfig> configs,
                                          std::span<const std::uint64_t> T_grid,
                                          std::span<const std::uint64_t> seeds);

/// Long format: `config,loss,p,T,seed,delta_jt,accuracy,J_star,G`.
void write_convergence_csv(std::ostream& out, const ConvergenceRun& run);

double median(std::vector<double> values);

}  // namespace gkm
