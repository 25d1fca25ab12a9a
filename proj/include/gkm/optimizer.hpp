#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gkm/dataset.hpp"
#include "gkm/graph.hpp"
#include "gkm/kernel.hpp"
#include "gkm/loss.hpp"

namespace gkm {

struct ObjectiveMode {
  enum class Kind { Exact, Sampled };
  Kind kind = Kind::Exact;
  std::uint64_t samples = 0;  // edge draws for Sampled

  static ObjectiveMode exact() { return {}; }
  static ObjectiveMode sampled(std::uint64_t m) { return {Kind::Sampled, m}; }
};

/// Which iterate feeds the running average at step t.
///
/// PreUpdate averages w_t (the point where the gradient was taken), giving
/// w̄_{T+1} = 2/(T(T+1)) Σ_{i=1..T} i·w_i, the weighting the O(1/T) rate
/// is stated for. PostUpdate averages w_{t+1} instead.
enum class AveragingRule { PreUpdate, PostUpdate };

struct TrainConfig {
  double C = 1.0;
  double C_prime = 0.05;
  LossSpec loss;
  SmoothnessSpec smoothness;
  std::uint64_t iterations = 1;  // T
  std::uint64_t seed = 1;
  std::uint64_t diagnostics_every = 0;  // 0 disables the trace
  std::optional<ObjectiveMode> objective_mode;  // unset: exact iff |E| <= 1e5
  AveragingRule averaging = AveragingRule::PreUpdate;

  void validate() const;
};

/// n for n <= 5000, else 0.2·n.
std::uint64_t default_iterations(std::size_t n) noexcept;

/// w = scale · Σ coef_i Φ(x_i), one coefficient per training point.
struct Expansion {
  std::vector<double> coef;
  double scale = 1.0;

  double at(std::size_t i) const noexcept { return scale * coef[i]; }
  std::size_t size() const noexcept { return coef.size(); }
  /// Coefficients with the scale folded in.
  std::vector<double> folded() const;
};

/// ‖w‖ = (coefᵀ K coef)^½ · |scale|, summed over nonzero coefficients only.
double hilbert_norm(const Expansion& w, const PointKernel& kernel);

/// wᵀΦ(x_i) for a training point.
double decision_at(const Expansion& w, const PointKernel& kernel, std::size_t i);

struct ObjectiveTerms {
  double regularizer = 0;  // ‖w‖²/2
  double labeled = 0;      // (C/l) Σ l(w; x_i, y_i)
  double smoothness = 0;   // (C′/|E|) Σ μ l_p(wᵀΦ_uv)
  double total() const noexcept { return regularizer + labeled + smoothness; }
};

inline constexpr std::uint64_t kDefaultEdgeCap = 10'000'000;

/// J(w). Exact mode enumerates E (EdgeEnumerationTooLarge above edge_cap);
/// Sampled(m) estimates the edge term from m uniform draws seeded by
/// `seed`. The labeled term is always exact.
ObjectiveTerms objective_terms(const Expansion& w, const Dataset& data, const EdgeSet& edges,
                               const TrainConfig& config, const PointKernel& kernel,
                               ObjectiveMode mode, std::uint64_t seed = 0,
                               std::uint64_t edge_cap = kDefaultEdgeCap);
double objective(const Expansion& w, const Dataset& data, const EdgeSet& edges,
                 const TrainConfig& config, const PointKernel& kernel, ObjectiveMode mode,
                 std::uint64_t seed = 0, std::uint64_t edge_cap = kDefaultEdgeCap);

struct TracePoint {
  std::uint64_t t;
  double J_avg;   // J(w̄_{t+1})
  double norm_w;  // ‖w_{t+1}‖
  double norm_g;  // ‖g_t‖
};

struct Diagnostics {
  std::vector<TracePoint> trace;
};

/// Trace as CSV with header `t,J_avg,norm_w,norm_g`.
void write_trace_csv(std::ostream& out, const Diagnostics& diagnostics);

/// Trained model. Owns copies of the training points so it can predict
/// and be saved on its own.
struct ModelState {
  KernelSpec kernel{1.0, 1.0};
  TrainConfig config;
  double sigma_s = 1.0;
  std::vector<SparseVector> points;
  Expansion current;   // w_{T+1}, diagnostics only
  Expansion averaged;  // w̄_{T+1}, used for prediction
  std::uint64_t iterations = 0;
};

enum class Iterate { Current, Averaged };

double decision_value(const ModelState& model, const SparseVector& x,
                      Iterate which = Iterate::Averaged);
/// +1 iff the decision value is >= 0.
int predict(const ModelState& model, const SparseVector& x,
            Iterate which = Iterate::Averaged);
double hilbert_norm(const ModelState& model, Iterate which);

/// Line-oriented text model. Only points with a nonzero coefficient are
/// written; coefficients are stored with the scale folded in.
void save_model(std::ostream& out, const ModelState& model);
ModelState load_model(std::istream& in);

/// One iteration's sampled indices and gradient pieces.
struct StepInfo {
  std::uint64_t t;
  std::size_t label_index;
  Edge edge;
  double o_label;     // w_tᵀΦ(x_i)
  double o_edge;      // w_tᵀ(Φ(x_u) − Φ(x_v))
  double loss_coef;   // C·s_loss
  double edge_coef;   // C′·μ·s_p
  double norm_w;      // ‖w_t‖ (tracked incrementally)
  double norm_g;      // ‖g_t‖
};

/// Stochastic primal solver. w and w̄ are kernel expansions over the
/// training points; each step changes at most three coefficients and two
/// scale factors.
///
/// Step t (from 1): draw i uniform on the labeled points and (u, v) uniform
/// on E, then
///   w_{t+1} = (t−1)/(t+1)·w_t − 2/(t+1)·(C s_loss Φ(x_i) + C′ μ s_p Φ_uv)
/// and fold w_t (PreUpdate) or w_{t+1} (PostUpdate) into the average with
/// weight t. The running sum Σ i·w_i is stored as offset + weight·α so it
/// never has to be touched as a whole.
class Trainer {
 public:
  /// Errors: NoLabeledData, EmptyEdgeSet, InvalidArgument/InvalidLabel from
  /// config and labels. `kernel` must index data.points.
  Trainer(const Dataset& data, const EdgeSet& edges, const TrainConfig& config,
          const PointKernel& kernel);

  /// Runs one iteration. Throws Error(NonFiniteState) if the iterate
  /// stops being finite.
  StepInfo step();

  /// Index of the next iteration (1 before the first step).
  std::uint64_t t() const noexcept { return t_; }

  Expansion current() const;   // w_t
  Expansion averaged() const;  // w̄_t
  /// ‖w_t‖², tracked incrementally and resynchronised on renormalisation.
  double current_norm_sq() const noexcept { return norm_sq_; }

  ModelState model() const;

 private:
  void add_to_current(std::size_t i, double delta);
  void renormalize();
  void accumulate_average();

  const Dataset& data_;
  const EdgeSet& edges_;
  TrainConfig config_;
  const PointKernel& kernel_;
  Rng rng_;

  std::uint64_t t_ = 1;
  std::uint64_t since_renorm_ = 0;
  double scale_ = 1.0;              // w = scale_·alpha_
  std::vector<double> alpha_;
  double avg_weight_ = 0.0;         // Σ i·w_i = avg_offset_ + avg_weight_·alpha_
  std::vector<double> avg_offset_;
  std::vector<std::size_t> support_;
  std::vector<char> in_support_;
  double norm_sq_ = 0.0;
};

struct TrainResult {
  ModelState model;
  Diagnostics diagnostics;
};

using StepObserver = std::function<void(const Trainer&, const StepInfo&)>;

/// Runs config.iterations steps. Pass a cached PointKernel to avoid
/// recomputing kernel values; otherwise kernel values are evaluated on
/// demand.
TrainResult train(const Dataset& data, const EdgeSet& edges, const TrainConfig& config,
                  const KernelSpec& kernel, const StepObserver& observer = {});
TrainResult train(const Dataset& data, const EdgeSet& edges, const TrainConfig& config,
                  const PointKernel& kernel, const StepObserver& observer = {});

}  // namespace gkm
